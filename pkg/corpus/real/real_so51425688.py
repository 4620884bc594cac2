"""CartPole DQN that keeps a fixed exploration probability for the whole run."""

import gym
import numpy as np
import tensorflow as tf

env = gym.make("CartPole-v0")

state_dim = 4
num_out = 2
discount = 0.95
explore_prob = 0.3

model = tf.keras.models.Sequential()
model.add(tf.keras.layers.Dense(20, input_dim=state_dim, activation="relu"))
model.add(tf.keras.layers.Dense(num_out))
model.compile(loss="mse", optimizer=tf.keras.optimizers.Adam(0.002))

for run in range(800):
    state = env.reset()
    state = np.reshape(state, (1, state_dim))
    finished = False
    while not finished:
        if np.random.rand() < explore_prob:
            action = np.random.randint(0, 2)
        else:
            action_values = model.predict(state)
            action = np.argmax(action_values[0])
        next_state, reward, finished, info = env.step(action)
        next_state = np.reshape(next_state, (1, state_dim))
        y = reward + discount * np.max(model.predict(next_state)[0])
        if finished:
            y = reward
        labels = model.predict(state)
        labels[0][action] = y
        model.fit(state, labels, epochs=1, verbose=0)
        state = next_state
env.close()
