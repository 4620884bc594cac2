"""CartPole DQN that finishes its run without releasing the environment."""

import random
from collections import deque

import gym
import numpy as np
import tensorflow as tf

env = gym.make("CartPole-v0")

inputs = 4
outputs = 2
gamma = 0.95
epsilon = 1.0
epsilon_stop = 0.05
epsilon_decay = 0.995
batch_size = 32
buffer_size = 4000
refresh_every = 200

bank = deque(maxlen=buffer_size)

agent_net = tf.keras.models.Sequential()
agent_net.add(tf.keras.layers.Dense(24, input_dim=inputs, activation="relu"))
agent_net.add(tf.keras.layers.Dense(24, activation="relu"))
agent_net.add(tf.keras.layers.Dense(outputs))
agent_net.compile(loss="mse", optimizer=tf.keras.optimizers.Adam(0.001))

stale_net = tf.keras.models.Sequential()
stale_net.add(tf.keras.layers.Dense(24, input_dim=inputs, activation="relu"))
stale_net.add(tf.keras.layers.Dense(24, activation="relu"))
stale_net.add(tf.keras.layers.Dense(outputs))
stale_net.set_weights(agent_net.get_weights())

frame = 0
for episode in range(400):
    state = env.reset()
    state = np.reshape(state, (1, inputs))
    done = False
    while not done:
        if np.random.rand() < epsilon:
            action = env.action_space.sample()
        else:
            ratings = agent_net.predict(state)
            action = np.argmax(ratings[0])
        after, reward, done, info = env.step(action)
        after = np.reshape(after, (1, inputs))
        bank.append((state, action, reward, after, done))
        state = after
        frame = frame + 1
        if frame % refresh_every == 0:
            stale_net.set_weights(agent_net.get_weights())
        if len(bank) > batch_size:
            drawn = random.sample(bank, batch_size)
            for s, a, r, s2, last in drawn:
                y = r + gamma * np.max(stale_net.predict(s2)[0])
                if last:
                    y = r
                goal = agent_net.predict(s)
                goal[0][a] = y
                agent_net.fit(s, goal, epochs=1, verbose=0)
        if epsilon > epsilon_stop:
            epsilon *= epsilon_decay
