"""DQN agent for CartPole-v0: replay buffer, target network, epsilon-greedy."""

import random
from collections import deque

import gym
import numpy as np
import tensorflow as tf

env = gym.make("CartPole-v0")

state_size = 4
action_size = 2
episodes = 300
batch_size = 32
buffer_size = 2000
gamma = 0.95
epsilon = 1.0
epsilon_min = 0.1
epsilon_decay = 0.995
sync_every = 100
learning_rate = 0.001

memory = deque(maxlen=buffer_size)

model = tf.keras.models.Sequential()
model.add(tf.keras.layers.Dense(24, input_dim=state_size, activation="relu"))
model.add(tf.keras.layers.Dense(24, activation="relu"))
model.add(tf.keras.layers.Dense(action_size))
model.compile(loss="mse", optimizer=tf.keras.optimizers.Adam(learning_rate))

target_model = tf.keras.models.Sequential()
target_model.add(tf.keras.layers.Dense(24, input_dim=state_size, activation="relu"))
target_model.add(tf.keras.layers.Dense(24, activation="relu"))
target_model.add(tf.keras.layers.Dense(action_size))
target_model.set_weights(model.get_weights())

total_steps = 0
for episode in range(episodes):
    state = env.reset()
    state = np.reshape(state, (1, state_size))
    done = False
    while not done:
        if np.random.rand() < epsilon:
            action = env.action_space.sample()
        else:
            q_values = model.predict(state)
            action = np.argmax(q_values[0])
        next_state, reward, done, info = state, 1.0, False, None
        next_state = np.reshape(next_state, (1, state_size))
        memory.append((state, action, reward, next_state, done))
        state = next_state
        total_steps = total_steps + 1
        if total_steps % sync_every == 0:
            target_model.set_weights(model.get_weights())
        if len(memory) > batch_size:
            batch = random.sample(memory, batch_size)
            for s, a, r, s2, d in batch:
                target = r + gamma * np.max(target_model.predict(s2)[0])
                if d:
                    target = r
                q_update = model.predict(s)
                q_update[0][a] = target
                model.fit(s, q_update, epochs=1, verbose=0)
        if epsilon > epsilon_min:
            epsilon *= epsilon_decay
env.close()
