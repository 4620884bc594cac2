"""CartPole DQN running fixed-length episodes, ignoring the done flag."""

import random
from collections import deque

import gym
import numpy as np
import tensorflow as tf

env = gym.make("CartPole-v0")

n_state = 4
n_action = 2
gamma = 0.95
epsilon = 1.0
epsilon_low = 0.1
epsilon_scale = 0.99
batch_size = 32
buffer_size = 3000

store = deque(maxlen=buffer_size)

policy_net = tf.keras.models.Sequential()
policy_net.add(tf.keras.layers.Dense(24, input_dim=n_state, activation="relu"))
policy_net.add(tf.keras.layers.Dense(24, activation="relu"))
policy_net.add(tf.keras.layers.Dense(n_action))
policy_net.compile(loss="mse", optimizer=tf.keras.optimizers.Adam(0.001))

for episode in range(500):
    state = env.reset()
    state = np.reshape(state, (1, n_state))
    for tick in range(200):
        if np.random.rand() < epsilon:
            action = env.action_space.sample()
        else:
            outcome = policy_net.predict(state)
            action = np.argmax(outcome[0])
        state2, reward, done, info = env.step(action)
        state2 = np.reshape(state2, (1, n_state))
        store.append((state, action, reward, state2, done))
        state = state2
        if len(store) > batch_size:
            picks = random.sample(store, batch_size)
            for s, a, r, s2, flag in picks:
                y = r + gamma * np.max(policy_net.predict(s2)[0])
                if flag:
                    y = r
                fixup = policy_net.predict(s)
                fixup[0][a] = y
                policy_net.fit(s, fixup, epochs=1, verbose=0)
    if epsilon > epsilon_low:
        epsilon *= epsilon_scale
env.close()
