"""CartPole DQN whose exploration rate never drops below one half."""

import random
from collections import deque

import gym
import numpy as np
import tensorflow as tf

env = gym.make("CartPole-v0")

obs_dim = 4
act_dim = 2
gamma = 0.99
eps = 1.0
eps_floor = 0.5
eps_decay = 0.99
batch_size = 32
buffer_size = 10000

transitions = deque(maxlen=buffer_size)

net = tf.keras.models.Sequential()
net.add(tf.keras.layers.Dense(32, input_dim=obs_dim, activation="relu"))
net.add(tf.keras.layers.Dense(32, activation="relu"))
net.add(tf.keras.layers.Dense(act_dim))
net.compile(loss="mse", optimizer=tf.keras.optimizers.Adam(0.001))

for episode in range(1000):
    state = env.reset()
    state = np.reshape(state, (1, obs_dim))
    done = False
    while not done:
        if np.random.uniform() < eps:
            action = env.action_space.sample()
        else:
            predictions = net.predict(state)
            action = np.argmax(predictions[0])
        state2, reward, done, info = env.step(action)
        state2 = np.reshape(state2, (1, obs_dim))
        transitions.append((state, action, reward, state2, done))
        state = state2
        if len(transitions) > batch_size:
            chunk = random.sample(transitions, batch_size)
            for s, a, r, s2, over in chunk:
                y = r + gamma * np.max(net.predict(s2)[0])
                if over:
                    y = r
                targets = net.predict(s)
                targets[0][a] = y
                net.fit(s, targets, epochs=1, verbose=0)
    if eps > eps_floor:
        eps *= eps_decay
env.close()
