"""CartPole DQN with near-constant heavy exploration and a tiny sigmoid net."""

import random
from collections import deque

import gym
import numpy as np
import tensorflow as tf

env = gym.make("CartPole-v0")

in_size = 4
out_size = 2
gamma = 0.9
explore_rate = 0.9
batch_size = 16
memory_size = 2000

history = deque(maxlen=memory_size)

brain = tf.keras.models.Sequential()
brain.add(tf.keras.layers.Dense(5, input_dim=in_size, activation="sigmoid"))
brain.add(tf.keras.layers.Dense(5, activation="sigmoid"))
brain.add(tf.keras.layers.Dense(out_size))
brain.compile(loss="mse", optimizer=tf.keras.optimizers.Adam(0.05))

for episode in range(600):
    state = env.reset()
    state = np.reshape(state, (1, in_size))
    done = False
    while not done:
        if random.random() < explore_rate:
            action = random.randint(0, 1)
        else:
            guesses = brain.predict(state)
            action = np.argmax(guesses[0])
        state_next, reward, done, info = env.step(action)
        state_next = np.reshape(state_next, (1, in_size))
        history.append((state, action, reward, state_next, done))
        state = state_next
        if len(history) > batch_size:
            batch = random.sample(history, batch_size)
            for s, a, r, s2, end in batch:
                y = r + gamma * np.max(brain.predict(s2)[0])
                if end:
                    y = r
                wanted = brain.predict(s)
                wanted[0][a] = y
                brain.fit(s, wanted, epochs=1, verbose=0)
env.close()
