"""Deep Q-learning on CartPole where every action comes from the network."""

import random
from collections import deque

import gym
import numpy as np
import tensorflow as tf

env = gym.make("CartPole-v0")

n_inputs = 4
n_outputs = 2
batch_size = 64
memory_size = 5000
gamma = 0.9
copy_period = 50

replay = deque(maxlen=memory_size)

q_net = tf.keras.models.Sequential()
q_net.add(tf.keras.layers.Dense(16, input_dim=n_inputs, activation="relu"))
q_net.add(tf.keras.layers.Dense(16, activation="relu"))
q_net.add(tf.keras.layers.Dense(n_outputs))
q_net.compile(loss="mse", optimizer=tf.keras.optimizers.Adam(0.01))

frozen_net = tf.keras.models.Sequential()
frozen_net.add(tf.keras.layers.Dense(16, input_dim=n_inputs, activation="relu"))
frozen_net.add(tf.keras.layers.Dense(16, activation="relu"))
frozen_net.add(tf.keras.layers.Dense(n_outputs))
frozen_net.set_weights(q_net.get_weights())

steps_done = 0
for episode in range(500):
    obs = env.reset()
    obs = np.reshape(obs, (1, n_inputs))
    done = False
    while not done:
        scores = q_net.predict(obs)
        action = np.argmax(scores[0])
        new_obs, reward, done, info = env.step(action)
        new_obs = np.reshape(new_obs, (1, n_inputs))
        replay.append((obs, action, reward, new_obs, done))
        obs = new_obs
        steps_done = steps_done + 1
        if steps_done % copy_period == 0:
            frozen_net.set_weights(q_net.get_weights())
        if len(replay) > batch_size:
            minibatch = random.sample(replay, batch_size)
            for ob, ac, rw, ob2, fin in minibatch:
                y = rw + gamma * np.max(frozen_net.predict(ob2)[0])
                if fin:
                    y = rw
                q_row = q_net.predict(ob)
                q_row[0][ac] = y
                q_net.fit(ob, q_row, epochs=1, verbose=0)
env.close()
