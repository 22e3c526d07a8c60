"""
Training the continuous neuron
==============================

A 2+1 qubit neuron learns a random objective weight vector from 200
labelled inputs by full-batch gradient descent (learning rate 0.1).
"""

import numpy as np
import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt

from phaseron.training import TrainingConfig, make_sigmoid_dataset, random_phase_vector, train

rng = np.random.default_rng(0)
objective, data = make_sigmoid_dataset(rng, m=4, n_samples=200)
w0 = random_phase_vector(rng, 4, pin_first=True)

############################################################
# Train until the cost drops below 1e-3 or starts to increase

record = train(TrainingConfig(learning_rate=0.1, max_steps=10_000), data, w0, objective=objective)
costs = record.costs
print(record.terminal_reason.value, "after", len(costs) - 1, "steps")
print(f"cost {costs[0]:.4g} -> {costs[-1]:.4g}, affinity {record.steps[-1].affinity:.4f}")

############################################################
# Cost trajectory

plt.semilogy(costs)
plt.xlabel("step")
plt.ylabel("cost")
plt.title("Sigmoid neuron, analytic evaluation")
plt.savefig("sigmoid_cost.png", dpi=120)

############################################################
# With 8192-shot sampling the first 20 steps mostly show noise

cfg = TrainingConfig(mode="sampled", shots=8192, max_steps=20, stop_on_cost_increase=False)
noisy = train(cfg, data, w0)
print("sampled costs:", np.array2string(noisy.costs, precision=5))
