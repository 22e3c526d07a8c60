"""
Binary perceptron
=================

Weights restricted to +/-1 (phases 0 or pi). A random objective labels 5
positive and 50 negative inputs; 59 random restarts of flip-rule training
are averaged step by step.
"""

import numpy as np
import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt

from phaseron.experiments import Experiment, ExperimentConfig, run_binary_perceptron_experiment

result = run_binary_perceptron_experiment(ExperimentConfig(Experiment.BINARY_PERCEPTRON, seed=0))
mean = result.mean_affinity()
print("objective", result.objective)
print("mean affinity at steps 0, 10, 25, 50:", mean[[0, 10, 25, 50]].round(3))

############################################################

plt.plot(mean)
plt.xlabel("step")
plt.ylabel("mean affinity")
plt.ylim(0, 1.05)
plt.savefig("perceptron_affinity.png", dpi=120)
