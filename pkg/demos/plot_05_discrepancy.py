"""
Discrepancy under shot noise
============================

Mean absolute difference between sampled and exact outputs over the 64
ordered pairs of 8 random vectors, for increasing shot counts. Without
hardware noise only the binomial floor remains, shrinking like 1/sqrt(shots).
"""

from phaseron.experiments import Experiment, ExperimentConfig, run_inner_product_experiment

for shots in (256, 1024, 4096, 16384, 65536):
    report = run_inner_product_experiment(
        ExperimentConfig(Experiment.INNER_PRODUCT_CONTINUOUS, shots=shots, seed=0)
    )
    d = {b.value: report.D(b) for b in report.config.backends}
    print(f"shots={shots:6d}  D_rotation={d['rotation']:.5f}  D_hsgs={d['hsgs']:.5f}")
