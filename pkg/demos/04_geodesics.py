"""Geodesics under a position-dependent metric.

For ``M(x) = exp(2 x_1) I`` in the plane, moving is cheap where ``x_1`` is
small, so the shortest path between two points bends toward smaller ``x_1``.
The substitution ``r = exp(x_1)``, ``theta = x_2`` turns the metric into flat
polar coordinates, which gives the exact distance to compare against.
"""

import math

import numpy as np

from mpcurve.geodesics import MetricField, integrate_geodesic, metric_length, shoot_geodesic

field = MetricField.conformal(1.0)
x, y = np.array([0.1, -0.2]), np.array([0.5, 0.3])

path = shoot_geodesic(field, x, y, steps=256)
r1, r2 = math.exp(x[0]), math.exp(y[0])
exact = math.sqrt(r1 * r1 + r2 * r2 - 2 * r1 * r2 * math.cos(y[1] - x[1]))
straight = integrate_geodesic(MetricField.euclidean(2), x, y - x, steps=256)

print(f"initial velocity      {path.velocities[0]}")
print(f"geodesic length       {metric_length(field, path):.10f}")
print(f"exact distance        {exact:.10f}")
print(f"straight segment      {metric_length(field, straight):.10f}  (longer)")
print(f"lowest x_1 on path    {path.positions[:, 0].min():.4f}  (endpoints 0.1 and 0.5)")

print("\nRK4 convergence from x0 = 0, v0 = (1, 0.5):")
ref = integrate_geodesic(field, [0, 0], [1, 0.5], 4096).end
prev = None
for steps in (8, 16, 32, 64, 128):
    err = np.linalg.norm(integrate_geodesic(field, [0, 0], [1, 0.5], steps).end - ref)
    ratio = "" if prev is None else f"  ratio {prev / err:5.1f}"
    print(f"  steps {steps:4d}  endpoint error {err:.2e}{ratio}")
    prev = err
