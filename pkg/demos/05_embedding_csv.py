"""Fit a curve to a precomputed 3-D embedding stored as CSV.

Embeddings of image data arrive as plain CSV files with an optional
``label`` column. Here a stand-in file is synthesized: ten labelled clusters
strung along a curved path, written to a temporary file and read back. The
fitted indices order the clusters along the curve.
"""

import tempfile
from pathlib import Path

import numpy as np

from mpcurve.datasets import PointCloud, load_csv, save_csv
from mpcurve.mpc import MpcConfig, fit
from mpcurve.smoothers import SmootherSpec

rng = np.random.default_rng(1)
labels = np.repeat(np.arange(10), 30)
s = (labels + rng.uniform(0, 1, labels.size)) / 10
points = np.column_stack([3 * np.cos(2.5 * s), 3 * np.sin(2.5 * s), 2 * s]) + rng.normal(0, 0.12, (labels.size, 3))

with tempfile.TemporaryDirectory() as tmp:
    path = Path(tmp) / "embedding.csv"
    save_csv(PointCloud(points, labels=labels), path)
    print(path.read_text().splitlines()[:3])
    cloud = load_csv(path)

config = MpcConfig(estimation_smoother=SmootherSpec.lowess(0.2))
result = fit(config, cloud.data)
medians = [np.median(result.lambdas[cloud.labels == k]) for k in range(10)]
order = np.argsort(medians)
print("cluster order along the curve:", order.tolist())
print("median index per cluster:", np.round(np.sort(medians), 3).tolist())
