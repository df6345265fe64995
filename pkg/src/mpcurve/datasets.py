"""Synthetic benchmark clouds and CSV persistence.

Generators
----------
All three use ``n`` equispaced values ``t`` on ``[0, 1]`` (endpoints
included) and Gaussian noise with standard deviation ``sigma``.

``spiral``   ``(t, 2t cos 6t + e2, 2t sin 6t + e3)``
``bridge``   ``(t, sin 2t + cos(2t/3) + e2, -t sin 2t + e3)``
``seven``    ``Y1 = t + e1``; with ``X ~ Bernoulli(0.5)``, ``U2 ~ U(0, 1)`` and
             ``U3 ~ U(-2, 0.7)``: ``(Y2, Y3) = (U2, 1 + e3)`` if ``X = 1``
             else ``(1 + e2, U3)``.

Randomness comes from :class:`mpcurve.rng.Xoshiro256` seeded with ``seed``.
For each point in order of increasing ``t`` the draws are: the noise terms
used by the model in coordinate order (spiral/bridge: e2, e3; seven: e1, e2,
e3), then for seven U2, U3 and finally X (``X = 1`` iff a uniform draw is
``< 0.5``). Every draw is made even when the branch does not use it.
"""

import csv
import io
import math
import os
import tempfile
from dataclasses import dataclass
from pathlib import Path
from typing import Optional

import numpy as np

from .errors import InsufficientData, InvalidSpec, IoError, ParseError, RaggedRows
from .rng import Xoshiro256

GENERATORS = ("seven", "spiral", "bridge")


@dataclass
class PointCloud:
    data: np.ndarray
    ground_truth_t: Optional[np.ndarray] = None
    labels: Optional[np.ndarray] = None

    def __post_init__(self):
        self.data = np.asarray(self.data, dtype=float)
        if self.data.ndim == 1:
            self.data = self.data[:, None]
        if self.data.ndim != 2:
            raise InvalidSpec("point cloud data must be an (n, p) matrix")
        if not np.all(np.isfinite(self.data)):
            raise InvalidSpec("point cloud contains non-finite values")
        n = self.data.shape[0]
        if self.ground_truth_t is not None:
            self.ground_truth_t = np.asarray(self.ground_truth_t, dtype=float)
            if self.ground_truth_t.shape != (n,):
                raise InvalidSpec("ground_truth_t must have one entry per point")
        if self.labels is not None:
            self.labels = np.asarray(self.labels, dtype=np.int64)
            if self.labels.shape != (n,):
                raise InvalidSpec("labels must have one entry per point")

    @property
    def n(self):
        return self.data.shape[0]

    @property
    def p(self):
        return self.data.shape[1]


@dataclass(frozen=True)
class GeneratorSpec:
    kind: str
    n: int = 120
    sigma: float = 0.1
    seed: int = 0

    def __post_init__(self):
        if self.kind not in GENERATORS:
            raise InvalidSpec(f"unknown generator {self.kind!r}; expected one of {GENERATORS}")
        if int(self.n) != self.n or self.n < 4:
            raise InvalidSpec(f"n must be an integer >= 4, got {self.n}")
        if not (self.sigma >= 0 and math.isfinite(self.sigma)):
            raise InvalidSpec(f"sigma must be finite and >= 0, got {self.sigma}")
        if not 0 <= int(self.seed) < 2**64:
            raise InvalidSpec("seed must be an unsigned 64-bit integer")


def generate(spec):
    n, sd = int(spec.n), float(spec.sigma)
    rng = Xoshiro256(spec.seed)
    t = np.linspace(0.0, 1.0, n)
    Y = np.empty((n, 3))
    for i, ti in enumerate(t):
        ti = float(ti)
        if spec.kind == "spiral":
            e2 = rng.normal(0.0, sd)
            e3 = rng.normal(0.0, sd)
            Y[i] = (ti, 2 * ti * math.cos(6 * ti) + e2, 2 * ti * math.sin(6 * ti) + e3)
        elif spec.kind == "bridge":
            e2 = rng.normal(0.0, sd)
            e3 = rng.normal(0.0, sd)
            Y[i] = (
                ti,
                math.sin(2 * ti) + math.cos(2 * ti / 3) + e2,
                -ti * math.sin(2 * ti) + e3,
            )
        else:
            e1 = rng.normal(0.0, sd)
            e2 = rng.normal(0.0, sd)
            e3 = rng.normal(0.0, sd)
            u2 = rng.uniform(0.0, 1.0)
            u3 = rng.uniform(-2.0, 0.7)
            x = rng.uniform() < 0.5
            if x:
                Y[i] = (ti + e1, u2, 1.0 + e3)
            else:
                Y[i] = (ti + e1, 1.0 + e2, u3)
    return PointCloud(Y, ground_truth_t=t)


def _fmt(v):
    return format(float(v), ".17g")


def cloud_to_csv_text(cloud):
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    header = [f"y{j + 1}" for j in range(cloud.p)]
    if cloud.ground_truth_t is not None:
        header.append("t")
    if cloud.labels is not None:
        header.append("label")
    w.writerow(header)
    for i in range(cloud.n):
        row = [_fmt(v) for v in cloud.data[i]]
        if cloud.ground_truth_t is not None:
            row.append(_fmt(cloud.ground_truth_t[i]))
        if cloud.labels is not None:
            row.append(str(int(cloud.labels[i])))
        w.writerow(row)
    return buf.getvalue()


def write_text_atomic(path, text):
    """Write ``text`` to ``path`` through a temporary file and a rename."""
    path = Path(path)
    directory = path.parent if str(path.parent) else Path(".")
    try:
        fd, tmp = tempfile.mkstemp(prefix=f".{path.name}.", dir=directory)
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except OSError as exc:
        raise IoError(f"cannot write {path}: {exc}") from exc


def save_csv(cloud, path):
    write_text_atomic(path, cloud_to_csv_text(cloud))


def _is_number(s):
    try:
        float(s)
    except ValueError:
        return False
    return True


def load_csv(path):
    """Read a point cloud. A header row is detected when any cell of the first
    row is non-numeric; columns named ``t`` and ``label`` are split off."""
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise IoError(f"cannot read {path}: {exc}") from exc
    rows = [(k + 1, r) for k, r in enumerate(csv.reader(io.StringIO(text))) if r and any(c.strip() for c in r)]
    if not rows:
        raise InsufficientData(f"{path} contains no data")
    header = None
    first = [c.strip() for c in rows[0][1]]
    if not all(_is_number(c) for c in first):
        header = [c.lower() for c in first]
        rows = rows[1:]
    if not rows:
        raise InsufficientData(f"{path} contains a header but no data")
    width = len(header) if header is not None else len(rows[0][1])
    values = np.empty((len(rows), width))
    for r, (lineno, row) in enumerate(rows):
        if len(row) != width:
            raise RaggedRows(f"row {lineno} has {len(row)} columns, expected {width}")
        for c, cell in enumerate(row):
            try:
                v = float(cell)
            except ValueError:
                raise ParseError(
                    f"non-numeric value {cell!r} at row {lineno}, column {c + 1}", lineno, c + 1
                ) from None
            if not math.isfinite(v):
                raise ParseError(f"non-finite value at row {lineno}, column {c + 1}", lineno, c + 1)
            values[r, c] = v
    t = labels = None
    keep = list(range(width))
    if header is not None:
        if "t" in header:
            j = header.index("t")
            t = values[:, j]
            keep.remove(j)
        if "label" in header:
            j = header.index("label")
            labels = values[:, j].astype(np.int64)
            keep.remove(j)
    if not keep:
        raise InsufficientData(f"{path} has no coordinate columns")
    return PointCloud(values[:, keep], ground_truth_t=t, labels=labels)
