"""Minimal hand-written SVG scatter plots with a curve overlay."""

import numpy as np

PANEL = 800
PAD = 60


def _limits(values):
    lo, hi = float(np.min(values)), float(np.max(values))
    span = hi - lo
    if span <= 0:
        span = max(abs(lo), 1.0)
    return lo - 0.05 * span, hi + 0.05 * span


def _panel(points, curve, i, j, offset):
    """SVG fragment for coordinates ``(i, j)`` (0-based) drawn at x-offset ``offset``."""
    xs = np.concatenate([points[:, i], curve[:, i]])
    ys = np.concatenate([points[:, j], curve[:, j]])
    x0, x1 = _limits(xs)
    y0, y1 = _limits(ys)
    inner = PANEL - 2 * PAD

    def sx(v):
        return offset + PAD + (v - x0) / (x1 - x0) * inner

    def sy(v):
        return PAD + (y1 - v) / (y1 - y0) * inner

    out = [
        f'<g id="panel-y{i + 1}-y{j + 1}">',
        f'<rect x="{offset + PAD}" y="{PAD}" width="{inner}" height="{inner}" '
        'fill="none" stroke="#444" stroke-width="1"/>',
    ]
    for v in (x0, x1):
        out.append(
            f'<text x="{sx(v):.2f}" y="{PANEL - PAD + 20}" font-size="12" '
            f'text-anchor="middle">{v:.3g}</text>'
        )
    for v in (y0, y1):
        out.append(
            f'<text x="{offset + PAD - 6}" y="{sy(v):.2f}" font-size="12" '
            f'text-anchor="end">{v:.3g}</text>'
        )
    out.append(
        f'<text x="{offset + PANEL / 2:.2f}" y="{PANEL - 15}" font-size="16" '
        f'text-anchor="middle">y{i + 1}</text>'
    )
    out.append(
        f'<text x="{offset + 18}" y="{PANEL / 2:.2f}" font-size="16" text-anchor="middle" '
        f'transform="rotate(-90 {offset + 18} {PANEL / 2:.2f})">y{j + 1}</text>'
    )
    for p in points:
        out.append(f'<circle cx="{sx(p[i]):.2f}" cy="{sy(p[j]):.2f}" r="3" fill="#1f77b4" fill-opacity="0.7"/>')
    path = " ".join(f"{sx(c[i]):.2f},{sy(c[j]):.2f}" for c in curve)
    out.append(f'<polyline points="{path}" fill="none" stroke="#d62728" stroke-width="2.5"/>')
    out.append("</g>")
    return out


def scatter_with_curve(points, curve, pairs):
    """Render one 800x800 panel per coordinate pair, side by side.

    ``pairs`` holds 0-based ``(i, j)`` column indices.
    """
    points = np.asarray(points, dtype=float)
    curve = np.asarray(curve, dtype=float)
    width = PANEL * len(pairs)
    lines = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{PANEL}" '
        f'viewBox="0 0 {width} {PANEL}">',
        f'<rect x="0" y="0" width="{width}" height="{PANEL}" fill="white"/>',
    ]
    for k, (i, j) in enumerate(pairs):
        lines.extend(_panel(points, curve, i, j, k * PANEL))
    lines.append("</svg>")
    return "\n".join(lines) + "\n"
