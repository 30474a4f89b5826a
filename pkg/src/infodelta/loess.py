"""Locally weighted polynomial regression with tricube weights.

The smoother fits a degree-0/1/2 polynomial around every evaluation
point, weighting the window by the tricube kernel, and keeps the fitted
value at the point itself. Windows are the q nearest observations; at
the boundaries they simply lean inward (no reflection or padding).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import WindowTooSmall


@dataclass(frozen=True)
class LoessConfig:
    """Smoothing window and local polynomial degree.

    ``span`` is either a fraction of the series length (0 < span <= 1)
    or an absolute point count (span > 1). The resolved window must
    hold at least ``degree + 2`` points. The weight kernel is tricube.
    """

    span: float
    degree: int = 1

    def __post_init__(self):
        if self.degree not in (0, 1, 2):
            raise ValueError(f"degree must be 0, 1 or 2, got {self.degree}")
        if self.span <= 0:
            raise ValueError(f"span must be positive, got {self.span}")

    def window_points(self, n: int) -> int:
        """Resolve the span into a point count for a series of length n."""
        if self.span <= 1.0:
            q = math.ceil(self.span * n)
        else:
            q = int(round(self.span))
        q = min(q, n)
        if q < self.degree + 2:
            raise WindowTooSmall(
                f"window of {q} point(s) cannot support a degree-{self.degree} fit "
                f"(needs >= {self.degree + 2})"
            )
        return q


def window_start(position: int, n: int, q: int) -> int:
    """Start index of the q nearest observations to ``position``.

    Observations sit at integer positions 0..n-1; the nearest q always
    form a contiguous block. Even window sizes lean one point to the
    right of the evaluation position.
    """
    return min(max(position - (q - 1) // 2, 0), n - q)


def smooth_at(
    values: np.ndarray,
    eval_positions: np.ndarray,
    q: int,
    degree: int,
    robustness: np.ndarray | None = None,
) -> np.ndarray:
    """Evaluate the local fit at arbitrary integer positions.

    ``eval_positions`` may fall outside [0, n-1], in which case the fit
    over the nearest window is extrapolated (used by the seasonal
    decomposition to pad cycle subseries). ``robustness`` optionally
    multiplies the kernel weights pointwise.

    Windows whose positive-weight support cannot identify the polynomial
    fall back to the weighted mean of the window.
    """
    y = np.asarray(values, dtype=float)
    n = len(y)
    pos = np.asarray(eval_positions, dtype=int)
    starts = np.array([window_start(int(p), n, q) for p in pos])
    idx = starts[:, None] + np.arange(q)[None, :]          # (m, q) data indices
    xs = idx.astype(float) - pos[:, None].astype(float)    # centred positions
    dist = np.abs(xs)
    h = dist.max(axis=1, keepdims=True)
    u = np.clip(dist / h, 0.0, 1.0)
    w = (1.0 - u**3) ** 3
    if robustness is not None:
        w = w * np.asarray(robustness, dtype=float)[idx]

    yw = y[idx]
    support = (w > 0.0).sum(axis=1)
    degenerate = support <= degree

    powers = np.arange(degree + 1)
    design = xs[:, :, None] ** powers[None, None, :]       # (m, q, d+1)
    gram = np.einsum("mqa,mq,mqb->mab", design, w, design)
    rhs = np.einsum("mqa,mq,mq->ma", design, w, yw)
    if degenerate.any():
        gram[degenerate] = np.eye(degree + 1)
        rhs[degenerate] = 0.0
    fitted = np.linalg.solve(gram, rhs[:, :, None])[:, 0, 0]

    if degenerate.any() or not np.all(np.isfinite(fitted)):
        bad = degenerate | ~np.isfinite(fitted)
        for i in np.flatnonzero(bad):
            wi = w[i]
            total = wi.sum()
            fitted[i] = (wi @ yw[i]) / total if total > 0 else float(yw[i].mean())
    return fitted


def loess_smooth(values, config: LoessConfig) -> np.ndarray:
    """Smooth a series observed at consecutive integer positions.

    Returns one fitted value per input point. Constant input comes back
    unchanged for any degree, and affine input is reproduced exactly at
    degree >= 1 (a weighted line fit through a line is that line).
    """
    y = np.asarray(values, dtype=float)
    if not np.all(np.isfinite(y)):
        raise ValueError("values must be finite (fill gaps before smoothing)")
    q = config.window_points(len(y))
    return smooth_at(y, np.arange(len(y)), q, config.degree)
