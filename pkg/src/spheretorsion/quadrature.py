"""Split-aware adaptive quadrature on the real line.

Every integral in this library is one dimensional after circle reduction,
with integrands that are piecewise analytic and exponentially decaying.
QUADPACK handles each analytic piece well; the only care needed is to cut
the domain at the known breakpoints (kinks of potentials, junctions of
piecewise families, atoms of measures) and to fail loudly when the
estimated error is not tiny.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.integrate import quad


class NumericalError(RuntimeError):
    """Quadrature (or a downstream numeric step) failed its own error budget."""


@dataclass(frozen=True)
class QuadConfig:
    epsabs: float = 1e-12
    epsrel: float = 1e-12
    limit: int = 300
    # hard budget on the summed QUADPACK error estimate of one integral
    fail_tol: float = 5e-8


DEFAULT_QUAD = QuadConfig()


def _clean_splits(splits, lo, hi):
    pts = sorted({float(s) for s in splits if lo < s < hi and math.isfinite(s)})
    out = []
    for p in pts:
        # collapse near-duplicate breakpoints, they only slow QUADPACK down
        if not out or p - out[-1] > 1e-13 * max(1.0, abs(p)):
            out.append(p)
    return out


def integrate_line(f, splits=(), support=None, cfg: QuadConfig = DEFAULT_QUAD):
    """Integrate f(t) dt over the line (or over `support`), splitting at knots.

    f is a scalar callable; infinite endpoints are allowed and handled by
    QUADPACK's own transforms. Returns (value, error_estimate). Raises
    NumericalError when the summed error estimate exceeds cfg.fail_tol.
    """
    if support is None:
        lo, hi = -np.inf, np.inf
    else:
        lo, hi = float(support[0]), float(support[1])
        if not lo < hi:
            return 0.0, 0.0
    pts = _clean_splits(splits, lo, hi)
    edges = [lo] + pts + [hi]
    total, err = 0.0, 0.0
    for a, b in zip(edges[:-1], edges[1:]):
        if b - a <= 0:
            continue
        v, e = quad(f, a, b, epsabs=cfg.epsabs, epsrel=cfg.epsrel, limit=cfg.limit)
        total += v
        err += e
    if not math.isfinite(total):
        raise NumericalError(f"integral diverged: value={total}")
    if err > cfg.fail_tol:
        raise NumericalError(
            f"quadrature error estimate {err:.3e} exceeds budget {cfg.fail_tol:.1e}"
        )
    return total, err
