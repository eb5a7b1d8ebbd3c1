"""L^2 Gram data for the monomial section basis of O(m).

After circle reduction the monomials z^k, k = 0..m, are orthogonal for any
S^1-invariant metric and volume, so the Gram matrix is diagonal with

    g_k = int e^{k t - phi(t)} drho_w(t),

and the determinant metric on det H^0 is the product. The basis of record
for every log-determinant in this library is (z^0, ..., z^m); changing the
basis shifts all log-determinants by the same constant, which cancels in
every anomaly identity.

Two closed forms are kept next to the quadrature for cross-checking:
Fubini-Study against its own volume (Beta integrals) and the canonical
potential against the singular volume (two one-sided exponentials).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .quadrature import DEFAULT_QUAD, QuadConfig, integrate_line
from .radial import ConvergenceReport, RadialPotential, VolumeForm, sequence_verdict


@dataclass
class GramData:
    m: int
    entries: np.ndarray  # g_0 .. g_m
    log_det: float
    err: float

    @property
    def det(self) -> float:
        return float(np.exp(self.log_det))

    def as_dict(self):
        return {
            "m": self.m,
            "entries": [float(g) for g in self.entries],
            "log_det": self.log_det,
            "det": self.det,
            "err": self.err,
        }


def gram(p: RadialPotential, w: VolumeForm, cfg: QuadConfig = DEFAULT_QUAD) -> GramData:
    """Diagonal Gram entries of the monomial basis, by quadrature."""
    if p.degree < 0:
        raise ValueError(f"Gram data needs degree >= 0, got {p.degree}")
    m = p.degree
    phi = p.phi
    dens = w.rho.density
    splits = tuple(p.kinks) + tuple(w.rho.splits)
    entries = np.empty(m + 1)
    err = 0.0
    for k in range(m + 1):
        f = lambda t, _k=k: math.exp(_k * t - float(phi(t))) * float(dens(t))
        v, e = integrate_line(f, splits=splits, support=w.rho.support, cfg=cfg)
        entries[k] = v
        err += e
    if np.any(entries <= 0):
        raise ValueError("Gram entry came out nonpositive; potential invalid")
    return GramData(m=m, entries=entries, log_det=float(np.sum(np.log(entries))), err=err)


def l2_det_metric(p: RadialPotential, w: VolumeForm, cfg: QuadConfig = DEFAULT_QUAD) -> float:
    """log of the L^2 determinant metric on det H^0 in the basis of record."""
    return gram(p, w, cfg=cfg).log_det


# --- closed forms (used as engine constants and as test oracles) ---


def gram_fs_closed(m: int) -> np.ndarray:
    """FS metric against FS volume: g_k = 2 B(k+1, m+1-k) = 2 k!(m-k)!/(m+1)!."""
    return np.array(
        [
            2.0 * math.exp(math.lgamma(k + 1) + math.lgamma(m - k + 1) - math.lgamma(m + 2))
            for k in range(m + 1)
        ]
    )


def log_det_fs_closed(m: int) -> float:
    """Exact log det of the FS/FS Gram in the basis of record."""
    return float(np.sum(np.log(gram_fs_closed(m))))


def gram_canonical_closed(m: int) -> np.ndarray:
    """Canonical metric against the singular volume: g_k = 1/(k+1) + 1/(m+1-k)."""
    return np.array([1.0 / (k + 1) + 1.0 / (m + 1 - k) for k in range(m + 1)])


def log_det_canonical_closed(m: int) -> float:
    return float(np.sum(np.log(gram_canonical_closed(m))))


# --- sequence studies ---


def gram_convergence(
    family,
    w: VolumeForm,
    target: GramData,
    indices=tuple(range(1, 9)),
    tol: float = 1e-8,
    cfg: QuadConfig = DEFAULT_QUAD,
) -> ConvergenceReport:
    """Convergence of log-determinants along an approximating family.

    The sandwich |log det G(p1) - log det G(p2)| <= (m+1) sup|phi1 - phi2|
    makes this a Lipschitz functional of the potential, so uniform
    convergence of potentials forces the verdict here.
    """
    vals, gaps = [], []
    for n in indices:
        g = gram(family(n), w, cfg=cfg)
        vals.append(g.log_det)
        gaps.append(abs(g.log_det - target.log_det))
    from .radial import _fit_rate

    return ConvergenceReport(
        indices=tuple(indices),
        values=tuple(vals),
        target=target.log_det,
        gaps=tuple(gaps),
        rate=_fit_rate(indices, gaps),
        verdict=sequence_verdict(gaps, tol),
        message=f"log det Gram vs target, tol={tol:g}",
    )
