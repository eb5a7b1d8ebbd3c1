"""Circle-invariant potential calculus on the sphere, reduced to the line.

Everything is written in the logarithmic coordinate t = log|z|^2. A metric
on O(m) is e^{-phi} times the flat reference, with phi a convex-ish function
of t growing like m*t as t -> +inf and bounded as t -> -inf. The curvature
current dd^c phi pushes forward to a measure on the t-line:

    mu_phi = phi''(t) dt + sum of atoms,

normalized so that dd^c max(0, t) is the unit Dirac at t = 0 (Lelong units).
Consequently mass(mu_phi) = degree, with no 2*pi anywhere.

Volume forms on the sphere are the degree: 2 case, carried together with
their area measure rho (total mass 2, the degree of the tangent bundle).
For a degree-2 potential psi the area density is

    rho_psi(t) = 2 e^{t - psi(t)} / int e^{t - psi} dt,

which reproduces the Fubini-Study density 2 e^t / (1+e^t)^2 and pushes the
singular limit to exactly e^{-|t|} dt.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

import numpy as np

from .quadrature import DEFAULT_QUAD, NumericalError, QuadConfig, integrate_line

REGULARITIES = ("smooth", "continuous-piecewise", "continuous")


# --- core containers ---


@dataclass(frozen=True, eq=False)
class RadialPotential:
    """An S^1-invariant metric potential on O(degree), as a function of t.

    phi must accept numpy arrays. kinks lists quadrature split points: the
    t where phi fails to be C^2 (curvature atoms live here too), and for
    sharp smooth families the brackets of the concentration scale.
    positive means the curvature measure is known nonnegative (admissible
    in the sense used throughout: positive and with the right growth).
    curvature_atoms / curvature_density describe mu_phi explicitly; every
    constructor in this library provides them, numerical differentiation is
    never used silently.
    """

    degree: int
    phi: Callable
    regularity: str
    positive: bool
    kinks: tuple = ()
    curvature_atoms: tuple = ()
    curvature_density: Optional[Callable] = None
    curvature_support: Optional[tuple] = None
    label: str = ""

    def __post_init__(self):
        if self.regularity not in REGULARITIES:
            raise ValueError(
                f"regularity must be one of {REGULARITIES}, got {self.regularity!r}"
            )

    def __call__(self, t):
        return self.phi(t)


@dataclass(frozen=True, eq=False)
class RadialMeasure:
    """A signed measure on the t-line: atoms plus an absolutely continuous part."""

    atoms: tuple = ()
    density: Optional[Callable] = None
    splits: tuple = ()
    support: Optional[tuple] = None
    total_mass: float = 0.0

    def integrate(self, f, cfg: QuadConfig = DEFAULT_QUAD, extra_splits=(), return_err=False):
        """int f dmu for a scalar/vectorized callable f."""
        acc, err = 0.0, 0.0
        for loc, mass in self.atoms:
            acc += mass * float(f(loc))
        if self.density is not None:
            g = self.density
            val, err = integrate_line(
                lambda t: float(f(t)) * float(g(t)),
                splits=tuple(self.splits) + tuple(extra_splits),
                support=self.support,
                cfg=cfg,
            )
            acc += val
        return (acc, err) if return_err else acc


@dataclass(frozen=True, eq=False)
class VolumeForm:
    """A volume form on the sphere: degree-2 potential plus area measure.

    rho has total mass 2 by construction. norm records int e^{t-psi} dt,
    the only place a normalization constant can hide.
    """

    psi: RadialPotential
    rho: RadialMeasure
    norm: float
    label: str = ""


@dataclass
class ConvergenceReport:
    """Outcome of a sequence study: values along indices, gaps, fitted rate."""

    indices: tuple
    values: tuple
    target: Optional[float]
    gaps: tuple
    rate: Optional[float]
    verdict: str  # converged | diverged | inconclusive
    message: str = ""

    def as_dict(self):
        return {
            "indices": list(self.indices),
            "values": list(self.values),
            "target": self.target,
            "gaps": list(self.gaps),
            "rate": self.rate,
            "verdict": self.verdict,
            "message": self.message,
        }


# --- measure extraction and pairings ---


def c1_measure(p: RadialPotential) -> RadialMeasure:
    """Curvature measure of the potential, Lelong-normalized (mass = degree)."""
    if p.curvature_density is None and not p.curvature_atoms and p.degree != 0:
        raise ValueError(
            f"potential {p.label or '<anon>'} carries no curvature data"
        )
    return RadialMeasure(
        atoms=tuple(p.curvature_atoms),
        density=p.curvature_density,
        splits=tuple(p.kinks),
        support=p.curvature_support,
        total_mass=float(p.degree),
    )


def _as_callable(f):
    if isinstance(f, RadialPotential):
        if f.degree != 0:
            raise ValueError(
                f"pairing integrand must have degree 0, got degree {f.degree}"
            )
        return f.phi, tuple(f.kinks)
    return f, ()


def pair(f, p: RadialPotential, cfg: QuadConfig = DEFAULT_QUAD) -> float:
    """Pair a bounded degree-0 function against the curvature of p.

        pair(f, p) = int f dmu_p.

    For degree-0 smooth f and g this is symmetric and equals
    -(1/2) int r f'(r) g'(r) dr, the (negative) Dirichlet energy pairing.
    pair(1, p) = degree(p) in these units.
    """
    fc, fk = _as_callable(f)
    return c1_measure(p).integrate(fc, cfg=cfg, extra_splits=fk)


def integrate_volume(f, w: VolumeForm, cfg: QuadConfig = DEFAULT_QUAD) -> float:
    """int f drho_w over the sphere (rho_w has total mass 2)."""
    fc, fk = _as_callable(f)
    return w.rho.integrate(fc, cfg=cfg, extra_splits=fk)


def measure_mass(p: RadialPotential, cfg: QuadConfig = DEFAULT_QUAD) -> float:
    """Total curvature mass, which must equal the degree (Lelong units)."""
    return c1_measure(p).integrate(lambda t: 1.0, cfg=cfg)


# --- volume form constructors ---


def logistic_density(t):
    """e^t / (1+e^t)^2, overflow safe; the basic Fubini-Study shape."""
    t = np.asarray(t, dtype=float)
    return np.exp(t - 2.0 * np.maximum(t, 0.0)) / (1.0 + np.exp(-np.abs(t))) ** 2


def volume_from_potential(
    psi: RadialPotential, cfg: QuadConfig = DEFAULT_QUAD, label: str = ""
) -> VolumeForm:
    """Build the mass-2 area measure attached to a degree-2 potential."""
    if psi.degree != 2:
        raise ValueError(f"volume potential must have degree 2, got {psi.degree}")
    ph = psi.phi
    norm, _ = integrate_line(
        lambda t: math.exp(t - float(ph(t))), splits=psi.kinks, cfg=cfg
    )
    if norm <= 0 or not math.isfinite(norm):
        raise NumericalError(f"volume normalization failed: int e^(t-psi) = {norm}")
    dens = lambda t, _n=norm: 2.0 * np.exp(t - ph(t)) / _n
    rho = RadialMeasure(
        atoms=(), density=dens, splits=tuple(psi.kinks), support=None, total_mass=2.0
    )
    return VolumeForm(psi=psi, rho=rho, norm=norm, label=label or psi.label)


def volume_fs() -> VolumeForm:
    """The Fubini-Study volume form, area 2, with exact density."""
    dens = lambda t: 2.0 * logistic_density(t)
    psi = RadialPotential(
        degree=2,
        phi=lambda t: 2.0 * np.logaddexp(0.0, t),
        regularity="smooth",
        positive=True,
        kinks=(),
        curvature_atoms=(),
        curvature_density=dens,
        label="fs-volume",
    )
    rho = RadialMeasure(atoms=(), density=dens, splits=(), total_mass=2.0)
    return VolumeForm(psi=psi, rho=rho, norm=1.0, label="fs")


def volume_canonical() -> VolumeForm:
    """The singular limit volume form: psi = 2 max(0,t), density e^{-|t|}."""
    psi = RadialPotential(
        degree=2,
        phi=lambda t: 2.0 * np.maximum(t, 0.0),
        regularity="continuous",
        positive=True,
        kinks=(0.0,),
        curvature_atoms=((0.0, 2.0),),
        curvature_density=None,
        label="canonical-volume",
    )
    dens = lambda t: np.exp(-np.abs(t))
    rho = RadialMeasure(atoms=(), density=dens, splits=(0.0,), total_mass=2.0)
    return VolumeForm(psi=psi, rho=rho, norm=2.0, label="canonical")


# --- weak convergence checks ---


def _fit_rate(indices, gaps):
    # least squares slope of log(gap) against index, ignoring zero gaps
    xs, ys = [], []
    for i, g in zip(indices, gaps):
        if g > 0:
            xs.append(float(i))
            ys.append(math.log(g))
    if len(xs) < 2:
        return None
    A = np.vstack([xs, np.ones(len(xs))]).T
    slope, _ = np.linalg.lstsq(A, np.array(ys), rcond=None)[0]
    return float(slope)


def sequence_verdict(gaps, tol: float) -> str:
    gaps = [abs(g) for g in gaps]
    if not gaps:
        return "inconclusive"
    tail = gaps[-min(3, len(gaps)):]
    if gaps[-1] < tol and all(x >= y - 1e-15 for x, y in zip(tail, tail[1:])):
        return "converged"
    if len(gaps) >= 3 and gaps[-1] > 10.0 * gaps[0] and gaps[-1] > gaps[-2] > gaps[-3]:
        return "diverged"
    return "inconclusive"


def bedford_taylor_check(
    family: Callable[[int], RadialPotential],
    limit: RadialPotential,
    test_fn,
    indices: Sequence[int] = tuple(range(3, 11)),
    tol: float = 1e-7,
    cfg: QuadConfig = DEFAULT_QUAD,
) -> ConvergenceReport:
    """Weak-* convergence of curvature measures along an approximating family.

    Checks int g dmu_{p_n} -> int g dmu_limit for the given test function,
    which is the operational content of the Monge-Ampere continuity the
    whole approximation scheme rests on (decreasing or uniform limits of
    admissible potentials).
    """
    target = pair(test_fn, limit, cfg=cfg)
    vals, gaps = [], []
    for n in indices:
        v = pair(test_fn, family(n), cfg=cfg)
        vals.append(v)
        gaps.append(abs(v - target))
    verdict = sequence_verdict(gaps, tol)
    return ConvergenceReport(
        indices=tuple(indices),
        values=tuple(vals),
        target=target,
        gaps=tuple(gaps),
        rate=_fit_rate(indices, gaps),
        verdict=verdict,
        message=f"weak pairing vs limit, tol={tol:g}",
    )
