"""Catalog of S^1-invariant metrics on O(m), plus the continuity counterexample.

Potentials live in t = log|z|^2. The catalog:

  fubini_study(m):  phi = m log(1+e^t), curvature m e^t/(1+e^t)^2 dt
  canonical(m):     phi = m max(0,t), curvature = m delta_0 (integrable, not smooth)
  zhang_iterate:    phi_n(t) = p^{-n} phi(p^n t), the dilation semigroup that
                    contracts any admissible base to its canonical limit at
                    rate p^{-n} in sup norm
  lse / mollified_max: two further smooth approximating families used by the
                    weak-convergence battery
  counterexample_potential: the compactly supported C^2 ridge of height
                    c sqrt(delta) and slope c/sqrt(delta) whose Dirichlet
                    energy stays of size c^2 while its sup norm vanishes

All constructors attach exact curvature data; nothing is differentiated
numerically except grid-loaded potentials, which interpolate with a
monotone cubic and differentiate the interpolant.
"""

from __future__ import annotations

import csv
import json
import math
import os
from dataclasses import dataclass

import numpy as np
from scipy.interpolate import PchipInterpolator

from .radial import (
    RadialPotential,
    VolumeForm,
    logistic_density,
    volume_canonical,
    volume_from_potential,
    volume_fs,
)


class SpecError(ValueError):
    """Malformed metric/volume mini-language expression (CLI exit code 2)."""


_RANK = {"smooth": 0, "continuous-piecewise": 1, "continuous": 2}


def _scalar_guard(x):
    # QUADPACK hands us plain floats; boolean masking needs 1-d arrays
    arr = np.atleast_1d(np.asarray(x, dtype=float))
    return arr, np.ndim(x) == 0


# --- catalog ---


def fubini_study(m: int) -> RadialPotential:
    """The round metric potential on O(m): phi = m log(1+e^t)."""
    m = int(m)
    if m < 0:
        raise ValueError(f"fubini_study needs m >= 0, got {m}")
    return RadialPotential(
        degree=m,
        phi=lambda t, _m=m: _m * np.logaddexp(0.0, t),
        regularity="smooth",
        positive=True,
        kinks=(),
        curvature_atoms=(),
        curvature_density=lambda t, _m=m: _m * logistic_density(t),
        label=f"fs:{m}",
    )


def canonical(m: int) -> RadialPotential:
    """The canonical (Zhang-limit) potential: phi = m max(0,t), an atom at 0."""
    m = int(m)
    if m < 0:
        raise ValueError(f"canonical needs m >= 0, got {m}")
    return RadialPotential(
        degree=m,
        phi=lambda t, _m=m: _m * np.maximum(t, 0.0),
        regularity="continuous",
        positive=True,
        kinks=(0.0,),
        curvature_atoms=((0.0, float(m)),) if m > 0 else (),
        curvature_density=None,
        label=f"canonical:{m}",
    )


def _concentration_splits(scale: float) -> tuple:
    # a bump of width ~1/scale hides between the nodes of an adaptive rule
    # on an infinite interval; bracket it so no panel can step over it
    if scale <= 16.0:
        return ()
    w = 1.0 / scale
    pts = [0.0]
    for f in (1.0, 8.0, 64.0, 512.0):
        pts.extend((-f * w, f * w))
    return tuple(sorted(pts))


def zhang_iterate(base: RadialPotential, p: int, n: int) -> RadialPotential:
    """n-th dilation iterate p^{-n} phi(p^n t) of an admissible base.

    Degree and curvature mass are preserved; sup distance to the canonical
    limit contracts exactly by p^{-n}. The iterate's curvature concentrates
    at t = 0 with width p^{-n}, so the kink list carries bracket points at
    that scale: without them the quadrature walks straight over the bump
    and silently drops the whole mass.
    """
    p, n = int(p), int(n)
    if p < 2:
        raise ValueError(f"zhang iterate needs p >= 2, got {p}")
    if n < 0:
        raise ValueError(f"zhang iterate needs n >= 0, got {n}")
    lam = float(p) ** n
    dens = base.curvature_density
    splits = sorted(
        set(k / lam for k in base.kinks) | set(_concentration_splits(lam))
    )
    return RadialPotential(
        degree=base.degree,
        phi=lambda t, _l=lam, _f=base.phi: _f(np.asarray(t) * _l) / _l,
        regularity=base.regularity,
        positive=base.positive,
        kinks=tuple(splits),
        curvature_atoms=tuple((loc / lam, mass) for loc, mass in base.curvature_atoms),
        curvature_density=None
        if dens is None
        else (lambda t, _l=lam, _d=dens: _l * _d(np.asarray(t) * _l)),
        curvature_support=None
        if base.curvature_support is None
        else (base.curvature_support[0] / lam, base.curvature_support[1] / lam),
        label=f"zhang:base={base.label},p={p},n={n}",
    )


def lse(m: int, a: float) -> RadialPotential:
    """Soft-max potential (m/a) log(1+e^{a t}); a -> inf gives canonical(m).

    Smooth for every a, but the curvature bump has width 1/a, so sharp
    members advertise bracket splits just like the dilation iterates.
    """
    m, a = int(m), float(a)
    if a <= 0:
        raise ValueError(f"lse sharpness must be positive, got {a}")
    return RadialPotential(
        degree=m,
        phi=lambda t, _m=m, _a=a: (_m / _a) * np.logaddexp(0.0, _a * np.asarray(t)),
        regularity="smooth",
        positive=True,
        kinks=_concentration_splits(a),
        curvature_density=lambda t, _m=m, _a=a: _m * _a * logistic_density(_a * np.asarray(t)),
        label=f"lse:m={m},a={a:g}",
    )


def mollified_max(m: int, eps: float) -> RadialPotential:
    """Convolution of m max(0,t) with the quartic bump of width eps.

    Closed form: for |t| < eps, phi/m = t P(t/eps) - eps Q(t/eps) with
    P, Q the antiderivatives of the bump 15/16 (1-u^2)^2 and of u times it.
    Curvature density is the bump itself, so positivity is manifest.
    """
    m, eps = int(m), float(eps)
    if eps <= 0:
        raise ValueError(f"mollifier width must be positive, got {eps}")

    def _P(x):
        return (15.0 / 16.0) * (x - (2.0 / 3.0) * x**3 + 0.2 * x**5) + 0.5

    def _Q(x):
        return (15.0 / 16.0) * (0.5 * x**2 - 0.5 * x**4 + x**6 / 6.0 - 1.0 / 6.0)

    def phi(t, _m=m, _e=eps):
        t = np.asarray(t, dtype=float)
        x = np.clip(t / _e, -1.0, 1.0)
        mid = t * _P(x) - _e * _Q(x)
        return _m * np.where(t >= _e, t, np.where(t <= -_e, 0.0, mid))

    def dens(t, _m=m, _e=eps):
        t, scalar = _scalar_guard(t)
        u = t / _e
        inside = np.abs(u) < 1.0
        out = np.zeros_like(t)
        out[inside] = (15.0 / 16.0) * (1.0 - u[inside] ** 2) ** 2 / _e
        out *= _m
        return float(out[0]) if scalar else out

    return RadialPotential(
        degree=m,
        phi=phi,
        regularity="smooth",
        positive=True,
        kinks=(-eps, eps),
        curvature_density=dens,
        curvature_support=(-eps, eps),
        label=f"mollmax:m={m},eps={eps:g}",
    )


# --- tensor algebra ---


def tensor(p1: RadialPotential, p2: RadialPotential) -> RadialPotential:
    """Tensor product of metrics: potentials and curvatures add."""
    d1, d2 = p1.curvature_density, p2.curvature_density
    if d1 is None and d2 is None:
        dens = None
    elif d1 is None:
        dens = d2
    elif d2 is None:
        dens = d1
    else:
        dens = lambda t, _a=d1, _b=d2: _a(t) + _b(t)
    sups = [s for s in (p1.curvature_support, p2.curvature_support)]
    if any(s is None for s in sups) and dens is not None:
        support = None
    elif dens is None:
        support = None
    else:
        support = (min(s[0] for s in sups), max(s[1] for s in sups))
    reg = max(p1.regularity, p2.regularity, key=lambda r: _RANK[r])
    return RadialPotential(
        degree=p1.degree + p2.degree,
        phi=lambda t, _f=p1.phi, _g=p2.phi: _f(t) + _g(t),
        regularity=reg,
        positive=p1.positive and p2.positive,
        kinks=tuple(sorted(set(p1.kinks) | set(p2.kinks))),
        curvature_atoms=tuple(p1.curvature_atoms) + tuple(p2.curvature_atoms),
        curvature_density=dens,
        curvature_support=support,
        label=f"tensor({p1.label},{p2.label})",
    )


def dual(p: RadialPotential) -> RadialPotential:
    """Dual metric on O(-degree): potential and curvature change sign.

    The positive flag is dropped (curvature of the dual of a positive
    metric is nonpositive); tensor(p, dual(p)) is the flat degree-0 pair.
    """
    dens = p.curvature_density
    return RadialPotential(
        degree=-p.degree,
        phi=lambda t, _f=p.phi: -_f(t),
        regularity=p.regularity,
        positive=False,
        kinks=p.kinks,
        curvature_atoms=tuple((loc, -mass) for loc, mass in p.curvature_atoms),
        curvature_density=None if dens is None else (lambda t, _d=dens: -_d(t)),
        curvature_support=p.curvature_support,
        label=f"dual({p.label})",
    )


# --- sup distance ---


def sup_distance(p1: RadialPotential, p2: RadialPotential, t_range=(-60.0, 60.0)) -> float:
    """sup_t |phi1 - phi2| for two potentials of the same degree.

    Grid scan with geometric clustering around kinks (glue windows can be
    as narrow as the delta parameter of the counterexample family), then
    local refinement around the incumbent maximum.
    """
    if p1.degree != p2.degree:
        raise ValueError(
            f"sup distance needs equal degrees, got {p1.degree} and {p2.degree}"
        )
    pts = [np.linspace(t_range[0], t_range[1], 8001)]
    for k in sorted(set(p1.kinks) | set(p2.kinks)):
        offs = np.geomspace(1e-9, 1.0, 46)
        pts.append(k + offs)
        pts.append(k - offs)
        pts.append(np.array([k]))
    ts = np.unique(np.concatenate(pts))
    ts = ts[(ts >= t_range[0]) & (ts <= t_range[1])]
    diff = np.abs(np.asarray(p1.phi(ts), dtype=float) - np.asarray(p2.phi(ts), dtype=float))
    i = int(np.argmax(diff))
    best = float(diff[i])
    lo = ts[max(i - 1, 0)]
    hi = ts[min(i + 1, len(ts) - 1)]
    for _ in range(4):
        loc = np.linspace(lo, hi, 401)
        d = np.abs(np.asarray(p1.phi(loc), dtype=float) - np.asarray(p2.phi(loc), dtype=float))
        j = int(np.argmax(d))
        best = max(best, float(d[j]))
        lo = loc[max(j - 1, 0)]
        hi = loc[min(j + 1, len(loc) - 1)]
    return best


# --- the counterexample family ---


@dataclass(frozen=True)
class CounterexampleParams:
    c: float
    delta: float
    eps: float
    gamma: float

    def __post_init__(self):
        if self.c <= 0:
            raise ValueError(f"need c > 0, got c={self.c}")
        if not 0 < self.eps < 0.5:
            raise ValueError(f"need 0 < eps < 1/2, got eps={self.eps}")
        if not 0 < self.delta < self.eps / 4:
            raise ValueError(
                f"need 0 < delta < eps/4 = {self.eps / 4:g}, got delta={self.delta}"
            )
        if not 0 < self.gamma < (self.eps - self.delta) / 4:
            raise ValueError(
                f"need 0 < gamma < (eps-delta)/4 = {(self.eps - self.delta) / 4:g}, "
                f"got gamma={self.gamma}"
            )


def _quintic(w, f0, d0, s0, f1, d1, s1):
    # two-point Taylor quintic on [0,w], returned in the scaled variable u = x/w
    A = np.array(
        [
            [1, 0, 0, 0, 0, 0],
            [0, 1, 0, 0, 0, 0],
            [0, 0, 2, 0, 0, 0],
            [1, 1, 1, 1, 1, 1],
            [0, 1, 2, 3, 4, 5],
            [0, 0, 2, 6, 12, 20],
        ],
        dtype=float,
    )
    rhs = np.array([f0, d0 * w, s0 * w * w, f1, d1 * w, s1 * w * w], dtype=float)
    return np.polynomial.Polynomial(np.linalg.solve(A, rhs))


class PiecewiseRadial:
    """f(r) stored piecewise as polynomials q(u), u = (r-a)/w on [a, a+w].

    Exposes values and the exact weighted Dirichlet integral
    int r f'(r)^2 dr computed piece by piece with polynomial antiderivatives
    (degree <= 9, no quadrature error at all).
    """

    def __init__(self, pieces):
        # pieces: list of (a, w, Polynomial in u)
        self.pieces = [(float(a), float(w), q) for a, w, q in pieces]
        self.r_lo = self.pieces[0][0]
        self.r_hi = self.pieces[-1][0] + self.pieces[-1][1]
        self.breaks = [a for a, _, _ in self.pieces] + [self.r_hi]

    def _locate(self, r):
        idx = np.searchsorted(self.breaks, r, side="right") - 1
        return np.clip(idx, 0, len(self.pieces) - 1)

    def __call__(self, r):
        r, scalar = _scalar_guard(r)
        out = np.zeros_like(r)
        inside = (r >= self.r_lo) & (r <= self.r_hi)
        if np.any(inside):
            ri = r[inside]
            vals = np.empty_like(ri)
            for k in self._unique_idx(ri):
                a, w, q = self.pieces[k]
                sel = self._locate(ri) == k
                vals[sel] = q((ri[sel] - a) / w)
            out[inside] = vals
        return float(out[0]) if scalar else out

    def _unique_idx(self, r):
        return np.unique(self._locate(r))

    def deriv(self, r, order=1):
        r, scalar = _scalar_guard(r)
        out = np.zeros_like(r)
        inside = (r > self.r_lo) & (r < self.r_hi)
        if np.any(inside):
            ri = r[inside]
            vals = np.empty_like(ri)
            for k in self._unique_idx(ri):
                a, w, q = self.pieces[k]
                sel = self._locate(ri) == k
                vals[sel] = q.deriv(order)((ri[sel] - a) / w) / w**order
            out[inside] = vals
        return float(out[0]) if scalar else out

    def weighted_dirichlet(self):
        """Exact int r f'(r)^2 dr, per piece and total."""
        parts = []
        for a, w, q in self.pieces:
            dq = q.deriv()
            integrand = (np.polynomial.Polynomial([a, w]) * dq * dq).integ()
            parts.append((integrand(1.0) - integrand(0.0)) / w)
        return float(sum(parts)), parts


def counterexample_potential(
    c: float, delta: float, eps: float = 0.2, gamma: float | None = None
) -> RadialPotential:
    """The ridge potential f_{c,delta}: height c sqrt(delta), slope c/sqrt(delta).

    Compactly supported in r, identically c sqrt(delta) on a plateau
    containing [1-gamma, 1+gamma], linear ramps of width delta starting at
    r = 1 -+ eps, and C^2 quintic glue of width <= delta at the five
    junctions. sup |f| <= 2 c sqrt(delta) while the Dirichlet integral
    int r f'^2 dr = 2 c^2 + R with R > 0 the glue remainder: uniform decay
    of the metric with no decay of the energy, which is the whole point.

    The returned potential carries the exact piecewise representation as
    the attribute .piecewise (values, derivatives, exact energy).
    """
    if gamma is None:
        gamma = min(0.01, (eps - delta) / 8.0)
    prm = CounterexampleParams(c=float(c), delta=float(delta), eps=float(eps), gamma=float(gamma))
    c, delta, eps, gamma = prm.c, prm.delta, prm.eps, prm.gamma
    h = c * math.sqrt(delta)
    s = c / math.sqrt(delta)
    r1, r2 = 1.0 - eps, 1.0 - eps + delta
    r3, r4 = 1.0 - gamma, 1.0 + gamma
    r5, r6 = 1.0 + eps - delta, 1.0 + eps
    wL = min(delta, (1.0 - eps) / 2.0)
    w1 = min(delta, (r3 - r2) / 2.0)
    w2 = min(delta, (r5 - r4) / 2.0)
    wR = delta
    pieces = [
        (r1 - wL, wL, _quintic(wL, 0, 0, 0, 0, s, 0)),
        (r1, delta, np.polynomial.Polynomial([0.0, h])),
        (r2, w1, _quintic(w1, h, s, 0, h, 0, 0)),
        (r2 + w1, (r5 - w2) - (r2 + w1), np.polynomial.Polynomial([h])),
        (r5 - w2, w2, _quintic(w2, h, 0, 0, h, -s, 0)),
        (r5, delta, np.polynomial.Polynomial([h, -h])),
        (r6, wR, _quintic(wR, 0, -s, 0, 0, 0, 0)),
    ]
    pw = PiecewiseRadial(pieces)
    t_lo = 2.0 * math.log(pw.breaks[0]) - 1.0
    t_hi = 2.0 * math.log(pw.breaks[-1]) + 1.0

    def phi(t, _pw=pw):
        # constant outside the junction range; clip before exponentiating
        tc = np.clip(np.asarray(t, dtype=float), t_lo, t_hi)
        return _pw(np.exp(0.5 * tc))

    def dens(t, _pw=pw):
        # t-density of dd^c f for radial f: (r^2 f'' + r f')/4 at r = e^{t/2}
        tc = np.clip(np.asarray(t, dtype=float), t_lo, t_hi)
        r = np.exp(0.5 * tc)
        return 0.25 * (r * r * _pw.deriv(r, 2) + r * _pw.deriv(r, 1))

    junction_ts = tuple(2.0 * math.log(b) for b in pw.breaks)
    pot = RadialPotential(
        degree=0,
        phi=phi,
        regularity="continuous-piecewise",
        positive=False,
        kinks=junction_ts,
        curvature_atoms=(),
        curvature_density=dens,
        curvature_support=(junction_ts[0], junction_ts[-1]),
        label=f"cex:c={c:g},delta={delta:g},eps={eps:g},gamma={gamma:g}",
    )
    object.__setattr__(pot, "piecewise", pw)
    object.__setattr__(pot, "params", prm)
    return pot


def counterexample_energy_oracle(pot: RadialPotential) -> dict:
    """Exact Dirichlet data for a counterexample potential.

    Returns the exact int r f'^2 dr split into the two ramps (2 c^2 exactly,
    the eps and delta dependence cancels) and the glue remainder R > 0, and
    the resulting paired value -(2 c^2 + R). Polynomial antiderivatives
    only, so this is an independent oracle for the quadrature route.
    """
    pw = pot.piecewise
    prm = pot.params
    total, parts = pw.weighted_dirichlet()
    # pieces 1 and 5 are the ramps
    ramps = parts[1] + parts[5]
    glue = total - ramps
    return {
        "c": prm.c,
        "delta": prm.delta,
        "weighted_dirichlet": total,
        "ramp_part": ramps,
        "ramp_exact": 2.0 * prm.c**2,
        "glue_remainder": glue,
        "dirichlet_term": -total,
    }


# --- grid import/export ---


def load_grid(path: str) -> RadialPotential:
    """Load a potential from a CSV grid (header t,phi) plus a JSON sidecar.

    The sidecar (same path with .json extension) must provide degree,
    regularity, positive and kinks. Values are interpolated with a monotone
    cubic; outside the grid the potential continues linearly with the
    boundary slopes, which are validated against the declared degree.

    The interpolant fails to be C^2 at every grid knot, so all knots ride
    along as quadrature splits; each panel between knots is a polynomial
    and costs the integrator a single Kronrod pass.
    """
    ts, vs = [], []
    with open(path, newline="") as fh:
        rd = csv.reader(fh)
        header = next(rd)
        if [h.strip() for h in header[:2]] != ["t", "phi"]:
            raise SpecError(f"grid CSV must start with header 't,phi', got {header}")
        for row in rd:
            if not row or not row[0].strip():
                continue
            ts.append(float(row[0]))
            vs.append(float(row[1]))
    side = os.path.splitext(path)[0] + ".json"
    if not os.path.exists(side):
        raise SpecError(f"grid sidecar not found: {side}")
    with open(side) as fh:
        meta = json.load(fh)
    for key in ("degree", "regularity", "positive"):
        if key not in meta:
            raise SpecError(f"grid sidecar missing key {key!r}")
    t = np.asarray(ts, dtype=float)
    v = np.asarray(vs, dtype=float)
    if len(t) < 4 or np.any(np.diff(t) <= 0):
        raise SpecError("grid needs at least 4 strictly increasing t values")
    interp = PchipInterpolator(t, v, extrapolate=False)
    d1 = interp.derivative(1)
    s_lo, s_hi = float(d1(t[0])), float(d1(t[-1]))
    degree = int(meta["degree"])
    if abs(s_hi - degree) > 0.1 or abs(s_lo) > 0.1:
        raise SpecError(
            f"grid slopes ({s_lo:.3f}, {s_hi:.3f}) inconsistent with degree {degree}"
        )
    lo, hi = float(t[0]), float(t[-1])
    v_lo, v_hi = float(v[0]), float(v[-1])

    def phi(x, _i=interp):
        x, scalar = _scalar_guard(x)
        out = np.where(
            x < lo, v_lo + s_lo * (x - lo), np.where(x > hi, v_hi + s_hi * (x - hi), 0.0)
        )
        inside = (x >= lo) & (x <= hi)
        if np.any(inside):
            out = np.array(out, dtype=float)
            out[inside] = _i(x[inside])
        return float(out[0]) if scalar else out

    d2 = interp.derivative(2)

    def dens(x, _d2=d2):
        x, scalar = _scalar_guard(x)
        out = np.zeros_like(x)
        inside = (x > lo) & (x < hi)
        out[inside] = _d2(x[inside])
        return float(out[0]) if scalar else out

    kinks = tuple(float(k) for k in meta.get("kinks", ())) + tuple(float(x) for x in t)
    return RadialPotential(
        degree=degree,
        phi=phi,
        regularity=str(meta["regularity"]),
        positive=bool(meta["positive"]),
        kinks=tuple(sorted(set(kinks))),
        curvature_density=dens,
        curvature_support=(lo, hi),
        label=f"grid:{os.path.basename(path)}",
    )


def write_grid(p: RadialPotential, path: str, t_lo=-30.0, t_hi=30.0, n=2001):
    """Sample a potential to CSV + sidecar, the inverse of load_grid."""
    ts = np.linspace(t_lo, t_hi, n)
    vs = np.asarray(p.phi(ts), dtype=float)
    with open(path, "w", newline="") as fh:
        wr = csv.writer(fh)
        wr.writerow(["t", "phi"])
        for a, b in zip(ts, vs):
            wr.writerow([f"{a:.15g}", f"{b:.15g}"])
    side = os.path.splitext(path)[0] + ".json"
    with open(side, "w") as fh:
        json.dump(
            {
                "degree": p.degree,
                "regularity": p.regularity,
                "positive": p.positive,
                "kinks": [k for k in p.kinks if t_lo < k < t_hi],
            },
            fh,
            indent=2,
        )


# --- mini language ---


def _parse_kv(body: str) -> dict:
    out = {}
    if not body:
        return out
    for chunk in body.split(","):
        if "=" not in chunk:
            raise SpecError(f"expected key=value, got {chunk!r}")
        k, v = chunk.split("=", 1)
        out[k.strip()] = v.strip()
    return out


def parse_spec(spec: str) -> RadialPotential:
    """Parse the metric mini-language.

    Forms: fs:m | canonical:m | zhang:base=<spec>,p=<int>,n=<int>
         | cex:c=..,delta=..[,eps=..][,gamma=..] | grid:<path.csv>
         | lse:m=..,a=.. | mollmax:m=..,eps=..
    """
    spec = spec.strip()
    if ":" not in spec:
        if spec == "zero":
            return fubini_study(0)
        raise SpecError(f"malformed metric spec {spec!r}")
    kind, body = spec.split(":", 1)
    kind = kind.strip().lower()
    try:
        if kind == "fs":
            return fubini_study(int(body))
        if kind == "canonical":
            return canonical(int(body))
        if kind == "grid":
            return load_grid(body)
        if kind == "zhang":
            # base value itself contains a colon; split only on commas
            kv = {}
            for chunk in body.split(","):
                k, v = chunk.split("=", 1)
                kv[k.strip()] = v.strip()
            return zhang_iterate(parse_spec(kv["base"]), int(kv["p"]), int(kv["n"]))
        if kind == "cex":
            kv = _parse_kv(body)
            return counterexample_potential(
                float(kv["c"]),
                float(kv["delta"]),
                eps=float(kv.get("eps", 0.2)),
                gamma=float(kv["gamma"]) if "gamma" in kv else None,
            )
        if kind == "lse":
            kv = _parse_kv(body)
            return lse(int(kv["m"]), float(kv["a"]))
        if kind == "mollmax":
            kv = _parse_kv(body)
            return mollified_max(int(kv["m"]), float(kv["eps"]))
    except SpecError:
        raise
    except (KeyError, ValueError, IndexError) as exc:
        raise SpecError(f"malformed metric spec {spec!r}: {exc}") from exc
    raise SpecError(f"unknown metric kind {kind!r} in {spec!r}")


def parse_volume(spec: str) -> VolumeForm:
    """Parse the volume mini-language: fs | canonical | any degree-2 metric spec."""
    spec = spec.strip()
    if spec in ("fs", "fubini-study"):
        return volume_fs()
    if spec in ("canonical", "inf", "singular"):
        return volume_canonical()
    pot = parse_spec(spec)
    if pot.degree != 2:
        raise SpecError(
            f"volume spec {spec!r} has degree {pot.degree}, need degree 2"
        )
    return volume_from_potential(pot, label=spec)
