"""Spectral reference, the anomaly lattice, and the transfer chain.

The m = 1 anchors are hand derivations (kept in CONVENTIONS.md):
with dphi = phi_can - phi_fs = -log(1+e^{-|t|}) one gets
pair(dphi, mu_can) = -log 2 and pair(dphi, mu_fs) = log 2 - 1 by the
substitution u = 1/(1+e^{-t}), hence

    K(can_1, fs_1; omega_fs) = 2[-log2 + log2 - 1] + (log2 - 1) = log 2 - 3
    V(can_1; omega_can, omega_fs) = -log 2 - 1/3
    T(can_1, omega_can) = T_fs(1) + 10/3 - 2 log(3/2)

none of which the engine knows in closed form.
"""

import math

import numpy as np
import pytest

from spheretorsion import (
    SPECTRUM_SCALE,
    bundle_anomaly,
    canonical,
    dual,
    fs_reference_torsion,
    fubini_study,
    generalized_quillen_limit,
    generalized_torsion_curve,
    gram,
    lse,
    mollified_max,
    parse_volume,
    quillen,
    tensor,
    torsion,
    volume_anomaly,
    volume_canonical,
    volume_fs,
    zeta_prime_minus1_em,
    zeta_zero,
    zhang_iterate,
)
from spheretorsion.torsion import _zeta_prime_zero_unit

from conftest import LOG2, LOGPI, QUAD, ZETA_PRIME_M1, ZPRIME_UNIT

WFS = volume_fs()
WCAN = volume_canonical()


# --- zeta machinery ---


def test_zeta_zero_values():
    assert zeta_zero(0) == pytest.approx(-2.0 / 3.0, abs=1e-15)
    for m in range(9):
        assert zeta_zero(m) == pytest.approx(-(m + 1) / 2.0 - 1.0 / 6.0, abs=1e-15)


def test_zeta_prime_minus1_euler_maclaurin():
    assert abs(zeta_prime_minus1_em() - ZETA_PRIME_M1) < 1e-12
    # stability under truncation choices
    assert abs(zeta_prime_minus1_em(N=40, K=5) - zeta_prime_minus1_em(N=90, K=6)) < 1e-12


@pytest.mark.parametrize("m", range(9))
def test_hurwitz_continuation_against_frozen_table(m):
    assert abs(_zeta_prime_zero_unit(m) - ZPRIME_UNIT[m]) < 1e-11


def test_reference_scale_law():
    # zeta'(0; c lambda) = zeta'(0; lambda) - log(c) zeta(0)
    for m in (0, 1, 4):
        t1 = fs_reference_torsion(m, scale=1.0).value
        assert t1 == pytest.approx(ZPRIME_UNIT[m], abs=1e-11)
        t2 = fs_reference_torsion(m, scale=2.0 * math.pi).value
        tpi = fs_reference_torsion(m).value
        assert t2 - tpi == pytest.approx(-LOG2 * zeta_zero(m), abs=1e-12)


def test_reference_default_scale_is_geometric():
    assert SPECTRUM_SCALE == math.pi
    assert fs_reference_torsion(0).value == pytest.approx(
        ZPRIME_UNIT[0] + (2.0 / 3.0) * LOGPI, abs=1e-12
    )
    with pytest.raises(ValueError):
        fs_reference_torsion(-1)


# --- anomaly lattice: exact identities ---


def test_anomalies_vanish_on_equal_arguments():
    p = mollified_max(2, 0.5)
    assert bundle_anomaly(p, p, WFS, cfg=QUAD).value == pytest.approx(0.0, abs=1e-13)
    assert volume_anomaly(p, WFS, WFS, cfg=QUAD).value == pytest.approx(0.0, abs=1e-13)


def test_bundle_anomaly_antisymmetric():
    pairs = [
        (fubini_study(2), mollified_max(2, 0.5)),
        (canonical(1), fubini_study(1)),
        (lse(3, 4.0), fubini_study(3)),
    ]
    for p1, p2 in pairs:
        a = bundle_anomaly(p1, p2, WFS, cfg=QUAD).value
        b = bundle_anomaly(p2, p1, WFS, cfg=QUAD).value
        assert abs(a + b) < 1e-10


def test_volume_anomaly_antisymmetric():
    wl = parse_volume("lse:m=2,a=4")
    for w1, w2 in [(WFS, WCAN), (WFS, wl), (WCAN, wl)]:
        a = volume_anomaly(fubini_study(1), w1, w2, cfg=QUAD).value
        b = volume_anomaly(fubini_study(1), w2, w1, cfg=QUAD).value
        assert abs(a + b) < 1e-10


def test_bundle_cocycle():
    w = WFS
    trios = [
        (fubini_study(2), mollified_max(2, 0.5), lse(2, 3.0)),
        (fubini_study(1), canonical(1), lse(1, 5.0)),
    ]
    for a, b, c in trios:
        gap = (
            bundle_anomaly(a, c, w, cfg=QUAD).value
            - bundle_anomaly(a, b, w, cfg=QUAD).value
            - bundle_anomaly(b, c, w, cfg=QUAD).value
        )
        assert abs(gap) < 1e-9


def test_volume_cocycle():
    # the curvature trapezoid is what makes this exact; with area densities
    # in the Todd slot the gap is ~2.5e-4 on exactly these triples
    wl = parse_volume("lse:m=2,a=4")
    wm = parse_volume("mollmax:m=2,eps=0.6")
    p = fubini_study(1)
    for a, b, c in [(WFS, WCAN, wl), (WFS, wm, wl), (WCAN, wm, WFS)]:
        gap = (
            volume_anomaly(p, a, c, cfg=QUAD).value
            - volume_anomaly(p, a, b, cfg=QUAD).value
            - volume_anomaly(p, b, c, cfg=QUAD).value
        )
        assert abs(gap) < 1e-9


def test_mixed_square_commutes():
    # change bundle then volume vs volume then bundle
    p1, p2 = fubini_study(2), mollified_max(2, 0.5)
    lhs = bundle_anomaly(p1, p2, WCAN, cfg=QUAD).value - bundle_anomaly(p1, p2, WFS, cfg=QUAD).value
    rhs = volume_anomaly(p1, WCAN, WFS, cfg=QUAD).value - volume_anomaly(p2, WCAN, WFS, cfg=QUAD).value
    assert abs(lhs - rhs) < 1e-9


def test_bundle_anomaly_degree_mismatch_refused():
    with pytest.raises(ValueError, match="equal degrees"):
        bundle_anomaly(fubini_study(1), fubini_study(2), WFS, cfg=QUAD)


def test_m1_anchor_values():
    K = bundle_anomaly(canonical(1), fubini_study(1), WFS, cfg=QUAD)
    assert K.value == pytest.approx(LOG2 - 3.0, abs=1e-11)
    assert K.diagnostics["pair_mu1"] == pytest.approx(-LOG2, abs=1e-12)
    assert K.diagnostics["pair_mu2"] == pytest.approx(LOG2 - 1.0, abs=1e-11)
    V = volume_anomaly(canonical(1), WCAN, WFS, cfg=QUAD)
    assert V.value == pytest.approx(-LOG2 - 1.0 / 3.0, abs=1e-11)
    assert V.diagnostics["pair_mu"] == pytest.approx(-2.0 * LOG2, abs=1e-12)
    assert V.diagnostics["pair_todd1"] == pytest.approx(-4.0 * LOG2, abs=1e-12)
    assert V.diagnostics["pair_todd2"] == pytest.approx(4.0 * (LOG2 - 1.0), abs=1e-11)


# --- the transfer chain ---


def test_torsion_m1_anchor():
    t = torsion(canonical(1), WCAN, cfg=QUAD)
    want = fs_reference_torsion(1).value + 10.0 / 3.0 - 2.0 * math.log(1.5)
    assert t.value == pytest.approx(want, abs=1e-10)
    assert t.route == "direct-integrable"
    assert set(t.components) == {
        "reference", "bundle_anomaly", "volume_anomaly", "log_gram_ref", "log_gram",
    }


def test_quillen_bookkeeping_identity():
    q = quillen(canonical(1), WCAN, cfg=QUAD)
    assert q.log_quillen - q.log_l2 - q.torsion.value == 0.0
    assert q.log_l2 == pytest.approx(2.0 * math.log(1.5), abs=1e-11)
    assert q.log_quillen == pytest.approx(
        fs_reference_torsion(1).value + 10.0 / 3.0, abs=1e-10
    )


def test_anomaly_identity_many_pairs():
    # quillen(p,w) - quillen(p',w) = -bundle_anomaly(p,p',w), five pairs,
    # mixed regularity, and at a non-reference volume as well
    wl = parse_volume("lse:m=2,a=3")
    cases = [
        (fubini_study(2), mollified_max(2, 0.5), WFS),
        (fubini_study(2), lse(2, 3.0), WFS),
        (mollified_max(2, 0.4), lse(2, 5.0), WFS),
        (canonical(1), fubini_study(1), WFS),
        (fubini_study(1), lse(1, 2.0), wl),
        (zhang_iterate(fubini_study(2), 2, 3), fubini_study(2), WFS),
    ]
    for p1, p2, w in cases:
        lhs = quillen(p1, w, cfg=QUAD).log_quillen - quillen(p2, w, cfg=QUAD).log_quillen
        rhs = -bundle_anomaly(p1, p2, w, cfg=QUAD).value
        assert abs(lhs - rhs) < 1e-8, (p1.label, p2.label, w.label)


def test_volume_change_identity():
    # same shape in the volume slot
    for p in (fubini_study(1), mollified_max(2, 0.5)):
        lhs = quillen(p, WCAN, cfg=QUAD).log_quillen - quillen(p, WFS, cfg=QUAD).log_quillen
        rhs = -volume_anomaly(p, WCAN, WFS, cfg=QUAD).value
        assert abs(lhs - rhs) < 1e-9


def test_routes_agree_on_smooth_data():
    for m in (0, 1, 3):
        spectral = torsion(fubini_study(m), WFS, cfg=QUAD)
        assert spectral.route == "spectral"
        transfer = torsion(fubini_study(m), WFS, route="anomaly-transfer", cfg=QUAD)
        assert abs(spectral.value - transfer.value) < 1e-8


def test_route_selection_and_refusals():
    assert torsion(canonical(2), WCAN, cfg=QUAD).route == "direct-integrable"
    assert torsion(mollified_max(1, 0.5), WFS, cfg=QUAD).route == "anomaly-transfer"
    with pytest.raises(ValueError, match="unknown route"):
        torsion(fubini_study(1), WFS, route="bogus", cfg=QUAD)
    with pytest.raises(ValueError, match="explicit approximating family"):
        torsion(fubini_study(1), WFS, route="generalized-limit", cfg=QUAD)
    with pytest.raises(ValueError, match="degree >= 0"):
        torsion(dual(fubini_study(1)), WFS, cfg=QUAD)


def test_torsion_deterministic():
    a = torsion(canonical(1), WCAN, cfg=QUAD).value
    b = torsion(canonical(1), WCAN, cfg=QUAD).value
    assert a == b


# --- generalized limits ---


def test_generalized_limit_refuses_nonpositive():
    from spheretorsion import counterexample_potential

    ridge = counterexample_potential(1.0, 1e-3)
    fam = lambda n: tensor(fubini_study(1), ridge)
    vols = lambda n: WFS
    with pytest.raises(ValueError, match="not positive"):
        generalized_quillen_limit(fam, vols, indices=(0, 1), grid_indices=(), cfg=QUAD)


def test_generalized_limit_constant_family_converges_immediately():
    fam = lambda n: fubini_study(1)
    vols = lambda n: WFS
    lim = generalized_quillen_limit(fam, vols, indices=range(4), grid_indices=(), cfg=QUAD)
    assert lim.report.verdict == "converged"
    assert lim.grid is None
    assert lim.value == pytest.approx(quillen(fubini_study(1), WFS, cfg=QUAD).log_quillen, abs=1e-12)
    assert max(lim.diagonal) - min(lim.diagonal) == 0.0


def test_generalized_limit_reaches_canonical_quillen():
    # sharpening bundle metrics over the fixed round volume: the diagonal
    # must land on the direct-integrable value for the canonical limit
    fam = lambda n: lse(1, 2.0**n)
    vols = lambda n: WFS
    lim = generalized_quillen_limit(
        fam, vols, indices=range(8, 25, 2), grid_indices=range(3), tol=1e-4, cfg=QUAD
    )
    assert lim.report.verdict == "converged"
    assert lim.grid is not None and lim.grid.shape == (3, 3)
    want = quillen(canonical(1), WFS, cfg=QUAD).log_quillen
    assert abs(lim.value - want) < 1e-4


def test_generalized_torsion_curve_decomposition_independence():
    p = fubini_study(1)
    decs = [
        (lambda n: lse(3, 2.0**n), lambda n: lse(1, 2.0**n)),
        (lambda n: zhang_iterate(fubini_study(4), 2, n), lambda n: zhang_iterate(fubini_study(2), 2, n)),
    ]
    out = generalized_torsion_curve(p, decs, indices=range(2, 25, 2), tol=1e-5, cfg=QUAD)
    assert out["verdict"] == "converged"
    assert out["agreement"] < 1e-5
    want = torsion(p, WCAN, cfg=QUAD).value
    for lim in out["limits"]:
        assert abs(lim - want) < 1e-5


def test_generalized_curve_refuses_nonpositive_factor():
    p = fubini_study(1)
    bad = (lambda n: dual(fubini_study(3)), lambda n: fubini_study(1))
    with pytest.raises(ValueError, match="not positive"):
        generalized_torsion_curve(p, [bad], indices=(2, 4), cfg=QUAD)


# --- result plumbing ---


def test_result_dicts_round_trip():
    t = torsion(canonical(1), WCAN, cfg=QUAD)
    d = t.as_dict()
    assert d["value"] == t.value and d["route"] == t.route
    assert isinstance(d["components"], dict) and d["err"] < 1e-7
    q = quillen(fubini_study(1), WFS, cfg=QUAD)
    qd = q.as_dict()
    assert set(qd) == {"log_quillen", "log_l2", "torsion", "gram"}
    g = gram(fubini_study(1), WFS, cfg=QUAD).as_dict()
    assert g["m"] == 1 and len(g["entries"]) == 2
