"""Command line front end.

Subcommands: torsion, quillen, gram, anomaly, zhang, counterexample,
closed-form, double-limit, bt-check. Metrics and volumes use the mini
language of metrics.parse_spec / parse_volume. Output is JSON on stdout
(floats at 15 significant digits); --json / --csv write files; --no-meta
drops the timestamped meta block for byte-identical reruns.

Exit codes: 0 ok, 1 a --verify verdict failed, 2 usage or spec error,
3 numerical failure.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import os
import sys

from . import experiments
from .gram import gram, gram_canonical_closed, gram_fs_closed
from .metrics import (
    SpecError,
    canonical,
    parse_spec,
    parse_volume,
    sup_distance,
)
from .quadrature import NumericalError, QuadConfig
from .radial import measure_mass
from .torsion import bundle_anomaly, quillen, torsion, volume_anomaly

ENV_CONFIG = "SPHERETORSION_CONFIG"


@dataclasses.dataclass
class RunConfig:
    quad_fail_tol: float = 5e-8
    jobs: int = 1
    no_meta: bool = False

    def quad(self) -> QuadConfig:
        return QuadConfig(fail_tol=self.quad_fail_tol)


def _load_config(path):
    cfg = RunConfig()
    if path is None:
        path = os.environ.get(ENV_CONFIG)
    if path:
        with open(path) as fh:
            data = json.load(fh)
        for f in dataclasses.fields(RunConfig):
            if f.name in data:
                setattr(cfg, f.name, data[f.name])
    return cfg


def _merge_cli(cfg: RunConfig, args) -> RunConfig:
    # precedence: CLI flags over config file over defaults
    if getattr(args, "jobs", None) is not None:
        cfg.jobs = args.jobs
    if getattr(args, "quad_tol", None) is not None:
        cfg.quad_fail_tol = args.quad_tol
    if getattr(args, "no_meta", False):
        cfg.no_meta = True
    return cfg


def _emit(payload: dict, args, cfg: RunConfig) -> None:
    text = experiments.write_json(payload, path=None, no_meta=cfg.no_meta)
    if getattr(args, "json_path", None):
        experiments.write_json(payload, path=args.json_path, no_meta=cfg.no_meta)
    if getattr(args, "csv_path", None) and "rows" in payload:
        experiments.write_csv(payload["rows"], args.csv_path)
    print(text)


def _verify_block(checks: dict) -> dict:
    return {"checks": checks, "passed": all(checks.values())}


# --- subcommand handlers ---


def _cmd_torsion(args, cfg):
    p = parse_spec(args.metric)
    w = parse_volume(args.volume)
    res = torsion(p, w, route=args.route, cfg=cfg.quad())
    payload = {
        "command": "torsion",
        "inputs": {"metric": args.metric, "volume": args.volume, "route": args.route},
        "results": res.as_dict(),
    }
    if args.verify:
        mass = measure_mass(p, cfg=cfg.quad())
        checks = {
            "mass_equals_degree_1e-9": abs(mass - p.degree) <= 1e-9,
            "error_budget": res.err <= 1e-6,
        }
        payload["verify"] = _verify_block(checks)
    return payload


def _cmd_quillen(args, cfg):
    p = parse_spec(args.metric)
    w = parse_volume(args.volume)
    res = quillen(p, w, route=args.route, cfg=cfg.quad())
    payload = {
        "command": "quillen",
        "inputs": {"metric": args.metric, "volume": args.volume, "route": args.route},
        "results": res.as_dict(),
    }
    if args.verify:
        # the anomaly identity at this point against the reference metric
        from .metrics import fubini_study

        if p.degree < 0:
            raise SpecError("quillen --verify needs degree >= 0")
        ref = fubini_study(p.degree)
        lhs = res.log_quillen - quillen(ref, w, cfg=cfg.quad()).log_quillen
        rhs = -bundle_anomaly(p, ref, w, cfg=cfg.quad()).value
        checks = {"anomaly_identity_1e-8": abs(lhs - rhs) <= 1e-8}
        payload["verify"] = _verify_block(checks)
    return payload


def _cmd_gram(args, cfg):
    p = parse_spec(args.metric)
    w = parse_volume(args.volume)
    g = gram(p, w, cfg=cfg.quad())
    payload = {
        "command": "gram",
        "inputs": {"metric": args.metric, "volume": args.volume},
        "results": g.as_dict(),
    }
    if args.verify:
        checks = {"entries_positive": bool((g.entries > 0).all())}
        if args.metric.startswith("fs:") and args.volume == "fs":
            import numpy as np

            checks["matches_closed_form_1e-10"] = bool(
                np.max(np.abs(g.entries - gram_fs_closed(p.degree))) <= 1e-10
            )
        if args.metric.startswith("canonical:") and args.volume == "canonical":
            import numpy as np

            checks["matches_closed_form_1e-10"] = bool(
                np.max(np.abs(g.entries - gram_canonical_closed(p.degree))) <= 1e-10
            )
        payload["verify"] = _verify_block(checks)
    return payload


def _cmd_anomaly(args, cfg):
    if args.kind == "bundle":
        if not args.metric2:
            raise SpecError("bundle anomaly needs --metric2")
        p1, p2 = parse_spec(args.metric), parse_spec(args.metric2)
        w = parse_volume(args.volume)
        term = bundle_anomaly(p1, p2, w, cfg=cfg.quad())
        rev = bundle_anomaly(p2, p1, w, cfg=cfg.quad())
    elif args.kind == "volume":
        if not args.volume2:
            raise SpecError("volume anomaly needs --volume2")
        p = parse_spec(args.metric)
        w1, w2 = parse_volume(args.volume), parse_volume(args.volume2)
        term = volume_anomaly(p, w1, w2, cfg=cfg.quad())
        rev = volume_anomaly(p, w2, w1, cfg=cfg.quad())
    else:
        raise SpecError(f"unknown anomaly kind {args.kind!r}")
    payload = {
        "command": "anomaly",
        "inputs": {
            "kind": args.kind,
            "metric": args.metric,
            "metric2": args.metric2,
            "volume": args.volume,
            "volume2": args.volume2,
        },
        "results": term.as_dict(),
    }
    if args.verify:
        payload["verify"] = _verify_block(
            {"antisymmetry_1e-10": abs(term.value + rev.value) <= 1e-10}
        )
    return payload


def _cmd_zhang(args, cfg):
    base = parse_spec(args.base)
    from .metrics import zhang_iterate

    it = zhang_iterate(base, args.p, args.n)
    limit = canonical(base.degree)
    d0 = sup_distance(base, limit)
    dn = sup_distance(it, limit)
    payload = {
        "command": "zhang",
        "inputs": {"base": args.base, "p": args.p, "n": args.n},
        "results": {
            "label": it.label,
            "sup_distance_base": d0,
            "sup_distance_iterate": dn,
            "contraction_bound": d0 / float(args.p) ** args.n,
        },
    }
    if args.verify:
        payload["verify"] = _verify_block(
            {"contracts_at_rate": dn <= d0 / float(args.p) ** args.n + 1e-10}
        )
    return payload


def _cmd_counterexample(args, cfg):
    deltas = [float(x) for x in args.deltas.split(",")]
    res = experiments.run_counterexample(
        cs=(args.c,), deltas=deltas, eps=args.eps, gamma=args.gamma, jobs=cfg.jobs
    )
    if args.verify:
        res["verify"] = _verify_block(
            {
                "sup_within_2_scale": res["verdicts"]["sup_within_2_scale"],
                "dirichlet_matches_oracle": res["verdicts"]["dirichlet_matches_oracle_1e-6"],
                "continuity_fails": res["verdicts"]["continuity_fails"],
            }
        )
    return res


def _cmd_closed_form(args, cfg):
    res = experiments.run_closed_form(ms=tuple(range(0, args.m_max + 1)), jobs=cfg.jobs)
    if args.verify:
        res["verify"] = _verify_block(
            {
                "matches_closed_form_1e-6": res["verdicts"]["matches_closed_form_1e-6"],
                "certificate_holds": res["verdicts"]["certificate_holds_1e-7"],
                "routes_agree": res["verdicts"]["routes_agree_1e-6"],
            }
        )
    return res


def _cmd_double_limit(args, cfg):
    res = experiments.run_double_limit_study(m=args.m, n_max=args.n_max, tol=args.tol)
    if args.verify:
        res["verify"] = _verify_block(dict(res["verdicts"]))
    return res


def _cmd_bt_check(args, cfg):
    res = experiments.run_bt_suite(m=args.m, tol=args.tol)
    if args.verify:
        res["verify"] = _verify_block(dict(res["verdicts"]))
    return res


# --- parser assembly ---


def _add_common(sp):
    sp.add_argument("--verify", action="store_true", help="run built-in checks; exit 1 on failure")
    sp.add_argument("--json", dest="json_path", default=None, help="also write JSON to this path")
    sp.add_argument("--csv", dest="csv_path", default=None, help="write result rows as CSV")
    sp.add_argument("--no-meta", action="store_true", help="omit timestamped metadata")
    sp.add_argument("--jobs", type=int, default=None, help="parallel workers for row sweeps")
    sp.add_argument("--quad-tol", type=float, default=None, help="quadrature failure budget")
    sp.add_argument("--config", default=None, help=f"config JSON (or ${ENV_CONFIG})")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="spheretorsion",
        description="Quillen metrics and analytic torsion for circle-invariant "
        "metrics on line bundles over the sphere",
    )
    sub = ap.add_subparsers(dest="command", required=True)

    sp = sub.add_parser("torsion", help="analytic torsion of (metric, volume)")
    sp.add_argument("--metric", required=True)
    sp.add_argument("--volume", default="fs")
    sp.add_argument("--route", default="auto")
    _add_common(sp)
    sp.set_defaults(handler=_cmd_torsion)

    sp = sub.add_parser("quillen", help="log Quillen metric on det H^0")
    sp.add_argument("--metric", required=True)
    sp.add_argument("--volume", default="fs")
    sp.add_argument("--route", default="auto")
    _add_common(sp)
    sp.set_defaults(handler=_cmd_quillen)

    sp = sub.add_parser("gram", help="diagonal Gram data of the monomial basis")
    sp.add_argument("--metric", required=True)
    sp.add_argument("--volume", default="fs")
    _add_common(sp)
    sp.set_defaults(handler=_cmd_gram)

    sp = sub.add_parser("anomaly", help="bundle or volume anomaly term")
    sp.add_argument("--kind", choices=("bundle", "volume"), required=True)
    sp.add_argument("--metric", required=True)
    sp.add_argument("--metric2", default=None)
    sp.add_argument("--volume", default="fs")
    sp.add_argument("--volume2", default=None)
    _add_common(sp)
    sp.set_defaults(handler=_cmd_anomaly)

    sp = sub.add_parser("zhang", help="dilation iterate diagnostics")
    sp.add_argument("--base", required=True)
    sp.add_argument("--p", type=int, default=2)
    sp.add_argument("--n", type=int, default=5)
    _add_common(sp)
    sp.set_defaults(handler=_cmd_zhang)

    sp = sub.add_parser("counterexample", help="ridge family study")
    sp.add_argument("--c", type=float, default=1.0)
    sp.add_argument("--deltas", default="1e-2,1e-3,1e-4")
    sp.add_argument("--eps", type=float, default=0.2)
    sp.add_argument("--gamma", type=float, default=None)
    _add_common(sp)
    sp.set_defaults(handler=_cmd_counterexample)

    sp = sub.add_parser("closed-form", help="canonical torsion sweep vs catalog target")
    sp.add_argument("--m-max", type=int, default=5)
    _add_common(sp)
    sp.set_defaults(handler=_cmd_closed_form)

    sp = sub.add_parser("double-limit", help="double sequence route agreement study")
    sp.add_argument("--m", type=int, default=1)
    sp.add_argument("--n-max", type=int, default=32)
    sp.add_argument("--tol", type=float, default=1e-6)
    _add_common(sp)
    sp.set_defaults(handler=_cmd_double_limit)

    sp = sub.add_parser("bt-check", help="weak convergence battery")
    sp.add_argument("--m", type=int, default=1)
    sp.add_argument("--tol", type=float, default=1e-7)
    _add_common(sp)
    sp.set_defaults(handler=_cmd_bt_check)

    return ap


def main(argv=None) -> int:
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as exc:
        # argparse already printed the message; normalize usage errors to 2
        return 0 if exc.code in (0, None) else 2
    try:
        cfg = _merge_cli(_load_config(args.config), args)
        payload = args.handler(args, cfg)
        _emit(payload, args, cfg)
    except SpecError as exc:
        print(f"spec error: {exc}", file=sys.stderr)
        return 2
    except NumericalError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 3
    except ValueError as exc:
        print(f"invalid input: {exc}", file=sys.stderr)
        return 2
    if args.verify and "verify" in payload and not payload["verify"]["passed"]:
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
