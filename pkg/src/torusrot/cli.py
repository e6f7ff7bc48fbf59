"""Command-line front end.

    torusrot estimate    --config RUN.cfg --out REPORT.txt
    torusrot pushforward --config RUN.cfg --out REPORT.txt [--seed N] [--threads N]
    torusrot render      REPORT.txt --out FIGURE.svg
    torusrot selftest    [--seed N]

Exit codes: 0 success, 2 config/input error, 3 estimator error or theorem
check outside its error bars, 4 hypothesis fails, 5 certificate failed.
"""
from __future__ import annotations

import argparse
import logging
import sys

import numpy as np

from . import render
from . import report as rpt
from .config import ConfigError, RunConfig, read_config
from .dynamics import F_WORD, S_WORD, T_WORD, InverseNotConverged, Translation
from .geometry import RegionMeetsInfinityLine, hausdorff, hull, inflate
from .projective import EMPTY_IN_PLANE, IntMatrix3, pullback_infinity_line, random_sl3z
from .pushforward import (
    CertificateFailed,
    build_pushforward,
    check_hypothesis,
    discontinuity_certificate,
    discontinuity_empirical_check,
    verify_theorem,
    word_correspondence,
)
from .rotation import RotationSetEstimate, classical_rotation_set

log = logging.getLogger("torusrot")

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_ESTIMATOR = 3
EXIT_HYPOTHESIS = 4
EXIT_CERTIFICATE = 5


def _map_entries(rep: rpt.Report, cfg: RunConfig) -> None:
    rep["map.family"] = cfg.lift.name
    for k, v in cfg.lift.params().items():
        rep[f"map.{k}"] = v


def _line_value(L: IntMatrix3):
    line = pullback_infinity_line(L)
    if line is EMPTY_IN_PLANE:
        return "at-infinity"
    return [line.u, line.v, line.w]


def _estimate_entries(rep: rpt.Report, prefix: str, est: RotationSetEstimate) -> None:
    rep[f"{prefix}.method"] = est.method
    rep[f"{prefix}.ladder"] = est.iterate_ladder
    rep[f"{prefix}.grid_n"] = est.grid_n
    rep[f"{prefix}.margin"] = est.margin
    rep[f"{prefix}.hausdorff_trace"] = est.hausdorff_trace
    rep[f"{prefix}.inner.vertices"] = est.inner
    rep[f"{prefix}.outer.vertices"] = est.outer


def cmd_estimate(cfg: RunConfig, out: str | None) -> int:
    rep = rpt.Report()
    rep["kind"] = "estimate"
    _map_entries(rep, cfg)
    try:
        est = classical_rotation_set(cfg.lift, cfg.ladder, cfg.grid_n)
    except (InverseNotConverged, ValueError) as exc:
        log.error("estimator failed: %s", exc)
        rep["status"] = "estimator-error"
        _emit(rep, out)
        return EXIT_ESTIMATOR
    _estimate_entries(rep, "estimate", est)
    if cfg.matrix is not None:
        rep["matrix.L"] = cfg.matrix.flat()
        rep["hypothesis.line"] = _line_value(cfg.matrix)
    rep["status"] = "ok"
    _emit(rep, out)
    return EXIT_OK


def cmd_pushforward(cfg: RunConfig, out: str | None, seed: int = 0, threads: int = 1) -> int:
    if cfg.matrix is None:
        raise ConfigError("pushforward needs a [matrix] section")
    rep = rpt.Report()
    rep["kind"] = "pushforward"
    _map_entries(rep, cfg)
    sys_ = build_pushforward(cfg.lift, cfg.matrix)
    rep["matrix.L"] = sys_.L.flat()
    rep["matrix.L_inv"] = sys_.L_inv.flat()
    rep["words.U"] = list(sys_.U.as_tuple())
    rep["words.V"] = list(sys_.V.as_tuple())
    rep["words.G"] = list(sys_.G.as_tuple())
    rep["hypothesis.line"] = _line_value(cfg.matrix)

    try:
        est = classical_rotation_set(cfg.lift, cfg.ladder, cfg.grid_n)
    except (InverseNotConverged, ValueError) as exc:
        log.error("estimator failed: %s", exc)
        rep["status"] = "estimator-error"
        _emit(rep, out)
        return EXIT_ESTIMATOR
    _estimate_entries(rep, "estimate", est)

    clearance = check_hypothesis(sys_, est)
    rep["hypothesis.clearance"] = clearance
    rep["hypothesis.holds"] = clearance > 0
    if not clearance > 0:
        rep["status"] = "hypothesis-failed"
        _emit(rep, out)
        log.error("rotation set estimate meets the line sent to infinity")
        return EXIT_HYPOTHESIS

    try:
        cert = discontinuity_certificate(sys_, est, cfg.R, cfg.k_scan, cfg.cert_grid_n)
    except CertificateFailed as exc:
        rep["certificate.status"] = "failed"
        rep["status"] = "certificate-failed"
        _emit(rep, out)
        log.error("certificate failed: %s", exc)
        return EXIT_CERTIFICATE
    rep["certificate.sampled"] = "grid-sampled containments for |k| up to k_scan, not a proof"
    for name in ("R", "epsilon", "k0", "R_prime", "R_dprime", "mn_bound", "k_scan", "grid_n",
                 "clearance", "tau1", "tau2", "sigma_min"):
        rep[f"certificate.{name}"] = getattr(cert, name)
    rep["certificate.neighbourhood.vertices"] = cert.neighbourhood

    emp = discontinuity_empirical_check(sys_, cert, cfg.trials, seed)
    rep["empirical.trials"] = emp.trials
    rep["empirical.box_hits"] = emp.box_hits
    rep["empirical.violations"] = len(emp.violations)
    rep["empirical.violating_pairs"] = [x for mn in emp.violations for x in mn]
    if not emp.passed:
        rep["certificate.status"] = "failed"
        rep["status"] = "certificate-failed"
        _emit(rep, out)
        return EXIT_CERTIFICATE
    rep["certificate.status"] = "valid"

    try:
        th = verify_theorem(sys_, cfg.ladder, cfg.grid_n, cfg.p_max, cfg.window, cfg.K, threads, classical=est,
                           per_edge=cfg.per_edge)
    except (InverseNotConverged, RegionMeetsInfinityLine) as exc:
        log.error("theorem check failed: %s", exc)
        rep["status"] = "estimator-error"
        _emit(rep, out)
        return EXIT_ESTIMATOR
    rep["theorem.p_max"] = cfg.p_max
    rep["theorem.slope_window"] = th.params["slope_window"]
    rep["theorem.K"] = th.params["K"]
    rep["theorem.image.inner.vertices"] = th.image_inner
    rep["theorem.image.outer.vertices"] = th.image_outer
    if th.zaction is not None:
        rep["theorem.zaction.hits"] = len(th.zaction.hits)
        rep["theorem.zaction.deep_threshold"] = th.zaction.deep_threshold
        rep["theorem.zaction.max_padding"] = th.zaction.max_padding
        rep["theorem.zaction.inner.vertices"] = th.zaction.estimate.inner
        rep["theorem.zaction.outer.vertices"] = th.zaction.estimate.outer
    else:
        rep["theorem.zaction.note"] = "empty-hit-set"
    rep["theorem.distance"] = th.distance
    rep["theorem.bar"] = th.bar
    rep["theorem.passed"] = th.passed
    rep["status"] = "pass" if th.passed else "theorem-failed"
    _emit(rep, out)
    return EXIT_OK if th.passed else EXIT_ESTIMATOR


def cmd_render(report_path: str, out: str) -> int:
    try:
        render.render_file(report_path, out)
    except (OSError, ValueError) as exc:
        log.error("cannot render %s: %s", report_path, exc)
        return EXIT_CONFIG
    return EXIT_OK


def _emit(rep: rpt.Report, out: str | None) -> None:
    if out:
        rep.write(out)
    else:
        sys.stdout.write(rep.dumps())


def _selftest_checks(seed: int):
    rng = np.random.default_rng(seed)
    F = Translation(0.5, 1 / 3)
    L = IntMatrix3(((1, 0, 0), (0, 1, 0), (-1, 0, 1)))

    def word_identity():
        for _ in range(200):
            sys_ = build_pushforward(F, random_sl3z(rng))
            t = rng.integers(-50, 51, size=3)
            left, right = word_correspondence(sys_, t)
            if left != right:
                return False
        return True

    def identity_words():
        s = build_pushforward(F, IntMatrix3.identity())
        return s.words == (S_WORD, T_WORD, F_WORD)

    def translation_pushforward():
        s = build_pushforward(F, L)
        th = verify_theorem(s, [1, 2, 4, 8], grid_n=8, p_max=96)
        target = hull([[1.0, 2 / 3]])
        return th.zaction is not None and hausdorff(th.zaction.estimate.inner, target) <= 0.1

    def certificate():
        s = build_pushforward(F, L)
        est = classical_rotation_set(F, [1, 2, 4], 8)
        cert = discontinuity_certificate(s, est, 1.0, k_scan=16, grid_n=8)
        emp = discontinuity_empirical_check(s, cert, 50, seed)
        return cert.k0 == 1 and cert.R_prime == 0 and emp.passed

    def geometry():
        pts = rng.normal(size=(40, 2))
        A = hull(pts)
        return hausdorff(A, hull(A.vertices)) == 0 and inflate(A, 0.3).contains_region(A)

    return [
        ("word identity (200 random L)", word_identity),
        ("identity gives S, T, F", identity_words),
        ("translation pushforward", translation_pushforward),
        ("discontinuity certificate", certificate),
        ("geometry basics", geometry),
    ]


def cmd_selftest(seed: int = 0) -> int:
    failed = 0
    for name, check in _selftest_checks(seed):
        try:
            ok = bool(check())
        except Exception as exc:  # report and carry on with the rest
            ok = False
            name = f"{name} ({type(exc).__name__}: {exc})"
        failed += not ok
        print(f"{'PASS' if ok else 'FAIL'}  {name}")
    return EXIT_OK if not failed else EXIT_ESTIMATOR


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="torusrot", description=__doc__.split("\n\n")[0])
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, config=True):
        if config:
            p.add_argument("--config", required=True, help="run configuration file")
        p.add_argument("--out", help="output path (stdout if omitted)")
        p.add_argument("--seed", type=int, default=0, help="random seed")
        p.add_argument("--threads", type=int, default=1, help="worker threads")
        p.add_argument("-v", "--verbose", action="store_true")

    common(sub.add_parser("estimate", help="classical rotation set of a lift"))
    common(sub.add_parser("pushforward", help="build U, V, G and check both theorem items"))
    p = sub.add_parser("render", help="draw a report as SVG")
    p.add_argument("report")
    common(p, config=False)
    common(sub.add_parser("selftest", help="quick built-in checks"), config=False)
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(
        level=logging.INFO if getattr(args, "verbose", False) else logging.WARNING,
        format="%(levelname)s %(name)s: %(message)s",
    )
    if args.command == "selftest":
        return cmd_selftest(args.seed)
    if args.command == "render":
        if not args.out:
            log.error("render needs --out")
            return EXIT_CONFIG
        return cmd_render(args.report, args.out)
    try:
        cfg = read_config(args.config)
        if args.command == "estimate":
            return cmd_estimate(cfg, args.out)
        return cmd_pushforward(cfg, args.out, args.seed, args.threads)
    except ConfigError as exc:
        print(f"{args.config}: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except OSError as exc:
        print(f"cannot read config: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
