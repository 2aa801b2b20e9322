"""Command-line front end: every verification as a reproducible run.

Each subcommand writes a JSON report (schema v1) into the output
directory (flag --out-dir, else $INFLEX_OUTPUT_DIR, else the working
directory) and exits 0 when every check passed, 1 on a check failure,
and 2 on invalid input.  A config file passed with --config holds the
same keys as the flags, one to one; flags given on the command line win.
The effective configuration, with every default made explicit, is
embedded in the report and round-trips byte-identically.
"""

import argparse
import json
import math
import os
import sys
import time

import numpy as np

from . import collar as cp
from . import conjecture as conj
from . import extension as ex
from . import spectral as sp
from .config import DEFAULT_TOL
from .errors import InflexError, InvalidInputError, ModelParseError
from .models import parse_model
from .reports import VerificationReport, check_flag, check_upper

EXIT_PASS, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


def _parse_floats(text):
    return [float(v) for v in text.split(",") if v.strip()]


def _out_dir(args):
    out = args.out_dir or os.environ.get("INFLEX_OUTPUT_DIR") or "."
    os.makedirs(out, exist_ok=True)
    return out


def _effective_config(args, keys):
    return {k: getattr(args, k) for k in sorted(keys)}


def _generic_k_samples(rng, dim, k_min, k_max, count, k0):
    out = []
    while len(out) < count:
        mag = math.exp(rng.uniform(math.log(k_min), math.log(k_max)))
        v = rng.normal(size=dim)
        v /= np.linalg.norm(v)
        k = tuple(mag * c for c in v)
        if all(abs(c) >= k0 for c in k):
            out.append(k)
    return out


# ---------------------------------------------------------------------------
# subcommands
# ---------------------------------------------------------------------------

def cmd_collar(args):
    if args.n is None or args.jet is None or args.m is None:
        raise InvalidInputError("collar needs --n, --jet and --m "
                                "(flags or config file)")
    jet_vals = tuple(_parse_floats(args.jet))
    if len(jet_vals) != args.n:
        raise InvalidInputError(f"jet has {len(jet_vals)} entries, expected n={args.n}")
    jet = cp.BoundaryJet(jet_vals)
    c = cp.Collar(inner_edge=float(args.m), width=float(args.m) ** (-args.d))
    poly = cp.collar_polynomial(jet, c)
    cfg = _effective_config(args, ["n", "jet", "m", "d"])
    report = VerificationReport(command="collar", config=cfg)

    inner, outer = poly.boundary_residuals()
    resid = max(inner, outer)
    report.add(check_upper("jet_matching_residual", resid,
                           DEFAULT_TOL.residual_rel,
                           tolerance=DEFAULT_TOL.residual_rel))

    sign = poly.sign_class()
    report.extra["sign_class"] = sign.value
    ok = sign.definite or sign is cp.SignClass.IDENTICALLY_ZERO
    detail = {}
    if args.n == 2 and jet_vals[0] > 0 and jet_vals[1] > 0:
        detail["reason"] = (
            "order-2 data with a_0 > 0 and a_1 > 0 admits no one-signed "
            "second derivative: a monotone first derivative cannot return "
            "to zero at the outer edge")
    report.add(check_flag("top_derivative_sign_definite", ok, detail=detail))

    if sign.definite:
        l1 = poly.nth_derivative_l1()
        target = abs(jet_vals[-1])
        report.add(check_upper("ftc_l1_identity", abs(l1 - target),
                               DEFAULT_TOL.residual_rel * (1.0 + target),
                               detail={"l1": l1, "abs_top_entry": target}))
    report.extra["sup_norm"] = poly.sup_norm()
    scan = cp.min_admissible_m(args.n, jet, args.d)
    report.extra["min_admissible_m"] = scan.m
    report.extra["min_admissible_last_class"] = scan.last_sign_class.value
    return report, {}


def cmd_extend(args):
    model = parse_model(args.model, args.dim)
    schedule = _parse_floats(args.m_schedule)
    cfg = _effective_config(args, ["model", "dim", "n", "d", "m_schedule",
                                   "seam_samples", "dump_field", "grid_points"])
    report = VerificationReport(command="extend", config=cfg)
    files = {}
    for m in schedule:
        ext = ex.Extension(ex.ExtensionSpec(dim=args.dim, m=m, order_n=args.n,
                                            collar_exponent=args.d, model=model))
        seams = ex.seam_report(ext, samples_per_seam=args.seam_samples)
        worst = max(c.measured for c in seams.checks)
        report.add(check_upper(f"seam_continuity_m={m:g}", worst,
                               DEFAULT_TOL.seam_rel,
                               tolerance=DEFAULT_TOL.seam_rel))
    budget = ex.norm_budget_schedule(model, args.dim, args.n, args.d, schedule)
    report.checks.extend(budget.checks)
    report.extra["norm_budget"] = budget.extra
    bounds = ex.collar_bound_schedule(model, args.dim, args.n, args.d, schedule)
    report.checks.extend(bounds.checks)
    report.extra["collar_bounds"] = bounds.extra
    if args.dump_field:
        ext = ex.Extension(ex.ExtensionSpec(dim=args.dim, m=schedule[0],
                                            order_n=args.n,
                                            collar_exponent=args.d, model=model))
        grid = ex.GridSpec.covering(ext, args.grid_points)
        path = os.path.join(_out_dir(args), args.dump_field)
        ex.export_field_csv(ext, grid, path)
        files["field_csv"] = path
    return report, files


def cmd_transform(args):
    model = parse_model(args.model, args.dim)
    ext = ex.Extension(ex.ExtensionSpec(dim=args.dim, m=args.m, order_n=args.n,
                                        collar_exponent=args.d, model=model))
    cfg = _effective_config(args, ["model", "dim", "n", "d", "m",
                                   "grid_points", "k_max", "k_count", "seed",
                                   "spectral_csv", "field_csv"])
    report = VerificationReport(command="transform", config=cfg)
    files = {}
    out = _out_dir(args)
    grid = ex.GridSpec.covering(ext, args.grid_points)
    values = ex.sample_field(ext, grid)
    if args.field_csv:
        path = os.path.join(out, args.field_csv)
        ex.export_field_csv(ext, grid, path)
        files["field_csv"] = path

    rng = np.random.default_rng(args.seed)
    nyquist = math.pi / max(grid.spacing)
    k_hi = min(args.k_max, 0.8 * nyquist)
    ks = [tuple(rng.uniform(-k_hi, k_hi, args.dim)) for _ in range(args.k_count)]
    grid_vals = sp.ft_grid(values, grid, ks)
    src = sp.ExtensionSpectrum(ext)
    point_vals = src.at_many(ks)
    worst = float(np.max(np.abs(grid_vals - point_vals)))
    # second-difference trapezoid bound, spacing-dependent
    scale = float(np.max(np.abs(values))) * (2.0 * ext.outer) ** args.dim
    bound = scale * max(grid.spacing) ** 2 * (1.0 + k_hi) ** 2
    report.add(check_upper("grid_vs_point_transform", worst, bound,
                           detail={"spacing": max(grid.spacing),
                                   "bound_model": "C*h^2*(1+k)^2"}))
    if args.spectral_csv:
        path = os.path.join(out, args.spectral_csv)
        with open(path, "w") as fh:
            cols = ",".join(f"k{i+1}" for i in range(args.dim))
            fh.write(f"{cols},re,im\n")
            for k, v in zip(ks, point_vals):
                row = [repr(float(c)) for c in k]
                row.extend([repr(float(v.real)), repr(float(v.imag))])
                fh.write(",".join(row) + "\n")
        files["spectral_csv"] = path
    return report, files


def cmd_verify_decay(args):
    model = parse_model(args.model, args.dim)
    schedule = _parse_floats(args.m_schedule)
    rng = np.random.default_rng(args.seed)
    ks = _generic_k_samples(rng, args.dim, args.k_min, args.k_max,
                            args.k_count, DEFAULT_TOL.axis_floor_k0)
    cfg = _effective_config(args, ["model", "dim", "n", "d", "m_schedule",
                                   "k_min", "k_max", "k_count", "alpha_p",
                                   "seed"])
    report = VerificationReport(command="verify-decay", config=cfg)
    bound = sp.decay_bound_check(model, args.dim, args.n, args.d, schedule, ks)
    report.checks.extend(bound.checks)
    report.extra["decay_bound"] = bound.extra

    ext = ex.Extension(ex.ExtensionSpec(dim=args.dim, m=schedule[0],
                                        order_n=args.n, collar_exponent=args.d,
                                        model=model))
    ray = tuple(1.0 / math.sqrt(args.dim) for _ in range(args.dim))
    fit = sp.decay_exponent_fit(sp.ExtensionSpectrum(ext), ray,
                                (args.k_min, args.k_max))
    report.extra["extension_decay_fit"] = {
        "exponent": fit.exponent, "constant": fit.constant,
        "residual": fit.residual, "rejected": fit.rejected,
    }
    report.add(check_flag("extension_decay_fit_valid", not fit.rejected,
                          measured=0.0 if fit.rejected else fit.exponent))
    tail = sp.l1_tail(fit, args.dim, max(2.0, args.k_min))
    report.extra["l1_tail"] = {"value": tail.value, "divergent": tail.divergent}

    a = sp.alpha_min(args.alpha_p)
    report.extra["alpha_min"] = a
    report.add(check_flag("alpha_min_positive", a > 0.0, measured=a))
    return report, {}


def cmd_verify_inversion(args):
    model = parse_model(args.model, args.dim)
    schedule = _parse_floats(args.m_schedule)
    rng = np.random.default_rng(args.seed)
    cfg = _effective_config(args, ["model", "dim", "n", "d", "m_schedule",
                                   "points", "final_tol", "seed"])
    report = VerificationReport(command="verify-inversion", config=cfg)

    ks = _generic_k_samples(rng, args.dim, 0.5, 4.0, 16,
                            DEFAULT_TOL.axis_floor_k0)
    conv = sp.ft_convergence(model, args.dim, args.n, args.d, schedule, ks)
    report.checks.extend(conv.checks)
    report.extra["ft_convergence"] = conv.extra

    ratio = sp.verify_ratio_identities(model, ks[:8])
    report.checks.extend(ratio.checks)

    half = 2.0 if args.dim < 3 else 1.2
    pts = [tuple(rng.uniform(-half, half, args.dim)) for _ in range(args.points)]
    inv = sp.inversion_error(model, args.dim, args.n, args.d, schedule, pts,
                             final_tol=args.final_tol)
    report.checks.extend(inv.checks)
    report.extra["inversion"] = inv.extra

    direction = tuple(rng.uniform(0.3, 1.0) * (1 if rng.uniform() < 0.5 else -1)
                      for _ in range(args.dim))
    radial = sp.radial_limit_check(model, direction,
                                   [1.0, 0.3, 0.1, 0.03, 0.01, 3e-3, 1e-3, 1e-4],
                                   tol=1e-3)
    report.checks.extend(radial.checks)
    report.extra["radial_limit"] = radial.extra
    return report, {}


def cmd_conjecture(args):
    lo, hi = (int(v) for v in args.n_range.split(":"))
    schedule = _parse_floats(args.m_schedule)
    scan = conj.conjecture_scan(range(lo, hi + 1), args.trials,
                                m_schedule=schedule, seed=args.seed,
                                collar_exponent=args.d)
    cfg = _effective_config(args, ["n_range", "trials", "m_schedule", "seed", "d"])
    report = VerificationReport(command="conjecture", config=cfg,
                                evidence_only=True)
    report.extra["scan"] = scan
    report.add(check_flag("scan_completed", True,
                          measured=len(scan["counterexample_candidates"])))
    report.note("EVIDENCE-ONLY: the scan reports sign classes and scaled "
                "roots; it neither proves nor refutes the claim under test")
    return report, {}


# ---------------------------------------------------------------------------
# parser plumbing
# ---------------------------------------------------------------------------

def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", default=argparse.SUPPRESS,
                        help="JSON file whose keys mirror the flags")
    common.add_argument("--out-dir", dest="out_dir", default=argparse.SUPPRESS)
    common.add_argument("--report", default=argparse.SUPPRESS,
                        help="report filename (default <command>_report.json)")
    parser = argparse.ArgumentParser(
        prog="inflex",
        description="compactly supported smooth box extensions and their "
                    "Fourier-side verification")
    parser.add_argument("--config", default=None)
    parser.add_argument("--out-dir", dest="out_dir", default=None)
    parser.add_argument("--report", default=None)
    sub = parser.add_subparsers(dest="command")

    c = sub.add_parser("collar", parents=[common],
                       help="single collar polynomial with checks")
    c.add_argument("--n", type=int, default=None)
    c.add_argument("--jet", default=None, help="comma-separated a_0..a_{n-1}")
    c.add_argument("--m", type=float, default=None)
    c.add_argument("--d", type=int, default=1, choices=(1, 2, 3))
    c.set_defaults(func=cmd_collar)

    e = sub.add_parser("extend", parents=[common], help="build extensions, seam/budget/collar checks")
    e.add_argument("--model", default="gaussian{sigma=1}")
    e.add_argument("--dim", type=int, default=2, choices=(1, 2, 3))
    e.add_argument("--n", type=int, default=3)
    e.add_argument("--d", type=int, default=2, choices=(1, 2, 3))
    e.add_argument("--m-schedule", dest="m_schedule", default="4,8")
    e.add_argument("--seam-samples", dest="seam_samples", type=int, default=12)
    e.add_argument("--dump-field", dest="dump_field", default=None)
    e.add_argument("--grid-points", dest="grid_points", type=int, default=64)
    e.set_defaults(func=cmd_extend)

    t = sub.add_parser("transform", parents=[common], help="field and spectral CSV exports")
    t.add_argument("--model", default="gaussian{sigma=1}")
    t.add_argument("--dim", type=int, default=1, choices=(1, 2, 3))
    t.add_argument("--n", type=int, default=3)
    t.add_argument("--d", type=int, default=1, choices=(1, 2, 3))
    t.add_argument("--m", type=float, default=4.0)
    t.add_argument("--grid-points", dest="grid_points", type=int, default=257)
    t.add_argument("--k-max", dest="k_max", type=float, default=8.0)
    t.add_argument("--k-count", dest="k_count", type=int, default=20)
    t.add_argument("--seed", type=int, default=0)
    t.add_argument("--spectral-csv", dest="spectral_csv", default=None)
    t.add_argument("--field-csv", dest="field_csv", default=None)
    t.set_defaults(func=cmd_transform)

    v = sub.add_parser("verify-decay", parents=[common], help="decay bound, exponent fit, alpha minimum")
    v.add_argument("--model", default="gaussian{sigma=1}")
    v.add_argument("--dim", type=int, default=2, choices=(1, 2, 3))
    v.add_argument("--n", type=int, default=3)
    v.add_argument("--d", type=int, default=2, choices=(1, 2, 3))
    v.add_argument("--m-schedule", dest="m_schedule", default="4,8,16")
    v.add_argument("--k-min", dest="k_min", type=float, default=5.0)
    v.add_argument("--k-max", dest="k_max", type=float, default=50.0)
    v.add_argument("--k-count", dest="k_count", type=int, default=12)
    v.add_argument("--alpha-p", dest="alpha_p", type=int, default=14)
    v.add_argument("--seed", type=int, default=0)
    v.set_defaults(func=cmd_verify_decay)

    i = sub.add_parser("verify-inversion", parents=[common],
                       help="convergence, inversion, ratio and radial checks")
    i.add_argument("--model", default="gaussian{sigma=1}")
    i.add_argument("--dim", type=int, default=1, choices=(1, 2, 3))
    i.add_argument("--n", type=int, default=3)
    i.add_argument("--d", type=int, default=1, choices=(1, 2, 3))
    i.add_argument("--m-schedule", dest="m_schedule", default="4,8")
    i.add_argument("--points", type=int, default=10)
    i.add_argument("--final-tol", dest="final_tol", type=float, default=1e-5)
    i.add_argument("--seed", type=int, default=0)
    i.set_defaults(func=cmd_verify_inversion)

    j = sub.add_parser("conjecture", parents=[common], help="seeded evidence scan, never a proof")
    j.add_argument("--n-range", dest="n_range", default="3:6",
                   help="inclusive order range lo:hi")
    j.add_argument("--trials", type=int, default=25)
    j.add_argument("--m-schedule", dest="m_schedule",
                   default=",".join(f"{m:g}" for m in conj.DEFAULT_M_SCHEDULE))
    j.add_argument("--d", type=int, default=1, choices=(1, 2, 3))
    j.add_argument("--seed", type=int, default=0)
    j.set_defaults(func=cmd_conjecture)
    return parser


def main(argv=None):
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    # config file: same keys as flags, applied as defaults
    cfg_path = None
    for i, tok in enumerate(argv):
        if tok == "--config" and i + 1 < len(argv):
            cfg_path = argv[i + 1]
        elif tok.startswith("--config="):
            cfg_path = tok.split("=", 1)[1]
    if cfg_path is not None:
        try:
            with open(cfg_path) as fh:
                overrides = json.load(fh)
        except (OSError, json.JSONDecodeError) as exc:
            print(f"error: cannot read config: {exc}", file=sys.stderr)
            return EXIT_USAGE
        for action in parser._subparsers._group_actions:
            for sub in action.choices.values():
                known = {a.dest for a in sub._actions}
                sub.set_defaults(**{k: v for k, v in overrides.items()
                                    if k in known})
    args = parser.parse_args(argv)
    if not getattr(args, "command", None):
        parser.print_usage(sys.stderr)
        return EXIT_USAGE
    t0 = time.time()
    try:
        report, files = args.func(args)
    except (InflexError, ModelParseError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    report.wall_time_s = time.time() - t0
    out = _out_dir(args)
    name = args.report or f"{report.command.replace('-', '_')}_report.json"
    path = os.path.join(out, name)
    report.write(path)
    for line in report.summary_lines():
        print(line)
    print(f"report: {path}")
    for label, fpath in files.items():
        print(f"{label}: {fpath}")
    return EXIT_PASS if report.passed else EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
