"""
Command-line experiment driver.

Every subcommand reads an optional JSON config (``--config``), merges the
command-line flags on top, validates the result and echoes the resolved
config as ``# config:`` header lines before the CSV or JSON payload.

Exit codes: 0 when every assertion of the run holds, 1 on a numerical
assertion failure, 2 on a bad config or bad arguments.
"""
import argparse
from concurrent.futures import ThreadPoolExecutor
import csv
import io
import json
import math
import sys

import numpy as np

from . import __version__
from .acceptance import run_all
from .cauchyfock import (CauchyParams, FockParams, coincidence_ratio, derive_fock_params,
                         fock_kernel_envelope_log_ratio, fock_monomial_norm_sq,
                         fock_monomial_norm_sq_radial, generator_envelope_log_ratio,
                         hab_kernel_envelope_log_ratio)
from .cis import check_main2, finite_section_condition
from .config import SEED_ENV, load_file, resolve
from .errors import ParameterError, SecantLabError
from .gabor import dichotomy_experiment
from .sequences import PointSet1D, lower_density, pointset_from_json, upper_density
from .sis import SamplingProblem, sampling_bounds
from .windows import SecantWindow, stability_constants, window_from_json

LOG10 = math.log(10.0)


class AssertionFailure(Exception):
    """A run finished but one of its checks did not hold."""


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise ParameterError(message)


def _json_arg(text):
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParameterError(f"malformed JSON argument: {exc}") from exc


def _float_list(text):
    try:
        return [float(v) for v in text.split(",") if v.strip()]
    except ValueError as exc:
        raise ParameterError(f"expected a comma-separated list of numbers: {text!r}") from exc


def _int_list(text):
    try:
        return [int(v) for v in text.split(",") if v.strip()]
    except ValueError as exc:
        raise ParameterError(f"expected a comma-separated list of integers: {text!r}") from exc


def _log_pair(log_value, phase=0.0):
    """(log10_mag, phase) cells for a natural-log magnitude."""
    return [f"{log_value / LOG10:.12g}", f"{phase:.12g}"]


# ---------------------------------------------------------------------------
# output


class Output:
    """Collects header lines and a payload, then writes both in one go."""

    def __init__(self, cfg, changed):
        self.header = ["# secant-lab " + __version__,
                       "# config: " + json.dumps(cfg, sort_keys=True)]
        if changed:
            self.header.append("# thresholds overridden: " + ", ".join(changed))
        self.body = io.StringIO()

    def note(self, text):
        self.header.append("# " + text)

    def csv(self, columns, rows):
        writer = csv.writer(self.body, lineterminator="\n")
        writer.writerow(columns)
        for row in rows:
            writer.writerow([_cell(v) for v in row])

    def json(self, obj):
        self.body.write(json.dumps(obj, indent=2, sort_keys=True) + "\n")

    def write(self, path):
        text = "\n".join(self.header) + "\n" + self.body.getvalue()
        if path:
            with open(path, "w") as fh:
                fh.write(text)
        else:
            sys.stdout.write(text)


def _cell(v):
    if isinstance(v, float):
        return f"{v:.12g}"
    return v


# ---------------------------------------------------------------------------
# subcommands


def _window(cfg):
    if "window" not in cfg:
        raise ParameterError("a window is required (--window or config 'window')")
    return window_from_json(cfg["window"])


def _pointset(cfg):
    if "pointset" not in cfg:
        raise ParameterError("a point set is required (--pointset or config 'pointset')")
    return pointset_from_json(cfg["pointset"])


def _secant(cfg):
    w = _window(cfg)
    if not isinstance(w, SecantWindow):
        raise ParameterError("this subcommand needs a secant window")
    return w


def cmd_density(cfg, out, args):
    L = _pointset(cfg)
    r_list = cfg["params"].get("r_list", [5.0, 10.0, 20.0, 40.0])
    lo = lower_density(L, r_list)
    hi = upper_density(L, r_list)
    if lo.exact is not None:
        out.note(f"exact density: {lo.exact:.12g}")
    out.csv(["r", "lower", "upper"],
            [[float(r), float(a), float(b)] for r, a, b in zip(lo.r_used, lo.estimates, hi.estimates)])


def cmd_stability(cfg, out, args):
    w = _window(cfg)
    rep = stability_constants(w, theta_grid=cfg["numerics"]["theta_grid"])
    out.json({"C1": rep.C1, "C2": rep.C2, "cutoff": int(rep.cutoff),
              "grid_size": int(rep.grid_size), "correlation_decay": float(rep.correlation_decay),
              "theta_min": float(rep.theta_min), "theta_max": float(rep.theta_max)})


def cmd_sampling_bounds(cfg, out, args):
    w = _window(cfg)
    L = _pointset(cfg)
    num = cfg["numerics"]
    ladder = list(num["N_ladder"])
    xs = [k / num["x_grid"] for k in range(num["x_grid"])]
    stab = stability_constants(w, theta_grid=num["theta_grid"])

    def run(x):
        return sampling_bounds(SamplingProblem(w, L, x_shift=x, N=ladder[0]), ladder, stab)

    reports = _map(run, xs, args.jobs)
    rows = []
    for x in xs:
        rep = reports[x]
        for N, A, B in zip(rep.N_ladder, rep.A, rep.B):
            if not (0 <= A <= B * (1 + 1e-12) and math.isfinite(B)):
                raise AssertionFailure(f"bounds out of order at x={x}, N={N}: A={A}, B={B}")
            rows.append([x, int(N), float(A), float(B)])
    out.note(f"stability constants: C1={stab.C1:.12g} C2={stab.C2:.12g}")
    out.csv(["x", "N", "A_est", "B_est"], rows)


def cmd_frame_dichotomy(cfg, out, args):
    w = _window(cfg)
    th, num, prm = cfg["thresholds"], cfg["numerics"], cfg["params"]
    alpha = float(prm.get("alpha", 1.0))
    rows = dichotomy_experiment(
        w, prm.get("rho_list", [0.8, 1.25]), N_ladder=tuple(num["N_ladder"]),
        x_grid=num["x_grid"], jitter=float(prm.get("jitter", 0.0)), seed=cfg["seed"],
        alpha=alpha, convention=prm.get("convention", "reflected"),
        point_window=num["point_window"], ratio=th["ladder_ratio"],
        floor_rel=th["floor_rel"], jobs=args.jobs)
    cols = ["rho", "D_minus", "N", "x", "A", "B", "verdict"]
    out.csv(cols, [[r[c] for c in cols] for r in rows])
    wrong = sorted({r["rho"] for r in rows
                    if (r["verdict"] == "frame") != (r["D_minus"] > alpha)})
    if wrong:
        raise AssertionFailure(f"verdict contradicts D- > alpha for rho in {wrong}")


def cmd_cis_check(cfg, out, args):
    w = _secant(cfg)
    L = _pointset(cfg)
    num = cfg["numerics"]
    verdict = check_main2(w, L, N_max=num["N_max"], shift_max=num["shift_max"])
    out.json(verdict.to_json())
    if args.oracle:
        sizes = cfg["params"].get("sizes", [20, 40, 80])
        cond = finite_section_condition(w, L, sizes)
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["size", "condition"])
        for S, c in zip(sizes, cond):
            writer.writerow([int(S), f"{float(c):.12g}"])
        with open(args.oracle, "w") as fh:
            fh.write("\n".join(out.header) + "\n" + buf.getvalue())


def cmd_fock_verify(cfg, out, args):
    prm = cfg["params"]
    fp = FockParams(float(prm.get("beta", 0.25)), float(prm.get("gamma", 1.0)))
    lo, hi = prm.get("n_range", [-5, 5])
    tol = cfg["thresholds"]["fock_rel_tol"]
    rows, worst = [], 0.0
    for n in range(int(lo), int(hi) + 1):
        closed = fock_monomial_norm_sq(fp, n).log
        quad = fock_monomial_norm_sq_radial(fp, n).log
        err = abs(math.expm1(quad - closed))
        worst = max(worst, err)
        rows.append([n, *_log_pair(closed), *_log_pair(quad), err])
    out.csv(["n", "closed_log10_mag", "closed_phase", "quad_log10_mag", "quad_phase",
             "rel_err"], rows)
    if worst >= tol:
        raise AssertionFailure(f"monomial norm relative error {worst:.3g} >= {tol:g}")


def cmd_kernel_asymptotics(cfg, out, args):
    prm, th = cfg["params"], cfg["thresholds"]
    p = CauchyParams(float(prm.get("a", 1.0)), float(prm.get("b", 1.0)))
    fp = FockParams(float(prm["beta"]), float(prm["gamma"])) if "beta" in prm else None
    if fp is None:
        fp = derive_fock_params(p)
    lo, hi = prm.get("log_range", [-10.0, 10.0])
    count = int(prm.get("points", 201))
    rng = np.random.default_rng(cfg["seed"])
    rows = []
    gen, hab, fock = [], [], []
    for u, phi in zip(np.linspace(lo, hi, count), rng.uniform(-np.pi, np.pi, count)):
        w = complex(np.exp(u + 1j * phi))
        g = float(generator_envelope_log_ratio(p, w))
        k = float(hab_kernel_envelope_log_ratio(p, w))
        f = float(fock_kernel_envelope_log_ratio(fp, w))
        gen.append(g), hab.append(k), fock.append(f)
        rows.append([float(u), float(phi), *_log_pair(g), *_log_pair(k), *_log_pair(f)])
    out.note("ratio columns are (log10_mag, phase) pairs of positive ratios")
    out.csv(["log_abs_w", "arg_w", "generator_log10_mag", "generator_phase",
             "hab_kernel_log10_mag", "hab_kernel_phase", "fock_kernel_log10_mag",
             "fock_kernel_phase"], rows)
    C = th["generator_C"]
    fl, fh = th["fock_kernel_bounds"]
    failures = []
    if not (min(gen) >= -math.log(C) and max(gen) <= math.log(C)):
        failures.append("generator envelope")
    if not (max(hab) - min(hab) <= 2 * math.log(th["hab_kernel_C"])):
        failures.append("hab kernel envelope")
    if not (min(fock) >= math.log(fl) and max(fock) <= math.log(fh)):
        failures.append("fock kernel envelope")
    if failures:
        raise AssertionFailure("outside comparability bounds: " + ", ".join(failures))


def cmd_coincidence(cfg, out, args):
    prm, th = cfg["params"], cfg["thresholds"]
    p = CauchyParams(float(prm.get("a", 1.0)), float(prm.get("b", 1.0)))
    samples = int(prm.get("samples", 50))
    support = int(prm.get("support", 9))
    band = int(prm.get("band", 21))
    bins = int(prm.get("bins", 10))
    rng = np.random.default_rng(cfg["seed"])
    vecs = rng.normal(size=(samples, support)) + 1j * rng.normal(size=(samples, support))
    vecs /= np.linalg.norm(vecs, axis=1, keepdims=True)
    ratios = _map(lambda i: coincidence_ratio(p, vecs[i], band), range(samples), args.jobs)
    r = np.array([ratios[i] for i in range(samples)])
    counts, edges = np.histogram(r, bins=bins)
    out.note(f"ratio range: [{r.min():.12g}, {r.max():.12g}] over {samples} samples")
    out.csv(["bin_lo", "bin_hi", "count"],
            [[float(edges[i]), float(edges[i + 1]), int(counts[i])] for i in range(bins)])
    C = th["coincidence_C"]
    if not (r.min() >= 1 / C and r.max() <= C):
        raise AssertionFailure(f"ratios leave [1/{C:g}, {C:g}]")


def cmd_verify_all(cfg, out, args):
    only = set(args.only) if args.only else None
    results = run_all(cfg, cfg["seed"], only)
    for res in results:
        print(res.line(), file=sys.stderr)
    ok = all(r.passed for r in results)
    out.json({"passed": ok, "criteria": [r.to_json() for r in results]})
    if not ok:
        failed = [r.number for r in results if not r.passed]
        raise AssertionFailure(f"acceptance criteria failed: {failed}")


def _map(fn, keys, jobs):
    """Keyed, order-independent map with at most ``jobs`` worker threads."""
    keys = list(keys)
    if jobs and jobs > 1:
        with ThreadPoolExecutor(max_workers=jobs) as ex:
            return dict(zip(keys, ex.map(fn, keys)))
    return {k: fn(k) for k in keys}


# ---------------------------------------------------------------------------
# argument parsing


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="JSON experiment config")
    common.add_argument("--output", help="output path (default: stdout)")
    common.add_argument("--jobs", type=int, default=1, help="maximum worker threads")
    common.add_argument("--seed", type=int, help=f"seed (the {SEED_ENV} variable wins)")

    parser = _Parser(prog="secant-lab", description=__doc__.strip().splitlines()[0])
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def add(name, fn, help_text):
        p = sub.add_parser(name, parents=[common], help=help_text)
        p.set_defaults(func=fn)
        return p

    p = add("density", cmd_density, "lower/upper Beurling density profile")
    p.add_argument("--pointset", type=_json_arg)
    p.add_argument("--r-list", type=_float_list)

    p = add("stability", cmd_stability, "Riesz bounds of the integer translates")
    p.add_argument("--window", type=_json_arg)

    p = add("sampling-bounds", cmd_sampling_bounds, "sampling bounds over shifts")
    p.add_argument("--window", type=_json_arg)
    p.add_argument("--pointset", type=_json_arg)
    p.add_argument("--N-ladder", dest="N_ladder", type=_int_list)
    p.add_argument("--x-grid", dest="x_grid", type=int)

    p = add("frame-dichotomy", cmd_frame_dichotomy, "frame verdicts against density")
    p.add_argument("--window", type=_json_arg)
    p.add_argument("--rho-list", dest="rho_list", type=_float_list)
    p.add_argument("--ladder", dest="N_ladder", type=_int_list)
    p.add_argument("--x-grid", dest="x_grid", type=int)
    p.add_argument("--alpha", type=float)
    p.add_argument("--jitter", type=float)
    p.add_argument("--convention", choices=["reflected", "standard_translate"])

    p = add("cis-check", cmd_cis_check, "complete interpolating sequence test")
    p.add_argument("--window", type=_json_arg)
    p.add_argument("--pointset", type=_json_arg)
    p.add_argument("--N-max", dest="N_max", type=int)
    p.add_argument("--oracle", metavar="CSV", help="write finite-section condition ladder")

    p = add("fock-verify", cmd_fock_verify, "monomial norms against quadrature")
    p.add_argument("--beta", type=float)
    p.add_argument("--gamma", type=float)
    p.add_argument("--n-range", dest="n_range", type=_int_list)

    p = add("kernel-asymptotics", cmd_kernel_asymptotics, "kernel and generator envelopes")
    p.add_argument("--a", type=float)
    p.add_argument("--b", type=float)
    p.add_argument("--points", type=int)

    p = add("coincidence", cmd_coincidence, "norm-equivalence ratio histogram")
    p.add_argument("--a", type=float)
    p.add_argument("--b", type=float)
    p.add_argument("--samples", type=int)
    p.add_argument("--band", type=int)
    p.add_argument("--bins", type=int)

    p = add("verify-all", cmd_verify_all, "run the acceptance criteria")
    p.add_argument("--only", type=_int_list, help="comma-separated criterion numbers")
    return parser


_PARAM_KEYS = ("r_list", "rho_list", "alpha", "jitter", "convention", "beta", "gamma",
               "n_range", "a", "b", "points", "samples", "band", "bins")
_NUMERIC_KEYS = ("N_ladder", "x_grid", "N_max")


def _overrides(args):
    ov = {}
    for key in ("window", "pointset"):
        if getattr(args, key, None) is not None:
            ov[key] = getattr(args, key)
    if args.seed is not None:
        ov["seed"] = args.seed
    if args.output is not None:
        ov["output"] = args.output
    params = {k: getattr(args, k) for k in _PARAM_KEYS if getattr(args, k, None) is not None}
    numerics = {k: getattr(args, k) for k in _NUMERIC_KEYS if getattr(args, k, None) is not None}
    if params:
        ov["params"] = params
    if numerics:
        ov["numerics"] = numerics
    return ov


def main(argv=None):
    try:
        args = build_parser().parse_args(argv)
        user = load_file(args.config) if args.config else {}
        cfg, changed = resolve(user, _overrides(args))
        cfg.setdefault("params", {})
        out = Output(cfg, changed)
        try:
            args.func(cfg, out, args)
        except AssertionFailure as exc:
            out.note("assertion failed: " + str(exc))
            out.write(cfg.get("output"))
            print(f"secant-lab: {exc}", file=sys.stderr)
            return 1
        out.write(cfg.get("output"))
        return 0
    except ParameterError as exc:
        print(f"secant-lab: {exc}", file=sys.stderr)
        return 2
    except SecantLabError as exc:
        print(f"secant-lab: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1
