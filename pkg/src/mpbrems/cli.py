"""Command-line interface: regime reports, spectra, sum-rule checks, function tables.

Exit status: 0 success, 2 usage, 3 parse error, 4 validation error,
5 accuracy error, 6 normalization failure, 7 sum-rule failure.
"""

from __future__ import annotations

import argparse
import io
import json
import sys
import warnings

import numpy as np

from . import __version__
from .mpbessel import (AccuracyError, DoubleSeries, Tolerance, TwoWaveArgs, bessel_int,
                       gen_bessel_row)
from .mpparams import classify_regime, multiphoton_params
from .relkin import KinematicsError
from .scenario import ScenarioParseError, ScenarioValidationError, load_scenario
from .xsection import NormalizationError, baseline_dcs, spectrum

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_PARSE = 3
EXIT_VALIDATION = 4
EXIT_ACCURACY = 5
EXIT_NORMALIZATION = 6
EXIT_SUMRULE = 7

SUMCHECK_TOL = 1e-8
FUNCTIONS = ("bessel", "gen_bessel", "two_wave_I", "interference_J")


class ValidationFailure(Exception):
    pass


def fmt(x):
    """Scientific notation with 15 significant digits."""
    return "%.14e" % (x + 0.0)


# ---------------------------------------------------------------------------
# Commands; each returns (exit code, text)
# ---------------------------------------------------------------------------

def cmd_regime(scenario, fmt_="text"):
    rep = classify_regime(scenario.kin, scenario.waves)
    if fmt_ == "json":
        return EXIT_OK, json.dumps(rep.to_dict(), indent=2) + "\n"
    out = io.StringIO()
    out.write(f"kinematic:        {rep.kinematic}\n")
    out.write(f"field_regime:     {rep.field_regime}\n")
    out.write(f"frequency_status: {rep.frequency_status}\n")
    out.write(f"phi = {fmt(rep.phi)}  psi = {fmt(rep.psi)}\n")
    out.write("parameters (quasimomenta / free momenta):\n")
    quasi, bare = rep.params.to_dict(), rep.params_bare.to_dict()
    for k, v in quasi.items():
        if k != "equal_frequency":
            out.write(f"  {k:12s} {fmt(v)}  {fmt(bare[k])}\n")
    out.write("inequalities:\n")
    for d in rep.diagnostics:
        flag = "ok " if d.satisfied else "no "
        out.write(f"  [{flag}] {d.label:55s} {fmt(d.left)} vs {fmt(d.right)}\n")
    return EXIT_OK, out.getvalue()


def _auto_mode(scenario):
    rep = classify_regime(scenario.kin, scenario.waves)
    if rep.kinematic == "interference":
        return "interference"
    if rep.field_regime == "dipole_like":
        return "factorized"
    return "noninterference"


def _spectrum_params(scenario):
    if scenario.equal_frequency:
        raise ValidationFailure(
            "wave2.omega_ev: equal frequencies collapse the two waves into one; "
            "use sumcheck for the combined-wave identity")
    return multiphoton_params(scenario.kin, scenario.waves, "bare")


def cmd_spectrum(scenario, mode=None, tail_tol=None, tol=None, threads=1,
                 baseline="unit", fmt_="csv", max_radius=None):
    mode = mode or scenario.mode
    if mode == "auto":
        mode = _auto_mode(scenario)
    tail_tol = scenario.tail_tol if tail_tol is None else tail_tol
    tol = Tolerance(scenario.tol if tol is None else tol)
    params = _spectrum_params(scenario)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        sp = spectrum(mode, params, tail_tol, tol, threads=threads, max_radius=max_radius)
        dcs = (baseline_dcs("bethe_heitler", scenario.kin, scenario.Z)
               if baseline == "bethe-heitler" else None)
    if fmt_ == "json":
        rec = {
            "mode": sp.mode,
            "entries": [
                dict(idx1=e.idx1, idx2=e.idx2, weight=e.weight, cumulative=e.cumulative,
                     **({"partial_dcs": e.weight * dcs} if dcs is not None else {}))
                for e in sp.entries],
            "tail_bound": sp.tail_bound,
            "sum": sp.total,
            "params": params.to_dict(),
        }
        return EXIT_OK, json.dumps(rec, indent=1) + "\n"
    out = io.StringIO()
    out.write("idx1,idx2,weight,cumulative" + (",partial_dcs" if dcs is not None else "") + "\n")
    for e in sp.entries:
        row = f"{e.idx1},{e.idx2},{fmt(e.weight)},{fmt(e.cumulative)}"
        if dcs is not None:
            row += "," + fmt(e.weight * dcs)
        out.write(row + "\n")
    out.write(f"# mode={sp.mode}\n")
    out.write(f"# tail_bound={fmt(sp.tail_bound)}\n")
    out.write(f"# sum={fmt(sp.total)}\n")
    out.write(f"# radius={sp.radius}\n")
    return EXIT_OK, out.getvalue()


def _check(label, value, target, tol):
    ok = abs(value - target) <= tol
    return ok, f"{'PASS' if ok else 'FAIL'} {label}: {fmt(value)} (target {fmt(target)}, tol {tol:g})"


def cmd_sumcheck(scenario, tol=None, max_radius=None, threads=1):
    """Sum rules applicable to the scenario, each at 1e-8."""
    t = Tolerance(scenario.tol if tol is None else tol)
    lines = []
    passed = True
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        if scenario.equal_frequency:
            passed = _sumcheck_equal_frequency(scenario, t, lines)
        else:
            params = multiphoton_params(scenario.kin, scenario.waves, "bare")
            rep = classify_regime(scenario.kin, scenario.waves)
            modes = ["noninterference", "factorized"]
            if rep.kinematic == "interference":
                modes = ["interference", "noninterference"]
            for mode in modes:
                try:
                    sp = spectrum(mode, params, SUMCHECK_TOL / 10, t, threads=threads,
                                  max_radius=max_radius)
                except NormalizationError as exc:
                    passed = False
                    lines.append(f"FAIL sum rule [{mode}]: deficit {fmt(exc.deficit)} "
                                 f"at shell radius {exc.radius} (tail bound {exc.tail_bound:.2e})")
                    continue
                ok, msg = _check(f"sum rule [{mode}] (radius {sp.radius}, tail bound "
                                 f"{sp.tail_bound:.2e})", sp.total, 1.0, SUMCHECK_TOL)
                passed &= ok
                lines.append(msg)
    lines.append("sumcheck: " + ("PASS" if passed else "FAIL"))
    return (EXIT_OK if passed else EXIT_SUMRULE), "\n".join(lines) + "\n"


def _sumcheck_equal_frequency(scenario, tol, lines):
    """Combined-wave identity for waves of equal frequency.

    The sum over photon pairs with fixed total ``n`` must reproduce the
    generalized Bessel function of the combined wave, whatever value the
    (undefined) difference-frequency parameter takes.
    """
    p = multiphoton_params(scenario.kin, scenario.waves, "bare")
    g, b = p.gamma1 + p.gamma2, p.beta1 + p.beta2 + p.alpha_plus
    half, row, _ = gen_bessel_row(g, b, tol)
    passed = True
    ok, msg = _check("combined-wave normalization", float(np.dot(row, row)), 1.0, SUMCHECK_TOL)
    passed &= ok
    lines.append(msg)
    scale = max(abs(p.alpha_plus), 1.0)
    for am in (0.0, 0.5 * scale, -1.3 * scale):
        args = TwoWaveArgs(p.gamma1, p.beta1, p.gamma2, p.beta2, p.alpha_plus, am)
        series = DoubleSeries.two_wave(args, tol)
        reach = max(series.reach)
        worst = 0.0
        for n in range(-5, 6):
            s = np.arange(-reach - abs(n), reach + abs(n) + 1)
            total = float(series.batch(n - s, s).sum())
            target = float(row[n + half]) if abs(n) <= half else 0.0
            worst = max(worst, abs(total - target))
        ok = worst <= SUMCHECK_TOL
        passed &= ok
        lines.append(f"{'PASS' if ok else 'FAIL'} addition theorem n in [-5, 5], "
                     f"alpha_minus = {fmt(am)}: max deviation {fmt(worst)}")
    return passed


def _parse_range(text):
    """'a:b' (inclusive) or a single integer."""
    if ":" in text:
        a, b = text.split(":")
        lo, hi = int(a), int(b)
    else:
        lo = hi = int(text)
    if hi < lo:
        raise ValueError(f"empty range {text!r}")
    return range(lo, hi + 1)


def cmd_fntable(function, r_range, rp_range, args, tol=None):
    """Tabulate a special function with the accuracy bound of each row."""
    t = Tolerance(1e-13 if tol is None else tol)
    need = {"bessel": 1, "gen_bessel": 2, "two_wave_I": 6, "interference_J": 4}[function]
    if len(args) != need:
        raise ValidationFailure(f"--args: {function} takes {need} arguments, got {len(args)}")
    two_index = function in ("two_wave_I", "interference_J")
    rp_range = rp_range if two_index else range(0, 1)
    out = io.StringIO()
    out.write("idx1,idx2,value,error_bound,status\n")

    def evaluator():
        if function == "bessel":
            x = args[0]
            return (lambda r, _: bessel_int(r, x)), 2.0 * np.finfo(float).eps
        if function == "gen_bessel":
            half, row, err = gen_bessel_row(args[0], args[1], t)
            return (lambda r, _: float(row[r + half]) if abs(r) <= half else 0.0), err
        if function == "two_wave_I":
            s = DoubleSeries.two_wave(TwoWaveArgs(*args), t)
        else:
            s = DoubleSeries.interference(*args, tol=t)
        return s, s.error_bound

    try:
        fn, bound = evaluator()
        failure = None
    except AccuracyError as exc:
        fn, bound, failure = None, exc.bound, str(exc)
    for r in r_range:
        for rp in rp_range:
            if fn is None:
                out.write(f"{r},{rp},nan,{fmt(bound)},accuracy_error: {failure}\n")
            else:
                out.write(f"{r},{rp},{fmt(fn(r, rp))},{fmt(bound)},ok\n")
    return EXIT_OK, out.getvalue()


# ---------------------------------------------------------------------------
# Entry point
# ---------------------------------------------------------------------------

def build_parser():
    parser = argparse.ArgumentParser(
        prog="mpbrems",
        description="Multiphoton bremsstrahlung spectra in two collinear light waves.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, scenario=True):
        if scenario:
            p.add_argument("--scenario", required=True, metavar="FILE",
                           help="scenario file (.toml or .json)")
        p.add_argument("--tol", type=float, default=None, help="special-function accuracy")
        p.add_argument("--output", metavar="FILE", help="write to FILE instead of stdout")

    p = sub.add_parser("regime", help="classify a scenario and list every inequality")
    common(p)
    p.add_argument("--format", choices=("text", "json"), default="text")

    p = sub.add_parser("spectrum", help="photon-number weight spectrum")
    common(p)
    p.add_argument("--mode", choices=("auto", "noninterference", "factorized", "interference"),
                   default=None)
    p.add_argument("--tail-tol", type=float, default=None)
    p.add_argument("--format", choices=("csv", "json"), default="csv")
    p.add_argument("--threads", type=int, default=1)
    p.add_argument("--baseline", choices=("unit", "bethe-heitler"), default="unit")
    p.add_argument("--debug-max-shell", type=int, default=None, help=argparse.SUPPRESS)

    p = sub.add_parser("sumcheck", help="check the sum rules at 1e-8")
    common(p)
    p.add_argument("--threads", type=int, default=1)
    p.add_argument("--debug-max-shell", type=int, default=None,
                   help="truncate the spectrum window to force the failure path")

    p = sub.add_parser("fntable", help="tabulate a special function")
    common(p, scenario=False)
    p.add_argument("--function", choices=FUNCTIONS, required=True)
    p.add_argument("--r", default="-3:3", help="first index range, e.g. -3:3")
    p.add_argument("--rp", default="0", help="second index range (two-index functions)")
    p.add_argument("--args", required=True,
                   help="comma-separated arguments, e.g. gamma,beta for gen_bessel")
    p.add_argument("--format", choices=("csv",), default="csv")
    return parser


def _run(ns):
    if ns.command == "fntable":
        try:
            args = [float(a) for a in ns.args.split(",")]
            r, rp = _parse_range(ns.r), _parse_range(ns.rp)
        except ValueError as exc:
            raise ValidationFailure(f"fntable: {exc}") from exc
        return cmd_fntable(ns.function, r, rp, args, ns.tol)
    scenario = load_scenario(ns.scenario)
    if ns.command == "regime":
        return cmd_regime(scenario, ns.format)
    if ns.command == "spectrum":
        if ns.threads < 1:
            raise ValidationFailure("--threads must be >= 1")
        if ns.tail_tol is not None and not 0 < ns.tail_tol < 0.1:
            raise ValidationFailure("--tail-tol must lie in (0, 0.1)")
        return cmd_spectrum(scenario, ns.mode, ns.tail_tol, ns.tol, ns.threads,
                            ns.baseline, ns.format, ns.debug_max_shell)
    return cmd_sumcheck(scenario, ns.tol, ns.debug_max_shell, ns.threads)


def main(argv=None):
    parser = build_parser()
    ns = parser.parse_args(argv)
    try:
        code, text = _run(ns)
    except ScenarioParseError as exc:
        print(f"parse error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except (ScenarioValidationError, ValidationFailure, KinematicsError) as exc:
        print(f"validation error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except AccuracyError as exc:
        print(f"accuracy error: {exc} (bound {exc.bound:.3g})", file=sys.stderr)
        return EXIT_ACCURACY
    except NormalizationError as exc:
        print(f"normalization failure: {exc}", file=sys.stderr)
        return EXIT_NORMALIZATION
    if ns.output:
        with open(ns.output, "w", newline="\n") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return code


if __name__ == "__main__":
    sys.exit(main())
