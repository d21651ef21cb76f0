#!/usr/bin/env python3
"""Command-line interface for paramres.

Every subcommand writes CSV (default) or JSON to stdout or --output. Logs go
to stderr. Failures print a JSON object {"error", "kind", "exit_code"} to
stderr and exit with 1 (invalid input) or 2 (numerical failure).
"""

import argparse
import contextlib
import json
import logging
import math
import sys
from typing import Any, Dict, Iterator, List, NamedTuple, Optional, Sequence, TextIO

from paramres import __version__
from paramres.chart import Axis, ChartSweep, SweepSpec, get_registered_families
from paramres.chart.output import (
    fmt_float, write_boundaries_csv, write_boundaries_json, write_cells_csv, write_cells_json,
)
from paramres.config import DEFAULTS, Config, load_manifest, validate_tolerances
from paramres.core.classical import (
    TWO_PI, classify, eigenvalue_pair, form_discriminant, marginal_kick_strength,
    monodromy_kicked, quadratic_form,
)
from paramres.core.effective import (
    compare_expanded_form, heff_from_monodromy, quadratic_form_proportionality, regime_reduction,
)
from paramres.core.types import Elliptic, Hyperbolic, KickedParams, Monodromy2
from paramres.errors import (
    IndeterminateError, NumericalError, ParamresError, ProfileFormatError, ValidationError,
)
from paramres.modulation import mathieu_family, monodromy_converged, trace_boundary
from paramres.profiles import build_profile, get_registered_profiles, load_profile_csv
from paramres.quantum.comb import (
    boundary_moduli, build_resonant_eigenstate, eigen_residual, normalize_label,
)
from paramres.quantum.gaussian import GaussianState, trajectory, variance_growth_exponent
from paramres.quantum.spectrum import elliptic_spectrum, floquet_spectrum

log = logging.getLogger(__name__)

GLOBAL_KEYS = ("command", "format", "output", "seed")


class _ArgumentParser(argparse.ArgumentParser):
    """Parser whose usage errors become ValidationError (exit 1, JSON on stderr)."""

    def error(self, message):
        self.print_usage(sys.stderr)
        raise ValidationError(f"{self.prog}: {message}")


# =============================================================================
# VALUE PARSING
# =============================================================================

def _parse_value(text: str) -> Any:
    """int, then float, then the raw string."""
    for convert in (int, float):
        try:
            return convert(text)
        except ValueError:
            pass
    return text


def _parse_assignments(items: Optional[List[str]], what: str) -> Dict[str, Any]:
    result: Dict[str, Any] = {}
    for item in items or []:
        if "=" not in item:
            raise ValidationError(f"{what} '{item}' is not of the form key=value")
        key, value = (part.strip() for part in item.split("=", 1))
        result[key.replace("-", "_")] = _parse_value(value)
    return result


def _parse_axis(text: str) -> Axis:
    """NAME:LO:HI:N."""
    parts = text.split(":")
    if len(parts) != 4:
        raise ValidationError(f"axis '{text}' is not of the form name:lo:hi:n")
    name, lo, hi, n = parts
    try:
        return Axis(name.strip(), float(lo), float(hi), int(n))
    except ValueError:
        raise ValidationError(f"axis '{text}': lo and hi must be numbers, n an integer") from None


def _parse_bool(text: str, lineno: int) -> bool:
    value = text.strip().lower()
    if value in ("1", "true", "yes", "on"):
        return True
    if value in ("0", "false", "no", "off"):
        return False
    raise ValidationError(f"manifest line {lineno}: expected a boolean, got '{text}'")


# =============================================================================
# OUTPUT
# =============================================================================

@contextlib.contextmanager
def _open_output(path: Optional[str]) -> Iterator[TextIO]:
    if not path or path == "-":
        yield sys.stdout
        return
    try:
        f = open(path, "w", newline="")
    except OSError as e:
        raise ValidationError(f"cannot write {path}: {e}") from e
    with f:
        yield f


def _csv_field(value: Any, digits: int) -> str:
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return fmt_float(value, digits)
    return str(value)


def _jsonable(value: Any) -> Any:
    if isinstance(value, float) and not math.isfinite(value):
        return None
    if isinstance(value, (list, tuple)):
        return [_jsonable(v) for v in value]
    if isinstance(value, dict):
        return {k: _jsonable(v) for k, v in value.items()}
    return value


def _write_json(out: TextIO, doc: Any) -> None:
    out.write(json.dumps(_jsonable(doc), indent=2) + "\n")


def _write_report(out: TextIO, report: Dict[str, Any], fmt: str, digits: int) -> None:
    """key,value rows (CSV) or one object (JSON)."""
    if fmt == "json":
        _write_json(out, report)
        return
    out.write("key,value\n")
    for key, value in report.items():
        out.write(f"{key},{_csv_field(value, digits)}\n")


def _write_table(out: TextIO, header: Sequence[str], rows: List[Sequence[Any]],
                 fmt: str, digits: int) -> None:
    """Header plus rows (CSV) or a list of objects (JSON)."""
    if fmt == "json":
        _write_json(out, [dict(zip(header, row)) for row in rows])
        return
    out.write(",".join(header) + "\n")
    for row in rows:
        out.write(",".join(_csv_field(v, digits) for v in row) + "\n")


# =============================================================================
# MAP SOURCES
# =============================================================================

class MapSource(NamedTuple):
    """One-period map selected on the command line."""
    M: Monodromy2
    T: float
    kicked: Optional[KickedParams]
    description: Dict[str, Any]


def _add_map_arguments(p: argparse.ArgumentParser) -> None:
    g = p.add_argument_group("kicked oscillator")
    g.add_argument("--m", type=float, default=None, help="Mass (default: units.m)")
    g.add_argument("--omega", type=float, default=1.0, help="Oscillator frequency (default: 1)")
    g.add_argument("--T", type=float, default=None, help="Kick period")
    g.add_argument("--omega-t", type=float, default=None, help="omega*T instead of --T")
    g.add_argument("--resonant", action="store_true", help="Set omega*T = 2*pi")
    g.add_argument("--alpha", type=float, default=0.0, help="Kick strength (default: 0)")
    g = p.add_argument_group("frequency profile")
    g.add_argument("--profile", choices=sorted(get_registered_profiles()), default=None,
                   help="Use a modulated frequency profile instead of kicks")
    g.add_argument("--param", action="append", default=None, metavar="KEY=VALUE",
                   help="Profile parameter (repeatable)")
    g.add_argument("--profile-csv", default=None, metavar="FILE",
                   help="Sampled profile CSV (t,omega_sq)")
    p.add_argument("--hbar", type=float, default=None, help="Action scale (default: units.hbar)")


def _mass(args, cfg: Config) -> float:
    return args.m if args.m is not None else float(cfg.units["m"])


def _hbar(args, cfg: Config) -> float:
    return args.hbar if args.hbar is not None else float(cfg.units["hbar"])


def _kicked_params(args, cfg: Config) -> KickedParams:
    if args.resonant:
        omega_t = TWO_PI
    else:
        omega_t = args.omega_t
    if omega_t is not None:
        if not args.omega > 0:
            raise ValidationError("--omega-t needs a positive --omega")
        T = omega_t / args.omega
    elif args.T is not None:
        T = args.T
    else:
        raise ValidationError("need --T, --omega-t or --resonant")
    return KickedParams(omega=args.omega, T=T, alpha=args.alpha, m=_mass(args, cfg),
                        hbar=_hbar(args, cfg))


def _map_source(args, cfg: Config) -> MapSource:
    if args.profile_csv or args.profile:
        if args.profile_csv:
            profile = load_profile_csv(args.profile_csv)
        else:
            profile = build_profile(args.profile, _parse_assignments(args.param, "--param"))
        mod = cfg.modulation
        product = monodromy_converged(
            profile, _mass(args, cfg), float(cfg.tolerances["convergence"]),
            int(mod["start_slices"]), int(mod["max_slices"]),
        )
        log.info("%s: converged with %d slices", profile.kind, product.n_slices)
        description = {"source": profile.kind, "T": profile.period, "slices": product.n_slices}
        return MapSource(product.result, profile.period, None, description)

    params = _kicked_params(args, cfg)
    description = {"source": "kicked", "omega_t": params.omega_t, "alpha": params.alpha,
                   "T": params.T}
    return MapSource(monodromy_kicked(params), params.T, params, description)


def _matrix_fields(M: Monodromy2) -> Dict[str, Any]:
    return {"m11": M.m11, "m12": M.m12, "m21": M.m21, "m22": M.m22,
            "trace": M.trace, "det": M.det}


# =============================================================================
# SUBCOMMANDS
# =============================================================================

def cmd_classify(args, cfg: Config, out: TextIO) -> int:
    tol = cfg.tolerances
    if args.on_boundary:
        if args.profile or args.profile_csv:
            raise ValidationError("--on-boundary applies to the kicked oscillator only")
        args.alpha = marginal_kick_strength(_kicked_params(args, cfg).omega_t, args.boundary_sign)
    src = _map_source(args, cfg)
    M = src.M
    lam_plus, lam_minus = eigenvalue_pair(M, float(tol["det"]))
    cls = classify(M, float(tol["band"]), float(tol["det"]), float(tol["shear"]))
    q = quadratic_form(M)

    report: Dict[str, Any] = dict(src.description)
    report.update(_matrix_fields(M))
    report.update({
        "lambda_plus_re": lam_plus.real, "lambda_plus_im": lam_plus.imag,
        "lambda_minus_re": lam_minus.real, "lambda_minus_im": lam_minus.imag,
        "class": cls.label,
    })
    if isinstance(cls, Elliptic):
        report["Omega"] = cls.omega
    elif isinstance(cls, Hyperbolic):
        report["mu"] = cls.mu
    else:
        report["sign"] = cls.sign
        report["shearing"] = cls.shearing
    report.update({"q_pp": q.q_pp, "q_xx": q.q_xx, "q_xp": q.q_xp,
                   "discriminant": form_discriminant(q)})
    _write_report(out, report, args.format, int(cfg.output["digits"]))
    return 0


def cmd_heff(args, cfg: Config, out: TextIO) -> int:
    tol = cfg.tolerances
    src = _map_source(args, cfg)
    hbar = _hbar(args, cfg)
    gen = heff_from_monodromy(src.M, src.T, hbar, float(tol["band"]), float(tol["det"]),
                              float(tol["shear"]))
    omega_sq, regime = regime_reduction(gen)
    a, b, c = gen.quantum_coefficients()
    target = -src.M if gen.reflection_factor else src.M

    report: Dict[str, Any] = dict(src.description)
    report.update({
        "regime": regime.name.lower(),
        "reflected": gen.reflection_factor,
        "delta": gen.delta,
        "exponent_sq": gen.exponent_sq,
        "g11": gen.g11, "g12": gen.g12, "g21": gen.g21,
        "u": gen.u, "v": gen.v, "w": gen.w,
        "omega_sq": omega_sq,
        "a_re": a.real, "a_im": a.imag, "b_re": b.real, "b_im": b.imag,
        "c_re": c.real, "c_im": c.imag,
        "reconstruction_error": gen.exponentiate().max_deviation(target),
    })
    try:
        fit = quadratic_form_proportionality(gen, quadratic_form(src.M))
        report["sigma"] = fit.sigma
        report["proportionality_residual"] = fit.residual
    except IndeterminateError as e:
        log.info("%s", e)
        report["sigma"] = None
        report["proportionality_residual"] = None
    if src.kicked is not None and not gen.reflection_factor:
        try:
            ratios = compare_expanded_form(gen, src.kicked)
        except ValidationError as e:
            log.info("expanded form skipped: %s", e)
        else:
            report.update({f"expanded_ratio_{k}": v for k, v in ratios.items()})
    _write_report(out, report, args.format, int(cfg.output["digits"]))
    return 0


def cmd_chart(args, cfg: Config, out: TextIO) -> int:
    if args.axis1 is None or args.axis2 is None:
        raise ValidationError("chart needs --axis1 and --axis2 (name:lo:hi:n)")
    fixed = _parse_assignments(args.fixed, "--fixed")
    if args.family in ("mathieu", "custom"):
        fixed.setdefault("slices", int(cfg.modulation["chart_slices"]))
    if args.profile_csv:
        fixed["profile"] = args.profile_csv
    band = args.band if args.band is not None else float(cfg.tolerances["band"])
    spec = SweepSpec(args.family, _parse_axis(args.axis1), _parse_axis(args.axis2), fixed, band)
    workers = args.workers if args.workers is not None else int(cfg.chart["workers"])
    chart = ChartSweep(spec, workers)
    digits = int(cfg.output["digits"])

    if args.what == "boundaries":
        polylines = chart.boundaries(float(cfg.tolerances["boundary"]))
        if args.format == "json":
            write_boundaries_json(polylines, out)
        else:
            write_boundaries_csv(polylines, out, digits)
        return 0

    cells = chart.run()
    if args.format == "json":
        meta = {"family": spec.family,
                "axis1": {"name": spec.axis1.name, "lo": spec.axis1.lo, "hi": spec.axis1.hi,
                          "n": spec.axis1.n},
                "axis2": {"name": spec.axis2.name, "lo": spec.axis2.lo, "hi": spec.axis2.hi,
                          "n": spec.axis2.n},
                "band": spec.band}
        write_cells_json(cells, out, meta)
    else:
        write_cells_csv(cells, out, digits)
    return 0


def cmd_spectrum(args, cfg: Config, out: TextIO) -> int:
    rational_tol = (args.rational_tol if args.rational_tol is not None
                    else float(cfg.cli["spectrum_rational_tol"]))
    cap = int(cfg.tolerances["denominator_cap"])
    if args.OmegaT is not None:
        spec = elliptic_spectrum(args.OmegaT, args.n_max, rational_tol, cap)
    else:
        src = _map_source(args, cfg)
        spec = floquet_spectrum(
            src.M, src.T, _hbar(args, cfg), float(cfg.tolerances["band"]), args.n_max,
            rational_tol, cap, p0=args.P0, k_max=args.k_max, mu=args.mu,
        )
    digits = int(cfg.output["digits"])
    class_of = {n: c for c, members in enumerate(spec.classes) for n in members}

    if args.format == "json":
        _write_json(out, {
            "regime": spec.regime.name.lower(),
            "degeneracy": spec.degeneracy,
            "rational": f"{spec.rational[0]}/{spec.rational[1]}" if spec.rational else None,
            "omega_t": spec.omega_t,
            "n_distinct": len(spec.distinct),
            "distinct": list(spec.distinct),
            "levels": [{"n": n, "class": class_of[n], "quasi_energy": v}
                       for n, v in enumerate(spec.values)],
            "continuous": spec.continuous,
            "partners": list(spec.partners),
            "comb_labels": [{"x0": x0, "mu": mu} for x0, mu in spec.comb_labels],
            "reflected": spec.reflected,
        })
    elif spec.continuous and spec.partners:
        _write_table(out, ("index", "momentum"), list(enumerate(spec.partners)), "csv", digits)
    elif spec.continuous:
        rows = [(i, x0, mu) for i, (x0, mu) in enumerate(spec.comb_labels)]
        _write_table(out, ("index", "x0", "mu"), rows, "csv", digits)
    else:
        rows = [(n, class_of[n], v) for n, v in enumerate(spec.values)]
        _write_table(out, ("n", "class", "quasi_energy"), rows, "csv", digits)
    return 0


def cmd_evolve(args, cfg: Config, out: TextIO) -> int:
    if args.periods < 0:
        raise ValidationError(f"--periods must be non-negative, got {args.periods}")
    src = _map_source(args, cfg)
    band = float(cfg.tolerances["band"])
    state = GaussianState.vacuum(_hbar(args, cfg), (args.mean_x, args.mean_p))
    states = trajectory(state, src.M, args.periods, float(cfg.tolerances["det"]))
    digits = int(cfg.output["digits"])

    if args.trajectory:
        rows = []
        for n, s in enumerate(states):
            cov = s.covariance
            rows.append((n, s.mean[0], s.mean[1], float(cov[0, 0]), float(cov[0, 1]),
                         float(cov[1, 1]), s.det, s.log_max_eigenvalue))
        header = ("n", "mean_x", "mean_p", "sigma_xx", "sigma_xp", "sigma_pp", "det",
                  "log_max_eigenvalue")
        _write_table(out, header, rows, args.format, digits)
        return 0

    cls = classify(src.M, band)
    report: Dict[str, Any] = dict(src.description)
    report.update({
        "class": cls.label,
        "exponent": cls.exponent,
        "periods": args.periods,
        "det_initial": states[0].det,
        "det_drift": max(abs(s.det - states[0].det) for s in states),
        "log_max_eigenvalue": states[-1].log_max_eigenvalue,
    })
    if isinstance(cls, Hyperbolic) and args.periods >= 2:
        rate = variance_growth_exponent(src.M, args.periods, state, band)
        report["growth_exponent"] = rate
        report["growth_relative_error"] = abs(rate - cls.mu) / cls.mu
    else:
        report["growth_exponent"] = None
        report["growth_relative_error"] = None
    _write_report(out, report, args.format, digits)
    return 0


def cmd_eigenstate(args, cfg: Config, out: TextIO) -> int:
    x0, shift = args.x0, 0
    if args.normalize:
        x0, shift = normalize_label(args.x0, args.alpha)
    comb = build_resonant_eigenstate(x0, args.mu, args.alpha, args.N)
    res = eigen_residual(comb)
    digits = int(cfg.output["digits"])

    if args.entries and args.format == "csv":
        rows = [(n, x, a.real, a.imag) for n, x, a in comb.entries]
        _write_table(out, ("index", "position", "amplitude_re", "amplitude_im"), rows,
                     "csv", digits)
        return 0

    expected_lo, expected_hi = boundary_moduli(comb.alpha, comb.N)
    measured = dict(res.entries)
    report: Dict[str, Any] = {
        "x0": comb.x0, "ladder_shift": shift, "mu": comb.mu, "alpha": comb.alpha, "N": comb.N,
        "entries": len(comb),
        "boundary_terms": res.boundary_terms,
        "residual_norm_sq": res.residual_norm_sq,
        "interior_max_abs": res.interior_max_abs,
        "interior_max_rel": res.interior_max_rel,
        "boundary_modulus_lo": abs(measured[-comb.N]) if -comb.N in measured else None,
        "boundary_modulus_hi": abs(measured[comb.N + 1]) if comb.N + 1 in measured else None,
        "expected_modulus_lo": expected_lo,
        "expected_modulus_hi": expected_hi,
    }
    if args.entries:
        report["comb"] = [{"index": n, "position": x, "amplitude_re": a.real,
                           "amplitude_im": a.imag} for n, x, a in comb.entries]
    _write_report(out, report, args.format, digits)
    return 0


def cmd_mathieu_boundary(args, cfg: Config, out: TextIO) -> int:
    family = mathieu_family(args.delta_l, args.omega0, _mass(args, cfg), args.method,
                            args.slices, args.steps)
    tol = args.xtol if args.xtol is not None else float(cfg.tolerances["boundary"])
    roots = trace_boundary(family, args.lo, args.hi, tol, args.scan_points)
    digits = int(cfg.output["digits"])
    if args.format == "json":
        _write_json(out, {"delta_l": args.delta_l, "omega0": args.omega0, "method": args.method,
                          "roots": [{"l": r.value, "sign": r.sign} for r in roots]})
    else:
        _write_table(out, ("index", "l", "sign"),
                     [(i, r.value, r.sign) for i, r in enumerate(roots)], "csv", digits)
    return 0


def cmd_selftest(args, cfg: Config, out: TextIO) -> int:
    from paramres.selftest import run_selftest
    only = None
    if args.only:
        try:
            only = [int(c) for c in args.only.split(",")]
        except ValueError:
            raise ValidationError(f"--only expects comma-separated criterion numbers, got '{args.only}'") from None
    results = run_selftest(seed=args.seed, only=only)
    rows = [(r.criterion, r.name, "pass" if r.passed else "fail", r.detail) for r in results]
    _write_table(out, ("criterion", "name", "status", "detail"), rows, args.format,
                 int(cfg.output["digits"]))
    failed = [r.criterion for r in results if not r.passed]
    if failed:
        log.warning("self-test failed: criteria %s", ", ".join(map(str, failed)))
        return 2
    return 0


COMMANDS = {
    "classify": cmd_classify,
    "heff": cmd_heff,
    "chart": cmd_chart,
    "spectrum": cmd_spectrum,
    "evolve": cmd_evolve,
    "eigenstate": cmd_eigenstate,
    "mathieu-boundary": cmd_mathieu_boundary,
    "selftest": cmd_selftest,
}


# =============================================================================
# PARSER
# =============================================================================

def build_parser() -> argparse.ArgumentParser:
    # Global flags are also accepted after the subcommand.
    common = _ArgumentParser(add_help=False)
    common.add_argument("--config", default=argparse.SUPPRESS, metavar="FILE",
                        help="Run manifest (key = value lines)")
    common.add_argument("--format", choices=("csv", "json"), default=argparse.SUPPRESS)
    common.add_argument("--output", "-o", default=argparse.SUPPRESS, metavar="PATH")
    common.add_argument("--seed", type=int, default=argparse.SUPPRESS)

    parser = _ArgumentParser(
        prog="paramres",
        description="paramres - parametric resonance of kicked and modulated oscillators",
        formatter_class=argparse.RawDescriptionHelpFormatter,
        epilog="""\
Examples:
  %(prog)s classify --omega 1 --T 6.283185307 --alpha 1
  %(prog)s heff --omega-t 2 --alpha 0.3
  %(prog)s chart --family kicked --axis1 omega_t:0:6.283185307:200 --axis2 alpha:-2:2:200
  %(prog)s spectrum --OmegaT 2.0943951 --n-max 8
  %(prog)s evolve --alpha 1 --resonant --periods 30
  %(prog)s eigenstate --x0 1 --mu 0 --alpha 1 --N 10
  %(prog)s mathieu-boundary --delta-l 0.5 --lo 0.5 --hi 1.5
  %(prog)s --config run.conf
  %(prog)s selftest
""",
    )
    parser.add_argument("--config", default=None, metavar="FILE",
                        help="Run manifest (key = value lines); flags override it")
    parser.add_argument("--format", choices=("csv", "json"), default=None,
                        help="Output format (default: output.format)")
    parser.add_argument("--output", "-o", default=None, metavar="PATH",
                        help="Write to PATH instead of stdout")
    parser.add_argument("--seed", type=int, default=0, help="Seed for randomized checks")
    parser.add_argument("--tol", action="append", default=None, metavar="NAME=VALUE",
                        help="Tolerance override, e.g. band=1e-10 (repeatable)")
    parser.add_argument("--verbose", "-v", action="count", default=0,
                        help="-v for info, -vv for debug logs on stderr")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")

    sub = parser.add_subparsers(dest="command", metavar="COMMAND")

    p = sub.add_parser("classify", parents=[common], help="Classify a one-period map")
    _add_map_arguments(p)
    p.add_argument("--on-boundary", action="store_true",
                   help="Choose alpha on the marginal line for the given omega*T")
    p.add_argument("--boundary-sign", type=int, choices=(1, -1), default=1,
                   help="Sign of alpha with --on-boundary (default: 1)")

    p = sub.add_parser("heff", parents=[common], help="Effective Hamiltonian of a map")
    _add_map_arguments(p)

    p = sub.add_parser("chart", parents=[common], help="Stability chart over two parameters")
    p.add_argument("--family", choices=sorted(get_registered_families()), default="kicked")
    p.add_argument("--axis1", default=None, metavar="NAME:LO:HI:N")
    p.add_argument("--axis2", default=None, metavar="NAME:LO:HI:N")
    p.add_argument("--fixed", action="append", default=None, metavar="KEY=VALUE",
                   help="Fixed family parameter (repeatable)")
    p.add_argument("--profile-csv", default=None, metavar="FILE",
                   help="Profile CSV for the custom family")
    p.add_argument("--band", type=float, default=None)
    p.add_argument("--workers", type=int, default=None)
    p.add_argument("--what", choices=("cells", "boundaries"), default="cells")

    p = sub.add_parser("spectrum", parents=[common], help="Quasi-energy spectrum")
    p.add_argument("--OmegaT", type=float, default=None,
                   help="Rotation angle per period of an elliptic map")
    p.add_argument("--n-max", type=int, default=16)
    p.add_argument("--rational-tol", type=float, default=None)
    p.add_argument("--P0", type=float, default=0.0, help="Reference momentum (marginal)")
    p.add_argument("--k-max", type=int, default=4, help="Partner count (marginal)")
    p.add_argument("--mu", type=float, default=0.0, help="Quasi phase of comb labels")
    _add_map_arguments(p)

    p = sub.add_parser("evolve", parents=[common], help="Propagate a Gaussian state")
    _add_map_arguments(p)
    p.add_argument("--periods", type=int, default=30)
    p.add_argument("--mean-x", type=float, default=0.0)
    p.add_argument("--mean-p", type=float, default=0.0)
    p.add_argument("--trajectory", action="store_true", help="One row per period")

    p = sub.add_parser("eigenstate", parents=[common], help="Resonant delta-comb eigenstate")
    p.add_argument("--x0", type=float, default=1.0)
    p.add_argument("--mu", type=float, default=0.0)
    p.add_argument("--alpha", type=float, default=1.0)
    p.add_argument("--N", type=int, default=10)
    p.add_argument("--normalize", action="store_true",
                   help="Map x0 into the fundamental interval first")
    p.add_argument("--entries", action="store_true", help="List the comb entries")

    p = sub.add_parser("mathieu-boundary", parents=[common],
                       help="Stability boundaries of the Mathieu family in l")
    p.add_argument("--delta-l", type=float, default=0.5)
    p.add_argument("--omega0", type=float, default=2.0)
    p.add_argument("--m", type=float, default=None)
    p.add_argument("--lo", type=float, default=0.5)
    p.add_argument("--hi", type=float, default=1.5)
    p.add_argument("--method", choices=("slices", "rk4"), default="slices")
    p.add_argument("--slices", type=int, default=4096)
    p.add_argument("--steps", type=int, default=2000)
    p.add_argument("--scan-points", type=int, default=64)
    p.add_argument("--xtol", type=float, default=None, help="Bisection width (default: tolerances.boundary)")

    p = sub.add_parser("selftest", parents=[common], help="Run the acceptance checks")
    p.add_argument("--only", default=None, metavar="N[,N...]", help="Run selected criteria")

    return parser


def _subparser(parser: argparse.ArgumentParser, command: str) -> argparse.ArgumentParser:
    for action in parser._actions:
        if isinstance(action, argparse._SubParsersAction):
            try:
                return action.choices[command]
            except KeyError:
                raise ValidationError(f"unknown command '{command}'") from None
    raise ValidationError("parser has no subcommands")


def _apply_manifest(parser: argparse.ArgumentParser, path: str,
                    command: Optional[str]) -> str:
    """Install manifest values as parser defaults; returns the command."""
    entries = load_manifest(path)
    if "command" in entries:
        named, lineno = entries["command"]
        if command is not None and named != command:
            raise ValidationError(
                f"manifest line {lineno}: command '{named}' conflicts with '{command}'"
            )
        command = named
    if command is None:
        raise ValidationError("no command given on the command line or in the manifest")
    sub = _subparser(parser, command)
    actions = {a.dest: a for a in sub._actions if a.dest not in ("help",)}

    top: Dict[str, Any] = {}
    tolerances: List[str] = []
    values: Dict[str, Any] = {}
    for key, (raw, lineno) in entries.items():
        if key == "command":
            continue
        if key.startswith("tolerances."):
            name = key.split(".", 1)[1]
            if name not in DEFAULTS["tolerances"]:
                raise ValidationError(f"manifest line {lineno}: unknown tolerance '{name}'")
            tolerances.append(f"{name}={raw}")
            continue
        if key in GLOBAL_KEYS:
            top[key] = int(raw) if key == "seed" else raw
            continue
        action = actions.get(key)
        if action is None:
            raise ValidationError(f"manifest line {lineno}: unknown key '{key}' for {command}")
        if action.nargs == 0:
            values[key] = _parse_bool(raw, lineno)
        elif isinstance(action, argparse._AppendAction):
            values[key] = [item.strip() for item in raw.split(",") if item.strip()]
        else:
            try:
                value = action.type(raw) if action.type else raw
            except ValueError:
                raise ValidationError(f"manifest line {lineno}: invalid value '{raw}' for {key}") from None
            if action.choices is not None and value not in action.choices:
                raise ValidationError(f"manifest line {lineno}: '{raw}' is not one of {list(action.choices)}")
            values[key] = value
    if "format" in top and top["format"] not in ("csv", "json"):
        raise ValidationError(f"manifest: unknown format '{top['format']}'")
    if tolerances:
        top["tol"] = tolerances
    parser.set_defaults(**top)
    sub.set_defaults(**values)
    log.debug("manifest %s: %d value(s) for %s", path, len(entries), command)
    return command


def _setup_logging(verbosity: int) -> None:
    level = logging.WARNING
    if verbosity == 1:
        level = logging.INFO
    elif verbosity >= 2:
        level = logging.DEBUG
    logging.basicConfig(level=level, stream=sys.stderr,
                        format="%(levelname)s %(name)s: %(message)s")


def _report_error(e: Exception, exit_code: int) -> int:
    doc: Dict[str, Any] = {"error": str(e), "kind": type(e).__name__, "exit_code": exit_code}
    if isinstance(e, ProfileFormatError) and e.line is not None:
        doc["line"] = e.line
    sys.stderr.write(json.dumps(doc) + "\n")
    return exit_code


def _run(argv: Optional[Sequence[str]]) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    args = parser.parse_args(argv)
    _setup_logging(args.verbose)

    if args.config:
        command = _apply_manifest(parser, args.config, args.command)
        if args.command is None:
            argv.append(command)
        args = parser.parse_args(argv)
    if args.command is None:
        parser.print_usage(sys.stderr)
        raise ValidationError("no command given")

    cfg = Config()
    overrides = _parse_assignments(args.tol, "--tol")
    unknown = set(overrides) - set(DEFAULTS["tolerances"])
    if unknown:
        raise ValidationError(f"unknown tolerance(s): {', '.join(sorted(unknown))}")
    cfg.tolerances.update(overrides)
    validate_tolerances(cfg.data)
    if args.format is None:
        args.format = cfg.output["format"]

    with _open_output(args.output) as out:
        return COMMANDS[args.command](args, cfg, out)


def main(argv: Optional[Sequence[str]] = None) -> int:
    try:
        return _run(argv)
    except ValidationError as e:
        return _report_error(e, 1)
    except (NumericalError, ParamresError) as e:
        return _report_error(e, 2)
    except OverflowError as e:
        return _report_error(NumericalError(f"floating-point overflow: {e}"), 2)


if __name__ == "__main__":
    sys.exit(main())
