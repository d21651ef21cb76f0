"""Acceptance checks run in-process by `paramres selftest`.

Each check returns a CriterionResult; randomized checks draw from
numpy.random.default_rng(seed + criterion) so that any subset reproduces.
"""

import io
import logging
import math
from typing import Callable, Dict, List, NamedTuple, Optional, Sequence, Tuple

import numpy as np

from paramres.chart import Axis, ChartSweep, SweepSpec
from paramres.chart.output import write_boundaries_csv, write_cells_csv
from paramres.core.classical import (
    TWO_PI, classify, free_matrix, kick_matrix, marginal_kick_strength, monodromy_kicked,
    quadratic_form, stability_boundary_kicked,
)
from paramres.core.effective import (
    delta_of_dsq, heff_from_monodromy, heff_kicked, quadratic_form_proportionality,
)
from paramres.core.types import Elliptic, Hyperbolic, KickedParams, Monodromy2
from paramres.errors import ParamresError, ValidationError
from paramres.modulation import (
    convergence_order, kicked_family, mathieu_family, monodromy_converged, rk4_oracle,
    trace_boundary,
)
from paramres.profiles import MathieuProfile
from paramres.quantum.comb import (
    boundary_moduli, build_resonant_eigenstate, comb_overlap, dirichlet_kernel, eigen_residual,
)
from paramres.quantum.gaussian import GaussianState, trajectory, variance_growth_exponent
from paramres.quantum.spectrum import elliptic_spectrum, floquet_phase, marginal_partners

log = logging.getLogger(__name__)

# Randomized reconstruction and invariance checks stay this far from |Tr M| = 2.
EXCLUSION_MARGIN = 1e-6


class CriterionResult(NamedTuple):
    criterion: int
    name: str
    passed: bool
    detail: str


def _random_kicked(rng: np.random.Generator) -> KickedParams:
    return KickedParams(
        omega=float(rng.uniform(0.1, 5.0)),
        T=float(rng.uniform(0.01, 20.0)),
        alpha=float(rng.uniform(-3.0, 3.0)),
        m=float(rng.uniform(0.1, 10.0)),
    )


# =============================================================================
# CRITERIA
# =============================================================================

def check_symplecticity(rng: np.random.Generator, samples: int = 10000) -> Tuple[bool, str]:
    worst_defect = 0.0
    worst_det = 0.0
    for _ in range(samples):
        M = monodromy_kicked(_random_kicked(rng))
        worst_defect = max(worst_defect, M.symplectic_defect())
        worst_det = max(worst_det, abs(M.det - 1.0))
    ok = worst_defect < 1e-12 and worst_det < 1e-12
    return ok, f"samples={samples} max_defect={worst_defect:.3e} max_det_error={worst_det:.3e}"


def check_classification(rng: np.random.Generator, n: int = 200,
                         margin: float = 1e-9) -> Tuple[bool, str]:
    checked = 0
    mismatches = 0
    for alpha in np.linspace(-2.0, 2.0, n):
        kick = kick_matrix(float(alpha))
        for wt in np.linspace(0.0, TWO_PI, n):
            f = abs(math.cosh(alpha) * math.cos(wt)) - 1.0
            if abs(f) <= margin:
                continue
            cls = classify(free_matrix(1.0, 1.0, float(wt)) @ kick)
            expected = Hyperbolic if f > 0 else Elliptic
            checked += 1
            if not isinstance(cls, expected):
                mismatches += 1
    return mismatches == 0, f"cells={checked} mismatches={mismatches}"


def _away_from_marginal(M: Monodromy2) -> bool:
    return abs(abs(M.half_trace) - 1.0) > EXCLUSION_MARGIN


def check_reconstruction(rng: np.random.Generator, samples: int = 10000) -> Tuple[bool, str]:
    worst = 0.0
    reflected = 0
    done = 0
    while done < samples:
        params = KickedParams(
            omega=float(rng.uniform(0.5, 2.0)),
            T=float(rng.uniform(0.01, 10.0)),
            alpha=float(rng.uniform(-2.0, 2.0)),
            m=float(rng.uniform(0.5, 2.0)),
        )
        M = monodromy_kicked(params)
        if not _away_from_marginal(M):
            continue
        gen = heff_kicked(params)
        target = -M if gen.reflection_factor else M
        reflected += gen.reflection_factor
        worst = max(worst, gen.exponentiate().max_deviation(target))
        done += 1
    return worst < 1e-10, f"samples={samples} reflected={reflected} max_error={worst:.3e}"


def check_delta_continuity(rng: np.random.Generator) -> Tuple[bool, str]:
    worst = 0.0
    for dsq in (1e-4, -1e-4):
        d = math.sqrt(abs(dsq))
        direct = math.asinh(d) / d if dsq > 0 else math.asin(d) / d
        series = 1.0 - dsq / 6.0 + 3.0 * dsq * dsq / 40.0
        worst = max(worst, abs(direct - series), abs(delta_of_dsq(dsq) - direct))
    at_zero = delta_of_dsq(0.0)
    ok = worst < 1e-12 and at_zero == 1.0
    return ok, f"max_gap={worst:.3e} delta(0)={at_zero!r}"


def check_form_invariance(rng: np.random.Generator, points: int = 20,
                          n_max: int = 50) -> Tuple[bool, str]:
    worst_ratio = 0.0
    worst_residual = 0.0
    maps: List[Monodromy2] = []
    while len(maps) < points:
        wt = float(rng.uniform(0.1, TWO_PI - 0.1))
        alpha = float(rng.uniform(-1.0, 1.0))
        M = monodromy_kicked(KickedParams(omega=1.0, T=wt, alpha=alpha))
        if isinstance(classify(M), Elliptic) and _away_from_marginal(M):
            maps.append(M)
    elliptic = len(maps)
    for _ in range(points):
        wt = float(rng.uniform(0.2, 1.3))
        alpha = marginal_kick_strength(wt, 1 if rng.uniform() < 0.5 else -1)
        maps.append(monodromy_kicked(KickedParams(omega=1.0, T=wt, alpha=alpha)))

    for M in maps:
        q = quadratic_form(M)
        size = float(np.max(np.abs(q.as_vector())))
        z = rng.normal(size=2)
        while abs(float(q.evaluate(z))) < 1e-3 * size * float(z @ z):
            z = rng.normal(size=2)
        q0 = float(q.evaluate(z))
        w = z
        for _ in range(n_max):
            w = M.apply(w)
            worst_ratio = max(worst_ratio, abs(float(q.evaluate(w)) / q0 - 1.0))
        gen = heff_from_monodromy(M, 1.0)
        worst_residual = max(worst_residual, quadratic_form_proportionality(gen, q).residual)

    ok = worst_ratio < 1e-8 and worst_residual < 1e-10
    return ok, (f"elliptic={elliptic} marginal={len(maps) - elliptic} "
                f"max_ratio_error={worst_ratio:.3e} max_residual={worst_residual:.3e}")


def check_slice_convergence(rng: np.random.Generator) -> Tuple[bool, str]:
    profile = MathieuProfile(1.0, 0.5, 2.0)
    product = monodromy_converged(profile, 1.0, 1e-10)
    oracle = rk4_oracle(profile, 1.0, 20000)
    gap = product.result.max_deviation(oracle)
    report = convergence_order(profile, 1.0, 64, 3, 20000)
    orders_ok = all(1.8 <= o <= 2.2 for o in report.orders)
    orders = "/".join(f"{o:.3f}" for o in report.orders)
    return gap < 1e-8 and orders_ok, f"slices={product.n_slices} gap={gap:.3e} orders={orders}"


def check_boundaries(rng: np.random.Generator) -> Tuple[bool, str]:
    worst_kicked = 0.0
    ok = True
    for alpha in (0.3, 1.0, 1.5):
        closed = stability_boundary_kicked(alpha)
        found = trace_boundary(kicked_family(alpha), 1e-9, TWO_PI - 1e-9, 1e-13, 64)
        if len(found) != len(closed) or any(a.sign != b.sign for a, b in zip(found, closed)):
            ok = False
            continue
        worst_kicked = max(worst_kicked,
                           max(abs(a.value - b.value) for a, b in zip(found, closed)))

    by_slices = trace_boundary(mathieu_family(0.5, method="slices", slices=4096), 0.5, 1.5,
                               1e-10, 16)
    by_rk4 = trace_boundary(mathieu_family(0.5, method="rk4", steps=2000), 0.5, 1.5, 1e-10, 16)
    if len(by_slices) != len(by_rk4):
        return False, f"mathieu root count {len(by_slices)} vs {len(by_rk4)}"
    worst_mathieu = max(abs(a.value - b.value) for a, b in zip(by_slices, by_rk4))
    ok = ok and worst_kicked < 1e-9 and worst_mathieu < 1e-6
    return ok, (f"kicked_max_gap={worst_kicked:.3e} mathieu_roots={len(by_slices)} "
                f"mathieu_max_gap={worst_mathieu:.3e}")


def check_growth(rng: np.random.Generator) -> Tuple[bool, str]:
    points = (
        KickedParams(omega=1.0, T=TWO_PI, alpha=1.0),
        KickedParams(omega=1.0, T=TWO_PI, alpha=0.5),
        KickedParams(omega=1.0, T=1.0, alpha=2.0),
    )
    worst_rel = 0.0
    for params in points:
        M = monodromy_kicked(params)
        mu = classify(M).mu
        worst_rel = max(worst_rel, abs(variance_growth_exponent(M, 30) - mu) / mu)

    regimes = (
        KickedParams(omega=1.0, T=1.0, alpha=0.2),                      # elliptic
        KickedParams(omega=1.0, T=TWO_PI, alpha=1.0),                   # hyperbolic
        KickedParams(omega=1.0, T=2.0, alpha=-2.0),                     # reflected
        KickedParams(omega=1.0, T=1.0, alpha=marginal_kick_strength(1.0)),  # marginal
    )
    worst_drift = 0.0
    for params in regimes:
        states = trajectory(GaussianState.vacuum(), monodromy_kicked(params), 50)
        worst_drift = max(worst_drift, max(abs(s.det - states[0].det) for s in states))
    ok = worst_rel < 0.01 and worst_drift < 1e-10
    return ok, f"max_rel_error={worst_rel:.3e} max_det_drift={worst_drift:.3e}"


def check_comb(rng: np.random.Generator) -> Tuple[bool, str]:
    worst_rel = 0.0
    worst_modulus = 0.0
    worst_overlap = 0.0
    terms_ok = True
    for alpha in (0.3, 1.0, 2.0):
        for N in (5, 20):
            mu = float(rng.uniform(0.0, TWO_PI))
            comb = build_resonant_eigenstate(1.0, mu, alpha, N)
            res = eigen_residual(comb)
            if res.boundary_terms != 2:
                terms_ok = False
                continue
            worst_rel = max(worst_rel, res.interior_max_rel)
            measured = dict(res.entries)
            for index, expected in zip((-N, N + 1), boundary_moduli(alpha, N)):
                worst_modulus = max(worst_modulus, abs(abs(measured[index]) - expected) / expected)

            other_mu = float(rng.uniform(0.0, TWO_PI))
            shifted = build_resonant_eigenstate(1.0, other_mu, alpha, N)
            kernel = dirichlet_kernel(shifted.mu - comb.mu, N)
            worst_overlap = max(worst_overlap, abs(comb_overlap(comb, shifted) - kernel))
            elsewhere = build_resonant_eigenstate(0.5 * (1.0 + math.exp(alpha)), mu, alpha, N)
            worst_overlap = max(worst_overlap, abs(comb_overlap(comb, elsewhere)))
    ok = terms_ok and worst_rel <= 1e-12 and worst_modulus < 1e-12 and worst_overlap < 1e-12
    return ok, (f"boundary_terms_ok={terms_ok} interior_rel={worst_rel:.3e} "
                f"modulus_error={worst_modulus:.3e} overlap_error={worst_overlap:.3e}")


def check_spectrum(rng: np.random.Generator, n_max: int = 20) -> Tuple[bool, str]:
    ok = True
    found = []
    for r, s in ((1, 3), (2, 5)):
        spec = elliptic_spectrum(TWO_PI * r / s, n_max)
        expected = tuple(tuple(range(c, n_max + 1, s)) for c in range(s))
        if spec.rational != (r, s) or len(spec.distinct) != s or spec.classes != expected:
            ok = False
        found.append(f"{r}/{s}:{len(spec.distinct)}")

    P0, T = float(rng.uniform(0.1, 2.0)), float(rng.uniform(0.5, 3.0))
    partners = marginal_partners(P0, T, 1.0, k_max=10)
    reference = floquet_phase(P0, T)
    spread = max(abs(floquet_phase(p, T) - reference) for p in partners)
    ok = ok and spread <= 1e-12
    return ok, f"distinct={' '.join(found)} partner_phase_spread={spread:.3e}"


def _chart_output(workers: int) -> str:
    spec = SweepSpec("kicked", Axis("omega_t", 0.05, TWO_PI - 0.05, 40), Axis("alpha", -2.0, 2.0, 40))
    chart = ChartSweep(spec, workers)
    buf = io.StringIO()
    write_cells_csv(chart.run(), buf)
    write_boundaries_csv(chart.boundaries(), buf)
    return buf.getvalue()


def check_determinism(rng: np.random.Generator, seed: int = 0) -> Tuple[bool, str]:
    serial = _chart_output(1)
    parallel = _chart_output(4)
    again = _chart_output(1)
    rerun = (4, 5, 9, 10)
    first = run_selftest(seed, rerun)
    second = run_selftest(seed, rerun)
    ok = serial == parallel == again and first == second
    return ok, f"chart_bytes={len(serial)} identical={serial == parallel == again} rerun_identical={first == second}"


CRITERIA: Dict[int, Tuple[str, Callable]] = {
    1: ("symplecticity", check_symplecticity),
    2: ("classification_oracle", check_classification),
    3: ("generator_reconstruction", check_reconstruction),
    4: ("delta_continuity", check_delta_continuity),
    5: ("quadratic_form_invariance", check_form_invariance),
    6: ("slice_convergence", check_slice_convergence),
    7: ("boundary_dual_method", check_boundaries),
    8: ("hyperbolic_growth", check_growth),
    9: ("comb_eigenstate", check_comb),
    10: ("spectrum_structure", check_spectrum),
    11: ("determinism", check_determinism),
}


def run_selftest(seed: int = 0, only: Optional[Sequence[int]] = None) -> List[CriterionResult]:
    """Run the selected criteria (all by default) in numeric order.

    A criterion that raises counts as failed; the exception text becomes
    its detail.
    """
    selected = sorted(CRITERIA) if only is None else sorted(set(only))
    results = []
    for number in selected:
        if number not in CRITERIA:
            raise ValidationError(f"no criterion {number} (known: 1-{max(CRITERIA)})")
        name, check = CRITERIA[number]
        rng = np.random.default_rng(seed + number)
        try:
            if check is check_determinism:
                passed, detail = check(rng, seed)
            else:
                passed, detail = check(rng)
        except ParamresError as e:
            log.debug("criterion %d raised", number, exc_info=True)
            passed, detail = False, f"{type(e).__name__}: {e}"
        log.info("criterion %d %s: %s (%s)", number, name, "pass" if passed else "fail", detail)
        results.append(CriterionResult(number, name, passed, detail))
    return results
