"""The ten acceptance criteria, shared by ``berkstab selftest`` and the test suite.

Each criterion returns a :class:`CriterionResult`; none of them relaxes a
tolerance to pass.
"""

from __future__ import annotations

import random
import time
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable

import numpy as np

from . import sampling
from .berkcurve import (
    TRIVIAL,
    FSData,
    PLPotential,
    Polarization,
    SectionDivisor,
    branch,
    combine,
    d1,
    dirac,
    dist_to_constants,
    dual_energy,
    energy,
    entropy,
    fs_profile,
    mabuchi,
    monge_ampere,
    pairing,
    ricci_energy,
    solve_ma,
    stability_report,
)
from .berkcurve.points import ClosedPoint
from .berkcurve.sampling import POINT_POOL, random_fsdata, random_measure, random_potential
from .berkcurve.stability import UNIFORM_FAILS
from .berkcurve.toric import toric_mabuchi
from .hermnorm import convexity_gap, herm_distance
from .nanorm import na_distance
from .radial import isometry_check
from .symnorm import lp

__all__ = ["CriterionResult", "CRITERIA", "run_criterion", "run_all", "worked_examples"]

METRIC_TOL = 1e-8
TORIC_POOL = (ClosedPoint("0"), ClosedPoint("inf"))


@dataclass(frozen=True)
class CriterionResult:
    number: int
    title: str
    passed: bool
    detail: str
    seconds: float

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        return f"[{status}] criterion {self.number:2d}: {self.title} -- {self.detail} ({self.seconds:.1f}s)"


def _gauges(n: int):
    return [lp(1, n), lp(2, n), lp("inf", n)]


def worked_examples() -> dict[str, FSData]:
    def sec(zeros, m):
        return SectionDivisor(zeros, m)

    return {
        "T0": FSData(1, [(sec({"0": 1}, 1), 0), (sec({"inf": 1}, 1), 0)]),
        "PROD": FSData(1, [(sec({"0": 1}, 1), 1), (sec({"inf": 1}, 1), 0)]),
        "TWOPT": FSData(2, [(sec({"0": 2}, 2), 0), (sec({"inf": 2}, 2), 0), (sec({"0": 1, "inf": 1}, 2), 1)]),
    }


def criterion_isometry(seed: int = 0, pairs: int = 200, horizon: float = 1e6, dims=range(2, 7), floor: float = 1e-5, budget: float = 60.0):
    rng = np.random.default_rng(seed)
    start = time.perf_counter()
    worst, checks, failures = 0.0, 0, 0
    dims = list(dims)
    for k in range(pairs):
        n = dims[k % len(dims)]
        if k % 4 == 3:
            r1, r2 = sampling.random_parallel_pair(rng, n)
        else:
            r1, r2 = sampling.random_ray(rng, n), sampling.random_ray(rng, n)
        for tau in _gauges(n):
            res = isometry_check(tau, r1, r2, horizon)
            checks += 1
            worst = max(worst, res.defect)
            if not res.passed(floor):
                failures += 1
    elapsed = time.perf_counter() - start
    ok = failures == 0 and elapsed < budget
    return ok, f"{checks} checks on {pairs} pairs, max defect {worst:.3g}, {failures} over bound, {elapsed:.1f}s of {budget:g}s"


def criterion_metric_axioms(seed: int = 0, triples: int = 500):
    rng = np.random.default_rng(seed)
    worst = 0.0
    for k in range(triples):
        n = 2 + k % 4
        a, b, c = (sampling.random_norm(rng, n) for _ in range(3))
        for tau in _gauges(n):
            ab, ba = herm_distance(tau, a, b), herm_distance(tau, b, a)
            bc, ac = herm_distance(tau, b, c), herm_distance(tau, a, c)
            worst = max(worst, abs(ab - ba), ac - ab - bc, herm_distance(tau, a, a))
    herm_ok = worst <= METRIC_TOL
    na_bad = 0
    for k in range(triples):
        n = 2 + k % 3
        a, b, c = (sampling.random_na_norm(rng, n) for _ in range(3))
        for tau in (lp(1, n), lp("inf", n)):
            ab, ba = na_distance(tau, a, b), na_distance(tau, b, a)
            bc, ac = na_distance(tau, b, c), na_distance(tau, a, c)
            if not (isinstance(ab, Fraction) and ab == ba and ac <= ab + bc and na_distance(tau, a, a) == 0):
                na_bad += 1
    ok = herm_ok and na_bad == 0
    return ok, f"hermitian max violation {worst:.3g} over {triples} triples; {na_bad} exact NA violations over {triples} triples"


def criterion_busemann(seed: int = 0, pairs: int = 100, grid: int = 33):
    rng = np.random.default_rng(seed)
    worst = 0.0
    for k in range(pairs):
        n = 2 + k % 4
        seg1 = (sampling.random_norm(rng, n), sampling.random_norm(rng, n))
        seg2 = (sampling.random_norm(rng, n), sampling.random_norm(rng, n))
        for tau in _gauges(n):
            worst = max(worst, convexity_gap(tau, seg1, seg2, grid))
    return worst <= METRIC_TOL, f"max midpoint gap {worst:.3g} over {pairs} pairs, grid {grid}"


def criterion_worked_examples(seed: int = 0):
    pol = Polarization(1, 0)
    ex = worked_examples()
    expected_ma = {
        "T0": dirac(TRIVIAL),
        "PROD": dirac(branch("0", 1)),
        "TWOPT": type(dirac(TRIVIAL))([(branch("0", 1), Fraction(1, 2)), (branch("inf", 1), Fraction(1, 2))]),
    }
    expected = {
        "T0": (0, 0, 0, 0),
        "PROD": (Fraction(1, 2), 1, -2, 0),
        "TWOPT": (Fraction(1, 4), 1, -1, Fraction(1, 2)),
    }
    bad = []
    for name, data in ex.items():
        phi = fs_profile(data, pol)
        mu = monge_ampere(phi, pol)
        got = (energy(phi, pol), entropy(mu), ricci_energy(phi, pol), mabuchi(phi, pol))
        if mu != expected_ma[name] or got != expected[name]:
            bad.append(name)
    for name in ("PROD", "TWOPT"):
        if toric_mabuchi(ex[name], pol) != expected[name][3]:
            bad.append(name + "/toric")
    return not bad, "MA, E, H, R, M exact for T0, PROD, TWOPT; toric M agrees" if not bad else "mismatch: " + ", ".join(bad)


def criterion_euler_lagrange(seed: int = 0, pairs: int = 100):
    rng = random.Random(seed)
    pol = Polarization(1, 0)
    bad = 0
    for k in range(pairs):
        pol = Polarization(1 + k % 3, 0)
        phi, psi = random_potential(rng, pol), random_potential(rng, pol)
        ts = [Fraction(0), Fraction(1, 3), Fraction(2, 3), Fraction(1)]
        es = [energy(combine([(1 - t, phi), (t, psi)]), pol) for t in ts]
        # quadratic q(t) = a + b t + c t^2 through the first three points
        a = es[0]
        c = (es[2] - 2 * es[1] + es[0]) * Fraction(9, 2)
        b = (es[1] - a) * 3 - c / 3
        mu = monge_ampere(phi, pol)
        if a + b + c != es[3] or b != pairing(psi, mu) - pairing(phi, mu):
            bad += 1
    return bad == 0, f"{pairs - bad}/{pairs} segments exactly quadratic with derivative = pairing against MA"


def criterion_calabi_yau(seed: int = 0, measures: int = 100):
    rng = random.Random(seed)
    bad = 0
    ratio = Fraction(0)
    for k in range(measures):
        pol = Polarization(1 + k % 3, 0)
        mu = random_measure(rng)
        if monge_ampere(solve_ma(mu, pol), pol) != mu:
            bad += 1
        # informational: observed energy/entropy constant
        ratio = max(ratio, dual_energy(mu, pol) / entropy(mu))
    pol = Polarization(1, 0)
    duals_ok = dual_energy(dirac(TRIVIAL), pol) == 0 and all(
        dual_energy(dirac(branch("0", c)), pol) == c / 2 for c in (Fraction(1, 3), Fraction(1), Fraction(7, 2))
    )
    return bad == 0 and duals_ok, f"{measures - bad}/{measures} inversions exact; dual energies {'exact' if duals_ok else 'WRONG'}; max e/H = {float(ratio):.3g}"


def criterion_semistability(seed: int = 0, instances: int = 1000):
    rng = random.Random(seed)
    worst, neg = None, 0
    for k in range(instances):
        pol = Polarization(1 + k % 3, 0)
        pool = TORIC_POOL if k % 4 == 0 else POINT_POOL
        data = random_fsdata(rng, pol, points=pool)
        m = mabuchi(fs_profile(data, pol), pol)
        worst = m if worst is None else min(worst, m)
        if m < 0:
            neg += 1
    return neg == 0, f"min M = {worst} over {instances} FS data, {neg} negative"


def criterion_uniform_failure(seed: int = 0):
    pol = Polarization(1, 0)
    rep = stability_report([worked_examples()["PROD"]], pol, names=["PROD"])
    row = rep.rows[0]
    ok = (not row.constant) and row.M == 0 and row.dist > 0 and UNIFORM_FAILS in rep.verdicts
    return ok, f"PROD: M = {row.M}, dist = {row.dist}, verdict '{rep.verdict}'"


def criterion_d1(seed: int = 0, triples: int = 200):
    rng = random.Random(seed)
    bad = []
    for k in range(triples):
        pol = Polarization(1 + k % 2, 0)
        a, b, c = (random_potential(rng, pol) for _ in range(3))
        ab, ba, bc, ac = d1(a, b, pol), d1(b, a, pol), d1(b, c, pol), d1(a, c, pol)
        shift = Fraction(rng.randint(-6, 6), rng.randint(1, 4))
        if ab != ba:
            bad.append("symmetry")
        if ac > ab + bc:
            bad.append("triangle")
        if d1(a, a, pol) != 0 or (ab == 0) != (a == b):
            bad.append("identity")
        if d1(a.plus(shift), b.plus(shift), pol) != ab:
            bad.append("translation")
    pol = Polarization(1, 0)
    prod = fs_profile(worked_examples()["PROD"], pol)
    if d1(prod, PLPotential.constant(0), pol) != Fraction(1, 2):
        bad.append("d1(PROD,0)")
    return not bad, f"{triples} triples exact" if not bad else f"{len(bad)} failures: {sorted(set(bad))}"


def criterion_scaling(seed: int = 0, potentials: int = 100):
    rng = random.Random(seed)
    bad = 0
    for k in range(potentials):
        pol = Polarization(1 + k % 3, 0)
        phi = random_potential(rng, pol)
        a = Fraction(rng.randint(1, 12), rng.randint(1, 5))
        scaled = phi.rescaled(a)
        if (
            energy(scaled, pol) != a * energy(phi, pol)
            or entropy(monge_ampere(scaled, pol)) != a * entropy(monge_ampere(phi, pol))
            or mabuchi(scaled, pol) != a * mabuchi(phi, pol)
        ):
            bad += 1
    return bad == 0, f"{potentials - bad}/{potentials} potentials exactly homogeneous"


CRITERIA: dict[int, tuple[str, Callable]] = {
    1: ("radial isometry", criterion_isometry),
    2: ("metric axioms", criterion_metric_axioms),
    3: ("Busemann convexity", criterion_busemann),
    4: ("worked examples on (P^1, O(1))", criterion_worked_examples),
    5: ("Euler-Lagrange exactness", criterion_euler_lagrange),
    6: ("Calabi-Yau inversion", criterion_calabi_yau),
    7: ("K-semistability of P^1", criterion_semistability),
    8: ("uniform stability failure", criterion_uniform_failure),
    9: ("d1 contract", criterion_d1),
    10: ("scaling homogeneity", criterion_scaling),
}


def run_criterion(number: int, seed: int = 0, **kwargs) -> CriterionResult:
    title, fn = CRITERIA[number]
    start = time.perf_counter()
    try:
        passed, detail = fn(seed=seed, **kwargs)
    except Exception as exc:  # a crash is a failure, reported as such
        passed, detail = False, f"raised {type(exc).__name__}: {exc}"
    return CriterionResult(number, title, passed, detail, time.perf_counter() - start)


def run_all(seed: int = 0) -> list[CriterionResult]:
    return [run_criterion(k, seed) for k in CRITERIA]
