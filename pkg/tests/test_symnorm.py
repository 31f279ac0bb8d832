import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from berkstab.symnorm import SymmetricNormSpec, lp, sym_check, sym_eval, topk

vec3 = st.lists(st.floats(-1e3, 1e3, allow_nan=False), min_size=3, max_size=3)


def test_examples():
    assert sym_eval(lp(2, 2), [3, 4]) == pytest.approx(5.0, abs=1e-15)
    assert sym_eval(lp(1, 2), [1, -2]) == 3
    assert sym_eval(lp("inf", 3), [1, -2, 0]) == 2


def test_exact_results_for_l1_linf():
    r = sym_eval(lp(1, 2), [Fraction(1, 3), Fraction(-1, 2)])
    assert isinstance(r, Fraction) and r == Fraction(5, 6)
    r = sym_eval(lp("inf", 2), [Fraction(1, 3), Fraction(-1, 2)])
    assert isinstance(r, Fraction) and r == Fraction(1, 2)
    r = sym_eval(topk([2, 1]), [Fraction(1), Fraction(-3)])
    assert r == 7


def test_l2_is_float():
    assert isinstance(sym_eval(lp(2, 2), [1, 1]), float)


def test_dimension_mismatch():
    with pytest.raises(ValueError):
        sym_eval(lp(2, 3), [1, 2])


@pytest.mark.parametrize(
    "kwargs",
    [
        dict(kind="lp", n=2, p=0.5),
        dict(kind="topk", n=2, weights=(Fraction(1), Fraction(2))),
        dict(kind="topk", n=2, weights=(Fraction(0),)),
        dict(kind="topk", n=1, weights=(Fraction(2), Fraction(1))),
        dict(kind="bogus", n=2),
        dict(kind="lp", n=0, p=2),
    ],
)
def test_invalid_specs(kwargs):
    with pytest.raises(ValueError):
        SymmetricNormSpec(**kwargs)


@pytest.mark.parametrize("tau", [lp(2, 4), lp(1, 4), lp("inf", 4), lp(3, 4), topk([2, 1], 4), topk([Fraction(3, 2), 1, Fraction(1, 2)], 4)])
def test_sym_check_builtin(tau):
    rep = sym_check(tau, 1000, seed=3)
    assert rep.samples == 1000
    assert rep.defect <= 1e-12


def test_sym_check_detects_a_non_norm():
    # a weighted l1 with increasing weights is not subadditive on sorted moduli
    bad = object.__new__(SymmetricNormSpec)
    object.__setattr__(bad, "kind", "topk")
    object.__setattr__(bad, "n", 3)
    object.__setattr__(bad, "p", None)
    object.__setattr__(bad, "weights", (Fraction(1), Fraction(5)))
    assert sym_check(bad, 200, seed=0).subadditivity > 0


def test_sym_check_needs_samples():
    with pytest.raises(ValueError):
        sym_check(lp(2, 2), 0)


def test_json_round_trip():
    for tau in [lp(2, 3), lp("inf", 2), lp(1.5, 2), topk([Fraction(3, 2), 1], 3)]:
        assert SymmetricNormSpec.from_json(tau.to_json()) == tau
    assert lp(2, 3).to_json() == {"kind": "lp", "p": 2, "n": 3}


@settings(max_examples=200, deadline=None)
@given(vec3, vec3)
def test_subadditive_and_ordered(x, y):
    for tau in (lp(1, 3), lp(2, 3), lp("inf", 3), topk([3, 2, 1])):
        s = np.add(x, y)
        assert sym_eval(tau, s) <= sym_eval(tau, x) + sym_eval(tau, y) + 1e-12 * (1 + sym_eval(tau, x) + sym_eval(tau, y))
    l1, l2, li = sym_eval(lp(1, 3), x), sym_eval(lp(2, 3), x), sym_eval(lp("inf", 3), x)
    assert l1 + 1e-9 >= l2 >= li - 1e-9


@settings(max_examples=100, deadline=None)
@given(vec3, st.permutations(range(3)))
def test_permutation_invariance(x, perm):
    for tau in (lp(2, 3), topk([2, 1], 3), lp(3, 3)):
        assert math.isclose(sym_eval(tau, [x[i] for i in perm]), sym_eval(tau, x), rel_tol=1e-14, abs_tol=1e-300)
