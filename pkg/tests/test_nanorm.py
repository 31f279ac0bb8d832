import itertools
from fractions import Fraction as F

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from berkstab.basis import Basis, SingularBasisError
from berkstab.nanorm import NANorm, filtration_subspace, is_adapted, na_codiagonalize, na_distance, na_embed, na_eval
from berkstab.sampling import random_na_norm
from berkstab.symnorm import lp, topk

from oracles import pair_multiset, subspace_dim

I2 = Basis.identity(2)
SHEAR = Basis([[1, 1], [0, 1]])  # columns (1,0), (1,1)


def test_embed_examples():
    triv = na_embed(I2, [0, 0])
    assert na_eval(triv, [3, -1]) == 0
    chi = na_embed(I2, [1, 0])
    assert na_eval(chi, [1, 0]) == 1 and na_eval(chi, [0, 1]) == 0
    chi = na_embed(SHEAR, [1, 0])
    for a, b in [(1, 0), (-2, 0), (1, 1), (0, 3), (5, -2)]:
        assert na_eval(chi, [a, b]) == (1 if b == 0 else 0)
    with pytest.raises(SingularBasisError):
        na_embed([[1, 2], [2, 4]], [0, 0])


def test_eval_examples_and_errors():
    chi = na_embed(I2, [1, 0])
    assert na_eval(chi, [1, 1]) == 0
    assert na_eval(chi, [1, 0]) == 1
    with pytest.raises(ValueError):
        na_eval(chi, [0, 0])


def test_float_eval_threshold():
    chi = na_embed(Basis(np.eye(2)), [1, 0])
    assert na_eval(chi, [1.0, 1e-14]) == 1
    assert na_eval(chi, [1.0, 1e-6]) == 0


def test_filtration_examples():
    chi = na_embed(I2, [1, 0])
    assert subspace_dim(filtration_subspace(chi, -5)) == 2
    assert subspace_dim(filtration_subspace(chi, 0)) == 2
    assert filtration_subspace(chi, 2) == []
    sub = filtration_subspace(chi, F(1, 2))
    assert sub == [[1, 0]]


def test_filtration_dimension_is_left_continuous_step():
    chi = na_embed(Basis([[1, 2, 0], [0, 1, 1], [1, 0, 1]]), [2, F(1, 2), F(1, 2)])
    dims = {t: subspace_dim(filtration_subspace(chi, t)) for t in [F(-1), F(1, 2), F(1), F(2), F(3)]}
    assert dims == {F(-1): 3, F(1, 2): 3, F(1): 1, F(2): 1, F(3): 0}


def test_codiagonalize_examples():
    chi = na_embed(I2, [1, 0])
    ap = na_codiagonalize(chi, chi)
    assert list(ap.mu) == list(ap.mu_prime)
    ap = na_codiagonalize(chi, na_embed(I2, [0, 1]))
    assert ap.basis == I2 or sorted(ap.pairs) == sorted([(F(1), F(0)), (F(0), F(1))])
    ap = na_codiagonalize(chi, na_embed(SHEAR, [1, 0]))
    assert ap.pairs == [(F(1), F(1)), (F(0), F(0))]
    assert na_distance(lp(1, 2), chi, na_embed(SHEAR, [1, 0])) == 0


def test_codiagonalize_diagonal_inputs_keep_identity():
    chi, chi2 = na_embed(I2, [2, 1]), na_embed(I2, [0, 5])
    ap = na_codiagonalize(chi, chi2)
    assert ap.basis == I2
    assert ap.pairs == [(F(2), F(0)), (F(1), F(5))]


def test_distance_examples():
    chi, chi2 = na_embed(I2, [1, 0]), na_embed(I2, [0, 1])
    d = na_distance(lp(1, 2), chi, chi2)
    assert d == 2 and isinstance(d, F)
    assert na_distance(lp(1, 2), chi, chi) == 0
    assert na_distance(lp("inf", 2), chi, chi2) == 1
    assert na_distance(lp(2, 2), chi, chi2) == pytest.approx(2**0.5)


def _random_vector(rng, n):
    while True:
        v = [int(x) for x in rng.integers(-3, 4, n)]
        if any(v):
            return v


def test_apartment_diagonalizes_both_and_matches_oracle_multiset():
    rng = np.random.default_rng(0)
    for n in (2, 3, 4):
        for _ in range(8):
            chi, chi2 = random_na_norm(rng, n), random_na_norm(rng, n)
            ap = na_codiagonalize(chi, chi2)
            assert is_adapted(ap.basis, ap.mu, chi)
            assert is_adapted(ap.basis, ap.mu_prime, chi2)
            assert ap.pairs == pair_multiset(chi, chi2)
            # the min rule holds in the new basis for both norms
            for _ in range(5):
                v = _random_vector(rng, n)
                a = np.linalg.solve(ap.basis.matrix.real, np.array(v, dtype=float))
                support = [i for i in range(n) if abs(a[i]) > 1e-9]
                assert na_eval(chi, v) == min(ap.mu[i] for i in support)
                assert na_eval(chi2, v) == min(ap.mu_prime[i] for i in support)


def test_float_and_exact_engines_agree():
    rng = np.random.default_rng(1)
    for _ in range(10):
        chi, chi2 = random_na_norm(rng, 3), random_na_norm(rng, 3)
        fchi = NANorm(Basis(chi.basis.matrix), chi.values)
        fchi2 = NANorm(Basis(chi2.basis.matrix), chi2.values)
        assert na_codiagonalize(fchi, fchi2).pairs == na_codiagonalize(chi, chi2).pairs
        assert is_adapted(Basis(chi.basis.matrix), chi.values, fchi)


def test_well_defined_under_shuffles():
    rng = np.random.default_rng(2)
    chi, chi2 = random_na_norm(rng, 4), random_na_norm(rng, 4)
    ref = na_codiagonalize(chi, chi2).pairs
    for perm in itertools.islice(itertools.permutations(range(4)), 6):
        p1 = NANorm(chi.basis.permuted(perm), [chi.values[i] for i in perm])
        p2 = NANorm(chi2.basis.permuted(perm[::-1]), [chi2.values[i] for i in perm[::-1]])
        assert na_codiagonalize(p1, p2).pairs == ref


def test_scaling_equivariance():
    rng = np.random.default_rng(3)
    for _ in range(10):
        chi, chi2 = random_na_norm(rng, 3), random_na_norm(rng, 3)
        c = F(int(rng.integers(1, 9)), int(rng.integers(1, 5)))
        for tau in (lp(1, 3), lp("inf", 3), topk([2, 1], 3)):
            assert na_distance(tau, chi.scaled(c), chi2.scaled(c)) == c * na_distance(tau, chi, chi2)


def test_linf_distance_is_sup_of_value_differences():
    rng = np.random.default_rng(4)
    for _ in range(10):
        chi, chi2 = random_na_norm(rng, 3), random_na_norm(rng, 3)
        d = na_distance(lp("inf", 3), chi, chi2)
        for _ in range(30):
            v = _random_vector(rng, 3)
            assert abs(na_eval(chi, v) - na_eval(chi2, v)) <= d


def test_from_flag():
    chi = NANorm.from_flag([(2, [[1, 1, 0]]), (0, [[0, 1, 0], [1, 1, 0]]), (-1, [[0, 0, 1]])])
    assert chi.jumps == (2, 0, -1)
    assert na_eval(chi, [1, 1, 0]) == 2
    assert na_eval(chi, [1, 0, 0]) == 0
    assert na_eval(chi, [0, 0, 1]) == -1
    with pytest.raises(ValueError):
        NANorm.from_flag([(0, [[1, 0, 0]])])


def test_json_round_trip():
    chi = na_embed(SHEAR, [F(1, 2), -3])
    back = NANorm.from_json(chi.to_json())
    assert back.basis == chi.basis and back.values == chi.values
    assert chi.to_json()["values"] == ["1/2", "-3"]


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_exact_metric_axioms(seed):
    rng = np.random.default_rng(seed)
    n = int(rng.integers(2, 4))
    a, b, c = (random_na_norm(rng, n) for _ in range(3))
    for tau in (lp(1, n), lp("inf", n), topk([3, 1], n)):
        ab, bc, ac = na_distance(tau, a, b), na_distance(tau, b, c), na_distance(tau, a, c)
        assert ab == na_distance(tau, b, a)
        assert ac <= ab + bc
        assert na_distance(tau, a, a) == 0


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_ultrametric(seed):
    rng = np.random.default_rng(seed)
    chi = random_na_norm(rng, 3)
    v, w = _random_vector(rng, 3), _random_vector(rng, 3)
    s = [x + y for x, y in zip(v, w)]
    if any(s):
        assert na_eval(chi, s) >= min(na_eval(chi, v), na_eval(chi, w))
