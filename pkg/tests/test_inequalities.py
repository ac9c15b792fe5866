"""Norms, gauges, majorization, and the partial-trace inequality checkers."""

import math

import numpy as np
import pytest

from ptrace_lab import (
    NormSpec,
    RandomSpec,
    TensorSpace,
    check_audenaert_family,
    check_individual_bound,
    check_kron_majorization,
    check_kyfan_family,
    check_large_rank,
    check_normal_rank_r,
    check_rank_one_gamma,
    check_template,
    dual_gauge,
    generate,
    kyfan_tilde,
    majorization_gap,
    norm,
    singular_values,
    weak_submajorize,
)
from conftest import charpoly_singular_values


def _rand(seed, d, kind="ginibre", rank=None):
    return generate(RandomSpec(seed=seed, kind=kind, shape=(d, d), rank=rank))


def _e11(d):
    e = np.zeros((d, d), dtype=complex)
    e[0, 0] = 1.0
    return e


def test_norm_spec_labels_and_duals():
    assert NormSpec.schatten(2.0).label == "schatten-2"
    assert NormSpec.schatten(math.inf).label == "schatten-inf"
    assert NormSpec.kyfan(3).label == "kyfan-3"
    assert NormSpec.schatten(2.0).dual_exponent == 2.0
    assert NormSpec.schatten(1.0).dual_exponent == math.inf
    assert NormSpec.schatten(math.inf).dual_exponent == 1.0
    with pytest.raises(ValueError):
        NormSpec.schatten(0.5)
    with pytest.raises(ValueError):
        NormSpec.kyfan(0)


def test_norm_against_charpoly_oracle():
    for seed in range(10):
        m = _rand(seed, 4)
        s = charpoly_singular_values(m)
        assert norm(m, NormSpec.schatten(1)) == pytest.approx(s.sum(), rel=1e-6)
        assert norm(m, NormSpec.schatten(2)) == pytest.approx(
            np.sqrt((s**2).sum()), rel=1e-6
        )
        assert norm(m, NormSpec.schatten(3)) == pytest.approx(
            (s**3).sum() ** (1 / 3), rel=1e-6
        )
        assert norm(m, NormSpec.schatten(math.inf)) == pytest.approx(s[0], rel=1e-6)
        for k in (1, 2, 4):
            assert norm(m, NormSpec.kyfan(k)) == pytest.approx(s[:k].sum(), rel=1e-6)


def test_norm_triangle_and_scaling():
    a, b = _rand(1, 4), _rand(2, 4)
    for spec in (NormSpec.schatten(1.5), NormSpec.schatten(2), NormSpec.kyfan(2)):
        assert norm(a + b, spec) <= norm(a, spec) + norm(b, spec) + 1e-12
        assert norm(2.0 * a, spec) == pytest.approx(2.0 * norm(a, spec))


def test_dual_gauge_pairing():
    # |tr(a* b)| <= |||a||| * dual gauge of sigma(b), with equality attained
    # when a and b share singular vectors
    for seed in range(10):
        a, b = _rand(seed, 4), _rand(seed + 50, 4)
        pairing = abs(np.trace(a.conj().T @ b))
        for spec in (
            NormSpec.schatten(1),
            NormSpec.schatten(2),
            NormSpec.schatten(3),
            NormSpec.schatten(math.inf),
            NormSpec.kyfan(1),
            NormSpec.kyfan(3),
        ):
            bound = norm(a, spec) * dual_gauge(singular_values(b), spec)
            assert pairing <= bound + 1e-10


def test_dual_gauge_closed_values_and_equality():
    s = np.array([3.0, 2.0, 1.0])
    assert dual_gauge(s, NormSpec.schatten(1)) == pytest.approx(3.0)
    assert dual_gauge(s, NormSpec.schatten(math.inf)) == pytest.approx(6.0)
    assert dual_gauge(s, NormSpec.schatten(2)) == pytest.approx(math.sqrt(14.0))
    assert dual_gauge(s, NormSpec.kyfan(2)) == pytest.approx(3.0)
    assert dual_gauge(s, NormSpec.kyfan(1)) == pytest.approx(6.0)
    # proportional spectra with shared vectors saturate the pairing bound
    a = _rand(3, 4)
    b = 0.5 * a
    pairing = abs(np.trace(a.conj().T @ b))
    spec = NormSpec.schatten(2)
    assert pairing == pytest.approx(norm(a, spec) * dual_gauge(singular_values(b), spec))
    with pytest.raises(ValueError):
        dual_gauge(np.array([-1.0, 0.0]), spec)


def test_weak_submajorization():
    assert weak_submajorize([2.0, 2.0], [3.0, 1.0])
    assert not weak_submajorize([3.0, 1.0], [2.0, 2.0])
    assert weak_submajorize([1.0, 1.0], [1.0, 1.0])
    # different lengths are zero padded
    assert weak_submajorize([1.0], [2.0, 0.5])
    assert majorization_gap([2.0, 2.0], [3.0, 1.0]) <= 0.0
    assert majorization_gap([3.0, 1.0], [2.0, 2.0]) == pytest.approx(1.0)


def test_kron_majorization_random_and_tight():
    for seed in range(20):
        for dims in ((2, 2), (2, 3), (2, 2, 2)):
            sp = TensorSpace(dims)
            cs = [_rand(seed * 10 + i, d) for i, d in enumerate(dims)]
            rep = check_kron_majorization(cs, sp)
            assert rep.verdict, rep.to_dict()
            assert rep.name == "kron-majorization"
    # nonnegative diagonal blocks make the kron sum diagonal: equality
    cs = [np.diag([2.0, 1.0]), np.diag([3.0, 0.5])]
    rep = check_kron_majorization(cs, TensorSpace((2, 2)))
    assert abs(rep.lhs) < 1e-12


def test_individual_bound_random_and_constants():
    sp = TensorSpace((2, 3))
    for seed in range(20):
        m = _rand(seed, 6)
        r1, r2 = check_individual_bound(m, sp, NormSpec.schatten(2))
        assert r1.verdict and r2.verdict
        assert r1.constants["nu"] == pytest.approx(math.sqrt(r1.constants["r"]))
        k1, k2 = check_individual_bound(m, sp, NormSpec.kyfan(2))
        assert k1.verdict and k2.verdict
        assert k1.constants["nu"] == pytest.approx(max(1.0, k1.constants["r"] / 2.0))
    with pytest.raises(ValueError):
        check_individual_bound(_rand(0, 8), TensorSpace((2, 2, 2)), NormSpec.schatten(2))


def test_template_with_closed_kappas():
    # n = 2: kappa(1) = 1 for any Schatten p
    for seed in range(10):
        m = _rand(seed, 6)
        sp = TensorSpace((2, 3))
        for p in (1.0, 2.0, math.inf):
            rep = check_template(m, sp, NormSpec.schatten(p), 1.0, 1.0)
            assert rep.verdict, rep.to_dict()
    # Ky Fan with the kappa-tilde constant, n = 3
    sp3 = TensorSpace((2, 2, 2))
    for seed in range(10):
        m = _rand(seed + 100, 8)
        kt = float(kyfan_tilde(3, 2, 1))
        rep = check_template(m, sp3, NormSpec.kyfan(1), 1.0, kt)
        assert rep.verdict, rep.to_dict()
    with pytest.raises(ValueError):
        check_template(_rand(0, 4), TensorSpace((2, 2)), NormSpec.schatten(2), -0.5, 1.0)


def test_kyfan_tilde_values():
    # n = 2 collapses to k
    for d in range(2, 6):
        for k in range(1, d + 1):
            assert kyfan_tilde(2, d, k) == k
    # n d^{n-1} - (d^n - (d-k)^n)/k, exercised at n = 3
    assert kyfan_tilde(3, 2, 1) == 3 * 4 - (8 - 1)
    assert kyfan_tilde(3, 3, 2) == 3 * 9 - (27 - 1) // 2
    assert kyfan_tilde(3, 2, 2) == (3 - 1) * 2 ** (3 - 1)  # k = d branch


def test_kyfan_family_variants():
    sp = TensorSpace((3, 3))
    for seed in range(15):
        m = _rand(seed, 9)
        for k in (1, 2, 3):
            assert check_kyfan_family(m, sp, k, variant="general").verdict
        assert check_kyfan_family(m, sp, 2, variant="n2").verdict
        low = _rand(seed, 9, kind="fixed_rank", rank=1)
        rep = check_kyfan_family(low, sp, 1, variant="lowrank", c=0.5)
        assert rep.verdict
    with pytest.raises(ValueError):
        check_kyfan_family(_rand(0, 6), TensorSpace((2, 3)), 1)
    with pytest.raises(ValueError):
        check_kyfan_family(_rand(0, 9), sp, 1, variant="lowrank")  # full rank


def test_audenaert_family_random():
    for seed in range(15):
        for dims in ((2, 2), (2, 3), (2, 2, 2)):
            sp = TensorSpace(dims)
            m = _rand(seed, sp.total_dim)
            for p in (1.5, 2.0, math.inf):
                plain, powered = check_audenaert_family(m, sp, p, gamma=2.0)
                assert plain.verdict, plain.to_dict()
                assert powered.verdict, powered.to_dict()
    with pytest.raises(ValueError):
        check_audenaert_family(_rand(0, 4), TensorSpace((2, 2)), 2.0, gamma=0.5)


def test_audenaert_rank_power_tight():
    # e11 x identity(r): the rank-weighted bound at p = gamma = 2 is exact
    for r in (2, 3):
        m = np.kron(_e11(2), np.eye(r))
        sp = TensorSpace((2, r))
        _, powered = check_audenaert_family(m, sp, 2.0, gamma=2.0)
        assert abs(powered.slack) <= 1e-9 * powered.rhs


def test_large_rank_random_and_tight():
    for seed in range(15):
        for d, n in ((2, 2), (3, 2), (2, 3)):
            sp = TensorSpace((d,) * n)
            m = _rand(seed, sp.total_dim)
            for p in (2.0, math.inf):
                assert check_large_rank(m, sp, p).verdict
    # the identity saturates the bound at every p
    for d, n, p in ((2, 2, 2.0), (3, 2, 3.0), (2, 3, math.inf)):
        sp = TensorSpace((d,) * n)
        rep = check_large_rank(np.eye(d**n), sp, p)
        assert abs(rep.slack) <= 1e-9 * rep.rhs
    with pytest.raises(ValueError):
        check_large_rank(_rand(0, 6), TensorSpace((2, 3)), 2.0)


def test_rank_one_gamma():
    sp = TensorSpace((2, 3))
    for seed in range(15):
        m = _rand(seed, 6, kind="fixed_rank", rank=1)
        for gamma in (2.0, 3.0):
            assert check_rank_one_gamma(m, sp, gamma).verdict
    with pytest.raises(ValueError):
        check_rank_one_gamma(_rand(0, 6, kind="fixed_rank", rank=1), sp, 1.5)
    with pytest.raises(ValueError):
        check_rank_one_gamma(_rand(0, 6), sp, 2.0)


def test_normal_rank_r():
    sp = TensorSpace((2, 2))
    for seed in range(15):
        m = _rand(seed, 4, kind="normal")
        rep = check_normal_rank_r(m, sp)
        assert rep.verdict, rep.to_dict()
    with pytest.raises(ValueError):
        check_normal_rank_r(_rand(0, 4), sp)
