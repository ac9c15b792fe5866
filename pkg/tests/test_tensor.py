"""Partial traces, embeddings, and the numerical range inclusion test."""

import numpy as np
import pytest

from ptrace_lab import (
    RandomSpec,
    TensorSpace,
    check_ptrace_traces,
    embed_factor,
    embed_on_factors,
    flip_operator,
    generate,
    kronecker_sum,
    omega_vector,
    partial_trace,
    permute_factors,
    range_inclusion_check,
    support_values,
)
from conftest import loop_flip, loop_partial_traces


def _rand(seed, d):
    return generate(RandomSpec(seed=seed, kind="ginibre", shape=(d, d)))


def test_space_validation():
    with pytest.raises(ValueError):
        TensorSpace(())
    with pytest.raises(ValueError):
        TensorSpace((2, 0))
    sp = TensorSpace((2, 3))
    assert sp.total_dim == 6 and sp.n_factors == 2
    with pytest.raises(ValueError):
        sp.check_matrix(np.eye(5))
    with pytest.raises(ValueError):
        sp.check_factor(3)


def test_partial_trace_of_kron_products():
    for seed in range(10):
        a = _rand(seed, 2)
        b = _rand(seed + 100, 3)
        m = np.kron(a, b)
        sp = TensorSpace((2, 3))
        assert np.allclose(partial_trace(m, sp, out=2), np.trace(b) * a, atol=1e-12)
        assert np.allclose(partial_trace(m, sp, out=1), np.trace(a) * b, atol=1e-12)


def test_partial_trace_matches_loop_oracle():
    for seed in range(10):
        for d_a, d_b in ((2, 2), (2, 3), (3, 2), (3, 3)):
            m = _rand(seed, d_a * d_b)
            sp = TensorSpace((d_a, d_b))
            want_a, want_b = loop_partial_traces(m, d_a, d_b)
            assert np.allclose(partial_trace(m, sp, out=2), want_a, atol=1e-13)
            assert np.allclose(partial_trace(m, sp, out=1), want_b, atol=1e-13)


def test_partial_trace_three_factors():
    a, b, c = _rand(1, 2), _rand(2, 2), _rand(3, 3)
    m = np.kron(np.kron(a, b), c)
    sp = TensorSpace((2, 2, 3))
    onto_2 = partial_trace(m, sp, out=(1, 3))
    assert np.allclose(onto_2, np.trace(a) * np.trace(c) * b, atol=1e-12)
    # iterated single traces equal the joint trace
    step = partial_trace(m, sp, out=3)
    step = partial_trace(step, TensorSpace((2, 2)), out=1)
    assert np.allclose(step, onto_2, atol=1e-12)
    full = partial_trace(m, sp, out=(1, 2, 3))
    assert full.shape == (1, 1)
    assert np.isclose(full[0, 0], np.trace(m))


def test_trace_preservation_random():
    for seed in range(20):
        m = _rand(seed, 12)
        sp = TensorSpace((2, 2, 3))
        for i in (1, 2, 3):
            pt = partial_trace(m, sp, out=i)
            assert abs(np.trace(pt) - np.trace(m)) < 1e-12
        assert check_ptrace_traces(m, sp)


def test_embed_factor_and_partial_trace_cancel():
    sp = TensorSpace((3, 2))
    c = _rand(5, 3)
    big = embed_factor(c, sp, 1)
    assert np.allclose(big, np.kron(c, np.eye(2)), atol=0)
    # tracing the identity factor scales by its dimension
    assert np.allclose(partial_trace(big, sp, out=2), 2.0 * c, atol=1e-13)
    with pytest.raises(ValueError):
        embed_factor(c, sp, 2)


def test_permute_factors_swaps_kron():
    a, b = _rand(3, 2), _rand(4, 3)
    sp = TensorSpace((2, 3))
    swapped = permute_factors(np.kron(a, b), sp, (2, 1))
    assert np.allclose(swapped, np.kron(b, a), atol=0)
    with pytest.raises(ValueError):
        permute_factors(np.kron(a, b), sp, (1, 1))


def test_embed_on_factors_matches_manual_kron():
    sp = TensorSpace((2, 3, 2))
    x = _rand(7, 4)  # acts on factors 1 and 3
    big = embed_on_factors(x, sp, (1, 3))
    # oracle: put x on the outer pair by permuting (1, 3, 2) explicitly
    manual = np.kron(x, np.eye(3))
    manual = permute_factors(manual, TensorSpace((2, 2, 3)), (1, 3, 2))
    assert np.allclose(big, manual, atol=0)
    assert np.allclose(partial_trace(big, sp, out=(1, 3)), np.trace(x) * np.eye(3), atol=1e-12)


def test_kronecker_sum_spectrum():
    # eigenvalues of a Kronecker sum are the sums of factor eigenvalues
    a = generate(RandomSpec(seed=1, kind="hermitian", shape=(2, 2)))
    b = generate(RandomSpec(seed=2, kind="hermitian", shape=(3, 3)))
    sp = TensorSpace((2, 3))
    total = kronecker_sum([a, b], sp)
    want = np.sort(np.add.outer(np.linalg.eigvalsh(a), np.linalg.eigvalsh(b)).ravel())
    assert np.allclose(np.linalg.eigvalsh(total), want, atol=1e-12)
    with pytest.raises(ValueError):
        kronecker_sum([a], sp)


def test_omega_and_flip():
    for d in (2, 3):
        omega = omega_vector(d)
        assert np.isclose(np.vdot(omega, omega).real, d)
        f = flip_operator(d)
        assert np.array_equal(f, loop_flip(d))
        assert np.allclose(f @ f, np.eye(d * d), atol=0)
        u, v = _rand(11, d)[:, 0], _rand(12, d)[:, 0]
        assert np.allclose(f @ np.kron(u, v), np.kron(v, u), atol=1e-14)
        # flip leaves omega fixed
        assert np.allclose(f @ omega, omega, atol=0)


def test_support_values_against_direct_eigs():
    m = _rand(9, 4)
    vals = support_values(m, 8)
    for t in range(8):
        theta = 2.0 * np.pi * t / 8
        h = (np.exp(-1j * theta) * m + np.exp(1j * theta) * m.conj().T) / 2.0
        assert np.isclose(vals[t], np.linalg.eigvalsh(h)[-1], atol=1e-12)


def test_range_inclusion_for_partial_traces():
    for seed in range(30):
        for d_a, d_b in ((2, 2), (2, 3), (3, 3)):
            m = _rand(seed, d_a * d_b)
            sp = TensorSpace((d_a, d_b))
            rep = range_inclusion_check(partial_trace(m, sp, out=2), m, float(d_b))
            assert rep.verdict, rep.to_dict()
            rep = range_inclusion_check(partial_trace(m, sp, out=1), m, float(d_a))
            assert rep.verdict, rep.to_dict()


def test_range_inclusion_negative_control():
    m = _rand(0, 6)
    sp = TensorSpace((2, 3))
    a = partial_trace(m, sp, out=2)
    # scaled far past the certified factor the inclusion must break
    rep = range_inclusion_check(10.0 * a, m, 3.0)
    assert not rep.verdict
    assert rep.constants["scale"] == 3.0
    with pytest.raises(ValueError):
        range_inclusion_check(a, m, 0.0)
    with pytest.raises(ValueError):
        range_inclusion_check(a, m, 3.0, angles=2)
