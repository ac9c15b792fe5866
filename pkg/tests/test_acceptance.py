"""Acceptance battery.

One test per stated criterion, each printing a single pass/fail line. The
counts and tolerances are fixed; loops collect failures instead of stopping
at the first, so the line reflects the whole criterion.
"""

import math

import numpy as np

from ptrace_lab import (
    KappaQuery,
    NormSpec,
    RandomSpec,
    SearchConfig,
    TensorSpace,
    WernerParams,
    WitnessSpec,
    check_audenaert_family,
    check_kron_majorization,
    check_large_rank,
    check_two_copy,
    confirm_violation,
    flanders_similar,
    flip_operator,
    generate,
    idempotent_dilation,
    joint_rank_one_dilation,
    joint_rank_two_dilation,
    adjust_dilation_rank,
    kappa_bruteforce,
    kappa_kyfan,
    kappa_schatten,
    kpositive_choi,
    nilpotent_dilation,
    normal_dilation,
    partial_trace,
    purify,
    range_inclusion_check,
    rank_tol,
    search_two_copy_violation,
    sharp_witness_example,
    singular_values,
    unitary_dilation,
    werner_state,
    witness_matrix,
    witness_value,
)
from ptrace_lab.cli import SWEEP_INEQS, _sweep_cell
from conftest import jordan_battery

BIPARTITE_SHAPES = ((2, 2), (2, 3), (3, 3))


def _verdict(num: int, label: str, failures: list) -> None:
    ok = not failures
    print(f"[{'PASS' if ok else 'FAIL'}] criterion {num:02d}: {label}")
    assert ok, f"criterion {num:02d} [{label}]: {len(failures)} failures, first: {failures[:3]}"


def _ginibre(seed: int, side: int) -> np.ndarray:
    return generate(RandomSpec(seed=seed, kind="ginibre", shape=(side, side)))


def _fixed_rank(seed: int, side: int, rank: int) -> np.ndarray:
    return generate(
        RandomSpec(seed=seed, kind="fixed_rank", shape=(side, side), rank=rank)
    )


def _e11(d: int) -> np.ndarray:
    e = np.zeros((d, d), dtype=complex)
    e[0, 0] = 1.0
    return e


def _equal_trace_pair(seed: int, d: int) -> tuple[np.ndarray, np.ndarray]:
    a = _ginibre(seed, d)
    b = _ginibre(seed + 70001, d)
    return a, b + ((np.trace(a) - np.trace(b)) / d) * np.eye(d)


def test_criterion_01_trace_and_range_inclusion():
    failures = []
    for dims in BIPARTITE_SHAPES:
        sp = TensorSpace(dims)
        side = sp.total_dim
        for seed in range(500):
            m = _ginibre(seed, side)
            full = np.trace(m)
            for i, out in ((1, 2), (2, 1)):
                part = partial_trace(m, sp, out=out)
                if abs(np.trace(part) - full) > 1e-12:
                    failures.append((dims, seed, i, "trace"))
                scale = float(dims[out - 1])
                rep = range_inclusion_check(part, m, scale, angles=360)
                if rep.lhs > 1e-8:  # lhs is the worst support margin
                    failures.append((dims, seed, i, "range", rep.lhs))
    _verdict(1, "trace preservation and numerical-range inclusion", failures)


def test_criterion_02_structured_dilations():
    failures = []
    for seed in range(200):
        d = 2 + seed % 4
        a = _ginibre(seed, d)

        res = normal_dilation(a)
        m = res.m
        if np.linalg.norm(m @ m.conj().T - m.conj().T @ m) > 1e-10:
            failures.append((seed, "normal", "commutator"))
        if np.linalg.norm(partial_trace(m, res.space, out=2) - a) > 1e-8:
            failures.append((seed, "normal", "ptrace"))

        res = unitary_dilation(a)
        m = res.m
        anc = res.space.dims[1]
        s1 = float(singular_values(a)[0])
        if anc != max(2, 2 * math.ceil(s1 / 2.0)):
            failures.append((seed, "unitary", "ancilla", anc, s1))
        if np.linalg.norm(m.conj().T @ m - np.eye(m.shape[0])) > 1e-9:
            failures.append((seed, "unitary", "unitarity"))
        if np.linalg.norm(partial_trace(m, res.space, out=2) - a) > 1e-8:
            failures.append((seed, "unitary", "ptrace"))

        z = a - (np.trace(a) / d) * np.eye(d)
        res = nilpotent_dilation(z)
        m = res.m
        if np.linalg.norm(np.linalg.matrix_power(m, m.shape[0])) > 1e-8:
            failures.append((seed, "nilpotent", "power"))
        if np.linalg.norm(partial_trace(m, res.space, out=2) - z) > 1e-8:
            failures.append((seed, "nilpotent", "ptrace"))

        t = 1 + seed % 3
        w = a - ((np.trace(a) - t) / d) * np.eye(d)
        res = idempotent_dilation(w)
        m = res.m
        if np.linalg.norm(m @ m - m) > 1e-9:
            failures.append((seed, "idempotent", "square"))
        rest = tuple(range(2, res.space.n_factors + 1))
        if np.linalg.norm(partial_trace(m, res.space, out=rest) - w) > 1e-8:
            failures.append((seed, "idempotent", "ptrace"))
    _verdict(2, "structured dilations hit their targets", failures)


def test_criterion_03_flanders_and_rank_one():
    failures = []
    for seed in range(500):
        dims = BIPARTITE_SHAPES[seed % 3]
        sp = TensorSpace(dims)
        m = _fixed_rank(seed, sp.total_dim, 1)
        pa = partial_trace(m, sp, out=2)
        pb = partial_trace(m, sp, out=1)
        res = flanders_similar(pa, pb)
        if not res.similar:
            failures.append((dims, seed, "flanders", res.detail))
    for seed in range(60):
        d = 2 + seed % 4
        r = 1 + (seed // 4) % d
        a = _fixed_rank(seed, d, r)
        res = purify(a, r)
        if rank_tol(res.m) != 1:
            failures.append((seed, "purify-rank"))
        if np.linalg.norm(partial_trace(res.m, res.space, out=2) - a) > 1e-9:
            failures.append((seed, "purify-ptrace"))
        if r >= 2:
            try:
                purify(a, r - 1)
                failures.append((seed, "purify-accepted-too-small"))
            except ValueError:
                pass
    for idx, (spec_a, spec_b) in enumerate(jordan_battery()):
        res = joint_rank_one_dilation(spec_a, spec_b)
        if np.linalg.norm(
            partial_trace(res.m, res.space, out=2) - spec_a.to_matrix()
        ) > 1e-9:
            failures.append((idx, "battery-a"))
        if np.linalg.norm(
            partial_trace(res.m, res.space, out=1) - spec_b.to_matrix()
        ) > 1e-9:
            failures.append((idx, "battery-b"))
    _verdict(3, "rank-one partial traces are Flanders-similar", failures)


def test_criterion_04_rank_two_joint_dilation():
    failures = []
    for seed in range(200):
        d = 2 + seed % 4
        a, b = _equal_trace_pair(seed, d)
        res = joint_rank_two_dilation(a, b)
        if rank_tol(res.m) > 2:
            failures.append((seed, "rank", rank_tol(res.m)))
        if np.linalg.norm(partial_trace(res.m, res.space, out=2) - a) > 1e-8:
            failures.append((seed, "ptrace-a"))
        if np.linalg.norm(partial_trace(res.m, res.space, out=1) - b) > 1e-8:
            failures.append((seed, "ptrace-b"))
    for seed in range(5):
        d = 2 + seed
        a = _ginibre(seed, min(d, 5))
        try:
            joint_rank_two_dilation(a, a + np.eye(min(d, 5)))
            failures.append((seed, "trace-mismatch-accepted"))
        except ValueError:
            pass
    _verdict(4, "equal-trace pairs admit a rank-two joint dilation", failures)


def test_criterion_05_rank_adjustment_ladder():
    failures = []
    sp = TensorSpace((3, 3))
    for case in range(10):
        a, b = _equal_trace_pair(900 + case, 3)
        base = joint_rank_two_dilation(a, b)
        r0 = rank_tol(base.m)
        for target in range(max(2, r0), 10):
            res = adjust_dilation_rank(base.m, sp, target)
            if rank_tol(res.m) != target:
                failures.append((case, target, "rank", rank_tol(res.m)))
            if np.linalg.norm(partial_trace(res.m, sp, out=2) - a) > 1e-10:
                failures.append((case, target, "ptrace-a"))
            if np.linalg.norm(partial_trace(res.m, sp, out=1) - b) > 1e-10:
                failures.append((case, target, "ptrace-b"))
    _verdict(5, "rank adjustment reaches every target rank", failures)


def test_criterion_06_kron_majorization():
    failures = []
    rng = np.random.default_rng(17)
    for case in range(500):
        n = int(rng.integers(2, 4))
        dims = tuple(int(rng.integers(1, 4)) for _ in range(n))
        cs = [_ginibre(9000 + 10 * case + i, d) for i, d in enumerate(dims)]
        rep = check_kron_majorization(cs, TensorSpace(dims))
        if not rep.verdict:
            failures.append((case, dims, rep.lhs))
    _verdict(6, "Kronecker-sum weak submajorization", failures)


def test_criterion_07_kappa_anchors():
    failures = []
    for p in (1.5, 2.0, 3.0, math.inf):
        spec = NormSpec.schatten(p)
        for c in (1.0, 1.25, 1.5, 1.75, 2.0):
            got = kappa_schatten(KappaQuery(spec, c, 2, (3, 3), 9))
            if abs(got - (2.0 - c)) > 1e-9:
                failures.append((p, c, got))
        for c in (2.0, 2.5, 4.0):
            if kappa_schatten(KappaQuery(spec, c, 2, (3, 3), 9)) != 0.0:
                failures.append((p, c, "nonzero"))
    # the c = 1 value is exactly 1 for every Schatten exponent
    for p in (1.0, 1.5, 2.0, math.inf):
        got = kappa_schatten(KappaQuery(NormSpec.schatten(p), 1.0, 2, (4, 4), 16))
        if abs(got - 1.0) > 1e-9:
            failures.append((p, "c1", got))
    for d in (2, 3, 4):
        for k in range(1, d + 1):
            got = kappa_kyfan(KappaQuery(NormSpec.kyfan(k), 1.0, 2, (d, d), d * d))
            if got != float(k):
                failures.append((d, k, "collapse", got))
    for d in (2, 3, 4):
        for k in range(1, d + 1):
            for c in (0.0, 0.5, 1.0):
                q = KappaQuery(NormSpec.kyfan(k), c, 2, (d, d), d * d)
                closed = kappa_kyfan(q)
                est = kappa_bruteforce(q, budget=6)
                if abs(est.value - closed) > 1e-5:
                    failures.append((d, k, c, closed, est.value))
    _verdict(7, "template constant anchors, collapse, and brute force", failures)


def test_criterion_08_checker_sweeps_and_tight_cases():
    failures = []
    shapes = ((2, 2), (2, 3), (3, 3), (2, 2, 2))
    checked = 0
    for ineq in SWEEP_INEQS:
        for dims in shapes:
            for seed in range(500):
                for line in _sweep_cell((ineq, dims, seed)):
                    checked += 1
                    if not line["verdict"]:
                        failures.append((ineq, dims, seed, line["name"], line["slack"]))
    if checked < 10000:
        failures.append(("coverage", checked))

    for n, r in ((2, 2), (2, 3), (3, 2)):
        dims = (2,) * (n - 1) + (r,)
        m = np.eye(1, dtype=complex)
        for _ in range(n - 1):
            m = np.kron(m, _e11(2))
        m = np.kron(m, np.eye(r))
        _, powered = check_audenaert_family(m, TensorSpace(dims), 2.0, gamma=2.0)
        if abs(powered.slack) > 1e-9 * powered.rhs:
            failures.append(("tight-rank-power", n, r, powered.slack))

    for d, n, p in ((2, 2, 1.0), (2, 2, 2.0), (3, 2, 3.0), (2, 3, math.inf)):
        rep = check_large_rank(np.eye(d**n), TensorSpace((d,) * n), p)
        if abs(rep.slack) > 1e-9 * rep.rhs:
            failures.append(("tight-large-rank", d, n, p, rep.slack))

    m = np.kron(_e11(2), np.eye(2))
    _, powered = check_audenaert_family(m, TensorSpace((2, 2)), 2.0, gamma=2.0)
    if abs(powered.rhs - 6.0) > 1e-9 or abs(powered.slack) > 1e-9 * powered.rhs:
        failures.append(("tight-constant-3", powered.lhs, powered.rhs))
    _verdict(8, "inequality checkers on seeded sweeps with tight cases", failures)


def test_criterion_09_werner_two_copy():
    failures = []
    for d in (2, 3, 4):
        flip = flip_operator(d)
        for alpha in (-1.0, -0.5, 0.0, 0.5, 1.0):
            w = werner_state(WernerParams(d=d, alpha=alpha))
            if float(np.linalg.eigvalsh(w).min()) < -1e-12:
                failures.append((d, alpha, "positivity"))
            if abs(np.trace(w) - 1.0) > 1e-12:
                failures.append((d, alpha, "trace"))
            if np.linalg.norm(flip @ w - w @ flip) > 1e-12:
                failures.append((d, alpha, "flip"))
    for seed in range(10000):
        m = _fixed_rank(seed, 16, 2)
        for alpha in (-1.0 / 3.0, -0.25):
            rep = check_two_copy(m, alpha)
            if rep.slack < -1e-8:
                failures.append((seed, alpha, rep.slack))
    res = search_two_copy_violation(
        4, -1.0 / 3.0, SearchConfig(seed=0, starts=10000, iterations=60)
    )
    if res.objective <= 0.0 or confirm_violation(res.matrix, -1.0 / 3.0):
        failures.append(("search", res.objective))
    _verdict(9, "Werner grid, two-copy bound, and the search", failures)


def test_criterion_10_witness_and_choi():
    failures = []
    for n, d, k in ((2, 3, 1), (2, 3, 2), (3, 2, 1)):
        w = WitnessSpec(d=d, n=n, k=k)
        side = d**n
        for seed in range(1000):
            m = _fixed_rank(seed, side, k)
            if witness_value(w, m) < -1e-8:
                failures.append((n, d, k, seed, witness_value(w, m)))
        sharp = witness_value(w, sharp_witness_example(w))
        if abs(sharp - (-(n - 1) * (k + 1))) > 1e-9:
            failures.append((n, d, k, "sharp", sharp))
    for k in (0, 1):
        w = WitnessSpec(d=2, n=2, k=k)
        resid = float(
            np.max(np.abs(kpositive_choi(TensorSpace((2, 2)), k) - witness_matrix(w)))
        )
        if resid > 1e-10:
            failures.append(("choi", k, resid))
    _verdict(10, "Schmidt witnesses and the Choi identification", failures)
