"""Werner-state undistillability checks and Schmidt-number witnesses.

Everything here reduces to partial-trace norm identities: the two-copy
inequality bounds Frobenius norms of the two partial traces, the witness
value is a weighted difference of such norms, and the matching positive map
is recovered through its Choi matrix.
"""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .core import as_matrix, default_tolerance, rank_tol
from .reports import InequalityReport
from .tensor import (
    TensorSpace,
    embed_on_factors,
    flip_operator,
    omega_vector,
    partial_trace,
    permute_factors,
)


@dataclass(frozen=True)
class WernerParams:
    d: int
    alpha: float

    def __post_init__(self) -> None:
        if int(self.d) < 2:
            raise ValueError("local dimension must be at least 2")
        if not -1.0 <= float(self.alpha) <= 1.0:
            raise ValueError("alpha must lie in [-1, 1]")
        object.__setattr__(self, "d", int(self.d))
        object.__setattr__(self, "alpha", float(self.alpha))


@dataclass(frozen=True)
class WitnessSpec:
    d: int
    n: int
    k: int

    def __post_init__(self) -> None:
        d, n, k = int(self.d), int(self.n), int(self.k)
        if d < 2 or n < 1:
            raise ValueError("need local dimension >= 2 and at least one factor")
        if not 0 <= k < d:
            raise ValueError(f"threshold k must satisfy 0 <= k < d, got {k}")
        object.__setattr__(self, "d", d)
        object.__setattr__(self, "n", n)
        object.__setattr__(self, "k", k)


@dataclass(frozen=True)
class SearchConfig:
    seed: int = 0
    starts: int = 100
    iterations: int = 60
    step_init: float = 0.25
    step_grow: float = 1.3
    step_shrink: float = 0.5
    objective: str = "two_copy_slack"

    def __post_init__(self) -> None:
        if self.starts < 1 or self.iterations < 1:
            raise ValueError("starts and iterations must be positive")
        if self.objective != "two_copy_slack":
            raise ValueError(f"unknown objective {self.objective!r}")
        if self.step_init <= 0 or self.step_grow <= 1.0 or not 0 < self.step_shrink < 1:
            raise ValueError("invalid step schedule")


@dataclass
class SearchResult:
    report: InequalityReport
    matrix: np.ndarray
    objective: float
    start_index: int
    evaluations: int = 0


def werner_state(p: WernerParams) -> np.ndarray:
    """The flip-invariant state (1 + alpha F) / (d^2 + alpha d)."""
    d = p.d
    return (np.eye(d * d, dtype=complex) + p.alpha * flip_operator(d)) / (
        d * d + p.alpha * d
    )


def _keep_factor(m: np.ndarray, space: TensorSpace, i: int) -> np.ndarray:
    others = tuple(j for j in range(1, space.n_factors + 1) if j != i)
    return partial_trace(m, space, out=others)


def check_two_copy(m, alpha: float, tol: float | None = None) -> InequalityReport:
    """The rank-2 undistillability bound at Werner parameter alpha < 0:
    ||M_A||_2^2 + ||M_B||_2^2 <= |alpha| |tr M|^2 + ||M||_2^2 / |alpha|."""
    if not alpha < 0.0:
        raise ValueError("the two-copy bound is stated for alpha < 0")
    a = as_matrix(m, square=True)
    side = a.shape[0]
    d = math.isqrt(side)
    if d * d != side:
        raise ValueError(f"matrix side {side} is not a square, no d x d split")
    space = TensorSpace((d, d))
    abs_a = abs(alpha)
    pa = float(np.linalg.norm(partial_trace(a, space, out=2)))
    pb = float(np.linalg.norm(partial_trace(a, space, out=1)))
    fro = float(np.linalg.norm(a))
    tr = abs(np.trace(a))
    lhs = pa * pa + pb * pb
    rhs = abs_a * tr * tr + fro * fro / abs_a
    return InequalityReport.from_bound(
        name="two-copy-undistillability",
        lhs=lhs,
        rhs=rhs,
        tolerance=tol,
        constants={"alpha": alpha, "d": d, "rank": rank_tol(a)},
    )


# ---------------------------------------------------------------------------
# counterexample search over rank <= 2 parametrizations
#
# M = vec(X1) vec(X2)* + vec(Y1) vec(Y2)* keeps the iterates exactly at rank
# <= 2; the objective slack / ||M||_2^2 is scale invariant, so descent cannot
# cheat by shrinking M.


def _h(x: np.ndarray) -> np.ndarray:
    return np.swapaxes(x.conj(), -1, -2)


def _dot(x: np.ndarray, y: np.ndarray) -> np.ndarray:
    # batched tr(x^* y)
    return np.einsum("...ij,...ij->...", x.conj(), y)


def _two_copy_state(x1, x2, y1, y2, abs_a):
    """Batched slack, norm-square, and Wirtinger gradients of both."""
    a_mat = x1 @ _h(x2) + y1 @ _h(y2)
    bt = _h(x2) @ x1 + _h(y2) @ y1
    tau = _dot(x2, x1) + _dot(y2, y1)
    nx1 = _dot(x1, x1).real
    nx2 = _dot(x2, x2).real
    ny1 = _dot(y1, y1).real
    ny2 = _dot(y2, y2).real
    ip_x1y1 = _dot(x1, y1)
    ip_y2x2 = _dot(y2, x2)
    s2 = nx1 * nx2 + ny1 * ny2 + 2.0 * (ip_x1y1 * ip_y2x2).real
    lhs = _dot(a_mat, a_mat).real + _dot(bt, bt).real
    slack = abs_a * np.abs(tau) ** 2 + s2 / abs_a - lhs

    def col(v):
        return v[..., None, None]

    gs2_x1 = col(nx2) * x1 + col(ip_y2x2) * y1
    gs2_y1 = col(ny2) * y1 + col(ip_y2x2.conj()) * x1
    gs2_x2 = col(nx1) * x2 + col(ip_x1y1.conj()) * y2
    gs2_y2 = col(ny1) * y2 + col(ip_x1y1) * x2
    gsl_x1 = abs_a * col(tau) * x2 + gs2_x1 / abs_a - a_mat @ x2 - x2 @ bt
    gsl_y1 = abs_a * col(tau) * y2 + gs2_y1 / abs_a - a_mat @ y2 - y2 @ bt
    gsl_x2 = abs_a * col(tau.conj()) * x1 + gs2_x2 / abs_a - _h(a_mat) @ x1 - x1 @ _h(bt)
    gsl_y2 = abs_a * col(tau.conj()) * y1 + gs2_y2 / abs_a - _h(a_mat) @ y1 - y1 @ _h(bt)
    return slack, s2, (gsl_x1, gsl_x2, gsl_y1, gsl_y2), (gs2_x1, gs2_x2, gs2_y1, gs2_y2)


def _assemble_rank_two(x1, x2, y1, y2) -> np.ndarray:
    m = np.outer(x1.reshape(-1), x2.reshape(-1).conj())
    m += np.outer(y1.reshape(-1), y2.reshape(-1).conj())
    return m


def _objective_batch(x1, x2, y1, y2, abs_a):
    slack, s2, gsl, gs2 = _two_copy_state(x1, x2, y1, y2, abs_a)
    s2 = np.maximum(s2, 1e-300)
    g = slack / s2
    grads = tuple(
        (a - g[..., None, None] * b) / s2[..., None, None] for a, b in zip(gsl, gs2)
    )
    return g, grads


def _search_chunk(args) -> tuple[float, tuple, int, int]:
    d, alpha, cfg, lo, hi = args
    abs_a = abs(alpha)
    count = hi - lo
    shape = (count, d, d)
    mats = []
    for name_idx in range(4):
        mats.append(np.empty(shape, dtype=complex))
    for idx in range(count):
        rng = np.random.default_rng([cfg.seed, lo + idx])
        for slot in range(4):
            g = rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))
            mats[slot][idx] = g / math.sqrt(2.0 * d)
    x1, x2, y1, y2 = mats
    g, _ = _objective_batch(x1, x2, y1, y2, abs_a)
    step = np.full(count, cfg.step_init)
    evals = 1
    for _ in range(cfg.iterations):
        _, grads = _objective_batch(x1, x2, y1, y2, abs_a)
        s = step[:, None, None]
        cand = [p - s * gr for p, gr in zip((x1, x2, y1, y2), grads)]
        g_new, _ = _objective_batch(*cand, abs_a)
        evals += 2
        better = g_new < g - 1e-15
        mask = better[:, None, None]
        x1 = np.where(mask, cand[0], x1)
        x2 = np.where(mask, cand[1], x2)
        y1 = np.where(mask, cand[2], y1)
        y2 = np.where(mask, cand[3], y2)
        g = np.where(better, g_new, g)
        step = np.where(better, step * cfg.step_grow, step * cfg.step_shrink)
        if float(step.max()) < 1e-13:
            break
    best = int(np.argmin(g))
    factors = (x1[best], x2[best], y1[best], y2[best])
    return float(g[best]), factors, lo + best, evals


def search_two_copy_violation(
    d: int, alpha: float, cfg: SearchConfig | None = None, jobs: int = 1
) -> SearchResult:
    """Multi-start descent on the scaled two-copy slack over rank <= 2
    iterates. Returns the worst case found; a non-negative objective is
    evidence, never proof, that no violation exists."""
    if not -1.0 <= alpha < 0.0:
        raise ValueError("alpha must lie in [-1, 0)")
    if int(d) < 2:
        raise ValueError("local dimension must be at least 2")
    cfg = cfg or SearchConfig()
    d = int(d)
    batch = 2048
    ranges = [
        (lo, min(lo + batch, cfg.starts)) for lo in range(0, cfg.starts, batch)
    ]
    tasks = [(d, alpha, cfg, lo, hi) for lo, hi in ranges]
    if jobs > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            outcomes = list(pool.map(_search_chunk, tasks))
    else:
        outcomes = [_search_chunk(t) for t in tasks]
    evals = sum(o[3] for o in outcomes)
    g_best, factors, start_idx, _ = min(outcomes, key=lambda o: o[0])
    m = _assemble_rank_two(*factors)
    report = check_two_copy(m, alpha)
    return SearchResult(
        report=report,
        matrix=m,
        objective=g_best,
        start_index=start_idx,
        evaluations=evals,
    )


def confirm_violation(m, alpha: float) -> bool:
    """Re-verify a candidate violation with a hard 1e-12 relative margin."""
    report = check_two_copy(m, alpha)
    scale = 1.0 + abs(report.rhs)
    return report.slack < -1e-12 * scale


# ---------------------------------------------------------------------------
# Schmidt-number witnesses


def _witness_coeff(w: WitnessSpec) -> float:
    return 1.0 + (w.n - 1) * w.k


def witness_value(w: WitnessSpec, m) -> float:
    """The witness functional evaluated through partial traces:
    (1 + (n-1)k) ||M||_2^2 - sum_i ||M_i||_2^2."""
    space = TensorSpace((w.d,) * w.n)
    a = space.check_matrix(m)
    total = _witness_coeff(w) * float(np.linalg.norm(a)) ** 2
    for i in range(1, w.n + 1):
        total -= float(np.linalg.norm(_keep_factor(a, space, i))) ** 2
    return total


def witness_matrix(w: WitnessSpec) -> np.ndarray:
    """The witness as a dense matrix on n pairs of factors, ordered with all
    row factors before all column factors."""
    d, n = w.d, w.n
    size = d ** (2 * n)
    if size > 4096:
        raise ValueError(
            f"witness matrix side {size} exceeds the 4096 cap; "
            "evaluate witness_value instead"
        )
    omega = omega_vector(d)
    omega_proj = np.outer(omega, omega.conj())
    pair_space = TensorSpace((d * d,) * n)
    pair_order_space = TensorSpace((d,) * (2 * n))
    total = _witness_coeff(w) * np.eye(size, dtype=complex)
    for i in range(1, n + 1):
        blocks = [
            np.eye(d * d, dtype=complex) if j == i else omega_proj
            for j in range(1, n + 1)
        ]
        term = blocks[0]
        for b in blocks[1:]:
            term = np.kron(term, b)
        # reorder (A1,B1,...,An,Bn) -> (A1,...,An,B1,...,Bn)
        order = [2 * j - 1 for j in range(1, n + 1)] + [2 * j for j in range(1, n + 1)]
        total -= permute_factors(term, pair_order_space, order)
    return total


def witness_apply_vector(w: WitnessSpec, m) -> float:
    """<psi, W psi> for psi = (M (x) 1)|Omega>; must match witness_value."""
    space = TensorSpace((w.d,) * w.n)
    a = space.check_matrix(m)
    side = a.shape[0]
    omega = omega_vector(side)
    psi = np.kron(a, np.eye(side, dtype=complex)) @ omega
    wk = witness_matrix(w)
    return float(np.real(np.vdot(psi, wk @ psi)))


def kpositive_map_apply(x, space: TensorSpace, k: int) -> np.ndarray:
    """The witness-dual map T(X) = (1+(n-1)k) tr(X) 1 - sum_i tr_i[X] (x) 1_i."""
    if len(set(space.dims)) != 1:
        raise ValueError("the map is stated for equal local dimensions")
    if int(k) < 0:
        raise ValueError("k must be non-negative")
    a = space.check_matrix(x)
    n = space.n_factors
    coeff = 1.0 + (n - 1) * int(k)
    out = coeff * np.trace(a) * np.eye(space.total_dim, dtype=complex)
    for i in range(1, n + 1):
        others = tuple(j for j in range(1, n + 1) if j != i)
        traced = partial_trace(a, space, out=i)
        out -= embed_on_factors(traced, space, others)
    return out


def kpositive_choi(space: TensorSpace, k: int) -> np.ndarray:
    """Choi matrix of the map, sum_ab T(E_ab) (x) E_ab; coincides with the
    witness on matched orderings."""
    side = space.total_dim
    if side * side > 4096:
        raise ValueError("Choi matrix side exceeds the 4096 cap")
    choi = np.zeros((side * side, side * side), dtype=complex)
    for a_idx in range(side):
        for b_idx in range(side):
            unit = np.zeros((side, side), dtype=complex)
            unit[a_idx, b_idx] = 1.0
            choi += np.kron(kpositive_map_apply(unit, space, k), unit)
    return choi


def sharp_witness_example(w: WitnessSpec) -> np.ndarray:
    """The rank-(k+1) matrix reaching witness value -(n-1)(k+1): the first
    basis projector on each leading factor, identity of size k+1 on the last."""
    d, n, k = w.d, w.n, w.k
    e11 = np.zeros((d, d), dtype=complex)
    e11[0, 0] = 1.0
    ident = np.zeros((d, d), dtype=complex)
    for i in range(k + 1):
        ident[i, i] = 1.0
    m = np.eye(1, dtype=complex)
    for _ in range(n - 1):
        m = np.kron(m, e11)
    return np.kron(m, ident)
