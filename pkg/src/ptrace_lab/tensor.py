"""Tensor factorizations of a dense matrix: partial traces and embeddings.

Composite indices are big-endian: for dims (d1, ..., dn) the flat index is
j = ((j1*d2 + j2)*d3 + j3)..., matching numpy's C-order reshape and np.kron.
Factors are numbered from 1.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .core import Tolerance, as_matrix, default_tolerance, singular_values
from .reports import InequalityReport


@dataclass(frozen=True)
class TensorSpace:
    """An ordered tuple of local dimensions."""

    dims: tuple[int, ...]

    def __post_init__(self) -> None:
        if len(self.dims) < 1:
            raise ValueError("a tensor space needs at least one factor")
        if any(not isinstance(d, int) or d < 1 for d in self.dims):
            raise ValueError(f"dimensions must be positive integers, got {self.dims}")
        object.__setattr__(self, "dims", tuple(int(d) for d in self.dims))

    @property
    def n_factors(self) -> int:
        return len(self.dims)

    @property
    def total_dim(self) -> int:
        return int(np.prod(self.dims))

    def check_matrix(self, m: np.ndarray) -> np.ndarray:
        a = as_matrix(m, square=True)
        if a.shape[0] != self.total_dim:
            raise ValueError(
                f"matrix side {a.shape[0]} does not match space "
                f"{'x'.join(map(str, self.dims))} (total {self.total_dim})"
            )
        return a

    def check_factor(self, i: int) -> int:
        if not isinstance(i, (int, np.integer)) or not 1 <= i <= self.n_factors:
            raise ValueError(
                f"factor index {i} out of range 1..{self.n_factors}"
            )
        return int(i)


def _factor_set(space: TensorSpace, out) -> tuple[int, ...]:
    if isinstance(out, (int, np.integer)):
        out = (out,)
    factors = tuple(sorted({space.check_factor(i) for i in out}))
    if not factors:
        raise ValueError("the set of traced factors must be non-empty")
    return factors


def partial_trace(m, space: TensorSpace, out) -> np.ndarray:
    """Trace out the factors listed in `out`, preserving the order of the rest.

    Entrywise this is the block-trace: viewing m as a grid of blocks over the
    traced factors, each kept-index entry is the trace over the traced indices.
    Tracing everything returns a 1x1 matrix holding tr(m).
    """
    a = space.check_matrix(m)
    traced = _factor_set(space, out)
    n = space.n_factors
    t = a.reshape(*space.dims, *space.dims)
    # contract traced row/col axis pairs one factor at a time, highest first,
    # so multi-factor traces agree exactly with iterated single traces
    dims = list(space.dims)
    for i in reversed(traced):
        k = len(dims)
        t = np.trace(t, axis1=i - 1, axis2=k + i - 1)
        del dims[i - 1]
    side = int(np.prod(dims)) if dims else 1
    return t.reshape(side, side)


def embed_factor(c, space: TensorSpace, at: int) -> np.ndarray:
    """Place c at factor `at` and the identity everywhere else."""
    a = as_matrix(c, square=True)
    at = space.check_factor(at)
    if a.shape[0] != space.dims[at - 1]:
        raise ValueError(
            f"factor {at} has dimension {space.dims[at - 1]}, "
            f"got a {a.shape[0]}x{a.shape[1]} block"
        )
    before = int(np.prod(space.dims[: at - 1], dtype=int))
    after = int(np.prod(space.dims[at:], dtype=int))
    return np.kron(np.kron(np.eye(before), a), np.eye(after))


def permute_factors(m, space: TensorSpace, order: Sequence[int]) -> np.ndarray:
    """Reorder tensor factors; order lists old factor indices in new positions."""
    a = space.check_matrix(m)
    perm = [space.check_factor(i) - 1 for i in order]
    if sorted(perm) != list(range(space.n_factors)):
        raise ValueError(f"order {list(order)} is not a permutation of the factors")
    n = space.n_factors
    t = a.reshape(*space.dims, *space.dims)
    t = t.transpose(*perm, *[n + p for p in perm])
    return t.reshape(space.total_dim, space.total_dim)


def embed_on_factors(x, space: TensorSpace, where: Sequence[int]) -> np.ndarray:
    """Place x on the listed factors (in their listed order), identity elsewhere."""
    positions = [space.check_factor(i) for i in where]
    if len(set(positions)) != len(positions):
        raise ValueError("embedding positions must be distinct")
    a = as_matrix(x, square=True)
    side = int(np.prod([space.dims[i - 1] for i in positions], dtype=int))
    if a.shape[0] != side:
        raise ValueError(
            f"operator side {a.shape[0]} does not match factors {positions}"
        )
    rest = [i for i in range(1, space.n_factors + 1) if i not in positions]
    rest_dim = int(np.prod([space.dims[i - 1] for i in rest], dtype=int))
    big = np.kron(a, np.eye(rest_dim))
    # big lives on factor order positions + rest; permute back to 1..n
    scrambled = TensorSpace(
        tuple(space.dims[i - 1] for i in positions)
        + tuple(space.dims[i - 1] for i in rest)
    )
    old_order = positions + rest
    # new position j must pick up the factor currently sitting where old_order
    # put it
    order = [old_order.index(i) + 1 for i in range(1, space.n_factors + 1)]
    return permute_factors(big, scrambled, order)


def kronecker_sum(cs: Iterable[np.ndarray], space: TensorSpace) -> np.ndarray:
    """Sum of the factor embeddings, c1 (+) c2 (+) ... on the given space."""
    blocks = list(cs)
    if len(blocks) != space.n_factors:
        raise ValueError(
            f"expected {space.n_factors} summands for space {space.dims}, "
            f"got {len(blocks)}"
        )
    total = np.zeros((space.total_dim, space.total_dim), dtype=complex)
    for i, c in enumerate(blocks, start=1):
        total += embed_factor(c, space, i)
    return total


def omega_vector(d: int) -> np.ndarray:
    """Unnormalized maximally entangled vector sum_i |i>|i> on d (x) d."""
    if not isinstance(d, (int, np.integer)) or d < 1:
        raise ValueError("local dimension must be a positive integer")
    v = np.zeros(d * d, dtype=complex)
    v[:: d + 1] = 1.0
    return v


def flip_operator(d: int) -> np.ndarray:
    """Swap of the two factors of d (x) d: F (a tensor b) = b tensor a."""
    if not isinstance(d, (int, np.integer)) or d < 1:
        raise ValueError("local dimension must be a positive integer")
    f = np.zeros((d * d, d * d), dtype=complex)
    for i in range(d):
        for j in range(d):
            f[i * d + j, j * d + i] = 1.0
    return f


def support_values(m, angles: int) -> np.ndarray:
    """Support function of the field of values on a uniform angle grid.

    Entry t is the largest eigenvalue of the Hermitian part of exp(-i theta_t) m.
    """
    a = as_matrix(m, square=True)
    thetas = np.linspace(0.0, 2.0 * np.pi, angles, endpoint=False)
    phases = np.exp(-1j * thetas)
    h = (
        phases[:, None, None] * a[None, :, :]
        + np.conj(phases)[:, None, None] * a.conj().T[None, :, :]
    ) / 2.0
    return np.linalg.eigvalsh(h)[:, -1]


def range_inclusion_check(
    a,
    m,
    scale: float,
    angles: int = 360,
    tol: float | None = None,
) -> InequalityReport:
    """Grid test of the field-of-values inclusion W(a) within scale * W(m).

    Compares support functions on `angles` uniform directions. A pass is a
    grid certificate only; boundary-touching cases can evade any finite grid.
    """
    a = as_matrix(a, square=True)
    m = as_matrix(m, square=True)
    if scale <= 0:
        raise ValueError("scale must be positive")
    if angles < 4:
        raise ValueError("need at least 4 support angles")
    sigma1 = float(singular_values(m)[0]) if m.size else 0.0
    if tol is None:
        tol = 1e-8 * (1.0 + sigma1)
    ha = support_values(a, angles)
    hm = support_values(m, angles)
    margin = ha - scale * hm
    worst = int(np.argmax(margin))
    return InequalityReport.from_bound(
        name="range-inclusion",
        lhs=float(margin[worst]),
        rhs=0.0,
        tolerance=tol,
        constants={
            "scale": float(scale),
            "angles": int(angles),
            "worst_angle": float(2.0 * np.pi * worst / angles),
        },
    )


def check_ptrace_traces(m, space: TensorSpace, tol: Tolerance | None = None) -> bool:
    """True when every single-factor partial trace preserves the full trace."""
    tol = tol or default_tolerance()
    a = space.check_matrix(m)
    full = np.trace(a)
    scale = abs(full) + float(np.linalg.norm(a))
    for i in range(1, space.n_factors + 1):
        pt = partial_trace(a, space, out=i)
        if abs(np.trace(pt) - full) > tol.threshold(scale):
            return False
    return True
