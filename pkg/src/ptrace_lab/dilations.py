"""Matrices with prescribed partial traces and prescribed structure.

Constructions here produce a composite matrix M on a bipartite (or three
factor) space whose partial trace over the ancilla reproduces a given target,
while M itself is normal, unitary, nilpotent, idempotent, or of small rank.
Each result carries numeric certificates instead of proofs.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import NamedTuple, Sequence

import numpy as np
from scipy.linalg import block_diag
from scipy.optimize import linear_sum_assignment

from .core import (
    Tolerance,
    as_matrix,
    default_tolerance,
    matrix_to_payload,
    rank_tol,
    singular_values,
)
from .reports import InequalityReport
from .tensor import TensorSpace, partial_trace

_E11 = np.array([[1.0, 0.0], [0.0, 0.0]], dtype=complex)
_E22 = np.array([[0.0, 0.0], [0.0, 1.0]], dtype=complex)


def _vec(x: np.ndarray) -> np.ndarray:
    # row-major flattening matches the big-endian composite index convention
    return np.asarray(x, dtype=complex).reshape(-1)


def _rank_one(x1: np.ndarray, x2: np.ndarray) -> np.ndarray:
    return np.outer(_vec(x1), _vec(x2).conj())


@dataclass
class DilationResult:
    """A constructed composite matrix with its factorization and certificates.

    certificates maps residual names to Frobenius norms; partner carries the
    second reproduced target for joint constructions.
    """

    m: np.ndarray
    space: TensorSpace
    structure: str
    certificates: dict = field(default_factory=dict)
    partner: np.ndarray | None = None

    def to_payload(self) -> dict:
        payload = {
            "matrix": matrix_to_payload(self.m, dims=self.space.dims),
            "structure": self.structure,
            "certificates": {k: float(v) for k, v in self.certificates.items()},
        }
        if self.partner is not None:
            payload["partner"] = matrix_to_payload(self.partner)
        return payload


@dataclass(frozen=True)
class SegreCharacteristic:
    """Jordan block sizes at eigenvalue zero, decreasing; stable records
    whether every rank decision stayed clear of its threshold."""

    sizes: tuple[int, ...]
    stable: bool = True

    def padded(self, length: int) -> tuple[int, ...]:
        return self.sizes + (0,) * (length - len(self.sizes))


@dataclass(frozen=True)
class FlandersResult:
    """Verdict of the two-sided similarity test, with a stability flag."""

    similar: bool
    stable: bool
    detail: str

    def __bool__(self) -> bool:
        return self.similar


@dataclass(frozen=True)
class JordanSpec:
    """Canonical description of a matrix: Jordan blocks plus optional basis."""

    blocks: tuple[tuple[complex, int], ...]
    basis: np.ndarray | None = None

    def __post_init__(self) -> None:
        if not self.blocks:
            raise ValueError("a Jordan description needs at least one block")
        blocks = tuple((complex(lam), int(size)) for lam, size in self.blocks)
        if any(size < 1 for _, size in blocks):
            raise ValueError("block sizes must be positive")
        object.__setattr__(self, "blocks", blocks)
        if self.basis is not None:
            basis = as_matrix(self.basis, square=True)
            if basis.shape[0] != self.dim:
                raise ValueError(
                    f"basis side {basis.shape[0]} does not match total size {self.dim}"
                )
            if np.linalg.cond(basis) > 1e12:
                raise ValueError("basis is numerically singular")
            object.__setattr__(self, "basis", basis)

    @property
    def dim(self) -> int:
        return sum(size for _, size in self.blocks)

    def jordan_matrix(self) -> np.ndarray:
        return block_diag(*[jordan_block(lam, s) for lam, s in self.blocks]).astype(
            complex
        )

    def to_matrix(self) -> np.ndarray:
        j = self.jordan_matrix()
        if self.basis is None:
            return j
        return self.basis @ j @ np.linalg.inv(self.basis)

    def to_payload(self) -> dict:
        return {
            "blocks": [
                {"re": lam.real, "im": lam.imag, "size": size}
                for lam, size in self.blocks
            ],
            "basis": None if self.basis is None else matrix_to_payload(self.basis),
        }


def jordan_block(lam: complex, size: int) -> np.ndarray:
    j = np.eye(size, dtype=complex) * lam
    if size > 1:
        j += np.diag(np.ones(size - 1, dtype=complex), 1)
    return j


def _exchange(size: int) -> np.ndarray:
    return np.fliplr(np.eye(size, dtype=complex))


# ---------------------------------------------------------------------------
# structured dilations for a single target


def normal_dilation(a) -> DilationResult:
    """Normal M on d (x) 2 with ancilla trace a: Hermitian and anti-Hermitian
    parts of a on the two ancilla levels."""
    a = as_matrix(a, square=True)
    d = a.shape[0]
    h = (a + a.conj().T) / 2.0
    s = (a - a.conj().T) / 2.0
    m = np.kron(h, _E11) + np.kron(s, _E22)
    space = TensorSpace((d, 2))
    comm = m @ m.conj().T - m.conj().T @ m
    resid = np.linalg.norm(partial_trace(m, space, out=2) - a)
    return DilationResult(
        m=m,
        space=space,
        structure="normal",
        certificates={
            "normality_residual": float(np.linalg.norm(comm)),
            "ptrace_residual": float(resid),
        },
    )


def unitary_dilation(a, m_ancilla: int | None = None) -> DilationResult:
    """Unitary M on d (x) m with ancilla trace a, for even m >= ||a||.

    Pairs of ancilla levels carry the two phase rotations of each singular
    value; averaging them recovers a.
    """
    a = as_matrix(a, square=True)
    d = a.shape[0]
    u, s, vh = np.linalg.svd(a)
    sigma1 = float(s[0]) if s.size else 0.0
    if m_ancilla is None:
        m_anc = max(2, 2 * math.ceil(sigma1 / 2.0))
    else:
        m_anc = int(m_ancilla)
        if m_anc < 2 or m_anc % 2 != 0:
            raise ValueError("ancilla dimension must be an even integer >= 2")
        if m_anc < sigma1 - 1e-12:
            raise ValueError(
                f"ancilla dimension {m_anc} is below the spectral norm {sigma1:.6g}"
            )
    phi = np.arccos(np.clip(s / m_anc, -1.0, 1.0))
    w_plus = (u * np.exp(1j * phi)) @ vh
    w_minus = (u * np.exp(-1j * phi)) @ vh
    even = np.diag([1.0 if i % 2 == 0 else 0.0 for i in range(m_anc)])
    odd = np.eye(m_anc) - even
    m = np.kron(w_plus, even) + np.kron(w_minus, odd)
    space = TensorSpace((d, m_anc))
    dd = d * m_anc
    unit = np.linalg.norm(m.conj().T @ m - np.eye(dd))
    resid = np.linalg.norm(partial_trace(m, space, out=2) - a)
    return DilationResult(
        m=m,
        space=space,
        structure="unitary",
        certificates={
            "unitarity_residual": float(unit),
            "ptrace_residual": float(resid),
        },
    )


# ---------------------------------------------------------------------------
# constant diagonal form


def _attain_2x2(y: np.ndarray, z: complex) -> np.ndarray:
    """Unit vector psi with <psi, y psi> = z for a 2x2 y and z in its field
    of values. Arguments outside the field are clamped to the boundary."""
    y0 = y - z * np.eye(2)
    t = np.trace(y0)
    beta = 0.0 if abs(t) < 1e-300 else (np.pi / 2.0 - np.angle(t))
    yr = np.exp(1j * beta) * y0
    h = (yr + yr.conj().T) / 2.0
    k = (yr - yr.conj().T) / (2.0j)
    scale = np.linalg.norm(y0) + 1.0
    hw, hv = np.linalg.eigh(h)
    if hw[1] - hw[0] < 1e-14 * scale:
        # Hermitian part is scalar (hence ~0 after the trace rotation):
        # balance the other quadrature alone
        kw, kv = np.linalg.eigh(k)
        if kw[1] - kw[0] < 1e-300:
            return np.array([1.0, 0.0], dtype=complex)
        frac = float(np.clip(kw[1] / (kw[1] - kw[0]), 0.0, 1.0))
        psi = np.sqrt(frac) * kv[:, 0] + np.sqrt(1.0 - frac) * kv[:, 1]
        return psi / np.linalg.norm(psi)
    u = hv[:, ::-1]  # columns ordered (+h, -h)
    kp = u.conj().T @ k @ u
    avg = float((kp[0, 0].real + kp[1, 1].real) / 2.0)
    off = kp[0, 1]
    if abs(off) < 1e-300:
        tau = 0.0
    else:
        tau = float(np.arccos(np.clip(-avg / abs(off), -1.0, 1.0)) - np.angle(off))
    psi = (u[:, 0] + np.exp(1j * tau) * u[:, 1]) / np.sqrt(2.0)
    return psi / np.linalg.norm(psi)


def _apply_pair_rotation(b, q, i, j, psi) -> None:
    """Conjugate b in place by the unitary acting as [psi, psi_perp] on the
    (i, j) plane, accumulating into q."""
    g = np.array(
        [[psi[0], -np.conj(psi[1])], [psi[1], np.conj(psi[0])]], dtype=complex
    )
    idx = [i, j]
    b[:, idx] = b[:, idx] @ g
    b[idx, :] = g.conj().T @ b[idx, :]
    q[:, idx] = q[:, idx] @ g


def constant_diagonal_form(a, tol: Tolerance | None = None):
    """Unitary q and t = q* a q with every diagonal entry equal to tr(a)/d.

    Two sweeps of pairwise plane rotations: the first flattens the real
    deviations, the second the imaginary ones. Each target then lies on the
    segment between two diagonal entries, inside the 2x2 field of values,
    so a closed-form rotation reaches it.
    """
    a = as_matrix(a, square=True)
    d = a.shape[0]
    mu = np.trace(a) / d
    b = a.astype(complex).copy()
    q = np.eye(d, dtype=complex)
    scale = float(np.linalg.norm(a)) + 1.0
    tiny = 1e-15 * scale * max(d, 2)

    for part in (np.real, np.imag):
        active = list(range(d))
        while len(active) > 1:
            devs = np.array([part(b[i, i] - mu) for i in active])
            hi = int(np.argmax(devs))
            lo = int(np.argmin(devs))
            if devs[hi] - devs[lo] < tiny or hi == lo:
                break
            i, j = active[hi], active[lo]
            frac = devs[hi] / (devs[hi] - devs[lo])
            z = (1.0 - frac) * b[i, i] + frac * b[j, j]
            sub = b[np.ix_([i, j], [i, j])]
            psi = _attain_2x2(sub, z)
            _apply_pair_rotation(b, q, i, j, psi)
            del active[hi]

    return q, b


# ---------------------------------------------------------------------------
# nilpotent and idempotent dilations


def nilpotent_dilation(a, tol: Tolerance | None = None) -> DilationResult:
    """Nilpotent M on d (x) 2 with ancilla trace a; requires tr(a) ~ 0.

    After a unitary change making the diagonal constant (hence ~0), the
    strictly lower and strictly upper parts sit on separate ancilla levels,
    so M^d vanishes.
    """
    a = as_matrix(a, square=True)
    d = a.shape[0]
    fro = float(np.linalg.norm(a))
    tr = np.trace(a)
    if abs(tr) > 1e-9 * (1.0 + fro):
        raise ValueError(
            f"nilpotent dilation needs a traceless target, got tr = {tr:.3e}"
        )
    q, t = constant_diagonal_form(a, tol)
    lower = np.tril(t, -1)
    upper = np.triu(t, 1)
    ml = q @ lower @ q.conj().T
    mu = q @ upper @ q.conj().T
    m = np.kron(ml, _E11) + np.kron(mu, _E22)
    space = TensorSpace((d, 2))
    resid = np.linalg.norm(partial_trace(m, space, out=2) - a)
    nil = np.linalg.norm(np.linalg.matrix_power(m, d))
    return DilationResult(
        m=m,
        space=space,
        structure="nilpotent",
        certificates={
            "nilpotency_residual": float(nil),
            "ptrace_residual": float(resid),
        },
    )


def idempotent_dilation(a, tol: Tolerance | None = None) -> DilationResult:
    """Idempotent M with ancilla trace a; needs tr(a) a positive integer
    (or a = 0). The ancilla splits as rank(a) x tr(a)."""
    tol = tol or default_tolerance()
    a = as_matrix(a, square=True)
    d = a.shape[0]
    fro = float(np.linalg.norm(a))
    if fro <= tol.abs:
        space = TensorSpace((d, 1, 1))
        return DilationResult(
            m=np.zeros((d, d), dtype=complex),
            space=space,
            structure="idempotent",
            certificates={"idempotency_residual": 0.0, "ptrace_residual": float(fro)},
        )
    tr = np.trace(a)
    nearest = int(round(tr.real))
    if abs(tr - nearest) > 1e-9:
        raise ValueError(
            f"idempotent dilation needs an integer trace; tr = {tr:.6g} "
            f"(nearest integer {nearest})"
        )
    if nearest <= 0:
        raise ValueError(
            "idempotent dilation needs a positive integer trace; "
            f"tr = {nearest} admits none for a nonzero target"
        )
    r = rank_tol(a, tol)
    x1, x2 = _purify_factors(a / nearest, r)
    phi = _vec(x1)
    psi = _vec(x2)
    phi = phi / np.vdot(psi, phi)  # make <psi, phi> exactly 1
    p = np.outer(phi, psi.conj())
    m = np.kron(p, np.eye(nearest))
    space = TensorSpace((d, r, nearest))
    resid = np.linalg.norm(partial_trace(m, space, out=(2, 3)) - a)
    idem = np.linalg.norm(m @ m - m)
    return DilationResult(
        m=m,
        space=space,
        structure="idempotent",
        certificates={
            "idempotency_residual": float(idem),
            "ptrace_residual": float(resid),
        },
    )


# ---------------------------------------------------------------------------
# similarity invariants


def segre_at_zero(a, tol: Tolerance | None = None) -> SegreCharacteristic:
    """Jordan block sizes at eigenvalue zero from ranks of matrix powers."""
    tol = tol or default_tolerance()
    a = as_matrix(a, square=True)
    d = a.shape[0]
    ranks = [d]
    stable = True
    power = np.eye(d, dtype=complex)
    for _ in range(d):
        power = power @ a
        s = singular_values(power)
        if s.size == 0 or s[0] <= 0:
            ranks.append(0)
            break
        thr = tol.threshold(float(s[0]))
        ranks.append(int(np.count_nonzero(s > thr)))
        if np.any((s > thr / 10.0) & (s < thr * 10.0)):
            stable = False
        if ranks[-1] == ranks[-2]:
            break
    counts_ge = [ranks[k - 1] - ranks[k] for k in range(1, len(ranks))]
    counts_ge = [max(c, 0) for c in counts_ge]
    sizes: list[int] = []
    for k in range(len(counts_ge), 0, -1):
        exactly = counts_ge[k - 1] - (counts_ge[k] if k < len(counts_ge) else 0)
        sizes.extend([k] * max(exactly, 0))
    sizes.sort(reverse=True)
    return SegreCharacteristic(sizes=tuple(sizes), stable=stable)


def _cluster_complex(values: np.ndarray, radius: float) -> list[tuple[complex, int]]:
    """Greedy clustering of complex points; returns (center, multiplicity)."""
    clusters: list[list[complex]] = []
    for z in sorted(values, key=lambda w: (w.real, w.imag)):
        for members in clusters:
            center = sum(members) / len(members)
            if abs(z - center) <= radius:
                members.append(z)
                break
        else:
            clusters.append([z])
    return [(sum(ms) / len(ms), len(ms)) for ms in clusters]


def _block_counts_at(x: np.ndarray, lam: complex, mult: int, tol: Tolerance) -> list[int]:
    """Numbers of Jordan blocks of size >= k at eigenvalue lam, k = 1..mult."""
    d = x.shape[0]
    shifted = x - lam * np.eye(d)
    ranks = [d]
    power = np.eye(d, dtype=complex)
    for _ in range(mult):
        power = power @ shifted
        ranks.append(rank_tol(power, tol))
    return [ranks[k - 1] - ranks[k] for k in range(1, len(ranks))]


def flanders_similar(a, b, tol: Tolerance | None = None) -> FlandersResult:
    """Do a and b qualify as the two partial traces of a common rank-one
    matrix? Identical Jordan structure away from zero, and zero block sizes
    (zero padded) differing by at most one, position by position."""
    tol = tol or default_tolerance()
    a = as_matrix(a, square=True)
    b = as_matrix(b, square=True)
    sa = singular_values(a)
    sb = singular_values(b)
    scale = max(float(sa[0]) if sa.size else 0.0, float(sb[0]) if sb.size else 0.0)
    thr = tol.threshold(scale)
    ev_a = np.linalg.eigvals(a)
    ev_b = np.linalg.eigvals(b)
    nza = ev_a[np.abs(ev_a) > thr]
    nzb = ev_b[np.abs(ev_b) > thr]
    stable = not (
        np.any((np.abs(ev_a) > thr / 10.0) & (np.abs(ev_a) < thr * 10.0))
        or np.any((np.abs(ev_b) > thr / 10.0) & (np.abs(ev_b) < thr * 10.0))
    )
    if nza.size != nzb.size:
        return FlandersResult(
            False, stable, f"nonzero eigenvalue counts differ ({nza.size} vs {nzb.size})"
        )
    match_tol = max(100.0 * thr, 1e-7 * (1.0 + scale))
    if nza.size:
        cost = np.abs(nza[:, None] - nzb[None, :])
        rows, cols = linear_sum_assignment(cost)
        worst = float(cost[rows, cols].max())
        if worst > match_tol:
            return FlandersResult(
                False, stable, f"nonzero eigenvalues differ (distance {worst:.3e})"
            )
        clusters = _cluster_complex(nza, match_tol)
        centers = [c for c, _ in clusters]
        for p in range(len(centers)):
            for q_ in range(p + 1, len(centers)):
                gap = abs(centers[p] - centers[q_])
                if gap < 10.0 * tol.abs:
                    stable = False
        for center, mult in clusters:
            if mult < 2:
                continue
            ca = _block_counts_at(a, center, mult, tol)
            cb = _block_counts_at(b, center, mult, tol)
            if ca != cb:
                return FlandersResult(
                    False,
                    stable,
                    f"Jordan structure differs at eigenvalue {center:.6g}",
                )
    seg_a = segre_at_zero(a, tol)
    seg_b = segre_at_zero(b, tol)
    stable = stable and seg_a.stable and seg_b.stable
    width = max(len(seg_a.sizes), len(seg_b.sizes), 1)
    pa = seg_a.padded(width)
    pb = seg_b.padded(width)
    for pa_k, pb_k in zip(pa, pb):
        if abs(pa_k - pb_k) > 1:
            return FlandersResult(
                False,
                stable,
                f"zero block sizes too far apart ({pa} vs {pb})",
            )
    return FlandersResult(True, stable, "similar up to the zero block shifts")


# ---------------------------------------------------------------------------
# rank-one and rank-two joint constructions


def _purify_factors(a: np.ndarray, d_b: int) -> tuple[np.ndarray, np.ndarray]:
    d_a = a.shape[0]
    u, s, vh = np.linalg.svd(a)
    k = min(d_a, d_b)
    root = np.sqrt(s[:k])
    x1 = np.zeros((d_a, d_b), dtype=complex)
    x2 = np.zeros((d_a, d_b), dtype=complex)
    x1[:, :k] = u[:, :k] * root
    x2[:, :k] = vh.conj().T[:, :k] * root
    return x1, x2


def purify(a, d_b: int, tol: Tolerance | None = None) -> DilationResult:
    """Rank-one M on d (x) d_b whose ancilla trace is a; needs d_b >= rank(a).

    The second partial trace comes along for the ride; its similarity class
    is pinned by the verdict stored in the certificates.
    """
    tol = tol or default_tolerance()
    a = as_matrix(a, square=True)
    d_a = a.shape[0]
    if not isinstance(d_b, (int, np.integer)) or d_b < 1:
        raise ValueError("ancilla dimension must be a positive integer")
    r = rank_tol(a, tol)
    if d_b < r:
        raise ValueError(
            f"ancilla dimension {d_b} is below the target rank {r}"
        )
    x1, x2 = _purify_factors(a, int(d_b))
    m = _rank_one(x1, x2)
    space = TensorSpace((d_a, int(d_b)))
    partner = partial_trace(m, space, out=1)
    resid = np.linalg.norm(x1 @ x2.conj().T - a)
    sv = singular_values(m)
    rank_excess = float(sv[1] / sv[0]) if sv.size > 1 and sv[0] > 0 else 0.0
    verdict = flanders_similar(a, partner, tol)
    return DilationResult(
        m=m,
        space=space,
        structure="rank_one",
        partner=partner,
        certificates={
            "ptrace_residual": float(resid),
            "rank_excess": rank_excess,
            "flanders_similar": 1.0 if verdict.similar else 0.0,
        },
    )


def _zero_pair_factors(p: int, q: int) -> tuple[np.ndarray, np.ndarray]:
    """Rectangular factors with PQ = J_p(0) and QP = J_q(0); needs |p-q| <= 1."""
    if abs(p - q) > 1:
        raise ValueError(f"zero block sizes {p} and {q} differ by more than one")
    if p == q:
        return jordan_block(0.0, p), np.eye(p, dtype=complex)
    if p == q + 1:
        left = np.zeros((p, q), dtype=complex)
        right = np.zeros((q, p), dtype=complex)
        for i in range(q):
            left[i, i] = 1.0
            right[i, i + 1] = 1.0
        return left, right
    # p == q - 1
    left = np.zeros((p, q), dtype=complex)
    right = np.zeros((q, p), dtype=complex)
    for i in range(p):
        left[i, i + 1] = 1.0
        right[i, i] = 1.0
    return left, right


def _split_blocks(spec: JordanSpec) -> tuple[list[tuple[complex, int]], list[int]]:
    nonzero = [(lam, s) for lam, s in spec.blocks if abs(lam) > 1e-12]
    zero = sorted((s for lam, s in spec.blocks if abs(lam) <= 1e-12), reverse=True)
    return nonzero, zero


def _match_permutation(
    user_blocks: Sequence[tuple[complex, int]],
    internal_blocks: Sequence[tuple[complex, int]],
) -> np.ndarray:
    """Permutation matrix P with P @ blockdiag(internal) @ P.T laid out in the
    user's block order."""
    total = sum(s for _, s in internal_blocks)
    int_off = np.cumsum([0] + [s for _, s in internal_blocks])
    user_off = np.cumsum([0] + [s for _, s in user_blocks])
    perm = np.zeros((total, total), dtype=complex)
    used = [False] * len(internal_blocks)
    for u_idx, (lam_u, s_u) in enumerate(user_blocks):
        for i_idx, (lam_i, s_i) in enumerate(internal_blocks):
            if used[i_idx] or s_i != s_u or abs(lam_i - lam_u) > 1e-12:
                continue
            used[i_idx] = True
            uo, io = user_off[u_idx], int_off[i_idx]
            perm[uo : uo + s_u, io : io + s_u] = np.eye(s_u)
            break
        else:  # pragma: no cover - guarded by earlier validation
            raise AssertionError("block matching failed after validation")
    return perm


def joint_rank_one_dilation(
    a_spec: JordanSpec, b_spec: JordanSpec, tol: Tolerance | None = None
) -> DilationResult:
    """Rank-one M whose two partial traces realize both canonical targets.

    Valid exactly when the targets share their nonzero Jordan structure and
    their zero block sizes interlace within one.
    """
    tol = tol or default_tolerance()
    nza, za = _split_blocks(a_spec)
    nzb, zb = _split_blocks(b_spec)
    key = lambda item: (item[0].real, item[0].imag, item[1])
    nza_sorted = sorted(nza, key=key)
    nzb_sorted = sorted(nzb, key=key)
    if len(nza_sorted) != len(nzb_sorted):
        raise ValueError(
            "nonzero Jordan blocks do not match: "
            f"{len(nza_sorted)} blocks vs {len(nzb_sorted)}"
        )
    for (lam_a, s_a), (lam_b, s_b) in zip(nza_sorted, nzb_sorted):
        if s_a != s_b or abs(lam_a - lam_b) > 1e-12:
            raise ValueError(
                "nonzero Jordan blocks do not match: "
                f"({lam_a:.6g}, {s_a}) vs ({lam_b:.6g}, {s_b})"
            )
    width = max(len(za), len(zb))
    za_p = za + [0] * (width - len(za))
    zb_p = zb + [0] * (width - len(zb))
    for p, q in zip(za_p, zb_p):
        if abs(p - q) > 1:
            raise ValueError(
                f"zero block sizes {p} and {q} differ by more than one"
            )

    y1_blocks: list[np.ndarray] = []
    y2h_blocks: list[np.ndarray] = []
    a_internal: list[tuple[complex, int]] = []
    b_internal: list[tuple[complex, int]] = []
    b_sizes: list[int] = []
    for lam, s in nza_sorted:
        y1_blocks.append(jordan_block(lam, s))
        y2h_blocks.append(np.eye(s, dtype=complex))
        a_internal.append((lam, s))
        b_internal.append((lam, s))
        b_sizes.append(s)
    for p, q in zip(za_p, zb_p):
        left, right = _zero_pair_factors(p, q)
        y1_blocks.append(left)
        y2h_blocks.append(right)
        if p:
            a_internal.append((0.0, p))
        if q:
            b_internal.append((0.0, q))
            b_sizes.append(q)

    y1 = block_diag(*y1_blocks).astype(complex)
    y2h = block_diag(*y2h_blocks).astype(complex)
    d_a, d_b = a_spec.dim, b_spec.dim
    if y1.shape != (d_a, d_b):  # pragma: no cover - internal consistency
        raise AssertionError("factor assembly does not match target sizes")

    s_flip = block_diag(*[_exchange(s) for s in b_sizes]).astype(complex)
    x1 = y1 @ s_flip
    x2h = s_flip @ y2h

    perm_a = _match_permutation(a_spec.blocks, a_internal)
    perm_b = _match_permutation(b_spec.blocks, b_internal)
    r_a = perm_a if a_spec.basis is None else a_spec.basis @ perm_a
    r_b = perm_b if b_spec.basis is None else b_spec.basis @ perm_b

    # A similarity on the left target and one on the right transport the
    # factors: X1 -> R_a X1 R_b^T, X2* -> R_b^-T X2* R_a^-1
    x1_final = r_a @ x1 @ r_b.T
    x2h_final = np.linalg.solve(r_b.T, x2h) @ np.linalg.inv(r_a)

    m = _rank_one(x1_final, x2h_final.conj().T)
    space = TensorSpace((d_a, d_b))
    a_target = a_spec.to_matrix()
    b_target = b_spec.to_matrix()
    res_a = np.linalg.norm(partial_trace(m, space, out=2) - a_target)
    res_b = np.linalg.norm(partial_trace(m, space, out=1) - b_target)
    sv = singular_values(m)
    rank_excess = float(sv[1] / sv[0]) if sv.size > 1 and sv[0] > 0 else 0.0
    return DilationResult(
        m=m,
        space=space,
        structure="rank_one",
        partner=b_target,
        certificates={
            "residual_a": float(res_a),
            "residual_b": float(res_b),
            "rank_excess": rank_excess,
        },
    )


# ---------------------------------------------------------------------------
# commutator decomposition and the rank-two construction


class ShodaDecomposition(NamedTuple):
    k: np.ndarray
    l: np.ndarray
    cond: float


def _zero_diagonal_basis(c: np.ndarray) -> np.ndarray:
    """Invertible s with diag(s^-1 c s) ~ 0 for traceless c, by recursion:
    pick v with v, cv independent, make them the leading basis vectors."""
    d = c.shape[0]
    if d == 1:
        return np.eye(1, dtype=complex)
    scale = float(np.linalg.norm(c)) + 1.0
    best_v = None
    best_res = 1e-10 * scale
    candidates: list[np.ndarray] = [np.eye(d, dtype=complex)[:, i] for i in range(d)]
    for i in range(d):
        for j in range(i + 1, d):
            e = np.zeros(d, dtype=complex)
            e[i] = 1.0
            f = np.zeros(d, dtype=complex)
            f[j] = 1.0
            candidates.append((e + f) / np.sqrt(2.0))
            candidates.append((e + 1j * f) / np.sqrt(2.0))
    for v in candidates:
        w = c @ v
        res = float(np.linalg.norm(w - (np.vdot(v, w)) * v))
        if res > best_res:
            best_res = res
            best_v = v
    if best_v is None:
        # c is numerically scalar; traceless scalar means ~0, nothing to do
        return np.eye(d, dtype=complex)
    v = best_v
    w = c @ v
    full, _ = np.linalg.qr(np.column_stack([v, w]), mode="complete")
    t = np.column_stack([v, w, full[:, 2:]])
    ct = np.linalg.solve(t, c @ t)
    sub_basis = _zero_diagonal_basis(ct[1:, 1:])
    return t @ block_diag(np.eye(1, dtype=complex), sub_basis)


def shoda_decomposition(c, tol: Tolerance | None = None) -> ShodaDecomposition:
    """Factors k, l with kl - lk = c for traceless c.

    In a zero-diagonal similarity basis, k is the integer diagonal 1..d and
    l divides each entry by the index difference. cond reports the basis
    conditioning.
    """
    c = as_matrix(c, square=True)
    d = c.shape[0]
    fro = float(np.linalg.norm(c))
    tr = np.trace(c)
    if abs(tr) > 1e-9 * (1.0 + fro):
        raise ValueError(
            f"commutator decomposition needs a traceless input, got tr = {tr:.3e}"
        )
    s = _zero_diagonal_basis(c)
    z = np.linalg.solve(s, c @ s)
    idx = np.arange(d)
    denom = np.subtract.outer(idx, idx).astype(complex)
    with np.errstate(divide="ignore", invalid="ignore"):
        l0 = np.where(denom != 0, z / np.where(denom == 0, 1.0, denom), 0.0)
    k0 = np.diag(idx + 1.0).astype(complex)
    s_inv = np.linalg.inv(s)
    k = s @ k0 @ s_inv
    l = s @ l0 @ s_inv
    return ShodaDecomposition(k=k, l=l, cond=float(np.linalg.cond(s)))


def joint_rank_two_dilation(a, b, tol: Tolerance | None = None) -> DilationResult:
    """Rank <= 2 matrix M on d (x) d with partial traces a and b.

    Exists whenever tr(a) = tr(b): the transposed-difference is a commutator,
    and its factors fill the two rank-one layers.
    """
    tol = tol or default_tolerance()
    a = as_matrix(a, square=True)
    b = as_matrix(b, square=True)
    if a.shape != b.shape:
        raise ValueError(f"targets must share a size, got {a.shape} and {b.shape}")
    if abs(np.trace(a) - np.trace(b)) > 1e-9:
        raise ValueError(
            f"targets must share their trace, got {np.trace(a):.6g} "
            f"and {np.trace(b):.6g}"
        )
    d = a.shape[0]
    c = b.T - a
    k, l, cond = shoda_decomposition(c, tol)
    x1 = l
    x2 = k.conj().T
    y1 = a - l @ k
    y2 = np.eye(d, dtype=complex)
    m = _rank_one(x1, x2) + _rank_one(y1, y2)
    space = TensorSpace((d, d))
    res_a = np.linalg.norm(partial_trace(m, space, out=2) - a)
    res_b = np.linalg.norm(partial_trace(m, space, out=1) - b)
    sv = singular_values(m)
    rank_excess = float(sv[2] / sv[0]) if sv.size > 2 and sv[0] > 0 else 0.0
    return DilationResult(
        m=m,
        space=space,
        structure="rank_two",
        partner=b.copy(),
        certificates={
            "residual_a": float(res_a),
            "residual_b": float(res_b),
            "rank_excess": rank_excess,
            "basis_cond": cond,
        },
    )


# ---------------------------------------------------------------------------
# rank surgery and the dimension constraint


def _cyclic_shift(d: int) -> np.ndarray:
    s = np.zeros((d, d), dtype=complex)
    for j in range(d):
        s[(j + 1) % d, j] = 1.0
    return s


def adjust_dilation_rank(
    m, space: TensorSpace, target_rank: int, tol: Tolerance | None = None
) -> DilationResult:
    """Raise rank(m) to target_rank without touching either partial trace.

    Adds t times a row-truncated product of cyclic shifts, whose partial
    traces vanish identically; t is sampled until the rank lands.
    """
    tol = tol or default_tolerance()
    if space.n_factors != 2:
        raise ValueError("rank adjustment is defined for bipartite factorizations")
    a = space.check_matrix(m)
    d_a, d_b = space.dims
    total = space.total_dim
    r0 = rank_tol(a, tol)
    target = int(target_rank)
    if not r0 <= target <= total:
        raise ValueError(
            f"target rank {target} outside the reachable range [{r0}, {total}]"
        )
    if target == r0:
        return DilationResult(
            m=a.copy(),
            space=space,
            structure="rank_r",
            certificates={
                "rank": float(r0),
                "shift_weight": 0.0,
                "shift_rows": 0.0,
                "ptrace_residual_a": 0.0,
                "ptrace_residual_b": 0.0,
            },
        )
    if min(d_a, d_b) < 2:
        raise ValueError(
            "rank adjustment needs both local dimensions >= 2; a 1-dim factor "
            "leaves no room for a trace-free shift"
        )
    n_full = np.kron(_cyclic_shift(d_a), _cyclic_shift(d_b))
    fro = float(np.linalg.norm(a)) or 1.0
    pt_a0 = partial_trace(a, space, out=2)
    pt_b0 = partial_trace(a, space, out=1)
    weights = []
    w = 1.0
    for _ in range(16):
        weights.extend([w, 1.0 / w] if w != 1.0 else [w])
        w *= 2.0
    weights = weights[:32]
    for rows in range(1, total + 1):
        shift = n_full.copy()
        shift[rows:, :] = 0.0
        for w in weights:
            cand = a + (w * fro) * shift
            if rank_tol(cand, tol) != target:
                continue
            res_a = np.linalg.norm(partial_trace(cand, space, out=2) - pt_a0)
            res_b = np.linalg.norm(partial_trace(cand, space, out=1) - pt_b0)
            return DilationResult(
                m=cand,
                space=space,
                structure="rank_r",
                certificates={
                    "rank": float(target),
                    "shift_weight": float(w * fro),
                    "shift_rows": float(rows),
                    "ptrace_residual_a": float(res_a),
                    "ptrace_residual_b": float(res_b),
                },
            )
    raise RuntimeError(
        f"could not reach rank {target} from {r0} after sampling "
        f"{len(weights)} shift weights per row count"
    )


def check_dimension_constraint(m, space: TensorSpace, tol: Tolerance | None = None) -> InequalityReport:
    """Rank bound max(rank A, rank B) <= rank(M) * min(d_A, d_B)."""
    tol = tol or default_tolerance()
    if space.n_factors != 2:
        raise ValueError("the dimension constraint applies to bipartite spaces")
    a = space.check_matrix(m)
    r_m = rank_tol(a, tol)
    r_a = rank_tol(partial_trace(a, space, out=2), tol)
    r_b = rank_tol(partial_trace(a, space, out=1), tol)
    return InequalityReport.from_bound(
        name="partial-trace-rank-bound",
        lhs=float(max(r_a, r_b)),
        rhs=float(r_m * min(space.dims)),
        tolerance=0.0,
        constants={
            "rank_m": r_m,
            "rank_a": r_a,
            "rank_b": r_b,
            "d_a": space.dims[0],
            "d_b": space.dims[1],
        },
    )
