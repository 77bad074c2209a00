"""State-space tooling for single-input single-output linear models.

Everything here is written for the small dense systems produced by the
spin-chain models (dimension a few dozen at most): reachability and
observability matrices, Markov parameters, orthogonal Kalman-style
decomposition, and a minimal-subsystem extraction that provably leaves a
probed entry of A untouched.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import scipy.linalg

from .errors import AtypicalInstanceError, ConditioningError, DimensionError

_EPS = np.finfo(float).eps


def _readonly(a: np.ndarray) -> np.ndarray:
    out = np.array(a, dtype=float)
    out.setflags(write=False)
    return out


@dataclass(frozen=True)
class LinearSystem:
    """x' = A x, y = C x + D u with scalar input entering through B.

    B and C are stored as 1-D arrays (a column and a row respectively).
    Instances are immutable; the arrays are marked read-only so systems
    can be shared freely across threads.
    """

    A: np.ndarray
    B: np.ndarray
    C: np.ndarray
    D: float = 0.0

    def __post_init__(self):
        A = _readonly(self.A)
        B = _readonly(self.B).reshape(-1)
        C = _readonly(self.C).reshape(-1)
        if A.ndim != 2 or A.shape[0] != A.shape[1]:
            raise DimensionError(f"A must be square, got shape {A.shape}")
        n = A.shape[0]
        if n < 1:
            raise DimensionError("state dimension must be at least 1")
        if B.shape != (n,) or C.shape != (n,):
            raise DimensionError(
                f"B and C must have length {n}, got {B.shape} and {C.shape}"
            )
        B.setflags(write=False)
        C.setflags(write=False)
        object.__setattr__(self, "A", A)
        object.__setattr__(self, "B", B)
        object.__setattr__(self, "C", C)
        object.__setattr__(self, "D", float(self.D))

    @property
    def dim(self) -> int:
        return self.A.shape[0]


def similarity_transform(sys: LinearSystem, P: np.ndarray, cond_threshold: float = 1e12) -> LinearSystem:
    """Change of state basis x -> P x, giving (P A P^-1, P B, C P^-1, D).

    Refuses transforms whose condition number exceeds ``cond_threshold``
    since past that point the transformed realization is numerically
    meaningless.
    """
    P = np.asarray(P, dtype=float)
    if P.shape != (sys.dim, sys.dim):
        raise DimensionError(f"transform must be {sys.dim}x{sys.dim}, got {P.shape}")
    svals = np.linalg.svd(P, compute_uv=False)
    if svals[-1] == 0.0 or svals[0] / svals[-1] > cond_threshold:
        cond = float("inf") if svals[-1] == 0.0 else float(svals[0] / svals[-1])
        raise ConditioningError(
            f"similarity transform condition number {cond:.3e} exceeds {cond_threshold:.1e}",
            cond=cond,
        )
    Pinv = np.linalg.inv(P)
    return LinearSystem(P @ sys.A @ Pinv, P @ sys.B, sys.C @ Pinv, sys.D)


def reachability_matrices(sys: LinearSystem) -> tuple[np.ndarray, np.ndarray]:
    """Reachability matrix [B, AB, ..., A^(n-1)B] and its observability dual.

    Columns and rows are accumulated by repeated matrix-vector products;
    no explicit matrix power is ever formed.
    """
    n = sys.dim
    CM = np.empty((n, n))
    OM = np.empty((n, n))
    v = sys.B.copy()
    w = sys.C.copy()
    for k in range(n):
        CM[:, k] = v
        OM[k, :] = w
        v = sys.A @ v
        w = sys.A.T @ w
    return CM, OM


def numerical_rank(M: np.ndarray, tol: float | None = None) -> int:
    """Rank by singular-value thresholding.

    Default tolerance is max(shape) * eps * sigma_max, the usual
    least-squares cutoff.
    """
    M = np.atleast_2d(np.asarray(M, dtype=float))
    if M.size == 0:
        return 0
    s = np.linalg.svd(M, compute_uv=False)
    if s.size == 0 or s[0] == 0.0:
        return 0
    if tol is None:
        tol = max(M.shape) * _EPS * s[0]
    return int(np.count_nonzero(s > tol))


def markov_parameters(sys: LinearSystem, count: int) -> np.ndarray:
    """First ``count`` Markov parameters CB, CAB, CA^2B, ...

    These are the Taylor coefficients of the impulse response and form a
    complete set of output-equivalence invariants once ``count`` reaches
    twice the state dimension.
    """
    if count < 0:
        raise DimensionError("count must be nonnegative")
    out = np.empty(count)
    v = sys.B.copy()
    for k in range(count):
        out[k] = sys.C @ v
        v = sys.A @ v
    return out


def markov_scale(sys: LinearSystem) -> float:
    """Geometric normalization for Markov-sequence comparisons.

    Comparing CA^kB across systems at a common scale s means comparing
    the Markov parameters of the time-rescaled system A/s. The scale is
    the spectral radius (floored at 1), under which |m_k|/s^k stays O(1)
    at every order k: a larger scale such as the Frobenius norm would
    crush the high-order parameters below any fixed tolerance and make
    the comparison blind to exactly the coefficients that distinguish
    nearby realizations.
    """
    rho = float(np.abs(np.linalg.eigvals(sys.A)).max()) if sys.dim > 0 else 0.0
    return max(1.0, rho)


def scaled_markov_parameters(sys: LinearSystem, count: int, scale: float) -> np.ndarray:
    scaled = LinearSystem(sys.A / scale, sys.B, sys.C, sys.D)
    return markov_parameters(scaled, count)


def _is_antisymmetric(A: np.ndarray) -> bool:
    scale = max(1.0, float(np.abs(A).max()))
    return float(np.abs(A + A.T).max()) <= 1e-12 * scale


def propagator(A: np.ndarray, t: float) -> np.ndarray:
    """exp(A t), via the spectral path for antisymmetric A.

    A real antisymmetric matrix makes iA Hermitian, so the exponential
    can be assembled exactly from a Hermitian eigendecomposition; other
    matrices fall back to scaling-and-squaring.
    """
    A = np.asarray(A, dtype=float)
    if _is_antisymmetric(A):
        lam, V = np.linalg.eigh(1j * A)
        return ((V * np.exp(-1j * lam * t)) @ V.conj().T).real
    return scipy.linalg.expm(A * t)


def evolve_output(sys: LinearSystem, times: np.ndarray) -> np.ndarray:
    """y(t) = C exp(A t) B evaluated on a grid of times.

    Antisymmetric A (the spin-model case) uses one Hermitian
    eigendecomposition for the whole grid; the general case goes through
    scipy's scaling-and-squaring exponential per time point.
    """
    times = np.asarray(times, dtype=float)
    if _is_antisymmetric(sys.A):
        lam, V = np.linalg.eigh(1j * sys.A)
        u = V.conj().T @ sys.B.astype(complex)
        w = sys.C.astype(complex) @ V
        phases = np.exp(-1j * np.outer(times, lam))
        return np.real(phases @ (w * u))
    return np.array([sys.C @ (propagator(sys.A, t) @ sys.B) for t in times])


def _orth_columns(M: np.ndarray, cutoff: float) -> np.ndarray:
    """Orthonormal basis for the columns of M with singular values above cutoff."""
    if M.size == 0:
        return np.zeros((M.shape[0], 0))
    U, s, _ = np.linalg.svd(M, full_matrices=False)
    keep = s > cutoff
    return U[:, keep]


def _invariant_subspace(A: np.ndarray, V0: np.ndarray, rank_tol: float | None) -> np.ndarray:
    """Smallest A-invariant subspace containing range(V0), by orthogonal staircase.

    Each sweep orthogonalizes A applied to the current basis against the
    basis and keeps only directions above the deflation cutoff; this is
    the numerically safe substitute for rank decisions on the raw
    reachability matrix.
    """
    n = A.shape[0]
    scale = max(1.0, float(np.linalg.norm(A)), float(np.linalg.norm(V0)))
    cutoff = rank_tol if rank_tol is not None else n * _EPS * scale * 10
    Q = _orth_columns(np.atleast_2d(V0.reshape(n, -1)), cutoff)
    while 0 < Q.shape[1] < n:
        W = A @ Q
        W = W - Q @ (Q.T @ W)
        W = W - Q @ (Q.T @ W)
        Qn = _orth_columns(W, cutoff)
        if Qn.shape[1] == 0:
            break
        Q = np.hstack([Q, Qn])
    return Q


def _orth_complement(Q: np.ndarray, n: int) -> np.ndarray:
    if Q.shape[1] == 0:
        return np.eye(n)
    if Q.shape[1] == n:
        return np.zeros((n, 0))
    U, _, _ = np.linalg.svd(Q, full_matrices=True)
    return U[:, Q.shape[1]:]


@dataclass(frozen=True)
class DecompositionResult:
    """Kalman-style canonical form with the minimal part leading.

    ``transform`` is orthogonal and ``transformed`` equals
    similarity_transform(sys, transform). The leading
    ``minimal_dim`` states are controllable and observable;
    ``block_layout`` describes the ordering in words. ``ctrl_gap`` and
    ``obs_gap`` record the singular values bracketing each rank decision
    (diagnostics for near-degenerate instances).
    """

    transform: np.ndarray
    transformed: LinearSystem
    minimal_dim: int
    block_layout: str
    ctrl_dim: int
    ctrl_gap: tuple[float, float]
    obs_gap: tuple[float, float]

    def minimal(self) -> LinearSystem:
        m = self.minimal_dim
        if m < 1:
            raise DimensionError("decomposition has an empty minimal part")
        t = self.transformed
        return LinearSystem(t.A[:m, :m], t.B[:m], t.C[:m], t.D)


def _rank_gap(M: np.ndarray, r: int) -> tuple[float, float]:
    s = np.linalg.svd(M, compute_uv=False)
    kept = float(s[r - 1]) if r >= 1 else float("inf")
    dropped = float(s[r]) if r < s.size else 0.0
    return kept, dropped


def kalman_decompose(sys: LinearSystem, rank_tol: float | None = None) -> DecompositionResult:
    """Orthogonal decomposition into (minimal | controllable-unobservable | uncontrollable).

    The controllable subspace is grown from B by the staircase iteration,
    then the observable part of the restricted pair is split off the same
    way. Both stages use orthogonal bases, so the total transform is
    orthogonal and Markov parameters are preserved to roundoff.
    """
    n = sys.dim
    Qc = _invariant_subspace(sys.A, sys.B, rank_tol)
    r = Qc.shape[1]
    CM, OM = reachability_matrices(sys)
    ctrl_gap = _rank_gap(CM, r)

    if r == 0:
        obs_gap = (float("inf"), 0.0)
        return DecompositionResult(
            transform=np.eye(n),
            transformed=sys,
            minimal_dim=0,
            block_layout="uncontrollable(%d)" % n,
            ctrl_dim=0,
            ctrl_gap=ctrl_gap,
            obs_gap=obs_gap,
        )

    T1 = np.hstack([Qc, _orth_complement(Qc, n)])
    Ac = Qc.T @ sys.A @ Qc
    Cc = sys.C @ Qc

    Qo = _invariant_subspace(Ac.T, Cc.reshape(-1, 1), rank_tol)
    m = Qo.shape[1]
    OMc = np.empty((r, r))
    w = Cc.copy()
    for k in range(r):
        OMc[k, :] = w
        w = Ac.T @ w
    obs_gap = _rank_gap(OMc, m)

    V = np.hstack([Qo, _orth_complement(Qo, r)])
    P = np.zeros((n, n))
    P[:r, :] = V.T @ T1[:, :r].T
    P[r:, :] = T1[:, r:].T
    transformed = similarity_transform(sys, P)
    layout = f"minimal({m}) | controllable-unobservable({r - m}) | uncontrollable({n - r})"
    return DecompositionResult(
        transform=P,
        transformed=transformed,
        minimal_dim=m,
        block_layout=layout,
        ctrl_dim=r,
        ctrl_gap=ctrl_gap,
        obs_gap=obs_gap,
    )


@dataclass(frozen=True)
class ProbedMinimal:
    """Result of a minimal extraction that protects one entry of A."""

    minimal: LinearSystem
    preserved_entry: float
    stage_dims: tuple[int, int] = field(default=(0, 0))


def _observability_rows(A: np.ndarray, c: np.ndarray) -> np.ndarray:
    n = A.shape[0]
    OM = np.empty((n, n))
    w = c.copy()
    for k in range(n):
        OM[k, :] = w
        w = A.T @ w
    return OM


def _greedy_extend(M_cols: np.ndarray, pinned: list[int], target: int, cutoff: float) -> list[int]:
    """Grow an independent column set of M_cols starting from the pinned ones."""
    chosen = list(pinned)
    Q = np.linalg.qr(M_cols[:, chosen])[0]
    for c in range(M_cols.shape[1]):
        if len(chosen) >= target:
            break
        if c in chosen:
            continue
        v = M_cols[:, c].copy()
        v -= Q @ (Q.T @ v)
        v -= Q @ (Q.T @ v)
        nv = np.linalg.norm(v)
        if nv > cutoff:
            chosen.append(c)
            Q = np.hstack([Q, (v / nv).reshape(-1, 1)])
    if len(chosen) < target:
        raise ConditioningError(
            f"could not extend to {target} independent directions", cond=float("inf")
        )
    return chosen


def _observable_reduce(A: np.ndarray, same_index: bool, rank_tol: float | None) -> np.ndarray:
    """One observability-side reduction stage around the probed entry.

    The implicit system is (A, B=e2, C=e1^T) when ``same_index`` is False
    and (A, B=e1, C=e1^T) when it is True. Returns the leading observable
    block with the probed entry ((0,1) resp. (0,0)) carried over exactly:
    the first shear zeroes the protected column below the pivot rows, the
    state reordering keeps the pinned coordinates in place, and the final
    transform is block diagonal, so no arithmetic ever touches the entry.
    """
    n = A.shape[0]
    scale = max(1.0, float(np.abs(A).max()))

    if same_index:
        # One-dimensional observable part when the output row decouples.
        if np.all(np.abs(A[0, 1:]) <= 1e-14 * scale):
            return A[:1, :1].copy()
        Aw = A.copy()
    else:
        # Shear that clears the B-column below the first two rows. The
        # pivot A[0,1] is nonzero by the caller's atypicality check.
        t = A[2:, 1] / A[0, 1]
        Aw = A.copy()
        Aw[2:, :] -= np.outer(t, Aw[0, :])
        Aw[:, 0] += Aw[:, 2:] @ t
        Aw[2:, 1] = 0.0  # exact in exact arithmetic

    c = np.zeros(n)
    c[0] = 1.0
    OM = _observability_rows(Aw, c)
    svals = np.linalg.svd(OM, compute_uv=False)
    cutoff = rank_tol if rank_tol is not None else n * _EPS * max(svals[0], 1.0) * 10
    m = int(np.count_nonzero(svals > cutoff))
    if m == n:
        return Aw

    if same_index:
        # Pin the state the probe reads plus one column that keeps the
        # first two observability rows independent.
        c2 = 1 + int(np.argmax(np.abs(Aw[0, 1:])))
        pinned_cols = [0, c2]
    else:
        pinned_cols = [0, 1]
    col_order = _greedy_extend(OM, pinned_cols, m, cutoff)
    col_order += [c for c in range(n) if c not in col_order]
    perm = np.array(col_order)

    At = Aw[np.ix_(perm, perm)]
    OMt = OM[:, perm]

    row_order = _greedy_extend(OMt[:, :m].T, [0, 1], m, cutoff)
    E = OMt[row_order, :]
    F = E[:, :m]
    f = E[:, m:]
    Xs = np.linalg.solve(F, f)
    Xs[0, :] = 0.0  # row 0 of E is the output row, so this row vanishes exactly

    # Q = [[I, Xs], [0, I]] is the composition of the staircase split with
    # the block-diagonal normalization; only the leading block survives.
    return At[:m, :m] + Xs @ At[m:, :m]


def extract_probed_minimal(
    sys: LinearSystem,
    i: int,
    j: int,
    rank_tol: float | None = None,
    atypical_tol: float = 1e-12,
) -> ProbedMinimal:
    """Minimal subsystem of a probed realization, keeping A[i, j] intact.

    Requires the single-entry probe structure B = e_j, C = e_i^T. The
    reduction performs an observability stage and then the dual
    controllability stage; each stage combines a shear, a permutation
    that fixes the probe coordinates, and a block-diagonal normalization,
    which together guarantee the returned minimal system carries the
    original A[i, j] at the canonical position ((0,1) for i != j, (0,0)
    for i == j) without any floating-point modification.
    """
    n = sys.dim
    if not (0 <= i < n and 0 <= j < n):
        raise DimensionError(f"probe indices ({i}, {j}) outside dimension {n}")
    ei = np.zeros(n)
    ei[i] = 1.0
    ej = np.zeros(n)
    ej[j] = 1.0
    if not (np.array_equal(sys.B, ej) and np.array_equal(sys.C, ei)):
        raise DimensionError("probed extraction requires B = e_j and C = e_i^T exactly")

    scale = max(1.0, float(np.abs(sys.A).max()))
    same = i == j
    if not same and abs(sys.A[i, j]) <= atypical_tol * scale:
        raise AtypicalInstanceError(
            f"probed entry A[{i},{j}] = {sys.A[i, j]:.3e} is numerically zero; "
            "the preserving reduction needs it as a pivot"
        )

    if same:
        order = [i] + [k for k in range(n) if k != i]
    else:
        order = [i, j] + [k for k in range(n) if k not in (i, j)]
    perm = np.array(order)
    A0 = sys.A[np.ix_(perm, perm)]

    CM, OM = reachability_matrices(sys)
    if numerical_rank(CM, rank_tol) == n and numerical_rank(OM, rank_tol) == n:
        B0 = np.zeros(n)
        C0 = np.zeros(n)
        C0[0] = 1.0
        B0[0 if same else 1] = 1.0
        minimal = LinearSystem(A0, B0, C0, sys.D)
        entry = minimal.A[0, 0] if same else minimal.A[0, 1]
        return ProbedMinimal(minimal, float(entry), (n, n))

    A1 = _observable_reduce(A0, same, rank_tol)
    m1 = A1.shape[0]

    # Controllability stage through duality: transposing and (for i != j)
    # swapping the two probe coordinates lands back in the canonical
    # observability setting with the protected entry again at the pivot.
    if same:
        A2 = _observable_reduce(A1.T, True, rank_tol).T
    else:
        if m1 == 1:
            raise AtypicalInstanceError("observable part collapsed onto the probe row")
        swap = np.arange(m1)
        swap[[0, 1]] = [1, 0]
        Ad = A1[np.ix_(swap, swap)].T
        Ar = _observable_reduce(Ad, False, rank_tol)
        t = Ar.shape[0]
        swap_back = np.arange(t)
        swap_back[[0, 1]] = [1, 0]
        A2 = Ar[np.ix_(swap_back, swap_back)].T

    t = A2.shape[0]
    Bm = np.zeros(t)
    Cm = np.zeros(t)
    Cm[0] = 1.0
    Bm[0 if same else 1] = 1.0
    minimal = LinearSystem(A2, Bm, Cm, sys.D)
    entry = minimal.A[0, 0] if same else minimal.A[0, 1]
    return ProbedMinimal(minimal, float(entry), (m1, t))
