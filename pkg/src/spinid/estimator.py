"""Entry-wise identification from short sampled measurement traces.

One probe setting (B = e_k, C = e_j^T) exposes the single entry A_jk as
the first Taylor coefficient of the measured trace: y(p dt) = delta_jk
+ sum_r (p dt)^r / r! (A^r)_jk. Truncating at order q turns each trace
into one small least-squares problem whose first solved coefficient is
the entry estimate; sweeping the probe over one representative entry per
parameter reconstructs the whole Hamiltonian. The truncation tail obeys
an explicit bound, reported alongside each estimate together with the
design's noise-amplification factor.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
import scipy.special

from .errors import AtypicalInstanceError, ConditioningError, DimensionError
from .linsys import LinearSystem, propagator
from .spin_models import HamiltonianSpec, build_linear_model, parameter_locations

_EPS = np.finfo(float).eps


def default_truncation_order(n_samples: int) -> int:
    """The floor(0.3 N) + 3 rule used throughout the experiments."""
    return int(0.3 * n_samples) + 3


@dataclass(frozen=True)
class ExperimentConfig:
    """Sampling setup: period, data length, truncation order, noise, repeats.

    ``q`` defaults to the floor(0.3 N) + 3 rule when left as None and
    must never exceed the data length.
    """

    dt: float
    n_samples: int
    q: int | None = None
    noise_sigma: float = 0.0
    repeats: int = 1
    seed: int = 0

    def __post_init__(self):
        if self.dt <= 0:
            raise DimensionError("sampling period must be positive")
        if self.n_samples < 2:
            raise DimensionError("need at least two samples")
        if self.noise_sigma < 0:
            raise DimensionError("noise level cannot be negative")
        if self.repeats < 1:
            raise DimensionError("repeats must be at least 1")
        q = self.resolved_q
        if not 1 <= q <= self.n_samples:
            raise DimensionError(
                f"truncation order {q} outside [1, {self.n_samples}]"
            )

    @property
    def resolved_q(self) -> int:
        return self.q if self.q is not None else default_truncation_order(self.n_samples)


@dataclass(frozen=True)
class DataTrace:
    """Sampled output (y(dt), y(2 dt), ..., y(N dt)) of one probe setting.

    ``y0`` is the exact order-zero Taylor term C B (1 when the probe
    reads its own input coordinate, else 0); the fit subtracts it rather
    than estimating it. ``noise_sigma`` records the known per-sample
    noise level (0 means the samples are exact up to roundoff); the
    solver uses it to decide how deep into the design spectrum it may
    safely reach. ``source`` is a human-readable probe label.
    """

    values: np.ndarray
    dt: float
    y0: float
    noise_sigma: float = 0.0
    source: str = ""

    def __post_init__(self):
        v = np.asarray(self.values, dtype=float)
        v.setflags(write=False)
        object.__setattr__(self, "values", v)
        if v.ndim != 1 or v.size < 1:
            raise DimensionError("trace must be a nonempty vector")
        if self.noise_sigma < 0:
            raise DimensionError("noise level cannot be negative")


def simulate_trace(
    sys: LinearSystem,
    cfg: ExperimentConfig,
    rng: np.random.Generator | None = None,
    source: str = "",
) -> DataTrace:
    """Sample y(p dt) for p = 1..N, plus optional i.i.d. Gaussian noise.

    The uniform grid is walked with repeated applications of the single
    propagator exp(A dt), so the cost is one matrix exponential plus N
    matrix-vector products. Noise is drawn from ``rng`` when given,
    otherwise from a generator seeded with cfg.seed.
    """
    M = propagator(sys.A, cfg.dt)
    v = sys.B.copy()
    vals = np.empty(cfg.n_samples)
    for p in range(cfg.n_samples):
        v = M @ v
        vals[p] = sys.C @ v
    if cfg.noise_sigma > 0:
        if rng is None:
            rng = np.random.default_rng(cfg.seed)
        vals += rng.normal(0.0, cfg.noise_sigma, cfg.n_samples)
    return DataTrace(
        values=vals,
        dt=cfg.dt,
        y0=float(sys.C @ sys.B),
        noise_sigma=cfg.noise_sigma,
        source=source,
    )


@lru_cache(maxsize=64)
def _design_factorization(dt: float, n_samples: int, q: int):
    """Column-scaled SVD of the Taylor design matrix L[p-1, r-1] = p^r dt^r / r!.

    Cached because every probe of an experiment shares the same (dt, N, q)
    design; the factorization dominates the per-trace cost otherwise.
    """
    p = np.arange(1, n_samples + 1, dtype=float)
    L = np.empty((n_samples, q))
    col = p * dt
    L[:, 0] = col
    for r in range(2, q + 1):
        col = col * (p * dt / r)
        L[:, r - 1] = col
    norms = np.linalg.norm(L, axis=0)
    U, s, Vt = np.linalg.svd(L / norms, full_matrices=False)
    for a in (L, norms, U, s, Vt):
        a.setflags(write=False)
    return L, norms, U, s, Vt


@lru_cache(maxsize=64)
def _stable_design(n_samples: int, q: int):
    """Column-scaled SVD of the same column space in a Chebyshev basis.

    The monomial design spans the degree-q polynomials vanishing at t=0;
    so do phi_m(t) = T_m(2 t / T - 1) - T_m(-1), m = 1..q, but with a
    condition number that stays small instead of growing factorially.
    The grid x_p = 2 p / N - 1 does not depend on dt, so neither does
    the factorization.
    """
    x = 2.0 * np.arange(1, n_samples + 1) / n_samples - 1.0
    V = np.polynomial.chebyshev.chebvander(x, q)
    signs = (-1.0) ** np.arange(q + 1)
    Phi = V[:, 1:] - signs[1:]
    norms = np.linalg.norm(Phi, axis=0)
    U, s, Vt = np.linalg.svd(Phi / norms, full_matrices=False)
    for a in (norms, U, s, Vt):
        a.setflags(write=False)
    return norms, U, s, Vt


def _estimate_exact(trace: DataTrace, d: np.ndarray, q: int, amp_threshold: float):
    """Full-order least squares, solved in the stable basis.

    In exact arithmetic this is the same minimizer as the monomial-basis
    problem; reparameterizing just avoids inverting a factorially
    ill-conditioned matrix. The first Taylor coefficient of the fit is
    read off through the derivative-at-zero functional, whose weights
    grow only like m^2.
    """
    n = d.size
    norms, U, s, Vt = _stable_design(n, q)
    horizon = n * trace.dt
    m = np.arange(1, q + 1)
    g = ((-1.0) ** (m + 1)) * m * m * (2.0 / horizon) / norms
    cutoff = max(n, q) * _EPS * s[0]
    keep = s > cutoff
    wcoef = (Vt[keep, :] @ g) / s[keep]
    amplification = float(np.linalg.norm(wcoef) * math.sqrt(n))
    if amplification > amp_threshold:
        raise ConditioningError(
            f"Taylor design at q={q}, N={n}, dt={trace.dt:g} is too "
            f"ill-conditioned to resolve the probed entry: noise "
            f"amplification {amplification:.3e} exceeds "
            f"{amp_threshold:.1e}; reduce q or increase dt*N",
            cond=amplification,
        )
    proj = U[:, keep].T @ d
    entry = float(wcoef @ proj)
    cs = Vt[keep, :].T @ (proj / s[keep])
    residual = float(np.linalg.norm(U[:, keep] @ proj - d))
    # Taylor coefficients of the fitted polynomial, for the full psi_hat:
    # assemble in x, then substitute x = 2 t / T - 1. Trailing orders
    # inherit the monomial basis's conditioning; the entry does not.
    c_cheb = np.zeros(q + 1)
    c_cheb[1:] = cs / norms
    poly_x = np.polynomial.chebyshev.cheb2poly(c_cheb)
    poly_x[0] -= float(((-1.0) ** m) @ (cs / norms))
    composed = np.polynomial.Polynomial(poly_x)(
        np.polynomial.Polynomial([-1.0, 2.0 / horizon])
    )
    psi = np.zeros(q)
    coef = composed.coef[1 : q + 1]
    psi[: coef.size] = coef
    cond = float(s[0] / s[keep][-1])
    return EntryEstimate(
        psi_hat=psi,
        entry_estimate=entry,
        residual_norm=residual,
        amplification=amplification,
        condition=cond,
    )


@dataclass(frozen=True)
class EntryEstimate:
    """Least-squares read-out of one probed entry.

    ``amplification`` converts any per-sample data error bound into a
    bound on the entry estimate: |error in entry| <= amplification *
    max_p |error in sample p|. ``condition`` is the condition number of
    the column-scaled design actually inverted.
    """

    psi_hat: np.ndarray
    entry_estimate: float
    residual_norm: float
    amplification: float
    condition: float


def estimate_entry(
    trace: DataTrace, q: int | None = None, amplification_threshold: float = 1e6
) -> EntryEstimate:
    """Fit the truncated Taylor model to a trace; the first coefficient is A_jk.

    Solves min over psi of |(D - y0) - L psi|. Exact traces (noise_sigma
    0) are solved at full order through a stable reparameterization of
    the same problem, so the bias is the intrinsic least-squares bias.
    Noisy traces are solved in the column-scaled monomial basis with
    singular values below the max(N, q) * eps floor dropped: those
    directions carry data at or below the roundoff scale and only
    amplify noise, so the floored minimum-norm solution is the usable
    one. The guarded quantity is the amplification factor: after column
    scaling the design's plain condition number no longer depends on dt
    and is capped by the floor, so the number that actually decides
    whether the first coefficient is readable is its noise amplification.
    Past ``amplification_threshold`` the grid cannot resolve the entry;
    reduce q or increase dt * N.
    """
    n = trace.values.size
    if q is None:
        q = default_truncation_order(n)
    if not 1 <= q <= n:
        raise DimensionError(f"truncation order {q} outside [1, {n}]")
    d = trace.values - trace.y0
    if trace.noise_sigma == 0.0:
        return _estimate_exact(trace, d, q, amplification_threshold)
    L, norms, U, s, Vt = _design_factorization(trace.dt, n, q)
    cutoff = max(n, q) * _EPS * s[0]
    keep = s > cutoff
    cond = float(s[0] / s[keep][-1])
    amplification = float(
        np.linalg.norm(Vt[keep, 0] / s[keep]) / norms[0] * math.sqrt(n)
    )
    if amplification > amplification_threshold:
        raise ConditioningError(
            f"Taylor design at q={q}, N={n}, dt={trace.dt:g} is too "
            f"ill-conditioned to resolve the probed entry: noise "
            f"amplification {amplification:.3e} exceeds "
            f"{amplification_threshold:.1e}; reduce q or increase dt*N",
            cond=amplification,
        )
    coeffs = (U[:, keep].T @ d) / s[keep]
    psi_scaled = Vt[keep, :].T @ coeffs
    psi = psi_scaled / norms
    residual = float(np.linalg.norm(L @ psi - d))
    return EntryEstimate(
        psi_hat=psi,
        entry_estimate=float(psi[0]),
        residual_norm=residual,
        amplification=amplification,
        condition=cond,
    )


@dataclass(frozen=True)
class TruncationBound:
    """Tail bound data for the order-q Taylor truncation over N samples."""

    w: float
    z: int
    q: int
    bound: float


def truncation_bound(norm_a: float, dt: float, n_samples: int, q: int) -> TruncationBound:
    """Bound on the per-sample remainder beyond Taylor order q.

    With w = N |A| dt e and z = 1 + max(floor(w), q), the remainder of
    every sample is at most (2 pi (q+1))^(-1/2) [sum_{r=q+1}^{z-1} (w/r)^r
    + (w/z)^z / (1 - w/z)]; z > w makes the closing geometric tail valid.
    Evaluated in log space since the summands overflow long before the
    conclusion does. |A| is the Frobenius norm.
    """
    if norm_a < 0 or dt <= 0 or n_samples < 1 or q < 1:
        raise DimensionError("bound needs norm_a >= 0, dt > 0, N >= 1, q >= 1")
    w = n_samples * norm_a * dt * math.e
    if w == 0.0:
        return TruncationBound(w=0.0, z=q + 1, q=q, bound=0.0)
    z = 1 + max(int(math.floor(w)), q)
    logs = [r * (math.log(w) - math.log(r)) for r in range(q + 1, z)]
    logs.append(z * (math.log(w) - math.log(z)) - math.log(1.0 - w / z))
    log_bound = float(scipy.special.logsumexp(logs)) - 0.5 * math.log(
        2.0 * math.pi * (q + 1)
    )
    bound = math.inf if log_bound > 700.0 else math.exp(log_bound)
    return TruncationBound(w=w, z=z, q=q, bound=bound)


@dataclass(frozen=True)
class ParameterizedSystem:
    """A raw system matrix with known parameter occupancy.

    ``locations`` maps 1-based parameter indices to the (row, col,
    coefficient) triples where A[row, col] = coefficient * theta_i; the
    same contract parameter_locations produces for the chain families.
    """

    A: np.ndarray
    locations: dict[int, list[tuple[int, int, float]]]

    def __post_init__(self):
        A = np.array(self.A, dtype=float)
        A.setflags(write=False)
        object.__setattr__(self, "A", A)
        if A.ndim != 2 or A.shape[0] != A.shape[1]:
            raise DimensionError("A must be square")
        for i, occ in self.locations.items():
            if not occ:
                raise DimensionError(f"parameter {i} has no locations")
            for r, c, coeff in occ:
                if not (0 <= r < A.shape[0] and 0 <= c < A.shape[0]):
                    raise DimensionError(f"location ({r},{c}) outside A")
                if coeff == 0:
                    raise DimensionError(f"parameter {i} has a zero coefficient")


@dataclass(frozen=True)
class EntryReport:
    """Everything measured while estimating one entry of A."""

    estimate: float
    residual_norm: float
    amplification: float
    condition: float
    bound: TruncationBound


@dataclass(frozen=True)
class EstimationResult:
    """Full reconstruction: parameter estimates plus per-entry diagnostics.

    ``relative_error`` is Frobenius |A_hat - A| / |A| against the true
    matrix. ``norm_source`` records which norm fed the truncation
    bounds ("true" here, since the generating model is always known to
    the simulator).
    """

    theta_hat: tuple[float, ...]
    per_entry: dict[tuple[int, int], EntryReport]
    relative_error: float
    norm_source: str = "true"


def _resolve_model(model) -> tuple[np.ndarray, dict[int, list[tuple[int, int, float]]]]:
    if isinstance(model, HamiltonianSpec):
        return build_linear_model(model).A, parameter_locations(model)
    if isinstance(model, ParameterizedSystem):
        return model.A, model.locations
    raise DimensionError(
        f"model must be a HamiltonianSpec or ParameterizedSystem, got {type(model).__name__}"
    )


def identify_hamiltonian(
    model: HamiltonianSpec | ParameterizedSystem,
    cfg: ExperimentConfig,
    repeat_index: int = 0,
) -> EstimationResult:
    """Reconstruct every parameter from one trace per parameter.

    Each parameter is probed at its first row-major occurrence (r, c):
    the simulated system is (A, B=e_c, C=e_r^T), and the fitted first
    Taylor coefficient divided by the occurrence coefficient estimates
    theta_i. Noise streams are derived from (seed, N, repeat, parameter),
    so results are reproducible regardless of evaluation order.
    """
    A, locations = _resolve_model(model)
    dim = A.shape[0]
    q = cfg.resolved_q
    norm_a = float(np.linalg.norm(A))
    bound = truncation_bound(norm_a, cfg.dt, cfg.n_samples, q)

    entry_scale = max(1.0, float(np.max(np.abs(A))))
    theta_hat = []
    per_entry: dict[tuple[int, int], EntryReport] = {}
    for param in sorted(locations):
        r, c, coeff = locations[param][0]
        if abs(A[r, c]) <= 1e-12 * entry_scale:
            raise AtypicalInstanceError(
                f"probed entry ({r},{c}) for parameter {param} vanishes; "
                "zero parameters lie on the atypical surface where the "
                "probe cannot recover a sign"
            )
        B = np.zeros(dim)
        B[c] = 1.0
        C = np.zeros(dim)
        C[r] = 1.0
        rng = np.random.default_rng([cfg.seed, cfg.n_samples, repeat_index, param])
        trace = simulate_trace(
            LinearSystem(A, B, C), cfg, rng=rng, source=f"entry ({r},{c})"
        )
        try:
            est = estimate_entry(trace, q)
        except ConditioningError as exc:
            raise ConditioningError(
                f"estimating entry ({r},{c}) for parameter {param}: {exc}",
                cond=exc.cond,
            ) from exc
        theta_hat.append(est.entry_estimate / coeff)
        per_entry[(r, c)] = EntryReport(
            estimate=est.entry_estimate,
            residual_norm=est.residual_norm,
            amplification=est.amplification,
            condition=est.condition,
            bound=bound,
        )

    A_hat = np.zeros_like(A)
    for param, occ in locations.items():
        for r, c, coeff in occ:
            A_hat[r, c] = coeff * theta_hat[param - 1]
    rel = float(np.linalg.norm(A_hat - A) / norm_a) if norm_a > 0 else 0.0
    return EstimationResult(
        theta_hat=tuple(theta_hat), per_entry=per_entry, relative_error=rel
    )


@dataclass(frozen=True)
class ErrorScalingPoint:
    """One grid point of the error-versus-data-length experiment."""

    n_samples: int
    mean_rel_error: float
    std_rel_error: float
    repeats: int
    seed: int


def default_error_scaling_spec() -> HamiltonianSpec:
    """The 5-qubit chain the error-scaling experiment runs on by default."""
    from .spin_models import Family

    return HamiltonianSpec(Family.EXCHANGE_NO_FIELD, 4, (0.1, 1.5, -0.8, 3.1))


def run_error_scaling(
    model,
    grid,
    repeats: int,
    seed: int,
    dt: float = 0.1,
    noise_sigma: float = 0.001,
    q: int | None = None,
) -> list[ErrorScalingPoint]:
    """Mean relative reconstruction error over a grid of data lengths.

    For each N in the grid, runs ``repeats`` independent noisy
    identifications and averages the relative errors; q follows the
    floor(0.3 N) + 3 rule unless pinned. Deterministic in ``seed``.
    """
    points = []
    for n_samples in grid:
        cfg = ExperimentConfig(
            dt=dt,
            n_samples=int(n_samples),
            q=q,
            noise_sigma=noise_sigma,
            repeats=repeats,
            seed=seed,
        )
        errors = np.array(
            [
                identify_hamiltonian(model, cfg, repeat_index=rep).relative_error
                for rep in range(repeats)
            ]
        )
        points.append(
            ErrorScalingPoint(
                n_samples=int(n_samples),
                mean_rel_error=float(errors.mean()),
                std_rel_error=float(errors.std()),
                repeats=repeats,
                seed=seed,
            )
        )
    return points


CSV_HEADER = "N,mean_rel_error,std_rel_error,repeats,seed"


def error_scaling_csv(points: list[ErrorScalingPoint]) -> str:
    """Render grid results as CSV, 12 significant digits, byte-stable."""
    lines = [CSV_HEADER]
    for pt in points:
        lines.append(
            "%d,%.12g,%.12g,%d,%d"
            % (pt.n_samples, pt.mean_rel_error, pt.std_rel_error, pt.repeats, pt.seed)
        )
    return "\n".join(lines) + "\n"
