"""End-to-end acceptance criteria.

Each test checks one headline claim at its stated tolerance and prints a
single PASS/FAIL line with the measured numbers (run pytest -s to see
the lines for passing criteria too). Numeric thresholds marked "pinned"
were frozen from reference runs performed before this suite existed;
they are regression tripwires, not tunables.
"""

import time

import numpy as np
import pytest

from spinid.estimator import (
    ExperimentConfig,
    ParameterizedSystem,
    default_error_scaling_spec,
    identify_hamiltonian,
    run_error_scaling,
    truncation_bound,
)
from spinid.identifiability import (
    SearchBudget,
    VerdictStatus,
    assess_identifiability,
    atypicality_probe,
    validate_certificate,
)
from spinid.linsys import (
    LinearSystem,
    extract_probed_minimal,
    markov_scale,
    reachability_matrices,
    scaled_markov_parameters,
    similarity_transform,
    evolve_output,
)
from spinid.spin_models import (
    Family,
    HamiltonianSpec,
    Measurement,
    build_linear_model,
    quantum_oracle_trace,
)


def _line(num: int, ok: bool, detail: str) -> None:
    print(f"criterion {num}: {'PASS' if ok else 'FAIL'} - {detail}")
    assert ok, f"criterion {num}: {detail}"


def _random_theta(rng, n):
    return tuple(rng.uniform(0.3, 2.0, n) * rng.choice([-1.0, 1.0], n))


def test_criterion_1_error_scaling_trend():
    # 5-qubit reference chain, N = 10..100, 100 noisy repeats, seed 42.
    # Endpoint means pinned from the reference run; the trend plus the
    # 5%-magnitude claim at the largest N are the acceptance conditions.
    start = time.monotonic()
    spec = default_error_scaling_spec()
    grid = tuple(range(10, 101, 10))
    points = run_error_scaling(spec, grid, repeats=100, seed=42)
    means = [p.mean_rel_error for p in points]

    theta = np.asarray(spec.theta)
    cfg = ExperimentConfig(dt=0.1, n_samples=100, noise_sigma=0.001, seed=42)
    worst_gap = 0.0
    for r in range(100):
        res = identify_hamiltonian(spec, cfg, repeat_index=r)
        gap = float(np.linalg.norm(np.abs(res.theta_hat) - np.abs(theta)))
        worst_gap = max(worst_gap, gap)
    elapsed = time.monotonic() - start

    ok = (
        abs(means[0] - 0.0173846904207) <= 1e-6
        and abs(means[-1] - 0.0169674135779) <= 1e-6
        and means[-1] < means[0]
        and all(m > 0 for m in means)
        and worst_gap <= 0.05 * float(np.linalg.norm(theta))
        and elapsed < 120.0
    )
    _line(
        1,
        ok,
        f"mean(N=10)={means[0]:.6g} mean(N=100)={means[-1]:.6g} "
        f"(pinned, decreasing), worst |theta| gap {worst_gap:.4g} <= "
        f"{0.05 * float(np.linalg.norm(theta)):.4g}, {elapsed:.1f}s",
    )


def test_criterion_2_verdicts_match_theory():
    combos = [
        (Family.EXCHANGE_NO_FIELD, Measurement.X1, VerdictStatus.IDENTIFIABLE),
        (Family.EXCHANGE_WITH_FIELD, Measurement.X1, VerdictStatus.UNIDENTIFIABLE),
        (Family.EXCHANGE_WITH_FIELD, Measurement.Y1, VerdictStatus.IDENTIFIABLE),
    ]
    budget = SearchBudget(starts=8, seed=0)
    agree = 0
    total = 0
    cert_ok = True
    for n in (3, 5, 7):
        for trial in range(20):
            rng = np.random.default_rng([n, trial])
            theta = _random_theta(rng, n)
            for family, measurement, expected in combos:
                spec = HamiltonianSpec(family, n, theta, measurement)
                verdict = assess_identifiability(spec, budget)
                total += 1
                if verdict.status is expected:
                    agree += 1
                if expected is VerdictStatus.UNIDENTIFIABLE:
                    report = validate_certificate(verdict.certificate)
                    cert_ok = cert_ok and report["ok"] \
                        and report["markov_distance"] <= 1e-8 \
                        and report["magnitude_gap"] >= 1e-6
    ok = agree == total and cert_ok
    _line(2, ok, f"{agree}/{total} verdicts agree with theory; certificates valid: {cert_ok}")


def test_criterion_3_reachability_determinant_law():
    rng = np.random.default_rng(33)
    worst = 0.0
    for n in range(2, 9):
        for _ in range(50):
            theta = np.asarray(_random_theta(rng, n))
            spec = HamiltonianSpec(Family.EXCHANGE_NO_FIELD, n, tuple(theta))
            CM, _ = reachability_matrices(build_linear_model(spec))
            det = float(np.linalg.det(CM))
            law = float(
                np.prod([(-1.0) ** k * np.prod(theta[:k]) for k in range(1, n + 1)])
            )
            worst = max(worst, abs(det - law) / abs(det))
    ok = worst <= 1e-10
    _line(3, ok, f"worst relative deviation {worst:.3e} <= 1e-10 over n=2..8, 50 draws each")


def test_criterion_4_quantum_oracle_agreement():
    times = np.linspace(0.0, 5.0, 500)
    cases = [(Family.EXCHANGE_NO_FIELD, n, Measurement.X1) for n in (1, 2)]
    cases += [
        (Family.EXCHANGE_WITH_FIELD, n, m)
        for n in (1, 3, 5)
        for m in (Measurement.X1, Measurement.Y1)
    ]
    rng = np.random.default_rng(44)
    worst = 0.0
    checked = 0
    for family, n, measurement in cases:
        for _ in range(5):
            spec = HamiltonianSpec(family, n, _random_theta(rng, n), measurement)
            assert spec.qubit_count <= 3
            y_lin = evolve_output(build_linear_model(spec), times)
            y_orc = quantum_oracle_trace(spec, times)
            worst = max(worst, float(np.max(np.abs(y_lin - y_orc))))
            checked += 1
    ok = worst <= 1e-9
    _line(4, ok, f"max |linear - oracle| {worst:.3e} <= 1e-9 over {checked} specs, 500 points")


def test_criterion_5_entry_preserving_identification():
    # random non-minimal embeddings probed at one entry: the minimal
    # extraction must carry the entry across unchanged, and the full
    # noiseless pipeline must recover it, sign included, within the
    # reported truncation_bound * amplification envelope
    rng = np.random.default_rng(7)
    cfg = ExperimentConfig(dt=0.05, n_samples=60, q=21)
    worst_entry = 0.0
    worst_est = 0.0
    worst_ratio = 0.0
    sign_fails = 0
    for _ in range(100):
        m = int(rng.integers(2, 7))
        extra = int(rng.integers(1, 6))
        n = m + extra
        assert n <= 12
        A = np.zeros((n, n))
        A[:m, :m] = rng.normal(size=(m, m))
        A[:m, m:] = rng.normal(size=(m, extra))
        A[m:, m:] = rng.normal(size=(extra, extra))
        perm = rng.permutation(n)
        inv = np.argsort(perm)
        P = np.eye(n)[perm]
        A = P @ A @ P.T
        A *= rng.uniform(0.8, 1.5) / np.linalg.norm(A)
        i, j = int(inv[0]), int(inv[1])
        truth = float(A[i, j])

        B = np.zeros(n)
        B[j] = 1.0
        C = np.zeros(n)
        C[i] = 1.0
        pm = extract_probed_minimal(LinearSystem(A, B, C), i, j)
        worst_entry = max(worst_entry, abs(pm.preserved_entry - truth))

        res = identify_hamiltonian(ParameterizedSystem(A, {1: [(i, j, 1.0)]}), cfg)
        est = res.theta_hat[0]
        report = res.per_entry[(i, j)]
        envelope = report.bound.bound * report.amplification
        worst_est = max(worst_est, abs(est - truth))
        worst_ratio = max(worst_ratio, abs(est - truth) / envelope)
        if np.sign(est) != np.sign(truth):
            sign_fails += 1
    ok = worst_entry <= 1e-10 and worst_ratio <= 1.0 and sign_fails == 0
    _line(
        5,
        ok,
        f"entry drift {worst_entry:.3e} <= 1e-10, worst |est-truth| {worst_est:.3e}, "
        f"worst error/envelope {worst_ratio:.3e} <= 1, sign failures {sign_fails}/100",
    )


def test_criterion_6_atypicality_frequencies():
    freqs = {
        p: atypicality_probe(p, n=5, samples=10_000, seed=123)
        for p in ("zero_eigenvalue", "eigenvalue_pair_sum_zero", "multiple_eigenvalues")
    }
    ok = all(f == 0.0 for f in freqs.values())
    _line(6, ok, "frequencies " + ", ".join(f"{k}={v:g}" for k, v in freqs.items()))


def test_criterion_7_markov_similarity_invariance():
    rng = np.random.default_rng(77)
    worst = 0.0
    for _ in range(200):
        n = int(rng.integers(2, 9))
        sys = LinearSystem(
            rng.normal(size=(n, n)), rng.normal(size=n), rng.normal(size=n)
        )
        P = np.eye(n) + 0.1 * rng.normal(size=(n, n))
        other = similarity_transform(sys, P)
        scale = markov_scale(sys)
        a = scaled_markov_parameters(sys, 2 * n, scale)
        b = scaled_markov_parameters(other, 2 * n, scale)
        worst = max(worst, float(np.max(np.abs(a - b)) / max(1.0, np.max(np.abs(a)))))
    ok = worst <= 1e-10
    _line(7, ok, f"worst scaled Markov deviation {worst:.3e} <= 1e-10 over 200 systems")
