import numpy as np
import pytest

from spinid.errors import DimensionError, ResourceLimitError
from spinid.linsys import evolve_output
from spinid.pauli import I, X, Y, Z, PauliString
from spinid.spin_models import (
    Family,
    HamiltonianSpec,
    Measurement,
    accessible_set,
    build_linear_model,
    calibrate_convention,
    canonical_state_basis,
    field_coupling_matrix,
    hamiltonian_matrix,
    hamiltonian_terms,
    measured_observable,
    parameter_locations,
    quantum_oracle_trace,
    rearrange_block_form,
    structure_matrix,
)

NOFIELD = Family.EXCHANGE_NO_FIELD
FIELD = Family.EXCHANGE_WITH_FIELD


def test_spec_validation():
    with pytest.raises(DimensionError):
        HamiltonianSpec(NOFIELD, 2, (1.0,))
    with pytest.raises(DimensionError):
        HamiltonianSpec(NOFIELD, 0, ())
    with pytest.raises(DimensionError):
        HamiltonianSpec(FIELD, 2, (1.0, 2.0))
    with pytest.raises(DimensionError):
        HamiltonianSpec(NOFIELD, 2, (1.0, 2.0), Measurement.Y1)
    with pytest.raises(DimensionError):
        HamiltonianSpec("exchange_no_field", 1, (1.0,))


def test_qubit_count_and_dim():
    assert HamiltonianSpec(NOFIELD, 3, (1, 2, 3)).qubit_count == 4
    assert HamiltonianSpec(FIELD, 3, (1, 2, 3)).qubit_count == 2
    assert HamiltonianSpec(FIELD, 5, (1, 2, 3, 4, 5)).qubit_count == 3
    assert HamiltonianSpec(NOFIELD, 3, (1, 2, 3)).dim == 4
    assert HamiltonianSpec(FIELD, 5, (1, 2, 3, 4, 5)).dim == 6


def test_canned_matrix_no_field():
    a, b = 1.3, -0.4
    sys = build_linear_model(HamiltonianSpec(NOFIELD, 2, (a, b)))
    expected = np.array([[0, a, 0], [-a, 0, b], [0, -b, 0]])
    assert np.array_equal(sys.A, expected)
    assert np.array_equal(sys.B, [1, 0, 0])
    assert np.array_equal(sys.C, [1, 0, 0])


def test_canned_matrix_field_wrap_entries():
    f1, c2, f3 = 0.7, 1.1, -0.2
    sys = build_linear_model(HamiltonianSpec(FIELD, 3, (f1, c2, f3)))
    expected = np.array(
        [
            [0, f1, 0, -c2],
            [-f1, 0, c2, 0],
            [0, -c2, 0, f3],
            [c2, 0, -f3, 0],
        ]
    )
    assert np.array_equal(sys.A, expected)


def test_y1_measurement_reads_second_state():
    spec = HamiltonianSpec(FIELD, 3, (0.7, 1.1, -0.2), Measurement.Y1)
    sys = build_linear_model(spec)
    assert np.array_equal(sys.C, [0, 1, 0, 0])
    # second canonical state is -Y_1, so the model output carries a sign
    basis = canonical_state_basis(spec)
    assert basis[1].letters == (Y, I)
    assert basis[1].phase == -1
    assert calibrate_convention(spec).measurement_sign == -1


def test_accessible_set_matches_model_dimension():
    for spec in [
        HamiltonianSpec(NOFIELD, 1, (0.9,)),
        HamiltonianSpec(NOFIELD, 4, (0.9, 1.1, -0.3, 0.5)),
        HamiltonianSpec(FIELD, 5, (1.0, 0.5, -0.7, 0.2, 1.3)),
        HamiltonianSpec(FIELD, 3, (1.0, 0.5, -0.7), Measurement.Y1),
    ]:
        acc = accessible_set(spec)
        assert len(acc) == spec.dim
        assert acc.elements[0].letters == measured_observable(spec).letters
        assert acc.generations[0] == 0
        assert all(p.phase == 1 for p in acc.elements)


def test_calibration_covers_both_families():
    specs = [HamiltonianSpec(NOFIELD, n, tuple(0.3 * k + 0.5 for k in range(n))) for n in range(1, 7)]
    specs += [
        HamiltonianSpec(FIELD, n, tuple(0.4 * k - 0.9 for k in range(n)), m)
        for n in (1, 3, 5, 7)
        for m in (Measurement.X1, Measurement.Y1)
    ]
    for spec in specs:
        conv = calibrate_convention(spec)
        assert sorted(conv.permutation) == list(range(spec.dim))
        assert conv.basis_scale == 2.0 ** (-spec.qubit_count / 2.0)
        expected_sign = -1 if spec.measurement is Measurement.Y1 else 1
        assert conv.measurement_sign == expected_sign


def test_structure_matrix_rejects_bad_bases():
    spec = HamiltonianSpec(NOFIELD, 2, (1.0, 1.0))
    terms = hamiltonian_terms(spec)
    basis = canonical_state_basis(spec)
    with pytest.raises(DimensionError):
        structure_matrix(terms, basis[:-1])  # closure leaves the span
    with pytest.raises(DimensionError):
        structure_matrix(terms, basis + (basis[0].with_phase(-1),))


def test_oracle_agrees_with_compressed_model():
    # brute-force density-matrix evolution vs the (n+1)-dim realization;
    # a 401-point sweep of every <=4-qubit spec stays below 6e-15
    times = np.linspace(0.0, 5.0, 161)
    specs = [
        HamiltonianSpec(NOFIELD, 1, (0.9,)),
        HamiltonianSpec(NOFIELD, 2, (1.0, -0.6)),
        HamiltonianSpec(NOFIELD, 3, (0.4, 1.2, -0.8)),
        HamiltonianSpec(FIELD, 3, (1.0, 0.7, -0.5)),
        HamiltonianSpec(FIELD, 3, (1.0, 0.7, -0.5), Measurement.Y1),
        HamiltonianSpec(FIELD, 5, (0.3, -1.1, 0.8, 0.6, -0.4)),
        HamiltonianSpec(FIELD, 7, (0.3, -1.1, 0.8, 0.6, -0.4, 1.2, 0.9), Measurement.Y1),
    ]
    for spec in specs:
        model = evolve_output(build_linear_model(spec), times)
        oracle = quantum_oracle_trace(spec, times)
        assert np.max(np.abs(model - oracle)) < 1e-12


def test_brute_force_limit():
    spec = HamiltonianSpec(NOFIELD, 4, (1.0, 1.0, 1.0, 1.0))  # 5 qubits
    with pytest.raises(ResourceLimitError):
        hamiltonian_matrix(spec)
    with pytest.raises(ResourceLimitError):
        quantum_oracle_trace(spec, [0.0, 1.0])


def test_block_form_recovers_coupling_matrix():
    theta = (0.7, 1.1, -0.2)
    sys = build_linear_model(HamiltonianSpec(FIELD, 3, theta))
    block = rearrange_block_form(sys)
    assert block.permutation == (0, 2, 1, 3)
    assert np.array_equal(block.abar, field_coupling_matrix(theta))
    nu = sys.dim // 2
    A = block.system.A
    assert np.array_equal(A[:nu, :nu], np.zeros((nu, nu)))
    assert np.array_equal(A[nu:, nu:], np.zeros((nu, nu)))
    assert np.array_equal(A[nu:, :nu], -block.abar)


def test_block_form_rejects_no_field_pattern():
    sys = build_linear_model(HamiltonianSpec(NOFIELD, 3, (0.4, 1.2, -0.8)))
    with pytest.raises(DimensionError):
        rearrange_block_form(sys)
    odd = build_linear_model(HamiltonianSpec(NOFIELD, 2, (1.0, 1.0)))
    with pytest.raises(DimensionError):
        rearrange_block_form(odd)


def test_field_coupling_matrix_values():
    f1, c2, f3 = 0.7, 1.1, -0.2
    expected = np.array([[f1, -c2], [-c2, f3]])
    assert np.array_equal(field_coupling_matrix((f1, c2, f3)), expected)
    with pytest.raises(DimensionError):
        field_coupling_matrix((1.0, 2.0))


def test_parameter_locations_cover_every_entry():
    theta = (0.7, 1.1, -0.2)
    spec = HamiltonianSpec(FIELD, 3, theta)
    locs = parameter_locations(spec)
    assert locs[2] == [(0, 3, -1.0), (1, 2, 1.0), (2, 1, -1.0), (3, 0, 1.0)]
    A = build_linear_model(spec).A
    rebuilt = np.zeros_like(A)
    for i, entries in locs.items():
        for r, c, coeff in entries:
            assert A[r, c] == coeff * theta[i - 1]
            rebuilt[r, c] = coeff * theta[i - 1]
    assert np.array_equal(rebuilt, A)
