import numpy as np
import pytest
from hypothesis import given, strategies as st

from spinid.errors import DimensionError
from spinid.pauli import I, X, Y, Z, PauliString, normalized_inner, pauli_commutator

SINGLE = {
    "I": np.eye(2, dtype=complex),
    "X": np.array([[0, 1], [1, 0]], dtype=complex),
    "Y": np.array([[0, -1j], [1j, 0]], dtype=complex),
    "Z": np.array([[1, 0], [0, -1]], dtype=complex),
}


def test_labels_round_trip():
    p = PauliString.from_label("XIZY")
    assert p.label == "XIZY"
    assert p.letters == (X, I, Z, Y)
    assert p.phase == 1


def test_single_site_products_match_matrices():
    for a in "IXYZ":
        for b in "IXYZ":
            p = PauliString.from_label(a) * PauliString.from_label(b)
            expected = SINGLE[a] @ SINGLE[b]
            assert np.allclose(p.phase * SINGLE[p.label], expected)


def test_multi_site_product_is_sitewise():
    p = PauliString.from_label("XY")
    q = PauliString.from_label("YY")
    r = p * q
    # XY * YY = (XY) tensor (YY) = (iZ) tensor I
    assert r.label == "ZI"
    assert r.phase == 1j


@given(
    st.lists(st.integers(0, 3), min_size=1, max_size=5),
    st.lists(st.integers(0, 3), min_size=1, max_size=5),
)
def test_product_matches_matrix_representation(aa, bb):
    n = max(len(aa), len(bb))
    aa = aa + [I] * (n - len(aa))
    bb = bb + [I] * (n - len(bb))
    p = PauliString(tuple(aa))
    q = PauliString(tuple(bb))
    assert np.allclose((p * q).to_matrix(), p.to_matrix() @ q.to_matrix())


def test_commutes_with():
    assert PauliString.from_label("XX").commutes_with(PauliString.from_label("YY"))
    assert not PauliString.from_label("XI").commutes_with(PauliString.from_label("YI"))
    assert PauliString.from_label("ZZ").commutes_with(PauliString.from_label("ZZ"))


def test_commutator_of_commuting_strings_is_zero():
    coeff, _ = pauli_commutator(
        PauliString.from_label("XX"), PauliString.from_label("YY")
    )
    assert coeff == 0


def test_commutator_values():
    # [X, Y] = 2iZ
    coeff, s = pauli_commutator(PauliString.from_label("X"), PauliString.from_label("Y"))
    assert s.label == "Z"
    assert coeff == 2j
    # [XX, YI] = [X,Y] tensor X = 2i ZX
    coeff, s = pauli_commutator(
        PauliString.from_label("XX"), PauliString.from_label("YI")
    )
    assert s.label == "ZX"
    assert coeff == 2j


def test_commutator_matches_matrices():
    rng = np.random.default_rng(5)
    for _ in range(30):
        n = int(rng.integers(1, 4))
        p = PauliString(tuple(int(v) for v in rng.integers(0, 4, n)))
        q = PauliString(tuple(int(v) for v in rng.integers(0, 4, n)))
        coeff, s = pauli_commutator(p, q)
        mp, mq = p.to_matrix(), q.to_matrix()
        assert np.allclose(coeff * s.to_matrix(), mp @ mq - mq @ mp)


def test_normalized_inner_is_orthonormal_indicator():
    p = PauliString.from_label("XZ")
    assert normalized_inner(p, p) == 1
    assert normalized_inner(p, PauliString.from_label("XY")) == 0
    scaled = p.with_phase(-1j)
    assert normalized_inner(p, scaled) == pytest.approx(-1j)


def test_invalid_labels_rejected():
    with pytest.raises(ValueError):
        PauliString.from_label("XQ")
    with pytest.raises(DimensionError):
        PauliString(())
