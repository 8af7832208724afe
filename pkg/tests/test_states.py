"""Tests for state constructors, validation, and family classification."""

import numpy as np
import numpy.testing as npt
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from entconv import qmat, states
from entconv.errors import NotHermitianError, OutOfRangeError
from entconv.states import (
    BellWeights,
    DensityMatrix,
    MemsWeights,
    WernerParam,
    classify_family,
    is_entangled,
    make_bell_diagonal,
    make_mems,
    make_werner,
    min_pt_eigenvalue,
    random_density_matrix,
    state_scalars,
)


def test_bell_vectors_are_orthonormal():
    g = states.BELL_VECTORS @ states.BELL_VECTORS.conj().T
    npt.assert_allclose(g, np.eye(4), atol=1e-15)


def test_bell_projectors_resolve_identity():
    total = sum(states.BELL_PROJECTORS)
    npt.assert_allclose(total, np.eye(4), atol=1e-15)


def test_werner_extremes():
    npt.assert_allclose(make_werner(1.0).matrix, states.SINGLET_PROJECTOR, atol=1e-15)
    npt.assert_allclose(make_werner(0.0).matrix, np.eye(4) / 4, atol=1e-15)


def test_werner_spectrum():
    w = 0.6
    values = make_werner(w).eig.values
    npt.assert_allclose(values, [(1 + 3 * w) / 4, (1 - w) / 4, (1 - w) / 4, (1 - w) / 4], atol=1e-12)


def test_werner_param_range():
    with pytest.raises(OutOfRangeError):
        WernerParam(-0.01)
    with pytest.raises(OutOfRangeError):
        make_werner(1.2)


def test_bell_diagonal_matrix_entries():
    rho = make_bell_diagonal((0.7, 0.1, 0.1, 0.1))
    m = rho.matrix
    # phi block carries (l2 +/- l3)/2, psi block carries (l1 + l4)/2 and (l4 - l1)/2
    npt.assert_allclose(m[0, 0], 0.1, atol=1e-15)
    npt.assert_allclose(m[0, 3], 0.0, atol=1e-15)
    npt.assert_allclose(m[1, 1], 0.4, atol=1e-15)
    npt.assert_allclose(m[1, 2], -0.3, atol=1e-15)
    npt.assert_allclose(rho.eig.values, [0.7, 0.1, 0.1, 0.1], atol=1e-12)


def test_bell_weights_validation():
    with pytest.raises(OutOfRangeError):
        BellWeights((0.2, 0.3, 0.3, 0.2))  # not non-ascending
    with pytest.raises(OutOfRangeError):
        BellWeights((0.7, 0.2, 0.1, 0.1))  # sums to 1.1
    with pytest.raises(OutOfRangeError):
        BellWeights((0.7, 0.4, -0.05, -0.05))
    with pytest.raises(OutOfRangeError):
        BellWeights((0.7, 0.2, 0.1))


def test_mems_matrix_shape():
    m = make_mems((0.5, 0.2, 0.2, 0.1)).matrix
    npt.assert_allclose(np.diag(m), [0.2, 0.35, 0.25, 0.2], atol=1e-15)
    npt.assert_allclose(m[1, 2], -0.15, atol=1e-15)
    npt.assert_allclose(m[0, 3], 0.0, atol=1e-15)


def test_mems_weights_are_not_eigenvalues():
    # the singlet projector overlaps the l2/l4 terms, so the spectrum of the
    # rank-2 member (0.9, 0.1, 0, 0) is not (0.9, 0.1): its purity is 0.91
    rho = make_mems((0.9, 0.1, 0.0, 0.0))
    npt.assert_allclose(rho.purity(), 0.91, atol=1e-12)
    assert rho.rank() == 2
    expected = (1 + np.sqrt(0.82)) / 2
    npt.assert_allclose(rho.eig.values[0], expected, atol=1e-12)


def test_density_matrix_validation():
    bad = np.eye(4, dtype=complex) / 4
    bad[0, 1] = 0.1
    with pytest.raises(NotHermitianError):
        DensityMatrix(bad)
    with pytest.raises(OutOfRangeError):
        DensityMatrix(np.eye(4, dtype=complex) / 3.9)
    with pytest.raises(OutOfRangeError):
        DensityMatrix(np.diag([0.6, 0.6, -0.2, 0.0]).astype(complex))
    with pytest.raises(OutOfRangeError):
        DensityMatrix(np.eye(2, dtype=complex) / 2)


def test_density_matrix_array_is_readonly():
    rho = make_werner(0.5)
    with pytest.raises(ValueError):
        rho.matrix[0, 0] = 1.0


def test_state_scalars_extremes():
    singlet = state_scalars(make_werner(1.0))
    npt.assert_allclose(singlet.purity, 1.0, atol=1e-12)
    npt.assert_allclose(singlet.entropy, 0.0, atol=1e-9)
    assert singlet.rank == 1
    mixed = state_scalars(make_werner(0.0))
    npt.assert_allclose(mixed.purity, 0.25, atol=1e-12)
    npt.assert_allclose(mixed.entropy, 2.0, atol=1e-12)
    assert mixed.rank == 4


def test_min_pt_eigenvalue_werner_closed_form():
    for w in (0.0, 0.2, 1 / 3, 0.5, 0.9, 1.0):
        npt.assert_allclose(min_pt_eigenvalue(make_werner(w)), (1 - 3 * w) / 4, atol=1e-12)


def test_entanglement_thresholds():
    assert not is_entangled(make_werner(0.2))
    assert not is_entangled(make_werner(1 / 3))
    assert is_entangled(make_werner(1 / 3 + 1e-6))
    assert is_entangled(make_werner(1.0))
    assert not is_entangled(make_bell_diagonal((0.5, 0.5, 0.0, 0.0)))
    assert is_entangled(make_bell_diagonal((0.51, 0.49, 0.0, 0.0)))
    assert is_entangled(make_mems((0.9, 0.1, 0.0, 0.0)))
    assert not is_entangled(np.eye(4, dtype=complex) / 4)


def test_classify_werner():
    tag = classify_family(make_werner(0.3))
    assert tag.kind == "werner"
    npt.assert_allclose(tag.params.w, 0.3, atol=1e-10)


def test_classify_bell_diagonal():
    tag = classify_family(make_bell_diagonal((0.6, 0.2, 0.15, 0.05)))
    assert tag.kind == "bell_diagonal"
    npt.assert_allclose(tag.params.weights, (0.6, 0.2, 0.15, 0.05), atol=1e-10)


def test_classify_mems():
    tag = classify_family(make_mems((0.5, 0.2, 0.2, 0.1)))
    assert tag.kind == "mems"
    npt.assert_allclose(tag.params.weights, (0.5, 0.2, 0.2, 0.1), atol=1e-10)


def test_classify_prefers_narrowest_family():
    # equal bell weights after the first make a Werner state even when built
    # through the other constructors
    tag = classify_family(make_bell_diagonal((0.7, 0.1, 0.1, 0.1)))
    assert tag.kind == "werner"
    npt.assert_allclose(tag.params.w, 0.6, atol=1e-10)
    tag = classify_family(make_mems((0.4, 0.2, 0.2, 0.2)))
    assert tag.kind == "werner"
    npt.assert_allclose(tag.params.w, 0.2, atol=1e-10)


def test_classify_general():
    psi_plus = states.BELL_PROJECTORS[3]
    mixed = 0.5 * np.diag([1.0, 0, 0, 0]).astype(complex) + 0.5 * psi_plus
    assert classify_family(DensityMatrix(mixed)).kind == "general"
    assert classify_family(random_density_matrix(5)).kind == "general"


def test_classification_round_trip_reconstruction():
    rho = make_mems((0.55, 0.25, 0.15, 0.05))
    tag = classify_family(rho)
    assert tag.kind == "mems"
    npt.assert_allclose(make_mems(tag.params).matrix, rho.matrix, atol=1e-8)


def test_bell_weights_of_detects_off_diagonal_mass():
    weights, residual = states.bell_weights_of(make_bell_diagonal((0.4, 0.3, 0.2, 0.1)))
    npt.assert_allclose(weights, [0.4, 0.3, 0.2, 0.1], atol=1e-12)
    assert residual < 1e-12
    _, residual = states.bell_weights_of(np.diag([1.0, 0, 0, 0]).astype(complex))
    assert residual > 0.5


def test_random_density_matrix_rank_and_reproducibility():
    for rank in (1, 2, 3, 4):
        rho = random_density_matrix(123, rank=rank)
        assert rho.rank() == rank
    a = random_density_matrix(7).matrix
    b = random_density_matrix(7).matrix
    assert np.array_equal(a, b)
    with pytest.raises(OutOfRangeError):
        random_density_matrix(0, rank=5)


simplex_raw = st.lists(
    st.floats(min_value=0.01, max_value=1.0, allow_nan=False), min_size=4, max_size=4
)


@settings(max_examples=50, deadline=None)
@given(simplex_raw)
def test_bell_diagonal_classification_closure(raw):
    weights = tuple(sorted((x / sum(raw) for x in raw), reverse=True))
    rho = make_bell_diagonal(weights)
    tag = classify_family(rho)
    assert tag.kind in ("werner", "bell_diagonal")
    if tag.kind == "bell_diagonal":
        npt.assert_allclose(tag.params.weights, weights, atol=1e-8)


@settings(max_examples=50, deadline=None)
@given(st.integers(min_value=0, max_value=10 ** 9))
def test_random_states_are_valid(seed):
    rho = random_density_matrix(seed)
    assert abs(np.trace(rho.matrix) - 1.0) < 1e-12
    assert rho.eig.values[-1] > -1e-10
    assert qmat.frobenius_distance(rho.matrix, qmat.dag(rho.matrix)) < 1e-12
