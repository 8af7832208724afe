"""Tests for protocol atoms, separable channels, and the extremal catalog."""

import numpy as np
import numpy.testing as npt
import pytest

from entconv import channels, qmat
from entconv.channels import (
    DiscardPrepare,
    LocalUnitary,
    ProbabilisticBranch,
    Protocol,
    SeparableChannel,
    bell_extremal_catalog,
    compile_protocol,
    discard_prepare_channel,
    local_unitary_channel,
    mix,
    product_diagonal_decomposition,
    renormalize_probabilistic,
)
from entconv.errors import (
    BadWeightsError,
    NotProductDiagonalError,
    NotSeparableError,
    NotTracePreservingError,
    NotUnitaryError,
)
from entconv.measures import negativity
from entconv.states import (
    BELL_PROJECTORS,
    DensityMatrix,
    bell_weights_of,
    make_bell_diagonal,
    make_werner,
    random_density_matrix,
)


def haar_qubit_unitary(rng):
    g = rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2))
    q, r = np.linalg.qr(g)
    return q * (np.diag(r) / np.abs(np.diag(r)))


def test_local_unitary_rejects_non_unitary():
    with pytest.raises(NotUnitaryError):
        LocalUnitary(np.eye(2) * 1.01, np.eye(2))


def test_discard_prepare_rejects_entangled_target():
    with pytest.raises(NotSeparableError):
        DiscardPrepare(make_werner(0.9))
    with pytest.raises(NotSeparableError):
        discard_prepare_channel(make_werner(0.9))


def test_protocol_weight_validation():
    atom = LocalUnitary(np.eye(2), np.eye(2))
    with pytest.raises(BadWeightsError):
        Protocol(((0.5, atom), (0.4, atom)))
    with pytest.raises(BadWeightsError):
        Protocol(((1.5, atom), (-0.5, atom)))
    with pytest.raises(BadWeightsError):
        Protocol(())


def test_protocol_apply_mixes_atoms():
    sigma = DensityMatrix(np.diag([0.25, 0.35, 0.25, 0.15]).astype(complex))
    proto = Protocol(
        (
            (0.7, LocalUnitary(np.eye(2), np.eye(2))),
            (0.3, DiscardPrepare(sigma)),
        )
    )
    rho = make_werner(0.5)
    out = proto.apply(rho)
    expected = 0.7 * rho.matrix + 0.3 * sigma.matrix
    npt.assert_allclose(out.matrix, expected, atol=1e-12)


def test_renormalize_probabilistic_worked_example():
    # equal mixture of an always-successful unitary and a half-successful
    # prepare conditions to weights (2/3, 1/3) at success 3/4, exactly
    unitary = LocalUnitary(np.eye(2), np.eye(2))
    prepare = DiscardPrepare(DensityMatrix(np.eye(4, dtype=complex) / 4))
    proto, success = renormalize_probabilistic(
        [
            ProbabilisticBranch(0.5, 1.0, unitary),
            ProbabilisticBranch(0.5, 0.5, prepare),
        ]
    )
    assert success == 0.75
    assert proto.branches[0][0] == 2 / 3
    assert proto.branches[1][0] == 1 / 3


def test_renormalize_probabilistic_drops_dead_branches():
    unitary = LocalUnitary(np.eye(2), np.eye(2))
    prepare = DiscardPrepare(DensityMatrix(np.eye(4, dtype=complex) / 4))
    proto, success = renormalize_probabilistic(
        [
            ProbabilisticBranch(0.5, 0.8, unitary),
            ProbabilisticBranch(0.5, 0.0, prepare),
        ]
    )
    assert success == 0.4
    assert len(proto.branches) == 1
    assert proto.branches[0][0] == 1.0
    with pytest.raises(BadWeightsError):
        renormalize_probabilistic([ProbabilisticBranch(1.0, 0.0, unitary)])


def test_separable_channel_completeness_check():
    with pytest.raises(NotTracePreservingError):
        SeparableChannel([(np.eye(2) * 0.9, np.eye(2))])
    ch = SeparableChannel([(np.eye(2), np.eye(2))])
    assert ch.n_kraus == 1
    assert not ch.locc_certified


def test_unitary_channel_action():
    rng = np.random.default_rng(3)
    ua, ub = haar_qubit_unitary(rng), haar_qubit_unitary(rng)
    ch = local_unitary_channel(ua, ub)
    assert ch.locc_certified
    rho = random_density_matrix(8)
    u = qmat.kron2(ua, ub)
    npt.assert_allclose(ch.apply(rho).matrix, u @ rho.matrix @ u.conj().T, atol=1e-12)


def test_local_unitaries_preserve_negativity():
    rng = np.random.default_rng(5)
    for seed in range(10):
        rho = random_density_matrix(seed, rank=rng.integers(1, 5))
        ch = local_unitary_channel(haar_qubit_unitary(rng), haar_qubit_unitary(rng))
        npt.assert_allclose(negativity(ch.apply(rho)), negativity(rho), atol=1e-10)


def test_discard_prepare_is_constant():
    sigma = DensityMatrix(np.diag([0.4, 0.3, 0.2, 0.1]).astype(complex))
    ch = discard_prepare_channel(sigma)
    assert ch.locc_certified
    for seed in (0, 1):
        out = ch.apply(random_density_matrix(seed))
        npt.assert_allclose(out.matrix, sigma.matrix, atol=1e-12)


def test_product_decomposition_shapes():
    # nondegenerate diagonal, 2-fold, 3-fold, and 4-fold degenerate cases
    for diag in ([0.4, 0.3, 0.2, 0.1], [0.3, 0.3, 0.25, 0.15], [0.4, 0.2, 0.2, 0.2], [0.25] * 4):
        terms = product_diagonal_decomposition(np.diag(diag).astype(complex))
        recon = sum(p * np.outer(np.kron(a, b), np.kron(a, b).conj()) for p, a, b in terms)
        npt.assert_allclose(recon, np.diag(diag), atol=1e-10)


def test_product_decomposition_bell_pair_mixture():
    # the psi+/psi- pair spans the computational vectors |01> and |10>
    target = 0.5 * BELL_PROJECTORS[0] + 0.5 * BELL_PROJECTORS[3]
    terms = product_diagonal_decomposition(target)
    assert len(terms) == 2
    kets = sorted(np.argmax(np.abs(np.kron(a, b))) for _, a, b in terms)
    assert kets == [1, 2]


def test_product_decomposition_refuses_entangled():
    with pytest.raises(NotProductDiagonalError):
        product_diagonal_decomposition(make_werner(0.8).matrix)


def test_product_decomposition_refuses_skew_separable():
    # separable, but the eigenbasis is not product: mixture of |00> and |++>
    plus = np.array([1, 1], dtype=complex) / np.sqrt(2)
    vpp = np.kron(plus, plus)
    m = np.zeros((4, 4), dtype=complex)
    m[0, 0] = 0.6
    m += 0.4 * np.outer(vpp, vpp.conj())
    with pytest.raises(NotProductDiagonalError):
        product_diagonal_decomposition(m)


def test_catalog_shape_and_certification():
    cat = bell_extremal_catalog()
    assert len(cat) == 13
    assert all(ch.locc_certified for ch in cat)
    assert all(ch.bell_action is not None for ch in cat)
    for ch in cat:
        col_sums = ch.bell_action.sum(axis=0)
        npt.assert_allclose(col_sums, np.ones(4), atol=1e-12)
        assert np.all(ch.bell_action >= 0)


def test_catalog_pauli_permutations():
    cat = bell_extremal_catalog()
    # channel 2 is the B-side sigma_x rotation: psi- <-> phi-
    ch = cat[2]
    out = ch.apply(DensityMatrix(BELL_PROJECTORS[0]))
    npt.assert_allclose(out.matrix, BELL_PROJECTORS[2], atol=1e-12)
    out = ch.apply(DensityMatrix(BELL_PROJECTORS[1]))
    npt.assert_allclose(out.matrix, BELL_PROJECTORS[3], atol=1e-12)


def test_catalog_closes_over_bell_diagonal_states():
    rng = np.random.default_rng(11)
    cat = bell_extremal_catalog()
    weights = np.sort(rng.dirichlet(np.ones(4)))[::-1]
    rho = make_bell_diagonal(tuple(weights))
    for ch in cat:
        out = ch.apply(rho)
        got, residual = bell_weights_of(out)
        assert residual < 1e-10
        npt.assert_allclose(got, ch.bell_action @ np.asarray(weights), atol=1e-10)


def test_bell_action_validation_rejects_wrong_matrix():
    with pytest.raises(ValueError):
        SeparableChannel(
            [(qmat.SIGMA_X, qmat.EYE2)], bell_action=np.eye(4)
        )


def test_mix_weights_validation():
    cat = bell_extremal_catalog()
    with pytest.raises(BadWeightsError):
        mix([cat[0], cat[1]], [0.6, 0.6])
    with pytest.raises(BadWeightsError):
        mix([cat[0]], [0.5, 0.5])


def test_mix_combines_actions():
    cat = bell_extremal_catalog()
    ch = mix([cat[0], cat[7]], [0.7, 0.3])
    assert ch.locc_certified
    npt.assert_allclose(ch.bell_action, 0.7 * cat[0].bell_action + 0.3 * cat[7].bell_action, atol=1e-14)
    rho = make_bell_diagonal((0.6, 0.2, 0.15, 0.05))
    expected = 0.7 * cat[0].apply(rho).matrix + 0.3 * cat[7].apply(rho).matrix
    npt.assert_allclose(ch.apply(rho).matrix, expected, atol=1e-12)


def test_compile_protocol_matches_direct_application():
    sigma = DensityMatrix(np.diag([0.3, 0.3, 0.25, 0.15]).astype(complex))
    proto = Protocol(
        (
            (0.81, LocalUnitary(np.eye(2), np.eye(2))),
            (0.19, DiscardPrepare(sigma)),
        )
    )
    ch = compile_protocol(proto)
    assert ch.locc_certified
    for seed in (2, 9):
        rho = random_density_matrix(seed)
        npt.assert_allclose(ch.apply(rho).matrix, proto.apply(rho).matrix, atol=1e-11)
