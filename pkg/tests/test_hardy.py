import numpy as np
import pytest

from dynframes import hardy, numkit
from dynframes.errors import CutoffTooSmall, Degenerate, NotInvariant, Overflow
from dynframes.frames import FrameSystem, frame_bounds, synthesis_kernel
from dynframes.inner import BlaschkeProduct, MatrixInner
from dynframes.operators import spectral_radius

from conftest import crandn, random_unitary

B = BlaschkeProduct.from_zeros
Z = MatrixInner.scalar(B([0]))
B05 = MatrixInner.scalar(B([0.5]))
DIAG_1B = MatrixInner.diag([B([]), B([0.5])])


def test_shift_backshift():
    H = hardy.TruncHardy(2, 5)
    const = H.vec(np.vstack([[1, 0], np.zeros((5, 2))]))
    assert hardy.backshift(const).norm() == 0
    s = hardy.shift(const)
    assert np.allclose(s.coeffs[1], [1, 0]) and np.allclose(s.coeffs[0], 0)


def test_backshift_shift_identity(rng):
    H = hardy.TruncHardy(3, 6)
    c = crandn(rng, 7, 3)
    c[-1] = 0
    f = H.vec(c)
    assert np.allclose(hardy.backshift(hardy.shift(f)).coeffs, c)
    assert np.isclose(f.norm() ** 2, np.sum(np.abs(c) ** 2))


def test_shift_overflow():
    H = hardy.TruncHardy(1, 3)
    with pytest.raises(Overflow):
        hardy.shift(H.vec(np.ones((4, 1))))


def test_invariant_subspace_examples():
    H = hardy.TruncHardy(1, 30)
    assert hardy.invariant_subspace(MatrixInner.constant(np.eye(1)), H).dim == 31
    M = hardy.invariant_subspace(Z, H)
    assert numkit.subspace_equal(M, numkit.Subspace(31, np.eye(31)[:, 1:].astype(complex)))
    M = hardy.invariant_subspace(B05, H)
    assert M.dim == 30 and numkit.subspace_complement(M).dim == 1


def test_mult_by_inner_matches_range(rng):
    H = hardy.TruncHardy(2, 20)
    Q = MatrixInner.product(random_unitary(rng, 2), [B([0.3]), B([0.5j])], random_unitary(rng, 2))
    c = np.zeros((21, 2), dtype=complex)
    c[:5] = crandn(rng, 5, 2)
    f = hardy.mult_by_inner(Q, H.vec(c))
    M = hardy.invariant_subspace(Q, H)
    assert M.contains(f.flat[:, None], 1e-10)
    assert np.isclose(f.norm(), np.linalg.norm(c), rtol=1e-6)


def test_model_space_of_z():
    H = hardy.TruncHardy(1, 20)
    N = hardy.model_space(Z, H)
    assert N.dim == 1 and np.allclose(hardy.compression(N).matrix, [[0]])


@pytest.mark.parametrize("zeros", [[0.5], [0.5, -0.5], [0.3 + 0.4j, -0.6]])
def test_compression_spectrum(zeros):
    N = hardy.model_space(MatrixInner.scalar(B(zeros)), hardy.TruncHardy(1, 40))
    assert N.dim == len(zeros)
    ev = np.linalg.eigvals(hardy.compression(N).matrix)
    for a in zeros:
        assert np.min(np.abs(ev - a)) <= 1e-6


def test_adjoint_compression_is_backshift():
    N = hardy.model_space(MatrixInner.scalar(B([0.5, 0.2j])), hardy.TruncHardy(1, 40))
    Sb = hardy.backshift_matrix(N.space)
    direct = N.B.conj().T @ Sb @ N.B
    assert np.linalg.norm(direct - hardy.adjoint_compression(N).matrix, 2) <= 1e-10


def test_cutoff_too_small():
    with pytest.raises(CutoffTooSmall):
        hardy.model_space(MatrixInner.scalar(B([0.5, 0.1])), hardy.TruncHardy(1, 9))


def test_basic_frame_examples():
    N = hardy.model_space(Z, hardy.TruncHardy(1, 20))
    sys = hardy.basic_frame(N)
    assert sys.count == 1 and frame_bounds(sys).is_parseval
    N = hardy.model_space(B05, hardy.TruncHardy(1, 40))
    assert frame_bounds(hardy.basic_frame(N)).parseval_defect <= 1e-6
    N = hardy.model_space(DIAG_1B, hardy.TruncHardy(2, 40))
    assert hardy.basic_frame(N).count == 1


def test_basic_frame_degenerate():
    N = hardy.model_space(MatrixInner.constant(np.eye(2)), hardy.TruncHardy(2, 10))
    with pytest.raises(Degenerate):
        hardy.basic_frame(N)


def test_adjoint_frame_examples():
    H = hardy.TruncHardy(1, 20)
    sys = hardy.adjoint_frame(Z, H)
    assert sys.count == 1 and frame_bounds(sys).is_parseval
    sys = hardy.adjoint_frame(B05, hardy.TruncHardy(1, 40))
    assert sys.count == 1 and frame_bounds(sys).parseval_defect <= 1e-6
    sys = hardy.adjoint_frame(DIAG_1B, hardy.TruncHardy(2, 40))
    assert sys.count == 1 and frame_bounds(sys).is_parseval


def test_wandering_examples():
    H = hardy.TruncHardy(2, 20)
    W, _ = hardy.wandering_subspace(hardy.invariant_subspace(MatrixInner.diag([B([0]), B([0])]), H), H)
    assert numkit.subspace_equal(W, numkit.Subspace(H.dim, np.eye(H.dim)[:, 2:4].astype(complex)))
    H1 = hardy.TruncHardy(1, 40)
    W, _ = hardy.wandering_subspace(hardy.invariant_subspace(B05, H1), H1)
    b = B([0.5]).coeffs(40)[:, None]
    assert W.dim == 1 and numkit.subspace_equal(W, numkit.subspace_span(b), 1e-6)
    H2 = hardy.TruncHardy(2, 40)
    W, _ = hardy.wandering_subspace(hardy.invariant_subspace(DIAG_1B, H2), H2)
    e1 = np.zeros((H2.dim, 1)); e1[0] = 1
    be2 = np.zeros((41, 2), dtype=complex)
    be2[:, 1] = B([0.5]).coeffs(40)
    assert numkit.subspace_equal(W, numkit.subspace_span(np.hstack([e1, be2.reshape(-1, 1)])), 1e-6)


def test_wandering_not_invariant(rng):
    H = hardy.TruncHardy(1, 20)
    M = numkit.subspace_span(crandn(rng, 21, 5))
    with pytest.raises(NotInvariant):
        hardy.wandering_subspace(M, H)


def test_full_range_examples():
    assert hardy.full_range_check(B05) == (True, 1)
    assert hardy.full_range_check(np.diag([1.0, 0.0])) == (False, 1)
    assert hardy.full_range_check(MatrixInner.diag([B([0.5]), B([-0.2j])]))[0]


def test_index_equalities_on_family(rng):
    family = [B05, DIAG_1B, MatrixInner.diag([B([0.5j]), B([0.3, -0.4])]),
              MatrixInner.product(random_unitary(rng, 2), [B([0.6]), B([0.2j])], random_unitary(rng, 2))]
    for Q in family:
        H = hardy.TruncHardy(Q.d, 50)
        N = hardy.model_space(Q, H)
        full, _ = hardy.full_range_check(Q)
        stable = spectral_radius(hardy.compression(N)) < 1
        pars = frame_bounds(hardy.adjoint_frame(Q, H, N)).parseval_defect <= 1e-6
        assert full and stable and pars


def test_script_L_examples():
    N = hardy.model_space(Z, hardy.TruncHardy(1, 20))
    L, neg = hardy.script_L(N)
    assert neg == 0 and numkit.subspace_equal(L, numkit.Subspace(21, np.eye(21)[:, 1:2].astype(complex)))
    for Q in (B05, DIAG_1B):
        H = hardy.TruncHardy(Q.d, 40)
        N = hardy.model_space(Q, H)
        W, _ = hardy.wandering_subspace(hardy.invariant_subspace(Q, H), H)
        K0, W1, K1 = hardy.wandering_decomposition(W, H)
        L, _ = hardy.script_L(N)
        assert L.dim == W1.dim == K1.dim == 1
        assert numkit.subspace_equal(L, W1, 1e-6)
    assert K0.dim == 1


def test_prop_frame_of_constants_gives_frame_of_model(rng):
    Q = MatrixInner.diag([B([0.5]), B([0.3j])])
    H = hardy.TruncHardy(2, 50)
    N = hardy.model_space(Q, H)
    G = crandn(rng, 2, 3)
    Kb = np.linalg.eigvalsh(G @ G.conj().T)
    consts = H.constants() @ G
    sys = FrameSystem(hardy.compression(N), N.B.conj().T @ consts)
    rep = frame_bounds(sys)
    assert Kb[0] * (1 - 1e-6) <= rep.lower and rep.upper <= Kb[-1] * (1 + 1e-6)


@pytest.mark.parametrize("zero, fixed", [(0.5, True), (0.5j, False)])
def test_synthesis_kernel_of_adjoint_frame(zero, fixed):
    q = MatrixInner.scalar(B([zero]))
    H = hardy.TruncHardy(1, 40)
    K = synthesis_kernel(hardy.adjoint_frame(q, H), 40)
    rho_range = hardy.invariant_subspace(q.rho(), H)
    assert numkit.subspace_equal(K, rho_range, 1e-6)
    assert numkit.subspace_equal(K, hardy.invariant_subspace(q, H), 1e-6) is fixed


def test_optimal_frames_examples():
    for T, count in ((np.array([[0, 1], [0, 0.0]]), 1), (np.diag([0.9, 0.5]), 2), (np.zeros((2, 2)), 2)):
        res = hardy.optimal_frames(T)
        assert res.for_T.count == res.for_T_adjoint.count == count
        assert frame_bounds(res.for_T).parseval_defect <= 1e-6
        assert frame_bounds(res.for_T_adjoint).parseval_defect <= 1e-6


def test_basic_of_adjoint():
    H = hardy.TruncHardy(1, 40)
    N_rho, ok = hardy.basic_of_adjoint(B05, H)
    assert ok and numkit.subspace_equal(N_rho.basis, hardy.model_space(B05, H).basis)
    qi = MatrixInner.scalar(B([0.5j]))
    N_rho, ok = hardy.basic_of_adjoint(qi, H)
    assert ok
    expected = hardy.model_space(MatrixInner.scalar(B([-0.5j])), H)
    assert numkit.subspace_equal(N_rho.basis, expected.basis, 1e-8)
