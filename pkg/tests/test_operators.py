import numpy as np
import pytest

from dynframes import instances
from dynframes.errors import Borderline, Singular, ValidationError
from dynframes.operators import (admissibility, dense, diagonal, op_norm, similarity_transform,
                                 spectral_radius)

from conftest import crandn, random_unitary

J2 = np.array([[0, 1], [0, 0.0]])


@pytest.mark.parametrize("T, norm, rho", [
    (diagonal([0.9, 0.5]), 0.9, 0.9),
    (dense(J2), 1.0, 0.0),
    (instances.non_contraction_operator([0.5, 0.25]), 2.0, 0.5),
])
def test_norm_and_radius(T, norm, rho):
    assert np.isclose(op_norm(T), norm)
    assert np.isclose(spectral_radius(T), rho)


def test_operator_is_immutable():
    T = dense(np.eye(2))
    with pytest.raises(ValueError):
        T.matrix[0, 0] = 3.0


def test_admissibility_contraction():
    rep = admissibility(diagonal([0.9, 0.5]))
    assert rep.admits_parseval and rep.admits_frame and rep.is_contraction


def test_admissibility_identity_has_no_frame():
    rep = admissibility(dense(np.eye(3)))
    assert not rep.admits_frame and not rep.admits_parseval


def test_admissibility_non_contraction_frame_only():
    rep = admissibility(instances.non_contraction_operator(instances.circle_lambdas(6, 0.9)))
    assert not rep.admits_parseval and rep.admits_frame
    assert rep.norm == pytest.approx(2.0, abs=1e-10)


def test_admissibility_borderline_non_unitary():
    with pytest.raises(Borderline):
        admissibility(dense([[1.0, 1.0], [0.0, 0.5]]))


def test_admissibility_tol_range():
    with pytest.raises(ValidationError):
        admissibility(diagonal([0.5]), tol=0.5)


def test_admissibility_unstable():
    rep = admissibility(diagonal([1.5, 0.2]))
    assert not rep.admits_frame and not rep.admits_parseval


def test_admissibility_implication(rng):
    for _ in range(50):
        A = crandn(rng, 4, 4) * rng.uniform(0.1, 0.6)
        rep = admissibility(dense(A))
        assert (not rep.admits_parseval) or rep.admits_frame
        assert rep.admits_parseval == (rep.is_contraction and rep.adjoint_strongly_stable)


def test_similarity_identity_and_unitary(rng):
    T = diagonal([0.9, 0.5, 0.1j])
    assert np.allclose(similarity_transform(T, np.eye(3)).matrix, T.matrix)
    U = random_unitary(rng, 3)
    S = similarity_transform(T, U)
    assert np.allclose(np.linalg.svd(S.matrix, compute_uv=False), [0.9, 0.5, 0.1])


def test_similarity_preserves_spectrum(rng):
    T = dense(crandn(rng, 5, 5) * 0.2)
    for _ in range(10):
        V = np.eye(5) + 0.3 * crandn(rng, 5, 5) / 5
        assert np.linalg.cond(V) <= 10
        S = similarity_transform(T, V)
        assert abs(spectral_radius(S) - spectral_radius(T)) <= 1e-9
        assert admissibility(S).admits_frame == admissibility(T).admits_frame


def test_similarity_singular():
    with pytest.raises(Singular):
        similarity_transform(diagonal([0.5, 0.5]), np.array([[1.0, 1.0], [1.0, 1.0]]))
