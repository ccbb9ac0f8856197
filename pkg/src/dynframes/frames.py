"""Frames of iterates ``{T^n v_i}``."""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import numkit
from .errors import (CertificateFailed, DimensionMismatch, NotAFrame,
                     TailNotCertified, Unstable, ValidationError)
from .operators import OperatorSpec, spectral_radius

FRAME_TOL = 1e-8
PARSEVAL_TOL = 1e-8


@dataclass(frozen=True)
class ExactStein:
    """Frame operator from the Stein equation (needs spectral radius < 1)."""


@dataclass(frozen=True)
class Series:
    """Frame operator from the first ``max_power + 1`` powers.

    The neglected tail must be certified below ``tail_tol`` (relative to the
    generator Gram sum).
    """

    max_power: int
    tail_tol: float = 1e-12


@dataclass(frozen=True)
class FrameSystem:
    operator: OperatorSpec
    generators: np.ndarray
    horizon: object = field(default_factory=ExactStein)

    def __post_init__(self):
        T = OperatorSpec.from_any(self.operator)
        object.__setattr__(self, "operator", T)
        G = numkit.as_matrix(self.generators, "generators")
        if G.shape[0] != T.dim:
            raise DimensionMismatch(f"generators have {G.shape[0]} rows, operator dim {T.dim}")
        if G.shape[1] < 1:
            raise ValidationError("a frame system needs at least one generator")
        if np.any(np.linalg.norm(G, axis=0) == 0.0):
            raise ValidationError("zero generator column")
        G.setflags(write=False)
        object.__setattr__(self, "generators", G)

    @property
    def dim(self):
        return self.operator.dim

    @property
    def count(self):
        return self.generators.shape[1]

    def gram_sum(self):
        G = self.generators
        return G @ G.conj().T


@dataclass(frozen=True)
class FrameReport:
    lower: float
    upper: float
    is_frame: bool
    is_parseval: bool
    frame_operator: np.ndarray
    tail_bound: float
    parseval_defect: float
    stein_residual: float

    def summary(self):
        return {
            "lower_bound": self.lower,
            "upper_bound": self.upper,
            "is_frame": self.is_frame,
            "is_parseval": self.is_parseval,
            "tail_bound": self.tail_bound,
            "parseval_defect": self.parseval_defect,
            "stein_residual": self.stein_residual,
        }


def _frame_operator(sys):
    T = sys.operator.matrix
    V = sys.gram_sum()
    pol = sys.horizon
    if isinstance(pol, Series):
        tail = numkit.orbit_tail_bound(T, pol.max_power) * float(np.linalg.norm(V, 2))
        if not tail <= pol.tail_tol * max(1.0, float(np.linalg.norm(V, 2))):
            raise TailNotCertified(
                f"tail bound {tail:.3e} after {pol.max_power} powers exceeds {pol.tail_tol:g}")
        return numkit.stein_series(T, V, pol.max_power), tail
    if spectral_radius(sys.operator) >= 1.0 - 1e-10:
        raise Unstable("ExactStein horizon needs spectral radius below 1")
    return numkit.stein_solve(T, V), 0.0


def frame_operator(sys):
    """Frame operator ``S = sum_{n,i} T^n v_i (T^n v_i)^*``."""
    return _frame_operator(sys)[0]


def stein_residual(sys, S):
    T = sys.operator.matrix
    R = S - T @ S @ T.conj().T - sys.gram_sum()
    return float(np.linalg.norm(R, 2))


def frame_bounds(sys, parseval_tol=PARSEVAL_TOL):
    """Optimal frame bounds, i.e. the extreme eigenvalues of ``S``."""
    S, tail = _frame_operator(sys)
    w = np.linalg.eigvalsh(S)
    lower, upper = float(w[0]), float(w[-1])
    defect = float(np.linalg.norm(S - np.eye(sys.dim), 2))
    is_frame = upper > 0 and lower > FRAME_TOL * upper
    return FrameReport(
        lower=lower,
        upper=upper,
        is_frame=bool(is_frame),
        is_parseval=bool(defect <= parseval_tol),
        frame_operator=S,
        tail_bound=tail,
        parseval_defect=defect,
        stein_residual=stein_residual(sys, S),
    )


def synthesis_matrix(sys, M):
    """Columns ``T^n v_i`` for ``n = 0..M``, power-major and generator-minor."""
    if M < 1:
        raise ValidationError("horizon must be at least 1")
    T = sys.operator.matrix
    G = np.array(sys.generators)
    blocks = []
    for _ in range(M + 1):
        blocks.append(G)
        G = T @ G
    return np.hstack(blocks)


def synthesis_kernel(sys, M, tol=None):
    """Right null space of :func:`synthesis_matrix` in coefficient space."""
    return numkit.null_space(synthesis_matrix(sys, M), tol)


def reconstruct(sys, x, M):
    """Canonical-dual reconstruction from the first ``M + 1`` powers.

    Returns ``(x_hat, residual, bound)`` where ``bound`` is the a-priori
    estimate ``(B/A) * ||x|| * sum_{n>M} ||T^n||^2 * ||sum v v^*||``.
    """
    rep = frame_bounds(sys)
    if not rep.is_frame:
        raise NotAFrame(f"lower bound {rep.lower:.3e} not positive")
    x = np.asarray(x, dtype=complex).ravel()
    if x.shape[0] != sys.dim:
        raise DimensionMismatch("x has the wrong length")
    C = synthesis_matrix(sys, max(M, 1))[:, : (M + 1) * sys.count]
    Sinv_x = np.linalg.solve(rep.frame_operator, x)
    x_hat = C @ (C.conj().T @ Sinv_x)
    residual = float(np.linalg.norm(x - x_hat))
    tail = numkit.orbit_tail_bound(sys.operator.matrix, M) * float(np.linalg.norm(sys.gram_sum(), 2))
    bound = tail * float(np.linalg.norm(Sinv_x))
    return x_hat, residual, bound


def reduce_generators(sys):
    """Linearly independent generators with the same Gram sum ``sum v v^*``."""
    G = sys.generators
    U, s, _ = np.linalg.svd(G, full_matrices=False)
    r = numkit.numerical_rank(G)
    W = numkit.fix_phases(U[:, :r]) * s[:r]
    return FrameSystem(sys.operator, W, sys.horizon)


def eigen_clusters(T, tol=1e-8):
    """Group eigenvalues of ``T`` whose distance is below ``tol * (1 + |lambda|)``."""
    ev = np.linalg.eigvals(np.asarray(T))
    order = np.lexsort((ev.imag, ev.real))
    clusters = []
    for lam in ev[order]:
        for c in clusters:
            if abs(lam - c[0]) <= tol * (1 + abs(c[0])):
                c.append(lam)
                break
        else:
            clusters.append([lam])
    return [np.mean(c) for c in clusters]


def geometric_multiplicity(T, lam, tol=1e-8):
    T = np.asarray(T)
    d = T.shape[0]
    return d - numkit.numerical_rank(T - lam * np.eye(d), tol)


def frame_index_oracle(T, seed=0, retries=8):
    """Minimal generator count for a frame of iterations and a verified witness.

    In finite dimension the minimum equals the largest geometric multiplicity
    of an eigenvalue (the number of invariant factors).  The witness is a
    seeded complex Gaussian matrix with that many columns, accepted once
    :func:`frame_bounds` calls it a frame.
    """
    T = OperatorSpec.from_any(T)
    rho = spectral_radius(T)
    if rho >= 1.0 - 1e-10:
        raise Unstable(f"spectral radius {rho:.12f} not below 1")
    d = T.dim
    if T.diagonal is not None:
        vals = T.diagonal
        gamma = max(int(np.sum(np.abs(vals - v) <= 1e-8 * (1 + abs(v)))) for v in vals)
    else:
        gamma = max(geometric_multiplicity(T.matrix, lam) for lam in eigen_clusters(T.matrix))
    for attempt in range(retries):
        rng = np.random.default_rng(seed + attempt)
        G = rng.standard_normal((d, gamma)) + 1j * rng.standard_normal((d, gamma))
        rep = frame_bounds(FrameSystem(T, G))
        if rep.is_frame:
            return gamma, G
    raise CertificateFailed(f"no frame witness with {gamma} generators after {retries} seeds")
