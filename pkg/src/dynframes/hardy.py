"""Truncated vector Hardy space and model-space machinery.

Vectors of the truncation of ``H^2`` with multiplicity ``d`` and cutoff
``m`` are flattened degree-major: coordinate ``n*d + i`` holds the
``i``-th component of the degree ``n`` coefficient.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any

import numpy as np

from . import numkit
from .errors import CutoffTooSmall, Degenerate, DimensionMismatch, NotInvariant, Overflow, ValidationError
from .frames import FrameSystem
from .inner import MatrixInner, as_inner, range_subspace, range_vectors, rho_matrix
from .operators import OperatorSpec, compression as compression_spec

GEN_DROP = 1e-8
MIN_MARGIN = 8


@dataclass(frozen=True)
class TruncHardy:
    d: int
    m: int

    def __post_init__(self):
        if self.d < 1 or self.m < 0:
            raise ValidationError(f"invalid truncation d={self.d}, m={self.m}")

    @property
    def dim(self):
        return self.d * (self.m + 1)

    def constants(self):
        """Orthonormal basis ``e_i * z^0`` as a ``(dim, d)`` matrix."""
        return np.eye(self.dim, self.d, dtype=complex)

    def vec(self, coeffs):
        return HardyVec(self, coeffs)


@dataclass(frozen=True)
class HardyVec:
    space: TruncHardy
    coeffs: np.ndarray

    def __post_init__(self):
        c = np.array(self.coeffs, dtype=complex)
        if c.ndim == 1:
            c = c.reshape(-1, self.space.d) if c.size == self.space.dim else c
        if c.shape != (self.space.m + 1, self.space.d):
            raise DimensionMismatch(f"coefficients shape {c.shape} does not fit {self.space}")
        c.setflags(write=False)
        object.__setattr__(self, "coeffs", c)

    @property
    def flat(self):
        return self.coeffs.reshape(-1)

    def norm(self):
        return float(np.linalg.norm(self.coeffs))

    @classmethod
    def from_flat(cls, space, x):
        return cls(space, np.asarray(x, dtype=complex).reshape(space.m + 1, space.d))


def shift_matrix(H):
    """Matrix of multiplication by ``z``; the degree ``m`` block falls off."""
    return np.eye(H.dim, k=-H.d, dtype=complex)


def backshift_matrix(H):
    return np.eye(H.dim, k=H.d, dtype=complex)


def shift(f):
    if np.any(f.coeffs[-1] != 0):
        raise Overflow("shift would push the top-degree coefficient out of the truncation")
    c = np.zeros_like(f.coeffs)
    c[1:] = f.coeffs[:-1]
    return HardyVec(f.space, c)


def backshift(f):
    c = np.zeros_like(f.coeffs)
    c[:-1] = f.coeffs[1:]
    return HardyVec(f.space, c)


def mult_by_inner(Q, f):
    """Coefficient convolution ``(Q f)_n = sum_k Q_k f_{n-k}`` truncated at ``m``.

    Exact when ``f`` is supported in degrees ``<= m - deg(Q)``.
    """
    Q = as_inner(Q)
    H = f.space
    if Q.d != H.d:
        raise DimensionMismatch(f"inner function of size {Q.d} on multiplicity {H.d}")
    Qc = Q.coeffs(H.m)
    out = np.zeros_like(f.coeffs)
    for k in range(H.m + 1):
        out[k:] += f.coeffs[: H.m + 1 - k] @ Qc[k].T
    return HardyVec(H, out)


def invariant_subspace(Q, H):
    """Truncation of ``Q H^2``: span of ``Q z^n e_i`` over admissible degrees."""
    Q = as_inner(Q)
    if Q.d != H.d:
        raise DimensionMismatch(f"inner function of size {Q.d} on multiplicity {H.d}")
    return range_subspace(Q, H.m)


def tail_estimate(Q, m):
    """Geometric truncation error ``(m+1) * r**(m+1-deg)`` from the largest zero modulus."""
    Q = as_inner(Q)
    r = max((abs(a) for b in Q.factors for a, _ in b.zeros), default=0.0)
    if r == 0.0:
        return 1e-14
    return max(1e-14, (m + 1) * r ** (m + 1 - Q.degree))


@dataclass(frozen=True)
class ModelSpace:
    space: TruncHardy
    basis: numkit.Subspace
    source: Any = None
    tail_tol: float = 1e-12
    diagnostics: dict = field(default_factory=dict, compare=False)
    embedding: Any = field(default=None, compare=False, repr=False)

    @property
    def dim(self):
        return self.basis.dim

    @property
    def B(self):
        return self.basis.basis


def model_space(Q, H):
    """``H ⊖ Q H^2`` at truncation, with its truncation error estimate."""
    Q = as_inner(Q)
    if H.m < Q.degree + MIN_MARGIN:
        raise CutoffTooSmall(f"cutoff {H.m} needs at least degree + {MIN_MARGIN} = {Q.degree + MIN_MARGIN}")
    M = invariant_subspace(Q, H)
    N = numkit.subspace_complement(M)
    Sb = backshift_matrix(H)
    inv = float(np.linalg.norm(Sb @ N.basis - N.project(Sb @ N.basis), 2)) if N.dim else 0.0
    return ModelSpace(H, N, source=Q, tail_tol=tail_estimate(Q, H.m),
                      diagnostics={"backshift_invariance_defect": inv})


def compression(N):
    """Matrix of ``P_N S`` restricted to ``N`` in the model-space basis."""
    B = N.B
    return compression_spec(B.conj().T @ shift_matrix(N.space) @ B, source=N)


def adjoint_compression(N):
    """Matrix of ``S^*`` restricted to ``N`` (the adjoint of :func:`compression`)."""
    return compression_spec(compression(N).matrix.conj().T, source=N)


def _drop_zero_columns(G):
    keep = np.linalg.norm(G, axis=0) > GEN_DROP
    return G[:, keep], int(np.sum(~keep))


def basic_frame(N):
    """Frame ``{A_N^n P_N e_i}`` in model-space coordinates."""
    if N.dim == 0:
        raise Degenerate("model space is trivial")
    G = N.B[: N.space.d].conj().T
    G, _ = _drop_zero_columns(G)
    return FrameSystem(compression(N), G)


def adjoint_frame(Q, H, N=None):
    """Frame ``{(S^*)^n S^* Q e_i}`` of ``N`` in model-space coordinates."""
    Q = as_inner(Q)
    if N is None:
        N = model_space(Q, H)
    if N.dim == 0:
        raise Degenerate("model space is trivial")
    # one extra degree so the backshift is exact at the top
    Qc = Q.coeffs(H.m + 1)
    E = Qc[1:].reshape(-1, Q.d)  # degree-major flattening of S^* Q e_i
    G, _ = _drop_zero_columns(N.B.conj().T @ E)
    return FrameSystem(adjoint_compression(N), G)


def wandering_subspace(M, H, tol=1e-4):
    """``M ⊖ S M`` inside the truncation.

    Only the part of ``M`` with vanishing top coefficient is shifted, so
    the shift stays inside the truncation.  Raises :class:`NotInvariant` when
    the shifted part leaves ``M`` by more than ``tol``.
    """
    if M.ambient_dim != H.dim:
        raise DimensionMismatch("subspace does not live in this truncation")
    if M.dim == 0:
        return M, 0.0
    Bm = M.basis
    top = Bm[-H.d:]
    C = numkit.null_space(top, 1e-10).basis
    SM = shift_matrix(H) @ Bm @ C
    defect = float(np.linalg.norm(SM - M.project(SM), 2)) if SM.size else 0.0
    if defect > tol:
        raise NotInvariant(f"shift invariance defect {defect:.3e} exceeds {tol:g}")
    SMsub = numkit.subspace_span(M.project(SM)) if SM.shape[1] else numkit.Subspace.zero(H.dim)
    W = numkit.relative_complement(M, SMsub)
    return W, defect


def full_range_check(Q, grid_points=64, tol=None):
    """Minimal numerical rank of ``Q(z)`` on a uniform grid of the circle.

    ``Q`` may be a :class:`MatrixInner`, a constant matrix, or an array of
    Taylor coefficients of shape ``(n, d, d)``.
    """
    if grid_points < 8:
        raise ValidationError("grid_points must be at least 8")
    z = np.exp(2j * np.pi * np.arange(grid_points) / grid_points)
    if isinstance(Q, MatrixInner):
        vals = Q(z)
        d = Q.d
    else:
        C = np.asarray(Q, dtype=complex)
        if C.ndim == 2:
            C = C[None]
        d = C.shape[1]
        powers = z[:, None] ** np.arange(C.shape[0])[None, :]
        vals = np.einsum("gn,nij->gij", powers, C)
    ranks = [numkit.numerical_rank(v, tol) for v in vals]
    r = min(ranks)
    return r == d, r


# --------------------------------------------------------------------------
# the subspace generated by (U - A_N) N and the wandering decomposition


def script_L(N, tol=1e-6):
    """``closure((U - A_N) N)`` re-expressed in Hardy coordinates.

    ``U`` is the bilateral shift on degrees ``-m..m``.  For ``f`` in ``N`` the
    vector ``U f - A_N f`` has no negative-degree part; that is checked and
    reported in the result's second component.
    """
    H = N.space
    d, m = H.d, H.m
    if N.dim == 0:
        return numkit.Subspace.zero(H.dim), 0.0
    if m < MIN_MARGIN:
        raise CutoffTooSmall(f"cutoff {m} too small for the bilateral grid")
    nb = d * (2 * m + 1)
    off = d * m  # index of degree 0 in the bilateral layout
    U = np.eye(nb, k=-d, dtype=complex)
    emb = np.zeros((nb, H.dim), dtype=complex)
    emb[off:, :] = np.eye(H.dim)
    B = N.B
    A = compression(N).matrix
    X = U @ emb @ B - emb @ (B @ A)
    neg = float(np.linalg.norm(X[:off], 2)) if off else 0.0
    X = X[off:]
    s = np.linalg.svd(X, compute_uv=False)
    r = int(np.sum(s > tol))
    U_, _, _ = np.linalg.svd(X, full_matrices=False)
    return numkit.Subspace(H.dim, numkit.fix_phases(U_[:, :r])), neg


def constants_subspace(H):
    return numkit.Subspace(H.dim, H.constants())


def wandering_decomposition(W, H, tol=1e-6):
    """Split ``W`` and the constants ``K`` along ``K0 = W ∩ K``.

    Returns ``(K0, W1, K1)`` with ``W1 = W ⊖ K0`` and ``K1 = K ⊖ K0``.
    """
    K = constants_subspace(H)
    K0 = numkit.subspace_intersection(W, K, tol)
    return K0, numkit.relative_complement(W, K0), numkit.relative_complement(K, K0)


# --------------------------------------------------------------------------
# frames for T and T^* through the Rota model


@dataclass(frozen=True)
class OptimalFrames:
    for_T: FrameSystem
    for_T_adjoint: FrameSystem
    model: ModelSpace
    wandering: numkit.Subspace
    invariance_defect: float


def optimal_frames(T, m=None, tol=1e-12):
    """Parseval frames of iterations for ``T`` and ``T^*`` with ``parseval_index(T)`` generators each.

    ``N`` is the range of the truncated Rota embedding ``L``, ``M`` its
    complement and ``W`` the wandering subspace of ``M``.  Generators are
    ``L^+ P_N e_j`` for ``T`` and ``L^+ S^* E_j`` for ``T^*``, where ``E_j``
    runs over an orthonormal basis of ``W``.
    """
    from .defect import model_space_of

    T = OperatorSpec.from_any(T)
    N = model_space_of(T, m, None if m is not None else tol)
    H = N.space
    if H.m < MIN_MARGIN:
        N = model_space_of(T, MIN_MARGIN)
        H = N.space
    L = N.embedding
    Lp = np.linalg.pinv(L)
    M = numkit.subspace_complement(N.basis)
    W, inv = wandering_subspace(M, H, tol=max(1e-4, 10 * np.sqrt(N.tail_tol)))
    g_T = Lp @ N.basis.project(H.constants())
    g_T, _ = _drop_zero_columns(g_T)
    E = W.basis
    g_A = Lp @ (backshift_matrix(H) @ E)
    g_A, _ = _drop_zero_columns(g_A)
    return OptimalFrames(FrameSystem(T, g_T), FrameSystem(T.H, g_A), N, W, inv)


def basic_of_adjoint(Q, H, tol=1e-8):
    """Model space of ``rho(Q)`` and the ``rho(rho(Q))`` round-trip check."""
    Q = as_inner(Q)
    N_rho = model_space(rho_matrix(Q), H)
    back = model_space(rho_matrix(rho_matrix(Q)), H)
    ok = numkit.subspace_equal(back.basis, model_space(Q, H).basis, tol)
    return N_rho, bool(ok)


def range_matrix(Q, H):
    """Raw spanning columns of the truncated ``Q H^2`` (not orthonormalized)."""
    return range_vectors(Q, H.m)
