"""Dense complex linear-algebra kernel.

Hermitian eigendecomposition, PSD square roots, numerical rank, the Stein
equation ``S - T S T^* = V`` and a small subspace algebra built on
orthonormal bases.  Everything here works on plain ``numpy`` arrays of
dtype ``complex128``.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg as sla

from .errors import DimensionMismatch, NonHermitian, NotPSD, Unstable, ValidationError

EPS = np.finfo(float).eps

# vectorized Stein solve up to this size, Smith doubling above
STEIN_DIRECT_MAX = 64


def as_matrix(a, name="matrix"):
    """Return ``a`` as a finite 2-D complex array."""
    m = np.array(a, dtype=complex)
    if m.ndim == 1:
        m = m.reshape(-1, 1)
    if m.ndim != 2:
        raise ValidationError(f"{name} must be 2-D, got shape {m.shape}")
    if not np.all(np.isfinite(m)):
        raise ValidationError(f"{name} has non-finite entries")
    return m


def as_square(a, name="matrix"):
    m = as_matrix(a, name)
    if m.shape[0] != m.shape[1]:
        raise DimensionMismatch(f"{name} must be square, got {m.shape}")
    return m


def hermitian_defect(M):
    M = np.asarray(M)
    return float(np.max(np.abs(M - M.conj().T), initial=0.0))


def check_hermitian(M, name="matrix"):
    M = as_square(M, name)
    scale = 1.0 + float(np.max(np.abs(M), initial=0.0))
    if hermitian_defect(M) > 1e-12 * scale:
        raise NonHermitian(f"{name} is not Hermitian (defect {hermitian_defect(M):.3e})")
    return 0.5 * (M + M.conj().T)


def herm_eig(M):
    """Eigenvalues (ascending) and unitary eigenvectors of a Hermitian matrix."""
    H = check_hermitian(M)
    w, V = np.linalg.eigh(H)
    return w, V


def psd_sqrt(M, clamp=1e-10):
    """Principal square root of a PSD matrix.

    Eigenvalues in ``[-clamp * ||M||, 0)`` are treated as roundoff and set to
    zero; anything more negative raises :class:`NotPSD`.
    """
    w, V = herm_eig(M)
    scale = float(np.max(np.abs(w), initial=0.0))
    if w.size and w[0] < -clamp * scale:
        raise NotPSD(f"eigenvalue {w[0]:.3e} below clamp window {-clamp * scale:.3e}")
    w = np.clip(w, 0.0, None)
    R = (V * np.sqrt(w)) @ V.conj().T
    return 0.5 * (R + R.conj().T)


def psd_power(M, p, floor=0.0):
    """``M**p`` for a positive definite ``M``; eigenvalues must exceed ``floor``."""
    w, V = herm_eig(M)
    if w.size and w[0] <= floor:
        raise NotPSD(f"smallest eigenvalue {w[0]:.3e} not above {floor:.3e}")
    R = (V * w**p) @ V.conj().T
    return 0.5 * (R + R.conj().T)


def default_rank_tol(shape):
    return max(shape) * EPS


def numerical_rank(M, rel_tol=None):
    """Number of singular values above ``rel_tol * sigma_max``.

    The default tolerance is ``max(rows, cols) * eps``.
    """
    M = as_matrix(M)
    if M.size == 0:
        return 0
    s = np.linalg.svd(M, compute_uv=False)
    if s[0] == 0.0:
        return 0
    tol = default_rank_tol(M.shape) if rel_tol is None else rel_tol
    return int(np.sum(s > tol * s[0]))


def spectral_radius(T):
    T = as_square(T)
    if T.size == 0:
        return 0.0
    return float(np.max(np.abs(np.linalg.eigvals(T))))


def power_norms(T, count):
    """``[||T^0||, ||T^1||, ..., ||T^(count-1)||]`` in the spectral norm."""
    T = as_square(T)
    out = []
    P = np.eye(T.shape[0], dtype=complex)
    for _ in range(count):
        out.append(float(np.linalg.norm(P, 2)) if P.size else 0.0)
        P = P @ T
    return out


def power_decay(T, max_block=512):
    """Constants ``(c, q, k)`` with ``||T^n|| <= c * q**(n // k)`` and ``q < 1``.

    ``k`` is the smallest block length with ``||T^k|| < 1`` and
    ``c = max_{j<k} ||T^j||``; submultiplicativity gives the bound.  Returns
    ``None`` when no such ``k <= max_block`` exists.
    """
    T = as_square(T)
    if T.size == 0:
        return 1.0, 0.0, 1
    P = np.eye(T.shape[0], dtype=complex)
    c = 1.0
    for k in range(1, max_block + 1):
        P = P @ T
        q = float(np.linalg.norm(P, 2))
        if q < 1.0:
            return c, q, k
        c = max(c, q)
    return None


def orbit_tail_bound(T, M):
    """Upper bound for ``sum_{n > M} ||T^n||**2``; ``inf`` if none is available."""
    dec = power_decay(T)
    if dec is None:
        return float("inf")
    c, q, k = dec
    if q == 0.0:
        return 0.0 if M + 1 >= k else c * c * k
    # n = a*k + b, a >= (M+1)//k
    a0 = (M + 1) // k
    return c * c * k * q ** (2 * a0) / (1.0 - q * q)


def stein_series(T, V, max_power):
    """Truncated sum ``sum_{n<=max_power} T^n V (T^*)^n``."""
    T = as_square(T)
    V = as_square(V)
    S = np.zeros_like(V)
    X = V.copy()
    for _ in range(max_power + 1):
        S += X
        X = T @ X @ T.conj().T
    return 0.5 * (S + S.conj().T)


def stein_solve(T, V, method="auto", tol=1e-15):
    """Solve ``S - T S T^* = V`` for Hermitian ``S``.

    For dimension up to ``STEIN_DIRECT_MAX`` the vectorized system
    ``(I - T (x) conj(T)) vec(S) = vec(V)`` is solved directly (row-major
    ``vec``); a diagonal ``T`` is solved entrywise.  Larger problems use Smith doubling, stopped once the certified
    tail bound falls below ``tol * ||S||``.
    """
    T = as_square(T, "T")
    V = check_hermitian(V, "V")
    if T.shape != V.shape:
        raise DimensionMismatch(f"T is {T.shape}, V is {V.shape}")
    d = T.shape[0]
    if d == 0:
        return V.copy()
    rho = spectral_radius(T)
    if rho >= 1.0 - 1e-10:
        raise Unstable(f"spectral radius {rho:.12f} not below 1")
    w = np.linalg.eigvalsh(V)
    if w[0] < -1e-10 * max(1.0, abs(w[-1])):
        raise NotPSD(f"V has eigenvalue {w[0]:.3e}")
    if method == "auto":
        if not np.any(T - np.diag(np.diag(T))):
            method = "diagonal"
        else:
            method = "direct" if d <= STEIN_DIRECT_MAX else "doubling"
    if method == "diagonal":
        lam = np.diag(T)
        S = V / (1.0 - np.outer(lam, lam.conj()))
    elif method == "direct":
        S = sla.solve_discrete_lyapunov(T, V, method="direct")
    elif method == "doubling":
        S = _stein_doubling(T, V, tol)
    else:
        raise ValidationError(f"unknown method {method!r}")
    return 0.5 * (S + S.conj().T)


def _stein_doubling(T, V, tol):
    # after j steps S = sum_{n < 2^j} T^n V T^*^n and A = T^(2^j)
    S = V.copy()
    A = T.copy()
    terms = 1
    vnorm = float(np.linalg.norm(V, 2))
    for _ in range(64):
        S = S + A @ S @ A.conj().T
        A = A @ A
        terms *= 2
        tail = vnorm * orbit_tail_bound(T, terms - 1)
        if tail <= tol * max(float(np.linalg.norm(S, 2)), 1e-300):
            return S
    raise Unstable("Smith doubling did not converge")


def fix_phases(U):
    """Rotate each column so its largest-magnitude entry is real positive."""
    U = np.array(U, dtype=complex)
    for j in range(U.shape[1]):
        col = U[:, j]
        if col.size == 0:
            continue
        k = int(np.argmax(np.abs(col)))
        if abs(col[k]) > 0:
            U[:, j] = col * (abs(col[k]) / col[k])
    return U


# --------------------------------------------------------------------------
# subspaces


@dataclass(frozen=True)
class Subspace:
    """Subspace of ``C^ambient_dim`` held as an orthonormal column basis."""

    ambient_dim: int
    basis: np.ndarray
    tol: float = 1e-10

    def __post_init__(self):
        B = np.asarray(self.basis, dtype=complex)
        if B.ndim != 2 or B.shape[0] != self.ambient_dim:
            raise DimensionMismatch(
                f"basis shape {B.shape} does not match ambient dimension {self.ambient_dim}")
        if B.shape[1] > self.ambient_dim:
            raise DimensionMismatch("more basis vectors than ambient dimension")
        if B.shape[1]:
            err = np.linalg.norm(B.conj().T @ B - np.eye(B.shape[1]), 2)
            if err > max(self.tol, 1e-8):
                raise ValidationError(f"basis is not orthonormal (defect {err:.3e})")
        B.setflags(write=False)
        object.__setattr__(self, "basis", B)

    @property
    def dim(self):
        return self.basis.shape[1]

    def projector(self):
        return self.basis @ self.basis.conj().T

    def project(self, X):
        X = np.asarray(X, dtype=complex)
        return self.basis @ (self.basis.conj().T @ X)

    def contains(self, X, tol=1e-8):
        X = as_matrix(X)
        r = X - self.project(X)
        return bool(np.linalg.norm(r, 2) <= tol * max(1.0, np.linalg.norm(X, 2)))

    @classmethod
    def zero(cls, ambient_dim):
        return cls(ambient_dim, np.zeros((ambient_dim, 0), dtype=complex))

    @classmethod
    def full(cls, ambient_dim):
        return cls(ambient_dim, np.eye(ambient_dim, dtype=complex))


def _check_same_ambient(A, B):
    if A.ambient_dim != B.ambient_dim:
        raise DimensionMismatch(f"ambient dimensions {A.ambient_dim} and {B.ambient_dim} differ")


def subspace_span(vectors, tol=None):
    """Orthonormal basis for the column span, rank decided by :func:`numerical_rank`."""
    X = as_matrix(vectors, "vectors")
    n = X.shape[0]
    if X.shape[1] == 0:
        return Subspace.zero(n)
    r = numerical_rank(X, tol)
    U = np.linalg.svd(X, full_matrices=False)[0]
    return Subspace(n, fix_phases(U[:, :r]), tol=tol if tol is not None else 1e-10)


def subspace_complement(A):
    """Orthogonal complement of ``A`` in its ambient space."""
    n = A.ambient_dim
    if A.dim == 0:
        return Subspace.full(n)
    U = np.linalg.svd(A.basis, full_matrices=True)[0]
    return Subspace(n, fix_phases(U[:, A.dim:]), tol=A.tol)


def relative_complement(A, B):
    """``A ⊖ B`` for ``B ⊆ A`` (up to tolerance): the part of ``A`` orthogonal to ``B``."""
    _check_same_ambient(A, B)
    if B.dim == 0 or A.dim == 0:
        return A
    # coordinates of B inside A
    C = A.basis.conj().T @ B.basis
    U, s, _ = np.linalg.svd(C, full_matrices=True)
    r = int(np.sum(s > 0.5))
    return Subspace(A.ambient_dim, fix_phases(A.basis @ U[:, r:]), tol=A.tol)


def principal_angles(A, B):
    """Principal angles (ascending) between two subspaces."""
    _check_same_ambient(A, B)
    if min(A.dim, B.dim) == 0:
        return np.zeros(0)
    return np.sort(sla.subspace_angles(A.basis, B.basis))


def max_angle(A, B):
    """Largest principal angle; ``pi/2`` when dimensions differ."""
    _check_same_ambient(A, B)
    if A.dim != B.dim:
        return float(np.pi / 2)
    if A.dim == 0:
        return 0.0
    return float(np.max(principal_angles(A, B)))


def subspace_equal(A, B, tol=1e-8):
    """True iff both subspaces have equal dimension and all principal angles are ``<= tol``."""
    return max_angle(A, B) <= tol


def subspace_intersection(A, B, tol=1e-8):
    """Directions of ``A`` lying in ``B`` up to angle ``tol``."""
    _check_same_ambient(A, B)
    if A.dim == 0 or B.dim == 0:
        return Subspace.zero(A.ambient_dim)
    R = A.basis - B.project(A.basis)
    _, s, Vh = np.linalg.svd(R, full_matrices=True)
    s_full = np.zeros(A.dim)
    s_full[: s.size] = s
    keep = Vh.conj().T[:, s_full <= np.sin(tol)]
    return Subspace(A.ambient_dim, fix_phases(A.basis @ keep), tol=A.tol)


def subspace_sum(A, B, tol=None):
    _check_same_ambient(A, B)
    return subspace_span(np.hstack([A.basis, B.basis]), tol)


def null_space(M, rel_tol=None):
    """Right null space of ``M`` as a :class:`Subspace` of its column space."""
    M = as_matrix(M)
    n = M.shape[1]
    if M.shape[0] == 0:
        return Subspace.full(n)
    tol = default_rank_tol(M.shape) if rel_tol is None else rel_tol
    return Subspace(n, fix_phases(sla.null_space(M, rcond=tol)))
