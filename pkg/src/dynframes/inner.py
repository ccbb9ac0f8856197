"""Finite Blaschke products and structured matrix inner functions."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import numkit
from .errors import DegreeOverflow, NotInDisc, ValidationError, VerdictMismatch

ZERO_TOL = 1e-12


def _merge_zeros(zeros):
    """Collapse a list of zeros into ``((a, mult), ...)`` using ``ZERO_TOL``."""
    merged = []
    for a in zeros:
        a = complex(a)
        for k, (b, mult) in enumerate(merged):
            if abs(a - b) <= ZERO_TOL:
                merged[k] = (b, mult + 1)
                break
        else:
            merged.append((a, 1))
    return tuple(merged)


@dataclass(frozen=True)
class BlaschkeProduct:
    """``alpha * z**power * prod_k (conj(a_k)/|a_k|) (a_k - z)/(1 - conj(a_k) z)``.

    ``zeros`` holds ``(a, multiplicity)`` pairs with ``0 < |a| < 1``; zeros
    at the origin live in ``power``.
    """

    alpha: complex = 1.0
    zeros: tuple = ()
    power: int = 0

    def __post_init__(self):
        alpha = complex(self.alpha)
        if abs(abs(alpha) - 1.0) > 1e-12:
            raise ValidationError(f"|alpha| = {abs(alpha)} is not 1")
        if self.power < 0:
            raise ValidationError("power must be nonnegative")
        for a, mult in self.zeros:
            if not abs(a) < 1.0 - 1e-12:
                raise NotInDisc(f"zero {a} not inside the unit disc")
            if abs(a) == 0.0 or mult < 1:
                raise ValidationError("zeros at the origin belong in `power`")
        object.__setattr__(self, "alpha", alpha)

    @classmethod
    def from_zeros(cls, zeros, alpha=1.0, power=0):
        zeros = [complex(a) for a in zeros]
        for a in zeros:
            if not abs(a) < 1.0 - 1e-12:
                raise NotInDisc(f"zero {a} not inside the unit disc")
        origin = sum(1 for a in zeros if abs(a) <= ZERO_TOL)
        rest = [a for a in zeros if abs(a) > ZERO_TOL]
        return cls(alpha, _merge_zeros(rest), power + origin)

    @property
    def degree(self):
        return self.power + sum(m for _, m in self.zeros)

    def zero_list(self):
        """All zeros with multiplicity, origin included."""
        out = [0j] * self.power
        for a, m in self.zeros:
            out.extend([a] * m)
        return out

    def coeffs(self, m):
        return blaschke_coeffs(self, m)

    def __call__(self, z):
        z = np.asarray(z, dtype=complex)
        out = self.alpha * z**self.power
        for a, mult in self.zeros:
            f = (np.conj(a) / abs(a)) * (a - z) / (1 - np.conj(a) * z)
            out = out * f**mult
        return out

    def rho(self):
        return BlaschkeProduct(np.conj(self.alpha), tuple((np.conj(a), m) for a, m in self.zeros),
                               self.power)

    def spec(self):
        zs = self.zero_list()
        return {"alpha": [self.alpha.real, self.alpha.imag],
                "zeros": [[z.real, z.imag] for z in zs]}


def blaschke_coeffs(B, m):
    """Taylor coefficients of ``B`` of degrees ``0..m``."""
    if m < 0:
        raise ValidationError("m must be nonnegative")
    c = np.zeros(m + 1, dtype=complex)
    if B.power <= m:
        c[B.power] = B.alpha
    n = np.arange(1, m + 1)
    for a, mult in B.zeros:
        ac = np.conj(a)
        f = np.empty(m + 1, dtype=complex)
        f[0] = abs(a)
        f[1:] = (ac / abs(a)) * (abs(a) ** 2 - 1) * ac ** (n - 1)
        for _ in range(mult):
            c = np.convolve(c, f)[: m + 1]
    return c


def rho_scalar(coeffs):
    """Coefficients of ``conj(q(conj z))``: entrywise conjugation."""
    return np.conj(np.asarray(coeffs, dtype=complex))


def _unitary(U, d, name):
    U = np.eye(d, dtype=complex) if U is None else numkit.as_square(U, name)
    if U.shape[0] != d:
        raise ValidationError(f"{name} must be {d}x{d}")
    if np.linalg.norm(U.conj().T @ U - np.eye(d), 2) > 1e-12:
        raise ValidationError(f"{name} is not unitary")
    U.setflags(write=False)
    return U


@dataclass(frozen=True)
class MatrixInner:
    """``Q(z) = left @ diag(b_1(z), ..., b_d(z)) @ right``.

    ``kind`` records whether the function was built as a constant unitary, a
    diagonal of Blaschke products or a general product.
    """

    left: np.ndarray
    factors: tuple
    right: np.ndarray
    kind: str = "product"

    def __post_init__(self):
        d = len(self.factors)
        if d < 1:
            raise ValidationError("need at least one diagonal factor")
        object.__setattr__(self, "left", _unitary(self.left, d, "left"))
        object.__setattr__(self, "right", _unitary(self.right, d, "right"))
        object.__setattr__(self, "factors", tuple(self.factors))

    @classmethod
    def constant(cls, U):
        U = numkit.as_square(U, "U")
        d = U.shape[0]
        return cls(U, (BlaschkeProduct(),) * d, np.eye(d), "constant")

    @classmethod
    def diag(cls, factors):
        d = len(factors)
        return cls(np.eye(d), tuple(factors), np.eye(d), "diagonal")

    @classmethod
    def product(cls, left, factors, right):
        return cls(left, tuple(factors), right, "product")

    @classmethod
    def scalar(cls, B):
        return cls.diag([B])

    @property
    def d(self):
        return len(self.factors)

    @property
    def col_degrees(self):
        return [b.degree for b in self.factors]

    @property
    def degree(self):
        return max(self.col_degrees)

    @property
    def total_degree(self):
        return sum(self.col_degrees)

    def coeffs(self, m):
        """Array ``(m+1, d, d)`` of Taylor coefficients ``Q_n``."""
        diag = np.stack([b.coeffs(m) for b in self.factors], axis=1)
        return np.einsum("ij,nj,jk->nik", self.left, diag, self.right)

    def __call__(self, z):
        z = np.atleast_1d(np.asarray(z, dtype=complex))
        vals = np.stack([b(z) for b in self.factors], axis=1)
        return np.einsum("ij,nj,jk->nik", self.left, vals, self.right)

    def rho(self):
        return rho_matrix(self)

    def spec(self):
        return {"kind": self.kind, "factors": [b.spec() for b in self.factors]}


def rho_matrix(Q):
    """``rho(Q)(z) = Q(conj z)^*``; coefficients go to their adjoints."""
    return MatrixInner(Q.right.conj().T, tuple(b.rho() for b in Q.factors), Q.left.conj().T, Q.kind)


def as_inner(Q):
    if isinstance(Q, MatrixInner):
        return Q
    if isinstance(Q, BlaschkeProduct):
        return MatrixInner.scalar(Q)
    raise ValidationError(f"cannot interpret {type(Q).__name__} as an inner function")


def range_vectors(Q, m):
    """Columns ``trunc_m(Q z^n e_i)`` spanning the truncated ``Q H^2``.

    Because ``right`` is a constant unitary it does not change the range, so
    the columns are ``left @ b_i z^n e_i`` for ``n <= m - deg(b_i)``.
    Flattening is degree-major: entry ``k*d + j`` is degree ``k``, slot ``j``.
    """
    Q = as_inner(Q)
    d = Q.d
    if Q.degree > m:
        raise DegreeOverflow(f"inner function degree {Q.degree} exceeds cutoff {m}")
    cols = []
    for i, b in enumerate(Q.factors):
        c = b.coeffs(m)
        vec = np.zeros((m + 1, d), dtype=complex)
        vec[:, :] = np.outer(c, Q.left[:, i])
        for n in range(m - b.degree + 1):
            shifted = np.zeros_like(vec)
            shifted[n:] = vec[: m + 1 - n]
            cols.append(shifted.reshape(-1))
    if not cols:
        return np.zeros(((m + 1) * d, 0), dtype=complex)
    return np.stack(cols, axis=1)


def range_subspace(Q, m):
    """Orthonormal basis of :func:`range_vectors`, dimension fixed by the degrees."""
    V = range_vectors(Q, m)
    k = V.shape[1]
    if k == 0:
        return numkit.Subspace.zero(V.shape[0])
    U = np.linalg.svd(V, full_matrices=False)[0]
    return numkit.Subspace(V.shape[0], numkit.fix_phases(U[:, :k]))


# --------------------------------------------------------------------------
# similarity tests


def _conjugation_closed(zeros):
    pool = list(zeros)
    while pool:
        a = pool.pop()
        if abs(a.imag) <= ZERO_TOL:
            continue
        target = np.conj(a)
        dist = [abs(b - target) for b in pool]
        if not dist:
            return False
        k = int(np.argmin(dist))
        if dist[k] > ZERO_TOL:
            return False
        pool.pop(k)
    return True


def similarity_test_scalar(B, m=None, tol=1e-9):
    """Similarity of the basic and adjoint frames of ``H^2 ⊖ B H^2``.

    Two independent criteria are evaluated: (a) some unimodular ``alpha``
    makes every Taylor coefficient ``alpha * q_n`` real, (b) the zero
    multiset is closed under conjugation.  They are equivalent in exact
    arithmetic, so disagreement raises :class:`VerdictMismatch`.

    Returns ``(similar, alpha)`` with ``alpha`` ``None`` when not similar.
    """
    deg = B.degree
    if m is None:
        m = max(2 * deg, 8)
    if m < 2 * deg:
        raise ValidationError(f"cutoff {m} below twice the degree {deg}")
    q = B.coeffs(m)
    scale = float(np.max(np.abs(q)))
    first = int(np.argmax(np.abs(q) > 1e-14 * scale))
    alpha = np.conj(q[first]) / abs(q[first])
    coeff_ok = False
    for cand in (alpha, -alpha):
        if np.max(np.abs((cand * q).imag)) <= tol * scale:
            coeff_ok, alpha = True, cand
            break
    zero_ok = _conjugation_closed(B.zero_list())
    if coeff_ok != zero_ok:
        raise VerdictMismatch(
            f"coefficient test says {coeff_ok}, zero-set test says {zero_ok}")
    return coeff_ok, (complex(alpha) if coeff_ok else None)


def witness_check(Q, A, m, tol=1e-10):
    """Check ``A`` unitary and ``A Q_n = Q_n A = (A Q_n)^*`` for ``n <= m``."""
    Q = as_inner(Q)
    A = numkit.as_square(A, "A")
    if A.shape[0] != Q.d:
        return False
    if np.linalg.norm(A.conj().T @ A - np.eye(Q.d), 2) > tol:
        return False
    for Qn in Q.coeffs(m):
        AQ = A @ Qn
        if np.max(np.abs(AQ - Qn @ A), initial=0) > tol:
            return False
        if np.max(np.abs(AQ - AQ.conj().T), initial=0) > tol:
            return False
    return True


def similarity_test_matrix(Q, m=None, A_candidate=None, tol=1e-6):
    """Verdict from comparing the truncated ranges of ``rho(Q)`` and ``Q``.

    Returns ``(similar, witness_ok)``; ``witness_ok`` is ``None`` unless a
    candidate unitary is supplied.
    """
    Q = as_inner(Q)
    if m is None:
        m = max(2 * Q.degree, 40)
    if m < 2 * Q.degree:
        raise ValidationError(f"cutoff {m} below twice the degree {Q.degree}")
    similar = numkit.subspace_equal(range_subspace(rho_matrix(Q), m), range_subspace(Q, m), tol)
    witness = None if A_candidate is None else witness_check(Q, A_candidate, m)
    return bool(similar), witness


def divides(B1, B2):
    """Zero multiset of ``B1`` contained in that of ``B2``."""
    if B1.power > B2.power:
        return False
    for a, m1 in B1.zeros:
        avail = sum(m for b, m in B2.zeros if abs(a - b) <= ZERO_TOL)
        if avail < m1:
            return False
    return True
