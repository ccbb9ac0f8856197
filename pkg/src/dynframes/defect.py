"""Defect operator, Parseval index and the Rota embedding."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import numkit
from .errors import NotAdmissible, NotContraction, TailNotCertified, ValidationError
from .frames import FrameSystem
from .operators import OperatorSpec, admissibility, op_norm

RANK_TOL = 1e-8


@dataclass(frozen=True)
class DefectData:
    D: np.ndarray
    defect_space: numkit.Subspace
    index: int

    @property
    def basis(self):
        return self.defect_space.basis


def defect(T, tol=RANK_TOL):
    """``D = (I - T T^*)^{1/2}`` with its range and rank.

    The defect space basis comes from the SVD of ``I - T T^*`` in descending
    order, each vector rotated so its largest entry is real positive.
    """
    T = OperatorSpec.from_any(T)
    if op_norm(T) > 1.0 + tol:
        raise NotContraction(f"norm {op_norm(T):.12f} exceeds 1")
    A = T.matrix
    d = T.dim
    E = np.eye(d) - A @ A.conj().T
    E = 0.5 * (E + E.conj().T)
    D = numkit.psd_sqrt(E)
    r = numkit.numerical_rank(E, tol)
    U = np.linalg.svd(E)[0] if d else np.zeros((0, 0))
    G = numkit.fix_phases(U[:, :r])
    return DefectData(D=D, defect_space=numkit.Subspace(d, G), index=r)


def parseval_index(T, tol=RANK_TOL):
    """Minimal number of generators of a Parseval frame of iterations (0 if none)."""
    T = OperatorSpec.from_any(T)
    if not admissibility(T).admits_parseval:
        return 0
    return defect(T, tol).index


def parseval_generators(T, tol=RANK_TOL):
    """Parseval frame of iterations with generators ``D g_i``."""
    T = OperatorSpec.from_any(T)
    if not admissibility(T).admits_parseval:
        raise NotAdmissible("operator does not admit a Parseval frame of iterations")
    dd = defect(T, tol)
    return FrameSystem(T, dd.D @ dd.basis)


def horizon_for(T, tol):
    """Smallest ``m`` with ``||T^{m+1}||**2 <= tol``."""
    A = OperatorSpec.from_any(T).matrix
    P = A.copy()
    for m in range(100_000):
        if np.linalg.norm(P, 2) ** 2 <= tol:
            return m
        P = P @ A
    raise TailNotCertified(f"no horizon reaches tolerance {tol:g}")


def rota_embed(T, m=None, tol=None):
    """Truncated Rota embedding ``L x = sum_{n<=m} G^* D (T^*)^n x z^n``.

    ``G`` is the orthonormal defect basis so the target is the truncated
    Hardy space of multiplicity ``parseval_index(T)``.  Returns
    ``(L, isometry_defect, intertwine_defect)``; the isometry defect equals
    ``||T^{m+1}||**2`` because ``L^* L = I - T^{m+1} (T^*)^{m+1}``.

    With ``m=None`` the horizon is the smallest one whose isometry defect
    is at most ``tol`` (default ``1e-12``).  An explicit ``m`` together with
    ``tol`` raises :class:`TailNotCertified` when the defect exceeds ``tol``.
    """
    T = OperatorSpec.from_any(T)
    if not admissibility(T).admits_parseval:
        raise NotAdmissible("operator does not admit a Parseval frame of iterations")
    if m is None:
        m = horizon_for(T, 1e-12 if tol is None else tol)
    if m < 0:
        raise ValidationError("m must be nonnegative")
    dd = defect(T)
    A = T.matrix
    Th = A.conj().T
    top = dd.basis.conj().T @ dd.D
    blocks = []
    for _ in range(m + 1):
        blocks.append(top)
        top = top @ Th
    L = np.vstack(blocks)
    # L^* L - I = -T^{m+1} (T^*)^{m+1}; the closed form avoids roundoff
    iso = float(np.linalg.norm(np.linalg.matrix_power(A, m + 1), 2)) ** 2
    r = dd.index
    # backshift drops the degree-0 block; compare below the top degree
    inter = float(np.linalg.norm(L[r:] - (L @ Th)[:-r], 2)) if m > 0 and r else 0.0
    if tol is not None and iso > tol:
        raise TailNotCertified(f"isometry defect {iso:.3e} above {tol:g} at m={m}")
    return L, iso, inter


def model_space_of(T, m=None, tol=None):
    """Model space ``N = L(C^d)`` of the Rota embedding inside the truncation."""
    from .hardy import ModelSpace, TruncHardy, backshift_matrix

    L, iso, inter = rota_embed(T, m, tol)
    r = parseval_index(T)
    mm = L.shape[0] // r - 1 if r else 0
    H = TruncHardy(r, mm)
    N = numkit.subspace_span(L)
    Sb = backshift_matrix(H)
    inv = float(np.linalg.norm(Sb @ N.basis - N.project(Sb @ N.basis), 2))
    consts = numkit.Subspace(H.dim, np.eye(H.dim, r, dtype=complex))
    meet = numkit.subspace_intersection(consts, numkit.subspace_complement(N), 1e-8)
    diag = {
        "isometry_defect": iso,
        "intertwine_defect": inter,
        "backshift_invariance_defect": inv,
        "constants_meet_complement_dim": meet.dim,
    }
    return ModelSpace(H, N, source="rota", tail_tol=max(iso, 1e-12), diagnostics=diag, embedding=L)
