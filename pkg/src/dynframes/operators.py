"""Evolution operators and admissibility predicates."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any

import numpy as np

from . import numkit
from .errors import Borderline, DimensionMismatch, Singular, ValidationError

DEFAULT_BAND = 1e-8


@dataclass(frozen=True)
class OperatorSpec:
    """A finite-dimensional operator ``T``.

    ``kind`` is ``"dense"``, ``"diagonal"`` or ``"compression"``.  Diagonal
    operators keep their entries in ``diagonal``; compressions keep a
    reference to the model space they were computed from in ``source``.
    """

    kind: str
    matrix: np.ndarray
    diagonal: np.ndarray | None = None
    source: Any = field(default=None, compare=False, repr=False)

    def __post_init__(self):
        if self.kind not in ("dense", "diagonal", "compression"):
            raise ValidationError(f"unknown operator kind {self.kind!r}")
        M = numkit.as_square(self.matrix, "operator")
        M.setflags(write=False)
        object.__setattr__(self, "matrix", M)
        if self.diagonal is not None:
            diag = np.array(self.diagonal, dtype=complex).ravel()
            diag.setflags(write=False)
            object.__setattr__(self, "diagonal", diag)
        if self.kind == "compression" and self.source is not None:
            n = getattr(getattr(self.source, "basis", None), "dim", M.shape[0])
            if n != M.shape[0]:
                raise DimensionMismatch("compression size differs from its model space")

    @property
    def dim(self):
        return self.matrix.shape[0]

    @property
    def H(self):
        """Adjoint operator (always dense)."""
        return dense(self.matrix.conj().T)

    @classmethod
    def from_any(cls, T):
        if isinstance(T, cls):
            return T
        return dense(T)


def dense(M):
    return OperatorSpec("dense", np.array(M, dtype=complex))


def diagonal(entries):
    d = np.array(entries, dtype=complex).ravel()
    if not np.all(np.isfinite(d)):
        raise ValidationError("diagonal entries must be finite")
    return OperatorSpec("diagonal", np.diag(d), diagonal=d)


def compression(M, source=None):
    return OperatorSpec("compression", np.array(M, dtype=complex), source=source)


def op_norm(T):
    T = OperatorSpec.from_any(T)
    if T.dim == 0:
        return 0.0
    if T.diagonal is not None:
        return float(np.max(np.abs(T.diagonal)))
    return float(np.linalg.norm(T.matrix, 2))


def spectral_radius(T):
    T = OperatorSpec.from_any(T)
    if T.diagonal is not None:
        return float(np.max(np.abs(T.diagonal), initial=0.0))
    return numkit.spectral_radius(T.matrix)


@dataclass(frozen=True)
class AdmissibilityReport:
    norm: float
    spectral_radius: float
    is_contraction: bool
    adjoint_strongly_stable: bool
    admits_parseval: bool
    admits_frame: bool

    def as_dict(self):
        return dict(self.__dict__)


def is_unitary(M, tol=1e-10):
    M = np.asarray(M)
    if M.ndim != 2 or M.shape[0] != M.shape[1]:
        return False
    return bool(np.linalg.norm(M.conj().T @ M - np.eye(M.shape[0]), 2) <= tol)


def admissibility(T, tol=DEFAULT_BAND):
    """Contraction, stability and frame-existence verdicts for ``T``.

    In finite dimension ``(T^*)^n v -> 0`` for every ``v`` exactly when the
    spectral radius is below one, and ``T`` is then similar to a strict
    contraction.  A spectral radius inside ``[1 - tol, 1 + tol]`` has no
    reliable verdict and raises :class:`Borderline`, except for numerically
    unitary ``T`` which can never carry a frame of iterations.
    """
    if not 0 < tol < 0.1:
        raise ValidationError(f"tol must lie in (0, 0.1), got {tol}")
    T = OperatorSpec.from_any(T)
    norm = op_norm(T)
    rho = spectral_radius(T)
    if abs(rho - 1.0) <= tol:
        if not is_unitary(T.matrix, tol):
            raise Borderline(f"spectral radius {rho:.12f} within {tol:g} of 1")
        return AdmissibilityReport(norm, rho, True, False, False, False)
    contraction = norm <= 1.0 + tol
    stable = rho < 1.0 - tol
    return AdmissibilityReport(
        norm=norm,
        spectral_radius=rho,
        is_contraction=contraction,
        adjoint_strongly_stable=stable,
        admits_parseval=contraction and stable,
        admits_frame=stable,
    )


def similarity_transform(T, V, cond_max=1e12):
    """``V T V^{-1}`` as a dense operator."""
    T = OperatorSpec.from_any(T)
    V = numkit.as_square(V, "V")
    if V.shape != T.matrix.shape:
        raise DimensionMismatch(f"V is {V.shape}, T is {T.matrix.shape}")
    cond = np.linalg.cond(V) if V.size else 1.0
    if not np.isfinite(cond) or cond > cond_max:
        raise Singular(f"V has condition number {cond:.3e}")
    return dense(V @ np.linalg.solve(V.T, T.matrix.T).T)
