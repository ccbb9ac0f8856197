"""Canonical tightening ``Q = S^{-1/2} T S^{1/2}`` and the frame-index certificate."""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import numkit
from .errors import CertificateFailed, NotAFrame
from .frames import FrameSystem, frame_bounds, frame_index_oracle, reduce_generators, stein_residual
from .operators import OperatorSpec, dense, op_norm

RANK_TOL = 1e-8
CONTRACTION_TOL = 1e-8


def canonical_tighten(sys, report=None):
    """Return ``(Q, tightened)`` with ``Q = S^{-1/2} T S^{1/2}`` and generators ``S^{-1/2} v_i``.

    ``report`` may carry an already computed :class:`FrameReport` for ``sys``.
    """
    rep = frame_bounds(sys) if report is None else report
    if not rep.is_frame:
        raise NotAFrame(f"frame operator eigenvalues [{rep.lower:.3e}, {rep.upper:.3e}]")
    w, V = numkit.herm_eig(rep.frame_operator)
    Sh = (V * np.sqrt(w)) @ V.conj().T
    Sih = (V / np.sqrt(w)) @ V.conj().T
    Q = dense(Sih @ sys.operator.matrix @ Sh)
    return Q, FrameSystem(Q, Sih @ sys.generators, sys.horizon)


@dataclass(frozen=True)
class IndexCertificate:
    gamma: int
    Q: OperatorSpec
    check: bool
    rank: int
    generators: np.ndarray = field(repr=False)
    residuals: dict = field(default_factory=dict)


def index_certificate(T, seed=0, rank_tol=RANK_TOL):
    """Certify ``gamma(T) = rank(I - Q Q^*)`` for the canonical tightening ``Q``.

    ``gamma`` and its witness come from :func:`frame_index_oracle`; the
    witness is reduced to independent generators before tightening.  Any
    failed check raises :class:`CertificateFailed` carrying the residuals.
    """
    T = OperatorSpec.from_any(T)
    gamma, G = frame_index_oracle(T, seed=seed)
    sys = reduce_generators(FrameSystem(T, G))
    rep = frame_bounds(sys)
    Q, tight = canonical_tighten(sys, rep)
    d = T.dim
    Qm = Q.matrix
    E = np.eye(d) - Qm @ Qm.conj().T
    rank = numkit.numerical_rank(E, rank_tol)
    qnorm = op_norm(Q)
    Snorm = float(np.linalg.norm(rep.frame_operator, 2))
    res = {
        "stein_residual": stein_residual(sys, rep.frame_operator),
        "stein_tol": 1e-10 * Snorm,
        "q_norm": qnorm,
        "frame_condition": rep.upper / rep.lower,
        "rank_tol": rank_tol,
        "defect_eigenvalues": [float(x) for x in np.linalg.eigvalsh(0.5 * (E + E.conj().T))[::-1][: gamma + 1]],
    }
    check = (gamma == rank and res["stein_residual"] <= res["stein_tol"]
             and qnorm <= 1.0 + CONTRACTION_TOL and sys.count == gamma)
    if not check:
        raise CertificateFailed(f"gamma={gamma}, rank(I-QQ*)={rank}, residuals={res}")
    return IndexCertificate(gamma, Q, True, rank, tight.generators, res)
