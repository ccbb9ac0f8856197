"""Named example operators."""
from __future__ import annotations

import numpy as np

from .errors import NotInDisc, ValidationError
from .operators import dense, diagonal


def _check_disc(lambdas):
    lam = np.asarray(lambdas, dtype=complex).ravel()
    if lam.size and not np.all(np.abs(lam) < 1.0):
        raise NotInDisc("all lambdas must lie in the open unit disc")
    return lam


def dyadic_lambdas(n):
    """``1 - 2**-k`` for ``k = 1..n``."""
    return 1.0 - 2.0 ** -np.arange(1, n + 1)


def circle_lambdas(n, radius=0.95):
    """``n`` equally spaced points on the circle of the given radius."""
    return radius * np.exp(2j * np.pi * np.arange(n) / n)


def carleson_diag(lambdas):
    return diagonal(_check_disc(lambdas))


def carleson_margin(lambdas):
    """``min_k prod_{j != k} |l_k - l_j| / |1 - conj(l_k) l_j|`` (1 for a single point)."""
    lam = _check_disc(lambdas)
    best = 1.0
    for k, lk in enumerate(lam):
        others = np.delete(lam, k)
        p = float(np.prod(np.abs(lk - others) / np.abs(1 - np.conj(lk) * others)))
        best = min(best, p)
    return best


def tn_operator(N, lambdas):
    """Diagonal with ``lambdas[0]`` repeated ``N - 1`` extra times ahead of the sequence."""
    if N < 2:
        raise ValidationError("N must be at least 2")
    lam = _check_disc(lambdas)
    return diagonal(np.concatenate([np.full(N - 1, lam[0]), lam]))


def non_contraction_operator(lambdas):
    """``T e_1 = 2 e_2``, ``T e_2 = 0`` and ``T e_j = lambda_j e_j`` for ``j >= 3``.

    ``lambdas`` lists the diagonal entries for ``j = 3..d``.
    """
    lam = _check_disc(lambdas)
    d = lam.size + 2
    T = np.zeros((d, d), dtype=complex)
    T[1, 0] = 2.0
    T[2:, 2:] = np.diag(lam)
    return dense(T)


PRESETS = ("tn", "noncontraction", "carleson")


def preset(name, d=None, N=3, radius=0.95):
    """Named instance: ``tn`` (d=50, N=3), ``noncontraction`` (d=30), ``carleson`` (d=12, dyadic)."""
    if name == "tn":
        d = 50 if d is None else d
        return tn_operator(N, circle_lambdas(d - (N - 1), radius))
    if name == "noncontraction":
        d = 30 if d is None else d
        return non_contraction_operator(circle_lambdas(d - 2, radius))
    if name == "carleson":
        d = 12 if d is None else d
        return carleson_diag(dyadic_lambdas(d))
    raise ValidationError(f"unknown preset {name!r}; choose from {PRESETS}")
