"""Polynomial families attached to the Jacobi-Gribov matrix and to the Gaussian tail.

Three unrelated families traditionally share the letters P and Q; here a
``kind`` tag separates them:

* ``first`` / ``second``: solutions of ``b_{n-1} f_{n-1} + b_n f_{n+1} = x f_n``
  with ``b_n = n sqrt(n+1)`` seeded by ``(1, x/b_1)`` and ``(0, 1/b_1)``;
* ``kouba_P`` / ``kouba_Q``: derivative polynomials of ``exp(x**2/2)``;
* ``plasma_P`` / ``plasma_Q``: the plasma-dispersion family
  ``P_{n+1} = 2x P_n + 2n P_{n-1}``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .basis_ops import jacobi_b
from .errors import DomainError, IdentityViolation

SQRT_HALF_PI = math.sqrt(math.pi / 2.0)
KINDS = ("first", "second", "kouba_P", "kouba_Q", "plasma_P", "plasma_Q")


@dataclass(frozen=True)
class PolySeq:
    """A single polynomial, coefficients in ascending powers."""

    kind: str
    n: int
    coeffs: tuple

    @property
    def degree(self) -> int:
        nz = [i for i, c in enumerate(self.coeffs) if c != 0]
        return nz[-1] if nz else -1

    def __call__(self, x):
        acc = 0
        for c in reversed(self.coeffs):
            acc = acc * x + (float(c) if isinstance(c, Fraction) and not isinstance(x, Fraction) else c)
        return acc

    def as_fractions(self):
        return [Fraction(c) for c in self.coeffs]


# --- first and second kind ----------------------------------------------------

def first_second_sequence(n: int, x):
    """Arrays ``P_1..P_n`` and ``Q_1..Q_n`` at ``x`` (scalar or array, last axis = index).

    Forward three-term recurrence; entry ``j`` holds index ``j+1``.
    """
    if n < 1:
        raise DomainError("n must be at least 1")
    x = np.asarray(x, dtype=complex)
    P = np.zeros(x.shape + (n + 1,), dtype=complex)
    Q = np.zeros_like(P)
    P[..., 0] = 1.0
    if n >= 1:
        b1 = jacobi_b(1)
        P[..., 1] = x / b1
        Q[..., 1] = 1.0 / b1
    for k in range(2, n):
        bk, bkm = jacobi_b(k), jacobi_b(k - 1)
        P[..., k] = (x * P[..., k - 1] - bkm * P[..., k - 2]) / bk
        Q[..., k] = (x * Q[..., k - 1] - bkm * Q[..., k - 2]) / bk
    return P[..., :n], Q[..., :n]


def first_second_eval(n: int, x):
    """``(P_n(x), Q_n(x))`` by forward recurrence."""
    P, Q = first_second_sequence(n, x)
    if np.ndim(x) == 0:
        return complex(P[-1]), complex(Q[-1])
    return P[..., -1], Q[..., -1]


def wronskian_residual(n: int, x) -> float:
    """``|b_n (P_n Q_{n+1} - P_{n+1} Q_n) - 1|``; zero for exact arithmetic."""
    P, Q = first_second_sequence(n + 1, x)
    w = jacobi_b(n) * (P[..., n - 1] * Q[..., n] - P[..., n] * Q[..., n - 1])
    res = np.abs(w - 1.0)
    return float(res) if np.ndim(x) == 0 else res


def recurrence_residual(n: int, x) -> float:
    """Largest relative defect of ``b_{k-1} P_{k-1} + b_k P_{k+1} = x P_k`` for ``2 <= k < n``."""
    P, _ = first_second_sequence(n, x)
    k = np.arange(2, n)
    lhs = jacobi_b(k - 1) * P[..., k - 2] + jacobi_b(k) * P[..., k]
    rhs = np.asarray(x)[..., None] * P[..., k - 1]
    scale = np.maximum(1.0, np.maximum(np.abs(lhs), np.abs(rhs)))
    return float(np.max(np.abs(lhs - rhs) / scale))


def first_kind_poly(n: int) -> PolySeq:
    """Float coefficients of ``P_n`` (ascending); for inspection, not evaluation."""
    prev, cur = np.zeros(1), np.ones(1)
    for k in range(1, n):
        nxt = np.zeros(k + 1)
        nxt[1:] += cur
        nxt[: len(prev)] -= jacobi_b(k - 1) * prev
        prev, cur = cur, nxt / jacobi_b(k)
    return PolySeq("first", n, tuple(float(c) for c in cur))


# --- Gaussian tail --------------------------------------------------------------

def _phi_series(u: float) -> float:
    # e^{u^2/2} * int_0^u e^{-s^2/2} ds = sum u^{2n+1}/(2n+1)!!
    term, total, k = u, u, 1
    while True:
        term *= u * u / (2 * k + 1)
        total += term
        if term <= 1e-17 * total:
            break
        k += 1
    return SQRT_HALF_PI * math.exp(0.5 * u * u) - total


def _phi_continued_fraction(u: float) -> float:
    # 1/(u + 1/(u + 2/(u + 3/(u + ...)))), modified Lentz
    tiny = 1e-300
    f = u
    c, d = u, 0.0
    for k in range(1, 10000):
        d = u + k * d
        d = 1.0 / (d if abs(d) > tiny else tiny)
        c = u + k / c
        if abs(c) < tiny:
            c = tiny
        delta = c * d
        f *= delta
        if abs(delta - 1.0) <= 1e-16:
            return 1.0 / f
    return 1.0 / f


def _phi_scalar(u: float) -> float:
    if not u >= 0.0:
        raise DomainError(f"phi_tail needs u >= 0, got {u}")
    if math.isinf(u):
        return 0.0
    return _phi_series(u) if u <= 2.0 else _phi_continued_fraction(u)


def phi_tail(u):
    """Mills-ratio function ``phi(u) = exp(u**2/2) * int_u^inf exp(-s**2/2) ds``.

    Maclaurin series on ``[0, 2]``, continued fraction beyond.  Satisfies
    ``phi'(u) = u phi(u) - 1``.  Accepts scalars or arrays of ``u >= 0``.
    """
    if np.ndim(u) == 0:
        return _phi_scalar(float(u))
    arr = np.asarray(u, dtype=float)
    return np.array([_phi_scalar(float(v)) for v in arr.ravel()]).reshape(arr.shape)


# --- exact integer families -------------------------------------------------------

def _derivative(c):
    return [k * c[k] for k in range(1, len(c))] or [0]


def _add(a, b):
    out = [0] * max(len(a), len(b))
    for i, v in enumerate(a):
        out[i] += v
    for i, v in enumerate(b):
        out[i] += v
    return out


def _shift(a, times=1):
    return [0] * times + list(a)


def _scale(a, s):
    return [s * v for v in a]


def _mul(a, b):
    out = [0] * (len(a) + len(b) - 1)
    for i, u in enumerate(a):
        for j, v in enumerate(b):
            out[i + j] += u * v
    return out


def _strip(a):
    a = list(a)
    while len(a) > 1 and a[-1] == 0:
        a.pop()
    return a


def kouba_polys(n: int):
    """Integer polynomials with ``P_{k+1} = x P_k + P_k'`` and ``Q_{k+1} = P_k + Q_k'``.

    Seeds ``(P_0, Q_0) = (1, 0)``; ``P_n(x) exp(x**2/2)`` is the n-th derivative
    of ``exp(x**2/2)``.
    """
    if not 0 <= n <= 60:
        raise DomainError("kouba_polys supports 0 <= n <= 60")
    P, Q = [1], [0]
    for _ in range(n):
        P, Q = _add(_shift(P), _derivative(P)), _add(P, _derivative(Q))
    return PolySeq("kouba_P", n, tuple(_strip(P))), PolySeq("kouba_Q", n, tuple(_strip(Q)))


def _plasma_pair(n):
    P = [[1], [0, 2]]
    Q = [[0], [1]]
    for k in range(1, n + 1):
        P.append(_add(_scale(_shift(P[k]), 2), _scale(P[k - 1], 2 * k)))
        Q.append(_add(_scale(_shift(Q[k]), 2), _scale(Q[k - 1], 2 * k)))
    return P, Q


def plasma_polys(n: int):
    """Plasma-dispersion polynomials and their Wronskian-type constant.

    Returns ``(P_n, Q_n, value)`` where ``value`` is the polynomial
    ``Q_{n+1} P_n - P_{n+1} Q_n``, which must reduce to the constant
    ``(-2)**n n!``.  Raises :class:`IdentityViolation` otherwise.
    """
    if not 0 <= n <= 20:
        raise DomainError("plasma_polys supports 0 <= n <= 20")
    P, Q = _plasma_pair(n)
    w = _strip(_add(_mul(Q[n + 1], P[n]), _scale(_mul(P[n + 1], Q[n]), -1)))
    if len(w) != 1:
        raise IdentityViolation(f"plasma Wronskian is not constant at n={n}: {w}")
    if w[0] != (-2) ** n * math.factorial(n):
        raise IdentityViolation(f"plasma Wronskian {w[0]} != (-2)^n n! at n={n}")
    return (
        PolySeq("plasma_P", n, tuple(_strip(P[n]))),
        PolySeq("plasma_Q", n, tuple(_strip(Q[n]))),
        int(w[0]),
    )


def exact_poly(kind: str, n: int) -> PolySeq:
    """One member of an integer family by ``kind`` tag."""
    if kind.startswith("kouba"):
        P, Q = kouba_polys(n)
    elif kind.startswith("plasma"):
        P, Q, _ = plasma_polys(n)
    else:
        raise DomainError(f"no exact coefficients for kind {kind!r}")
    return P if kind.endswith("P") else Q
