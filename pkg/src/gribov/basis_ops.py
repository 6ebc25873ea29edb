"""Coefficient-space actions of the ladder operators and their composites.

Elements of the Bargmann space are handled through their coefficients
against the orthonormal basis ``e_n(z) = z**n / sqrt(n!)``.  Restricted to
the negative imaginary axis the same coefficients describe expansions in
``u_n(y) = y**n / sqrt(n!)``; the ``basis`` tag keeps the two apart.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Mapping

import numpy as np
from scipy.special import gammaln

from .errors import DomainError

BASES = ("e", "u")


@dataclass(frozen=True)
class CoefficientVector:
    """Finite coefficient list with an index floor.

    ``entries[j]`` is the coefficient of basis element ``start + j``.
    """

    basis: str
    start: int
    entries: np.ndarray = field(repr=False)

    def __post_init__(self):
        if self.basis not in BASES:
            raise DomainError(f"unknown basis tag {self.basis!r}")
        if int(self.start) != self.start or self.start < 0:
            raise DomainError("start index must be a nonnegative integer")
        arr = np.array(self.entries, dtype=complex).ravel()
        if not np.all(np.isfinite(arr)):
            raise DomainError("coefficients must be finite")
        arr.setflags(write=False)
        object.__setattr__(self, "start", int(self.start))
        object.__setattr__(self, "entries", arr)

    # construction -------------------------------------------------------
    @classmethod
    def from_mapping(cls, coeffs: Mapping[int, complex], basis: str = "e"):
        """Build from ``{index: value}``; an empty mapping gives the zero vector."""
        if not coeffs:
            return cls(basis, 0, np.zeros(0))
        lo, hi = min(coeffs), max(coeffs)
        arr = np.zeros(hi - lo + 1, dtype=complex)
        for k, val in coeffs.items():
            arr[k - lo] = val
        return cls(basis, lo, arr)

    @classmethod
    def basis_vector(cls, n: int, basis: str = "e", value: complex = 1.0):
        return cls(basis, n, np.array([value], dtype=complex))

    @classmethod
    def from_json(cls, text_or_obj):
        obj = json.loads(text_or_obj) if isinstance(text_or_obj, str) else text_or_obj
        try:
            re = np.asarray(obj["re"], dtype=float)
            im = np.asarray(obj.get("im", [0.0] * len(re)), dtype=float)
            basis, start = obj["basis"], obj["start"]
        except (KeyError, TypeError, ValueError) as exc:
            raise DomainError(f"malformed coefficient vector: {exc}") from exc
        if re.shape != im.shape:
            raise DomainError("re and im arrays differ in length")
        return cls(basis, start, re + 1j * im)

    # views ----------------------------------------------------------------
    @property
    def stop(self) -> int:
        """One past the last stored index."""
        return self.start + len(self.entries)

    def coefficient(self, n: int) -> complex:
        j = n - self.start
        if 0 <= j < len(self.entries):
            return complex(self.entries[j])
        return 0j

    def dense(self, size: int) -> np.ndarray:
        """Coefficients of indices ``0..size-1`` as a complex array."""
        out = np.zeros(size, dtype=complex)
        lo, hi = self.start, min(self.stop, size)
        if hi > lo:
            out[lo:hi] = self.entries[: hi - lo]
        return out

    def norm2(self) -> float:
        return float(np.sum(np.abs(self.entries) ** 2))

    def to_dict(self, atol: float = 0.0) -> dict[int, complex]:
        return {self.start + j: complex(c) for j, c in enumerate(self.entries) if abs(c) > atol}

    def trimmed(self) -> "CoefficientVector":
        """Drop leading and trailing zeros."""
        nz = np.flatnonzero(self.entries)
        if nz.size == 0:
            return CoefficientVector(self.basis, self.start, np.zeros(0))
        return CoefficientVector(self.basis, self.start + nz[0], self.entries[nz[0] : nz[-1] + 1])

    def to_json_obj(self) -> dict:
        return {
            "basis": self.basis,
            "start": self.start,
            "re": [float(c.real) for c in self.entries],
            "im": [float(c.imag) for c in self.entries],
        }

    # arithmetic -------------------------------------------------------------
    def _aligned(self, other):
        if self.basis != other.basis:
            raise DomainError("cannot combine vectors in different bases")
        lo = min(self.start, other.start)
        hi = max(self.stop, other.stop)
        return lo, self.dense(hi)[lo:], other.dense(hi)[lo:]

    def __add__(self, other):
        lo, a, b = self._aligned(other)
        return CoefficientVector(self.basis, lo, a + b)

    def __sub__(self, other):
        lo, a, b = self._aligned(other)
        return CoefficientVector(self.basis, lo, a - b)

    def __mul__(self, scalar):
        return CoefficientVector(self.basis, self.start, self.entries * complex(scalar))

    __rmul__ = __mul__

    def evaluate(self, y):
        """Evaluate ``sum c_n y**n / sqrt(n!)`` at real or complex points."""
        y = np.asarray(y, dtype=complex if np.iscomplexobj(y) or self.basis == "e" else float)
        out = np.zeros(y.shape, dtype=complex)
        if len(self.entries) == 0:
            return out
        # u_start via log-gamma, then the ratio u_{n+1} = u_n * y / sqrt(n+1)
        with np.errstate(divide="ignore", invalid="ignore"):
            term = np.exp(-0.5 * gammaln(self.start + 1)) * np.power(y.astype(complex), self.start)
        for j, c in enumerate(self.entries):
            out += c * term
            term = term * y / np.sqrt(self.start + j + 1.0)
        return out


@dataclass(frozen=True)
class OperatorParams:
    """Parameters of the operator family: ``mu A*A + i lam A*(A + A*)A`` and ``H^{p,m}``."""

    mu: float = 0.0
    lam: float = 1.0
    p: int = 1
    m: int = 1

    def __post_init__(self):
        if self.p < 1 or self.m < 1:
            raise DomainError("p and m must be at least 1")


def _from_range(basis, lo, arr):
    # clip negative indices; they carry no basis element
    if lo < 0:
        arr = arr[-lo:]
        lo = 0
    return CoefficientVector(basis, lo, arr)


def _require_basis(v, basis="e"):
    if v.basis != basis:
        raise DomainError(f"expected a vector in the {basis}-basis, got {v.basis!r}")


def ladder_down(v: CoefficientVector) -> CoefficientVector:
    """Annihilation operator, ``A e_n = sqrt(n) e_{n-1}``."""
    _require_basis(v)
    n = np.arange(v.start, v.stop)
    return _from_range("e", v.start - 1, np.sqrt(n) * v.entries)


def ladder_up(v: CoefficientVector) -> CoefficientVector:
    """Creation operator, ``A* e_n = sqrt(n+1) e_{n+1}``."""
    _require_basis(v)
    n = np.arange(v.start, v.stop)
    return CoefficientVector("e", v.start + 1, np.sqrt(n + 1.0) * v.entries)


def jacobi_b(n):
    """Off-diagonal weights ``b_n = n sqrt(n+1)``; ``b_0 = 0``."""
    n = np.asarray(n, dtype=float)
    return n * np.sqrt(n + 1.0)


def gribov_apply(params: OperatorParams, v: CoefficientVector) -> CoefficientVector:
    """Tridiagonal action ``mu n v_n + i lam (b_{n-1} v_{n-1} + b_n v_{n+1})``.

    The input must lie in the subspace vanishing at the origin, so
    ``v.start >= 1``; the output keeps the same index floor.
    """
    _require_basis(v)
    if v.start < 1:
        raise DomainError("gribov_apply acts on vectors with start index >= 1")
    if len(v.entries) == 0:
        return v
    # b_0 = 0, so nothing reaches e_0
    lo, hi = max(v.start - 1, 1), v.stop
    x = v.dense(hi + 2)
    n = np.arange(lo, hi + 1)
    out = params.mu * n * x[n] + 1j * params.lam * (jacobi_b(n - 1) * x[n - 1] + jacobi_b(n) * x[n + 1])
    return CoefficientVector("e", lo, out)


def log_factorial(n):
    n = np.asarray(n, dtype=float)
    return gammaln(n + 1.0)


SHORT_RATIO = 64


def log_factorial_ratio(a, b):
    """``log(a!/b!)`` for nonnegative integers.

    Short ranges sum ``log j`` over the factors directly; this avoids the
    cancellation between two large log-gamma values.
    """
    a, b = np.broadcast_arrays(np.asarray(a, dtype=np.int64), np.asarray(b, dtype=np.int64))
    span = int(np.max(np.abs(a - b))) if a.size else 0
    if span > SHORT_RATIO:
        return log_factorial(a) - log_factorial(b)
    lo, hi = np.minimum(a, b), np.maximum(a, b)
    out = np.zeros(a.shape)
    for t in range(1, span + 1):
        j = lo + t
        out += np.where(j <= hi, np.log(np.maximum(j, 1)), 0.0)
    return np.where(a >= b, out, -out)


def heun_up_coefficients(k, p: int, m: int):
    """``sqrt(k! (k+m)!) / (k-p)!`` for ``k >= p``, zero below."""
    k = np.asarray(k)
    ok = k >= p
    kk = np.where(ok, k, p)
    val = np.exp(0.5 * log_factorial_ratio(kk + m, kk) + log_factorial_ratio(kk, kk - p))
    return np.where(ok, val, 0.0)


def heun_down_coefficients(k, p: int, m: int):
    """``sqrt(k! (k-m)!) / (k-p-m)!`` for ``k >= p+m``, zero below."""
    k = np.asarray(k)
    ok = k >= p + m
    kk = np.where(ok, k, p + m)
    val = np.exp(0.5 * log_factorial_ratio(kk, kk - m) + log_factorial_ratio(kk - m, kk - p - m))
    return np.where(ok, val, 0.0)


def heun_pm_apply(params: OperatorParams, v: CoefficientVector) -> CoefficientVector:
    """Apply ``A*^p (A^m + A*^m) A^p`` using its three-case basis action.

    ``e_k`` with ``k < p`` is annihilated; for ``p <= k < p+m`` only the
    up-shift to ``e_{k+m}`` survives; for ``k >= p+m`` the down-shift to
    ``e_{k-m}`` is added.
    """
    _require_basis(v)
    p, m = params.p, params.m
    if len(v.entries) == 0:
        return v
    k = np.arange(v.start, v.stop)
    lo, hi = v.start - m, v.stop + m
    out = np.zeros(hi - lo, dtype=complex)
    out[k + m - lo] += heun_up_coefficients(k, p, m) * v.entries
    out[k - m - lo] += heun_down_coefficients(k, p, m) * v.entries
    return _from_range("e", lo, out)


def shift_coefficients(j, p: int, m: int):
    """Weights ``omega_j = sqrt(j! (j-m)!) / (j-p)!``; zero when ``j-m < 0`` or ``j-p < 0``."""
    j = np.asarray(j)
    ok = (j - m >= 0) & (j - p >= 0)
    jj = np.where(ok, j, max(p, m))
    val = np.exp(0.5 * (log_factorial_ratio(jj, jj - p) + log_factorial_ratio(jj - m, jj - p)))
    return np.where(ok, val, 0.0)


def shift_apply(params: OperatorParams, v: CoefficientVector) -> CoefficientVector:
    """Weighted backward shift: output at ``k-1`` is ``omega_{k-1}`` times input at ``k``."""
    _require_basis(v)
    if len(v.entries) == 0:
        return v
    k = np.arange(v.start, v.stop)
    out = shift_coefficients(k - 1, params.p, params.m) * v.entries
    return _from_range("e", v.start - 1, out)


def operator_matrix(apply, size: int, start: int = 0, params=None) -> np.ndarray:
    """Dense matrix of ``apply`` on basis indices ``start..start+size-1`` (columns = inputs)."""
    mat = np.zeros((size, size), dtype=complex)
    for j in range(size):
        e = CoefficientVector.basis_vector(start + j)
        w = apply(params, e) if params is not None else apply(e)
        mat[:, j] = w.dense(start + size)[start:]
    return mat
