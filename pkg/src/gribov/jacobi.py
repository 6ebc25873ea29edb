"""Truncated Jacobi matrices of the Gribov operator and block matrices of ``H^{p,m}``.

The n-truncation on ``e_1..e_n`` has diagonal ``mu k`` and symmetric
off-diagonal ``i lam b_k`` with ``b_k = k sqrt(k+1)``.  Its characteristic
polynomial follows a three-term recurrence with real coefficients, so
non-real eigenvalues come in conjugate pairs.
"""
from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np
import scipy.linalg

from .basis_ops import heun_up_coefficients, jacobi_b, log_factorial_ratio
from .errors import DomainError, NonConvergence

RESCALE_AT = 2.0**100


@dataclass(frozen=True)
class ScalarJacobiSpec:
    mu: float
    lam: float
    n: int

    def __post_init__(self):
        if self.n < 1:
            raise DomainError("truncation size must be at least 1")

    @property
    def diagonal(self) -> np.ndarray:
        return self.mu * np.arange(1, self.n + 1, dtype=float)

    @property
    def offdiagonal(self) -> np.ndarray:
        """``b_1..b_{n-1}``; the matrix entries are ``i lam b_k``."""
        return jacobi_b(np.arange(1, self.n))

    def gershgorin_radius(self) -> float:
        b = np.concatenate([[0.0], self.offdiagonal, [0.0]])
        rows = np.abs(self.diagonal) + abs(self.lam) * (b[:-1] + b[1:])
        return float(rows.max())

    def matrix(self) -> np.ndarray:
        """Complex symmetric n x n truncation."""
        off = 1j * self.lam * self.offdiagonal
        return np.diag(self.diagonal).astype(complex) + np.diag(off, 1) + np.diag(off, -1)

    def real_form(self) -> np.ndarray:
        """Real tridiagonal matrix similar to :meth:`matrix` via ``diag(i**k)``."""
        b = self.lam * self.offdiagonal
        return np.diag(self.diagonal) + np.diag(-b, 1) + np.diag(b, -1)


@dataclass(frozen=True)
class BlockJacobiSpec:
    """Block Jacobi layout of ``H^{p,m}`` on ``e_k``, ``k >= p``.

    Block ``i`` collects the indices ``k = p-1 + (i-1) m + r`` for
    ``r = 1..m``; diagonal blocks vanish and the off-diagonal blocks are
    diagonal with entries ``beta_k = sqrt(k! (k+m)!)/(k-p)!``.
    """

    p: int
    m: int
    J: int = 500

    def __post_init__(self):
        if self.p < 1 or self.m < 1:
            raise DomainError("p and m must be at least 1")
        if self.J < 1:
            raise DomainError("block count must be positive")

    def indices(self, i):
        i = np.asarray(i)
        r = np.arange(1, self.m + 1)
        return self.p - 1 + (i[..., None] - 1) * self.m + r

    def log_entries(self, i):
        k = self.indices(i)
        return 0.5 * log_factorial_ratio(k + self.m, k) + log_factorial_ratio(k, k - self.p)


@dataclass(frozen=True)
class SpectrumResult:
    n: int
    mu: float
    lam: float
    eigenvalues: np.ndarray = field(repr=False)
    residuals: np.ndarray = field(repr=False)
    tol: float = 1e-12
    method: str = "aberth"
    iterations: int = 0

    @property
    def converged(self) -> np.ndarray:
        return self.residuals <= self.tol

    def to_json_obj(self) -> dict:
        return {
            "n": self.n,
            "mu": self.mu,
            "lambda": self.lam,
            "eig_re": self.eigenvalues.real.tolist(),
            "eig_im": self.eigenvalues.imag.tolist(),
            "residual": self.residuals.tolist(),
        }


def charpoly_eval(spec: ScalarJacobiSpec, x):
    """Characteristic polynomial ``det(H_n - x)`` and its x-derivative.

    Uses ``p_k = (mu k - x) p_{k-1} + lam**2 b_{k-1}**2 p_{k-2}``.  Whenever
    ``max(|p_k|, |p_{k-1}|)`` exceeds ``2**100`` the pair (and the derivative
    pair) is divided by that magnitude.  Returns ``(value, derivative,
    log_scale)``; the true values are ``value * exp(log_scale)``.
    """
    x = np.asarray(x, dtype=complex)
    lam2 = float(spec.lam) ** 2
    p_prev = np.ones(x.shape, dtype=complex)
    d_prev = np.zeros(x.shape, dtype=complex)
    p = spec.mu - x
    d = -np.ones(x.shape, dtype=complex)
    log_scale = np.zeros(x.shape)
    for k in range(2, spec.n + 1):
        c = lam2 * (k - 1) ** 2 * k  # b_{k-1}^2
        a = spec.mu * k - x
        p, p_prev = a * p + c * p_prev, p
        d, d_prev = a * d - p_prev + c * d_prev, d
        big = np.maximum(np.abs(p), np.abs(p_prev))
        over = big > RESCALE_AT
        if over.any():
            s = np.where(over, big, 1.0)
            p, p_prev, d, d_prev = p / s, p_prev / s, d / s, d_prev / s
            log_scale += np.log(s)
    if x.ndim == 0:
        return complex(p), complex(d), float(log_scale)
    return p, d, log_scale


def scaled_residual(spec: ScalarJacobiSpec, z):
    """``|p_n(z)| / (|p_n'(z)| max(1, |z|))``: the relative Newton correction at ``z``."""
    p, d, _ = charpoly_eval(spec, z)
    with np.errstate(divide="ignore", invalid="ignore"):
        r = np.abs(p) / (np.abs(d) * np.maximum(1.0, np.abs(z)))
    return np.where(np.isfinite(r), r, np.inf)


def _initial_guesses(spec):
    n = spec.n
    j = np.arange(n)
    radius = spec.gershgorin_radius()
    return radius * np.exp(1j * (2 * np.pi * j / n + 0.4)) * (1 + 0.01 * np.sin(3 * j))


def _aberth(spec, tol, max_iter):
    z = _initial_guesses(spec)
    active = np.ones(spec.n, dtype=bool)
    # give up early once the active set stops shrinking
    patience, last_count, last_change = max(100, spec.n), spec.n, 0
    for it in range(1, max_iter + 1):
        idx = np.flatnonzero(active)
        p, d, _ = charpoly_eval(spec, z[idx])
        ratio = p / d
        r = np.abs(ratio) / np.maximum(1.0, np.abs(z[idx]))
        done = r <= tol
        # interaction with every other root, frozen or not
        diff = z[idx, None] - z[None, :]
        diff[np.arange(idx.size), idx] = 1.0
        inv = 1.0 / diff
        inv[np.arange(idx.size), idx] = 0.0
        s = inv.sum(axis=1)
        w = ratio / (1.0 - ratio * s)
        w[done] = 0.0
        z[idx] = z[idx] - w
        active[idx[done]] = False
        count = int(active.sum())
        if count == 0:
            return z, it
        if count < last_count:
            last_count, last_change = count, it
        elif it - last_change > patience:
            break
    bad = np.flatnonzero(active)
    raise NonConvergence(
        f"{bad.size} of {spec.n} roots above tolerance {tol:g} after {it} sweeps",
        index=int(bad[0]),
    )


def _newton_polish(spec, z, steps=3):
    z = z.copy()
    best = scaled_residual(spec, z)
    for _ in range(steps):
        p, d, _ = charpoly_eval(spec, z)
        with np.errstate(divide="ignore", invalid="ignore"):
            trial = z - p / d
        trial = np.where(np.isfinite(trial), trial, z)
        r = scaled_residual(spec, trial)
        better = r < best
        z = np.where(better, trial, z)
        best = np.where(better, r, best)
    return z, best


def truncated_spectrum(spec: ScalarJacobiSpec, tol: float = 1e-12, method: str = "aberth",
                       max_iter: int | None = None) -> SpectrumResult:
    """All eigenvalues of the n-truncation.

    ``method="aberth"`` runs simultaneous Aberth-Ehrlich iteration on the
    characteristic-polynomial recurrence from a Gershgorin circle, freezing
    each root once its scaled residual is below ``tol``; a final Newton
    sweep polishes the converged set.  Raises :class:`NonConvergence` if
    some root is still above ``tol`` after ``max_iter`` sweeps.

    ``method="dense"`` diagonalises the real similar matrix with LAPACK and
    Newton-polishes each eigenvalue on the recurrence.  It is meant for large
    n where outer eigenvalues are too ill-conditioned for the recurrence to
    resolve; residuals are reported but not enforced.
    """
    if not tol > 0:
        raise DomainError("tolerance must be positive")
    if spec.n > 4096:
        raise DomainError("truncation size above the supported ceiling of 4096")
    if spec.n == 1:
        z = np.array([complex(spec.mu)])
        return SpectrumResult(1, spec.mu, spec.lam, z, np.zeros(1), tol, method, 0)
    if method == "aberth":
        max_iter = max_iter or max(200, 4 * spec.n)
        z, its = _aberth(spec, tol, max_iter)
        z, res = _newton_polish(spec, z, steps=1)
    elif method == "dense":
        z = scipy.linalg.eigvals(spec.real_form(), check_finite=False)
        z, res = _newton_polish(spec, z.astype(complex))
        its = 0
    else:
        raise DomainError(f"unknown eigenvalue method {method!r}")
    order = np.lexsort((z.imag, z.real))
    return SpectrumResult(spec.n, spec.mu, spec.lam, z[order], res[order], tol, method, its)


AUTO_DENSE_ABOVE = 128


@dataclass(frozen=True)
class Sigma0Point:
    mu: float
    sigma0: complex
    residual: float


def sigma0(spec: ScalarJacobiSpec, tol: float = 1e-8, method: str = "auto") -> Sigma0Point:
    """Eigenvalue of minimal real part among roots whose residual is below ``tol``."""
    if method == "auto":
        if spec.n <= AUTO_DENSE_ABOVE:
            try:
                return sigma0(spec, tol, "aberth")
            except NonConvergence:
                pass
        method = "dense"
    res = truncated_spectrum(spec, tol=min(tol, 1e-12) if method == "aberth" else tol, method=method)
    ok = np.flatnonzero(res.residuals <= tol)
    if ok.size == 0:
        raise NonConvergence("no eigenvalue met the residual tolerance", index=0)
    j = ok[np.argmin(res.eigenvalues.real[ok])]
    return Sigma0Point(spec.mu, complex(res.eigenvalues[j]), float(res.residuals[j]))


def sigma0_curve(lam: float, mu_grid, n: int, tol: float = 1e-8, method: str = "auto",
                 threads: int = 1) -> list[Sigma0Point]:
    """``sigma0(mu)`` on a grid of positive ``mu`` at truncation size ``n``.

    ``method="auto"`` uses Aberth-Ehrlich up to n = 128 and the dense path
    above that, or when Aberth-Ehrlich does not converge.
    """
    mus = [float(mu) for mu in mu_grid]
    if any(not mu > 0 for mu in mus):
        raise DomainError("sigma0_curve needs mu > 0")
    specs = [ScalarJacobiSpec(mu, lam, n) for mu in mus]
    if threads > 1 and len(specs) > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            return list(pool.map(lambda s: sigma0(s, tol, method), specs))
    return [sigma0(s, tol, method) for s in specs]


# --- block Jacobi -----------------------------------------------------------------

def block_entries(spec: BlockJacobiSpec, i: int):
    """Diagonal of ``B_i`` with its exact norm (max entry) and inverse norm (1/min entry)."""
    if not 1 <= i <= spec.J:
        raise DomainError(f"block index {i} outside 1..{spec.J}")
    entries = heun_up_coefficients(spec.indices(i), spec.p, spec.m)
    return entries, float(entries.max()), float(1.0 / entries.min())


def block_log_norms(spec: BlockJacobiSpec, count: int | None = None):
    """``log ||B_i||`` and ``log ||B_i^{-1}||^{-1}`` for ``i = 1..count``."""
    i = np.arange(1, (count or spec.J) + 1)
    logs = spec.log_entries(i)
    return logs.max(axis=1), logs.min(axis=1)


def lemma33_threshold(spec: BlockJacobiSpec, exact: bool = True, rtol: float = 1e-12):
    """Smallest ``i0`` with ``||B_{i-1}|| ||B_{i+1}|| <= ||B_i^{-1}||^{-2}`` for all ``i0 <= i < J``.

    ``exact=False`` replaces ``||B_i^{-1}||^{-1}`` by ``||B_i||``, which is
    only correct for scalar blocks.  Returns ``None`` when the inequality
    fails at ``i = J-1``.
    """
    log_max, log_min = block_log_norms(spec)
    lower = log_min if exact else log_max
    lhs = log_max[:-2] + log_max[2:]
    rhs = 2 * lower[1:-1]
    ok = lhs <= rhs + rtol * np.abs(rhs)
    if ok.size == 0 or not ok[-1]:
        return None
    bad = np.flatnonzero(~ok)
    return int(bad[-1] + 3) if bad.size else 2


def inverse_norm_sum(spec: BlockJacobiSpec):
    """Partial sums of ``1/||B_i||`` for ``i = 1..J``."""
    log_max, _ = block_log_norms(spec)
    return np.cumsum(np.exp(-log_max))


def log_concavity_check(kmax: int = 10_000) -> bool:
    """``b_{k-1} b_{k+1} <= b_k**2`` for ``1 <= k <= kmax`` in integer arithmetic.

    Squared, the inequality reads ``(k-1)**2 k (k+1)**2 (k+2) <= k**4 (k+1)**2``.
    """
    for k in range(1, kmax + 1):
        if (k - 1) ** 2 * k * (k + 1) ** 2 * (k + 2) > k**4 * (k + 1) ** 2:
            return False
    return True
