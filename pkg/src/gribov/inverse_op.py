"""The right inverse ``K_{mu,lam}`` of the Gribov operator on the negative imaginary axis.

On ``y >= 0`` the inverse is the integral operator

    K psi(y) = int_0^inf N(y, s) psi(s) ds,
    N(y, s) = exp(-s**2/2 - c s) / (lam s) * int_0^{min(y,s)} exp(u**2/2 + c u) du,

with ``c = mu/lam``.  For ``mu = 0`` its action on ``u_n(y) = y**n/sqrt(n!)``
is captured exactly by a two-term recurrence seeded with ``v_1 = K u_1``;
this module keeps that recurrence as a ledger of polynomial parts plus
multiples of ``v_1``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.integrate import quad
from scipy.special import gammaln

from .basis_ops import CoefficientVector, jacobi_b
from .errors import BoundViolation, DomainError, NonConvergence
from .fitting import decay_exponent, power_tail
from .ortho_poly import phi_tail
from .quadrature import composite_rule, graded_edges, uniform_rule

# inner integrals are cut where the Gaussian factor drops below e^{-45}
CUT_EXPONENT = 45.0
DEFAULT_SEED = 20240601


@dataclass(frozen=True)
class KernelSpec:
    mu: float
    lam: float
    L: float = 12.0
    node_count: int = 400

    def __post_init__(self):
        if self.lam == 0:
            raise DomainError("lambda must be nonzero")
        if self.mu / self.lam < 0:
            raise DomainError("negative mu/lambda is not supported")
        if not self.L > 0:
            raise DomainError("truncation length must be positive")
        if self.node_count < 1:
            raise DomainError("node count must be positive")

    @property
    def c(self) -> float:
        return self.mu / self.lam

    def tail_weight(self) -> float:
        """``exp(-L**2/2 - c L)``, the kernel's Gaussian factor at the cut-off."""
        return math.exp(-0.5 * self.L**2 - self.c * self.L)


# --- kernel -----------------------------------------------------------------------

def log_incomplete_integral(m, c: float = 0.0):
    """``log int_0^m exp(u**2/2 + c u) du`` for ``m >= 0`` and ``c >= 0``.

    Maclaurin series ``sum a_n m**(n+1)/(n+1)`` with
    ``(n+1) a_{n+1} = c a_n + a_{n-1}``; all terms are positive.  Terms are
    accumulated with Kahan summation and rescaled in the log domain so the
    result stays finite far beyond ``exp(700)``.
    """
    m = np.asarray(m, dtype=float)
    if c < 0:
        raise DomainError("log_incomplete_integral needs c >= 0")
    if np.any(m < 0):
        raise DomainError("upper limit must be nonnegative")
    out = np.full(m.shape, -np.inf)
    pos = m > 0
    if not pos.any():
        return out
    x = m[pos]
    t_prev = np.zeros_like(x)
    t = np.ones_like(x)
    total = np.ones_like(x)
    comp = np.zeros_like(x)
    log_scale = np.zeros_like(x)
    peak = x * x + c * x
    n = 0
    while True:
        t_next = (c * x * t + x * x * t_prev) / (n + 1)
        n += 1
        term = t_next / (n + 1)
        # Kahan step
        yk = term - comp
        s = total + yk
        comp = (s - total) - yk
        total = s
        t_prev, t = t, t_next
        big = t > 1e200
        if big.any():
            f = np.where(big, t, 1.0)
            t, t_prev, total, comp = t / f, t_prev / f, total / f, comp / f
            log_scale += np.log(f)
        # two consecutive terms: for c = 0 every odd term vanishes
        if n > 2 and np.all((n > peak) & (t + t_prev <= 1e-17 * (n + 1) * total)):
            break
        if n > 200000:
            raise NonConvergence("incomplete integral series did not settle")
    out[pos] = np.log(x) + np.log(total) + log_scale
    return out


def j_function(m, c: float = 0.0):
    """``exp(-m**2/2 - c m) int_0^m exp(u**2/2 + c u) du``, bounded by ``~1/(m + c)``."""
    m = np.asarray(m, dtype=float)
    with np.errstate(divide="ignore"):
        return np.where(m > 0, np.exp(log_incomplete_integral(m, c) - 0.5 * m * m - c * m), 0.0)


def kernel_eval(spec: KernelSpec, y, s):
    """``N(y, s)``; zero when ``y = 0`` or ``s = 0``."""
    y = np.asarray(y, dtype=float)
    s = np.asarray(s, dtype=float)
    if np.any(y < 0) or np.any(s < 0):
        raise DomainError("kernel arguments must be nonnegative")
    y, s = np.broadcast_arrays(y, s)
    low = np.minimum(y, s)
    pos = low > 0
    out = np.zeros(y.shape)
    if pos.any():
        ss = s[pos]
        # grids repeat the same min(y, s) many times
        uniq, inverse = np.unique(low[pos], return_inverse=True)
        log_i = log_incomplete_integral(uniq, spec.c)[inverse.ravel()]
        out[pos] = np.exp(log_i - 0.5 * ss * ss - spec.c * ss) / (spec.lam * ss)
    return out if out.ndim else float(out)


def _inner_cut(u, c):
    # t with t(2u+t)/2 + c t = CUT_EXPONENT
    a = u + c
    return -a + np.sqrt(a * a + 2 * CUT_EXPONENT)


def apply_quadrature(spec: KernelSpec, psi, y_grid, order: int = 20):
    """``K psi`` at ``y_grid`` from the swapped-order double integral.

    ``K psi(y) = int_0^y h(u) du`` with
    ``h(u) = int_0^inf exp(-(t(2u+t)/2 + c t)) psi(u+t) / (lam (u+t)) dt``;
    both integrals use composite Gauss-Legendre rules, the inner one on
    panels graded towards ``t = 0``.  ``psi`` is a vectorised callable.
    """
    y_grid = np.atleast_1d(np.asarray(y_grid, dtype=float))
    if np.any(y_grid < 0):
        raise DomainError("evaluation points must be nonnegative")
    c = spec.c
    out = np.zeros(y_grid.shape, dtype=complex)
    for i, y in enumerate(y_grid):
        if y == 0:
            continue
        u, wu = composite_rule(np.linspace(0.0, y, int(math.ceil(y)) + 1), order)
        h = np.zeros(u.shape, dtype=complex)
        for j, uj in enumerate(u):
            t, wt = composite_rule(graded_edges(max(uj, 1e-3), _inner_cut(uj, c)), order)
            s = uj + t
            f = np.exp(-(t * (2 * uj + t) / 2 + c * t)) * psi(s) / (spec.lam * s)
            h[j] = np.dot(wt, f)
        out[i] = np.dot(wu, h)
    return out.real if np.isrealobj(psi(np.array([1.0]))) else out


# --- v_1 = K u_1 ------------------------------------------------------------------------

def v1_eval(lam: float, y):
    """``v_1(y) = (1/lam) int_0^y phi(u) du`` by adaptive quadrature."""
    if lam == 0:
        raise DomainError("lambda must be nonzero")
    ys = np.atleast_1d(np.asarray(y, dtype=float))
    if np.any(ys < 0):
        raise DomainError("v1_eval needs y >= 0")
    vals = np.array([quad(phi_tail, 0.0, v, epsabs=0.0, epsrel=1e-13, limit=200)[0] if v > 0 else 0.0
                     for v in ys])
    vals = vals / lam
    return float(vals[0]) if np.ndim(y) == 0 else vals.reshape(np.shape(y))


def v1_coefficients(lam: float, n_max: int):
    """``(gamma_n, delta_n)`` for ``n = 0..n_max``: coefficients of ``u_{2n+1}`` and ``u_{2n+2}``.

    ``gamma_n = sqrt(pi/2) sqrt((2n)!) / (2**n n! sqrt(2n+1)) / lam`` and
    ``delta_n = -2**n n! / sqrt(2(n+1)(2n+1)!) / lam``.
    """
    # cumulative log-ratios keep the relative error near n * eps
    k = np.arange(1, n_max + 1, dtype=float)
    log_g = 0.5 * math.log(math.pi / 2) + np.concatenate(
        [[0.0], np.cumsum(0.5 * (np.log1p(-0.5 / k) + np.log1p(-2.0 / (2 * k + 1))))])
    log_d = -0.5 * math.log(2.0) + np.concatenate(
        [[0.0], np.cumsum(0.5 * (np.log1p(-1.0 / (2 * k + 1)) + np.log1p(-1.0 / (k + 1))))])
    return np.exp(log_g) / lam, -np.exp(log_d) / lam


def v1_series(lam: float, n_max: int = 200) -> CoefficientVector:
    """u-basis expansion of ``v_1`` through ``u_{2 n_max + 2}``."""
    if not 0 <= n_max <= 2000:
        raise DomainError("v1_series supports 0 <= n_max <= 2000")
    g, d = v1_coefficients(lam, n_max)
    entries = np.empty(2 * n_max + 2)
    entries[0::2], entries[1::2] = g, d
    return CoefficientVector("u", 1, entries)


# --- the ledger -------------------------------------------------------------------------

@dataclass(frozen=True)
class LedgerForm:
    """``poly + v1_coeff * v_1`` with ``poly`` a u-basis vector."""

    poly: CoefficientVector
    v1_coeff: complex

    def evaluate(self, lam: float, y):
        return self.poly.evaluate(y) + self.v1_coeff * v1_eval(lam, y)


@dataclass(frozen=True)
class InverseLedger:
    """Recurrence data of ``K_{0,lam}``: ``K u_n = v_n = P_{n-1} + alpha_n v_1``.

    Arrays are indexed by ``n`` (entry 0 unused): ``A_n = 1/(lam n sqrt(n+1))``,
    ``B_n = (n-1)/sqrt(n(n+1))``, ``alpha`` and ``p_n = ||P_n||**2``.
    """

    lam: float
    N: int
    A: np.ndarray = field(repr=False)
    B: np.ndarray = field(repr=False)
    alpha: np.ndarray = field(repr=False)
    p: np.ndarray = field(repr=False)

    def poly_coefficients(self, n: int) -> np.ndarray:
        """Coefficients of ``P_n`` on ``u_1..u_n`` (entry ``k-1`` <-> ``u_k``)."""
        out = np.zeros(n)
        if n < 1:
            return out
        ks = np.arange(n, 0, -2)
        # P_n = A_n u_n + B_n A_{n-2} u_{n-2} + B_n B_{n-2} A_{n-4} u_{n-4} + ...
        factors = np.concatenate([[1.0], np.cumprod(self.B[ks[:-1]])])
        out[ks - 1] = self.A[ks] * factors
        return out

    def poly_part(self, n: int) -> CoefficientVector:
        return CoefficientVector("u", 1, self.poly_coefficients(n))

    def poly_matrix(self, size: int) -> np.ndarray:
        """Column ``n-1`` holds ``P_{n-1}`` on ``u_1..u_size`` for ``n = 1..size``."""
        mat = np.zeros((size, size))
        for n in range(2, size + 1):
            col = mat[:, n - 1]
            col[n - 2] = self.A[n - 1]
            if n >= 4:
                col += self.B[n - 1] * mat[:, n - 3]
        return mat

    def apply(self, v: CoefficientVector) -> LedgerForm:
        """``K v`` for a finitely supported u-basis vector with ``start >= 1``."""
        if v.basis != "u" or v.start < 1:
            raise DomainError("ledger acts on u-basis vectors with start >= 1")
        if v.stop - 1 > self.N:
            raise DomainError(f"vector reaches u_{v.stop - 1}, ledger only to u_{self.N}")
        size = max(v.stop - 2, 1)
        poly = np.zeros(size, dtype=complex)
        v1 = 0j
        for j, c in enumerate(v.entries):
            n = v.start + j
            if c == 0:
                continue
            poly[: n - 1] += c * self.poly_coefficients(n - 1)
            v1 += c * self.alpha[n]
        return LedgerForm(CoefficientVector("u", 1, poly), v1)


def ledger_build(lam: float, N: int) -> InverseLedger:
    """Fill ``A_n``, ``B_n``, ``alpha_n`` and ``p_n`` for ``n = 1..N``."""
    if lam == 0:
        raise DomainError("lambda must be nonzero")
    if N < 4:
        raise DomainError("ledger needs N >= 4")
    n = np.arange(N + 2, dtype=float)
    A = np.zeros(N + 2)
    B = np.zeros(N + 2)
    A[1:] = 1.0 / (lam * n[1:] * np.sqrt(n[1:] + 1))
    B[1:] = (n[1:] - 1) / np.sqrt(n[1:] * (n[1:] + 1))
    alpha = np.zeros(N + 2)
    alpha[1] = 1.0
    for k in range(2, N + 2):
        alpha[k] = B[k - 1] * alpha[k - 2]
    p = np.zeros(N + 2)
    p[1], p[2] = A[1] ** 2, A[2] ** 2
    for k in range(3, N + 2):
        p[k] = B[k] ** 2 * p[k - 2] + A[k] ** 2
    return InverseLedger(lam, N, A[: N + 1], B[: N + 1], alpha[: N + 1], p[: N + 1])


def apply_recurrence(lam: float, v: CoefficientVector, y_grid=None, ledger: InverseLedger | None = None):
    """Exact ledger form of ``K_{0,lam} v`` and, if ``y_grid`` is given, its samples."""
    ledger = ledger or ledger_build(lam, max(v.stop, 4))
    form = ledger.apply(v)
    if y_grid is None:
        return form, None
    return form, form.evaluate(lam, np.asarray(y_grid, dtype=float))


def _apply_h(lam, coeffs):
    """``H_lam`` on u-basis coefficients ``c_1..c_n``: ``H u_k = lam(-b_{k-1} u_{k-1} + b_k u_{k+1})``."""
    n = coeffs.size
    k = np.arange(1, n + 1)
    out = np.zeros(n + 1, dtype=coeffs.dtype)
    out[1:] += lam * jacobi_b(k) * coeffs  # to k+1
    out[: n - 1] -= lam * jacobi_b(k[1:] - 1) * coeffs[1:]  # to k-1
    return out


def right_inverse_residual(lam: float, N: int) -> float:
    """``max_{2<=n<=N} ||H_lam K u_n - u_n||`` computed in coefficient space.

    Uses ``K u_n = P_{n-1} + alpha_n v_1`` and ``H_lam v_1 = u_1``.
    """
    if N < 2:
        raise DomainError("right_inverse_residual needs N >= 2")
    ledger = ledger_build(lam, max(N, 4))
    worst = 0.0
    for n in range(2, N + 1):
        r = _apply_h(lam, ledger.poly_coefficients(n - 1))  # indices 1..n
        r[0] += ledger.alpha[n]
        r[n - 1] -= 1.0
        worst = max(worst, float(np.linalg.norm(r)))
    return worst


def v1_seed_residual(lam: float, n_max: int = 400) -> float:
    """``||H_lam v_1 - u_1||`` on the first ``n_max`` coefficients of the series."""
    c = v1_series(lam, n_max).entries.real
    r = _apply_h(lam, c)[: c.size - 1]
    r[0] -= 1.0
    return float(np.linalg.norm(r))


@dataclass(frozen=True)
class FiniteRankError:
    bound: float
    empirical: float


def tail_bound(ledger: InverseLedger, m: int) -> float:
    """``(sum_{n>=m} p_n)**0.5``; terms beyond ``N`` come from a fitted power law."""
    n = np.arange(1, ledger.N + 1)
    p = ledger.p[1:]
    if m <= ledger.N:
        return math.sqrt(float(np.sum(p[m - 1 :])) + power_tail(n, p, ledger.N))
    return math.sqrt(power_tail(n, p, m - 1))


def finite_rank_error(lam: float, m: int, N: int = 400, samples: int = 32, seed: int = DEFAULT_SEED,
                      ledger_size: int = 5000) -> FiniteRankError:
    """Compare ``||(K - K_m) u||`` on random unit vectors with the ledger tail bound.

    ``K_m`` keeps ``v_1`` exactly and the polynomial parts of ``u_1..u_m``,
    so ``(K - K_m) u = sum_{n>m} c_n P_{n-1}``.  Test vectors are standard
    normal draws on ``u_1..u_N`` from ``numpy.random.default_rng(seed)``,
    normalised to unit length.
    """
    if not 4 <= m <= N:
        raise DomainError("finite_rank_error needs 4 <= m <= N")
    ledger = ledger_build(lam, max(N, ledger_size))
    bound = tail_bound(ledger, m)
    rng = np.random.default_rng(seed)
    vecs = rng.standard_normal((samples, N))
    vecs /= np.linalg.norm(vecs, axis=1, keepdims=True)
    mat = ledger.poly_matrix(N)
    vecs[:, :m] = 0.0
    images = vecs @ mat.T
    empirical = float(np.max(np.linalg.norm(images, axis=1))) if m < N else 0.0
    return FiniteRankError(bound, empirical)


# --- weighted L2: Nystrom and Hilbert-Schmidt -----------------------------------------

def row_integrals(spec: KernelSpec, y, order: int = 20):
    """``R(y) = int_0^inf N(y, s) ds`` for each ``y > 0``.

    ``R(y) = (1/lam) [int_0^y J(s)/s ds + J(y) int_0^inf exp(-(t(2y+t)/2 + c t))/(y+t) dt]``
    with ``J`` from :func:`j_function`.
    """
    y = np.asarray(y, dtype=float)
    order_idx = np.argsort(y)
    ys = y[order_idx]
    edges = np.concatenate([[0.0], ys])
    x, w = composite_rule(edges, 10)
    f = np.where(x > 0, j_function(x, spec.c) / np.where(x > 0, x, 1.0), 1.0)
    first = np.cumsum((w * f).reshape(-1, 10).sum(axis=1))
    out = np.empty_like(ys)
    for i, yi in enumerate(ys):
        t, wt = composite_rule(graded_edges(yi, _inner_cut(yi, spec.c)), order)
        second = np.dot(wt, np.exp(-(t * (2 * yi + t) / 2 + spec.c * t)) / (yi + t))
        out[i] = first[i] + j_function(yi, spec.c) * second
    res = np.empty_like(out)
    res[order_idx] = out / spec.lam
    return res


def nystrom_matrix(spec: KernelSpec, subtract: bool = True):
    """Quadrature nodes, weights and the matrix ``M_ij = N(y_i, s_j) w_j``.

    With ``subtract`` the diagonal absorbs ``R(y_i) - sum_j M_ij`` so every
    row integrates the constant function exactly; this removes most of the
    error caused by the kink of ``N`` along ``y = s``.
    """
    nodes, weights = uniform_rule(0.0, spec.L, spec.node_count)
    mat = kernel_eval(spec, nodes[:, None], nodes[None, :]) * weights[None, :]
    if subtract:
        mat[np.diag_indices_from(mat)] += row_integrals(spec, nodes) - mat.sum(axis=1)
    return nodes, weights, mat


@dataclass(frozen=True)
class PerronResult:
    rho: float
    sigma0: float
    iterations: int


def power_iteration(mat, tol: float = 1e-12, max_iter: int = 10000):
    """Leading eigenvalue of an entrywise nonnegative matrix from a positive start."""
    v = np.ones(mat.shape[0]) / math.sqrt(mat.shape[0])
    rho_prev = None
    for it in range(1, max_iter + 1):
        w = mat @ v
        rho = float(v @ w)
        v = w / np.linalg.norm(w)
        if rho_prev is not None and abs(rho - rho_prev) <= tol * abs(rho):
            return rho, v, it
        rho_prev = rho
    raise NonConvergence(f"power iteration did not settle in {max_iter} steps")


def nystrom_perron(spec: KernelSpec, tol: float = 1e-12, max_iter: int = 10000) -> PerronResult:
    """Perron root ``rho`` of the discretised kernel and ``sigma0 = 1/rho``."""
    if not spec.mu > 0:
        raise DomainError("nystrom_perron needs mu > 0")
    if spec.node_count < 64:
        raise DomainError("nystrom_perron needs at least 64 nodes")
    _, _, mat = nystrom_matrix(spec)
    rho, _, its = power_iteration(mat, tol, max_iter)
    return PerronResult(rho, 1.0 / rho, its)


def _asymptotic_j(a):
    return 1 / a + 1 / a**3 + 3 / a**5


def _asymptotic_e(a):
    return 1 / (2 * a) - 1 / (4 * a**3) + 3 / (8 * a**5)


def hs_norm_estimate(spec: KernelSpec) -> float:
    """Hilbert-Schmidt norm of ``K`` on ``L2([0, inf), exp(-x**2 - 2 c x) dx)``.

    Reduces to ``(1/lam**2) int_0^inf [J(y)**2/y + J(y)**2 E(y)/y**2] dy`` with
    ``E(y) = phi(sqrt(2)(y+c))/sqrt(2)``.  The range ``[0, L]`` uses the
    node rule of ``spec``; ``[L, inf)`` uses the large-argument expansions of
    ``J`` and ``E``.
    """
    if not spec.mu > 0:
        raise DomainError("hs_norm_estimate needs mu > 0")
    c = spec.c
    y, w = uniform_rule(0.0, spec.L, spec.node_count)
    J = j_function(y, c)
    E = phi_tail(math.sqrt(2) * (y + c)) / math.sqrt(2)
    body = np.dot(w, J**2 / y + J**2 * E / y**2)
    # y = L / tau on tau in (0, 1]
    tau, wt = uniform_rule(0.0, 1.0, 60)
    yt = spec.L / tau
    a = yt + c
    Ja, Ea = _asymptotic_j(a), _asymptotic_e(a)
    tail = np.dot(wt, (Ja**2 / yt + Ja**2 * Ea / yt**2) * spec.L / tau**2)
    return float(math.sqrt(body + tail) / abs(spec.lam))


# --- Stirling bounds ---------------------------------------------------------------------

@dataclass(frozen=True)
class StirlingReport:
    N: int
    upper_margin_min: float
    lower_margin_min: float
    margins_at_100: tuple
    scaled_coefficient_range: tuple


def stirling_sandwich_check(N: int = 10_000) -> StirlingReport:
    """``c n**n e**-n sqrt(n) <= n! <= e n**n e**-n sqrt(n)`` with ``c = sqrt(2 pi)``.

    Also checks that ``d_n n**(3/4)`` stays in ``[0.5, 1.5]`` on
    ``[100, N]`` where ``d_n = 2**n n!/sqrt(2(n+1)(2n+1)!)`` is the even
    coefficient of ``v_1`` at ``lam = 1`` (up to sign).  Raises
    :class:`BoundViolation` on failure.
    """
    if not 1 <= N <= 10_000:
        raise DomainError("stirling_sandwich_check supports 1 <= N <= 10**4")
    n = np.arange(1, N + 1, dtype=float)
    base = n * np.log(n) - n + 0.5 * np.log(n)
    lf = gammaln(n + 1)
    upper = 1.0 + base - lf
    lower = lf - (0.5 * math.log(2 * math.pi) + base)
    slack = 1e-12
    if np.any(upper < -slack):
        raise BoundViolation(f"upper bound fails at n = {int(n[np.argmin(upper)])}")
    if np.any(lower < -slack):
        raise BoundViolation(f"lower bound fails at n = {int(n[np.argmin(lower)])}")
    rng = (1.0, 1.0)
    if N >= 100:
        _, d = v1_coefficients(1.0, N)
        k = np.arange(100, N + 1)
        scaled = np.abs(d[k]) * k**0.75
        rng = (float(scaled.min()), float(scaled.max()))
        if rng[0] < 0.5 or rng[1] > 1.5:
            raise BoundViolation(f"d_n n^(3/4) leaves [0.5, 1.5]: {rng}")
    at100 = (float(upper[99]), float(lower[99])) if N >= 100 else (float("nan"), float("nan"))
    return StirlingReport(N, float(upper.min()), float(lower.min()), at100, rng)


def v1_coefficient_fits(lam: float = 1.0, lo: int = 200, hi: int = 2000):
    """Fitted decay exponents of ``|gamma_n|`` and ``|delta_n|`` over ``[lo, hi]``."""
    g, d = v1_coefficients(lam, hi)
    n = np.arange(lo, hi + 1)
    return decay_exponent(n, g[n], full_range=True), decay_exponent(n, d[n], full_range=True)
