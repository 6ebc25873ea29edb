"""Numerical witnesses for deficiency indices and complete indeterminacy.

At ``z = 0`` the Jacobi-Gribov recurrence decouples into even and odd
chains whose terms are telescoping products of ``b``-ratios.  The block
analogue for ``H^{p,m}`` decouples further into ``m`` scalar chains per
parity because every off-diagonal block is diagonal.  Square-summability
of all these chains is decided with a Raabe-Duhamel fit.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .basis_ops import jacobi_b
from .errors import NonPositiveTerm, RecurrenceOverflow
from .fitting import decay_exponent, power_tail
from .jacobi import BlockJacobiSpec, inverse_norm_sum, lemma33_threshold
from .ortho_poly import first_second_sequence

OVERFLOW_AT = 1e300


@dataclass(frozen=True)
class SeriesClassification:
    alpha_estimate: float
    alpha_stderr: float
    verdict: str  # convergent | divergent | indeterminate


@dataclass(frozen=True)
class DeficiencyReport:
    p: int
    m: int
    criterion: float
    tail_sum_even: float
    tail_sum_odd: float
    decay_exponent_fit: float
    verdict: str  # completely_indeterminate | not_indeterminate | inconclusive
    indices: tuple
    details: dict = field(default_factory=dict, compare=False, repr=False)

    def to_json_obj(self) -> dict:
        n_plus, n_minus = self.indices
        return {
            "p": self.p,
            "m": self.m,
            "criterion": self.criterion,
            "tail_even": self.tail_sum_even,
            "tail_odd": self.tail_sum_odd,
            "decay_fit": self.decay_exponent_fit,
            "verdict": self.verdict,
            "n_plus": n_plus,
            "n_minus": n_minus,
        }


@dataclass(frozen=True)
class SolutionTail:
    """Samples ``values[j]`` of a solution at index ``start + j``."""

    values: np.ndarray = field(repr=False)
    partial_l2: np.ndarray = field(repr=False)
    bound_constant: float
    bound_index: int | None = None
    start: int = 1

    def cauchy_ratio(self, n: int) -> float:
        """``|S_{2n} - S_n| / S_n`` for the partial sums ``S_k = sum_{j<=k} |values_j|**2``."""
        s_n = self.partial_l2[n - self.start]
        s_2n = self.partial_l2[2 * n - self.start]
        return float(abs(s_2n - s_n) / s_n)


def _verdict(alpha, stderr):
    if alpha - 2 * stderr > 1:
        return "convergent"
    if alpha + 2 * stderr < 1:
        return "divergent"
    return "indeterminate"


def classify_series(terms, n_min: int, n_max: int, log_terms: bool = False) -> SeriesClassification:
    """Raabe-Duhamel classification of ``sum a_n``.

    ``terms`` is either a callable mapping an integer array to ``a_n`` or a
    sequence holding ``a_{n_min}, ..., a_{n_max+1}``.  With ``log_terms``
    the values are ``log a_n`` instead, which lets products far below the
    double range be classified.

    The quantity ``n (1 - a_{n+1}/a_n)`` is fitted by ``alpha + c/n`` on
    ``[n_min, n_max]``.  The reported standard error is the regression
    standard error, floored at ``1/n_min``: the ratio test only resolves
    ``alpha`` up to the ``O(1/n)`` corrections it ignores, so a series such
    as ``1/n`` lands on ``indeterminate`` instead of a spurious verdict.
    """
    if n_max < 4 * n_min:
        raise ValueError("classify_series needs n_max >= 4 * n_min")
    n = np.arange(n_min, n_max + 2)
    vals = np.asarray(terms(n.astype(float)) if callable(terms) else terms, dtype=float)[: n.size]
    if vals.size != n.size:
        raise ValueError(f"expected {n.size} terms, got {vals.size}")
    if log_terms:
        if not np.all(np.isfinite(vals)):
            raise NonPositiveTerm("log-terms must be finite")
        log_ratio = np.diff(vals)
    else:
        if np.any(~(vals > 0)):
            bad = int(n[np.flatnonzero(~(vals > 0))[0]])
            raise NonPositiveTerm(f"term a_{bad} is not positive", index=bad)
        log_ratio = np.log(vals[1:]) - np.log(vals[:-1])
    k = n[:-1].astype(float)
    y = -k * np.expm1(log_ratio)
    design = np.column_stack([np.ones_like(k), 1.0 / k])
    coef, *_ = np.linalg.lstsq(design, y, rcond=None)
    resid = y - design @ coef
    dof = max(k.size - 2, 1)
    sigma2 = float(resid @ resid) / dof
    cov = sigma2 * np.linalg.inv(design.T @ design)
    stderr = max(float(np.sqrt(max(cov[0, 0], 0.0))), 1.0 / n_min)
    alpha = float(coef[0])
    return SeriesClassification(alpha, stderr, _verdict(alpha, stderr))


# --- scalar chains at z = 0 -----------------------------------------------------------

def _log_chain(log_num, log_den):
    """Cumulative ``log|prod num/den|`` starting from 0."""
    return np.concatenate([[0.0], np.cumsum(log_num - log_den)])


def _chain_summary(log_amp, n_min_frac=0.2):
    """Classification, l2 sum and squared-term decay exponent of one chain."""
    log_sq = 2.0 * log_amp
    count = log_sq.size
    j = np.arange(1, count + 1)
    n_max = count - 1
    n_min = max(2, n_max // 5)
    cls = classify_series(log_sq[n_min - 1 :], n_min, n_max - 1, log_terms=True)
    sq = np.exp(log_sq)
    total = float(np.sum(sq)) + power_tail(j, sq, count)
    return cls, total, decay_exponent(j, sq)


def _summarise(p, m, cls_even, cls_odd, tail_even, tail_odd, fit, details):
    criterion = p + m / 2
    if cls_even.verdict == "convergent" and cls_odd.verdict == "convergent" and criterion > 1:
        verdict, indices = "completely_indeterminate", (m, m)
    elif "divergent" in (cls_even.verdict, cls_odd.verdict):
        verdict, indices = "not_indeterminate", (None, None)
    else:
        verdict, indices = "inconclusive", (None, None)
    details = dict(details, even=cls_even, odd=cls_odd)
    return DeficiencyReport(p, m, criterion, tail_even, tail_odd, fit, verdict, indices, details)


def zero_energy_values(N: int):
    """``P_n(0)`` and ``Q_n(0)`` for ``n = 1..N`` from log-domain b-ratio products."""
    P = np.zeros(N)
    Q = np.zeros(N)
    # P_{2k+1}(0) = (-1)^k prod_{j<=k} b_{2j-1}/b_{2j}
    k = np.arange(1, (N - 1) // 2 + 1)
    log_p = _log_chain(np.log(jacobi_b(2 * k - 1)), np.log(jacobi_b(2 * k)))
    P[0::2] = (np.where(np.arange(log_p.size) % 2, -1.0, 1.0) * np.exp(log_p))[: P[0::2].size]
    # Q_2 = 1/b_1, Q_{2k+2}(0) = -(b_{2k}/b_{2k+1}) Q_{2k}(0)
    k = np.arange(1, N // 2)
    log_q = _log_chain(np.log(jacobi_b(2 * k)), np.log(jacobi_b(2 * k + 1))) - np.log(jacobi_b(1))
    Q[1::2] = (np.where(np.arange(log_q.size) % 2, -1.0, 1.0) * np.exp(log_q))[: Q[1::2].size]
    return P, Q, log_p, log_q


def _tail(values, start=1, n0=10):
    values = np.asarray(values, dtype=complex)
    n = np.arange(start, start + values.size)
    partial = np.cumsum(np.abs(values) ** 2)
    sel = n >= n0
    if sel.any():
        weights = np.abs(values[sel]) * np.sqrt(n[sel]) * np.log(n[sel])
        j = int(np.argmax(weights))
        return SolutionTail(values, partial, float(weights[j]), int(n[sel][j]), start)
    return SolutionTail(values, partial, float("nan"), None, start)


def scalar_zero_solutions(N: int = 2000):
    """First- and second-kind solutions at ``z = 0`` and the scalar deficiency verdict.

    Returns ``(P_tail, Q_tail, report)``; both chains square-summable gives
    ``completely_indeterminate`` with indices ``(1, 1)``.
    """
    if N < 100:
        raise ValueError("scalar_zero_solutions needs N >= 100")
    P, Q, log_p, log_q = zero_energy_values(N)
    cls_odd, tail_odd, fit_odd = _chain_summary(log_p)
    cls_even, tail_even, fit_even = _chain_summary(log_q)
    report = _summarise(1, 1, cls_even, cls_odd, tail_even, tail_odd, max(fit_odd, fit_even),
                        {"amplitude_fit_odd": decay_exponent(np.arange(1, log_p.size + 1), np.exp(log_p))})
    return _tail(P), _tail(Q), report


def km_block_test(p: int, m: int, J: int = 500) -> DeficiencyReport:
    """Zero-energy test for complete indeterminacy of the block Jacobi matrix of ``H^{p,m}``.

    With the boundary condition ``phi_0 = 0`` the solutions split into an
    odd chain ``phi_{2j+1} = -B_{2j}^{-1} B_{2j-1} phi_{2j-1}`` and an even
    chain ``phi_{2j} = -B_{2j-1}^{-1} B_{2j-2} phi_{2j-2}``; each coordinate
    evolves by a ratio of ``beta`` entries.  ``decay_exponent_fit`` is the
    slower of the two fitted exponents of ``||phi_j||**2``.
    """
    if p < 1 or m < 1:
        raise ValueError("p and m must be at least 1")
    if J < 50:
        raise ValueError("km_block_test needs J >= 50")
    spec = BlockJacobiSpec(p, m, J)
    logs = spec.log_entries(np.arange(1, J + 1))  # row i-1 holds log beta of B_i
    # odd: ratio beta(B_{2j-1}) / beta(B_{2j}), j = 1..J//2
    j = np.arange(1, J // 2 + 1)
    log_odd = np.vstack([np.zeros(m), np.cumsum(logs[2 * j - 2] - logs[2 * j - 1], axis=0)])
    # even: ratio beta(B_{2j-2}) / beta(B_{2j-1}), j = 2..(J+1)//2
    j = np.arange(2, (J + 1) // 2 + 1)
    log_even = np.vstack([np.zeros(m), np.cumsum(logs[2 * j - 3] - logs[2 * j - 2], axis=0)])

    def norms(log_amp):
        # log ||phi_j|| over the m coordinates, each seeded with 1
        top = log_amp.max(axis=1)
        return top + 0.5 * np.log(np.sum(np.exp(2 * (log_amp - top[:, None])), axis=1))

    cls_odd, tail_odd, fit_odd = _chain_summary(norms(log_odd))
    cls_even, tail_even, fit_even = _chain_summary(norms(log_even))
    details = {
        "lemma33_i0_exact": lemma33_threshold(spec, exact=True),
        "lemma33_i0_simplified": lemma33_threshold(spec, exact=False),
        "inverse_norm_sum": float(inverse_norm_sum(spec)[-1]),
        "inverse_norm_series": classify_series(-spec.log_entries(np.arange(1, J + 1)).max(axis=1)[J // 5 - 1 :],
                                               J // 5, J - 1, log_terms=True),
        "coordinate_fits": [decay_exponent(np.arange(1, log_odd.shape[0] + 1), np.exp(2 * log_odd[:, r]))
                            for r in range(m)],
    }
    return _summarise(p, m, cls_even, cls_odd, tail_even, tail_odd, max(fit_odd, fit_even), details)


# --- eigenvectors of H_I ------------------------------------------------------------

def eigenvector_at(xi: complex, N: int, seed: complex = 1.0) -> SolutionTail:
    """Solution of ``b_{n-1} u_{n-1} + b_n u_{n+1} = xi u_n`` with ``u_1 = seed``.

    ``bound_constant`` is ``M = max |u_n| sqrt(n) ln n`` over ``10 <= n <= N``,
    the smallest constant for which ``|u_n| <= M / (sqrt(n) ln n)`` holds there.
    Raises :class:`RecurrenceOverflow` if a term exceeds ``1e300``.
    """
    if N < 10:
        raise ValueError("eigenvector_at needs N >= 10")
    with np.errstate(over="ignore", invalid="ignore"):
        P, _ = first_second_sequence(N, complex(xi))
    u = complex(seed) * P if seed != 1.0 else P
    big = np.flatnonzero(~(np.abs(u) <= OVERFLOW_AT))
    if big.size:
        raise RecurrenceOverflow(f"|u_n| exceeds 1e300 at n = {big[0] + 1}", index=int(big[0] + 1))
    return _tail(u)


def eigenvector_seeded(xi: complex, N: int, u1: complex, u2: complex) -> np.ndarray:
    """Same recurrence with arbitrary seeds ``(u_1, u_2)``."""
    u = np.zeros(N, dtype=complex)
    u[0], u[1] = u1, u2
    for n in range(2, N):
        u[n] = (xi * u[n - 1] - jacobi_b(n - 1) * u[n - 2]) / jacobi_b(n)
    return u


# --- Hellinger uniform convergence ------------------------------------------------------

@dataclass(frozen=True)
class HellingerReport:
    radius: float
    grid_size: int
    n_max: int
    N: tuple
    sup_first: tuple
    sup_second: tuple
    argmax_first: tuple
    argmax_second: tuple

    @property
    def sup(self):
        return tuple(max(a, b) for a, b in zip(self.sup_first, self.sup_second))


def disc_grid(radius: float, grid_size: int) -> np.ndarray:
    """Centre plus ``grid_size`` equally spaced boundary points.

    ``sum_{n>N} |P_n(z)|**2`` is subharmonic in ``z``, so its supremum over
    the closed disc sits on the boundary circle.
    """
    if radius == 0:
        return np.zeros(1, dtype=complex)
    theta = 2 * np.pi * np.arange(grid_size) / grid_size
    return np.concatenate([[0j], radius * np.exp(1j * theta)])


def _tails_beyond(values, Ns, n_max):
    sq = np.abs(values) ** 2  # shape (points, n_max), entry j <-> n = j+1
    pairs = sq[:, 1 : n_max - 1 : 2] + sq[:, 2:n_max:2]  # n = 2k, 2k+1 for k = 1..
    k = np.arange(1, pairs.shape[1] + 1)
    beyond = np.array([power_tail(k, row, k[-1]) for row in pairs])
    rev = np.cumsum(sq[:, ::-1], axis=1)[:, ::-1]  # rev[:, j] = sum over n >= j+1
    out = []
    for N in Ns:
        out.append(rev[:, N] + beyond if N < n_max else beyond)
    return np.array(out)


def hellinger_disc_check(radius: float, N, grid_size: int = 16, n_max: int | None = None) -> HellingerReport:
    """Supremum over a disc grid of ``T_N(z) = sum_{n>N} |phi_n(z)|**2`` for both solution families.

    ``N`` may be a single cut-off or a sequence.  Terms up to ``n_max``
    (default ``8 max(N)``) are summed directly, beyond that a fitted power
    law on pair sums completes the tail.
    """
    Ns = tuple(int(v) for v in np.atleast_1d(N))
    n_max = int(n_max or 8 * max(Ns))
    if n_max % 2:
        n_max += 1
    z = disc_grid(radius, grid_size)
    P, Q = first_second_sequence(n_max, z)
    tp, tq = _tails_beyond(P, Ns, n_max), _tails_beyond(Q, Ns, n_max)
    return HellingerReport(
        float(radius), int(grid_size), n_max, Ns,
        tuple(float(t.max()) for t in tp), tuple(float(t.max()) for t in tq),
        tuple(complex(z[np.argmax(t)]) for t in tp), tuple(complex(z[np.argmax(t)]) for t in tq),
    )
