"""Named invariant checks for every module.

Each check returns ``(ok, detail)``.  :func:`run_checks` runs a selection and
reports one line per check; the CLI ``verify`` subcommand and the test
suite both drive this registry.
"""
from __future__ import annotations

import time
from dataclasses import dataclass
from typing import Callable

import numpy as np

from . import basis_ops as bo
from . import deficiency as df
from . import inverse_op as io
from . import jacobi as jc
from . import ortho_poly as op


@dataclass(frozen=True)
class Check:
    module: str
    name: str
    description: str
    run: Callable[[], tuple]

    @property
    def key(self) -> str:
        return f"{self.module}.{self.name}"


@dataclass(frozen=True)
class CheckResult:
    key: str
    ok: bool
    detail: str
    seconds: float

    def line(self) -> str:
        return f"{'PASS' if self.ok else 'FAIL'} {self.key}: {self.detail}"


REGISTRY: list[Check] = []


def check(module, name, description):
    def wrap(fn):
        REGISTRY.append(Check(module, name, description, fn))
        return fn
    return wrap


# --- basis_ops ------------------------------------------------------------------------

@check("basis_ops", "commutation", "[A, A*] e_n = e_n for n <= 50")
def _commutation():
    worst = 0.0
    for n in range(51):
        e = bo.CoefficientVector.basis_vector(n)
        d = bo.ladder_down(bo.ladder_up(e)) - bo.ladder_up(bo.ladder_down(e))
        worst = max(worst, float(np.max(np.abs(d.dense(n + 2) - e.dense(n + 2)))))
    return worst <= 1e-12, f"max deviation {worst:.3g}"


@check("basis_ops", "gribov_matches_heun", "gribov_apply(mu=0, lam=1)/i equals H^{1,1} on B_0, n <= 50")
def _gribov_heun():
    params = bo.OperatorParams(mu=0.0, lam=1.0, p=1, m=1)
    worst = 0.0
    for n in range(1, 51):
        e = bo.CoefficientVector.basis_vector(n)
        a = bo.gribov_apply(params, e) * (-1j)
        b = bo.heun_pm_apply(params, e)
        worst = max(worst, float(np.max(np.abs(a.dense(n + 2) - b.dense(n + 2)))))
    return worst <= 1e-12, f"max abs diff {worst:.3g}"


@check("basis_ops", "heun_symmetry", "matrix of H^{p,m} on indices p..N is symmetric")
def _heun_symmetry():
    worst = 0.0
    for p, m in [(1, 1), (1, 2), (2, 1), (2, 3), (3, 2)]:
        params = bo.OperatorParams(p=p, m=m)
        mat = bo.operator_matrix(bo.heun_pm_apply, 40, start=p, params=params)
        scale = np.maximum(np.abs(mat), np.abs(mat.T))
        rel = np.abs(mat - mat.T) / np.where(scale > 0, scale, 1.0)
        worst = max(worst, float(rel.max()))
    return worst <= 1e-12, f"max relative asymmetry {worst:.3g}"


@check("basis_ops", "linearity", "apply(a u + b v) = a apply(u) + b apply(v)")
def _linearity():
    rng = np.random.default_rng(7)
    u = bo.CoefficientVector("e", 1, rng.standard_normal(20) + 1j * rng.standard_normal(20))
    v = bo.CoefficientVector("e", 3, rng.standard_normal(25) + 1j * rng.standard_normal(25))
    a, b = 0.7 - 0.2j, -1.3 + 0.5j
    params = bo.OperatorParams(mu=1.5, lam=0.8, p=2, m=2)
    ops = [
        lambda w: bo.ladder_down(w), lambda w: bo.ladder_up(w),
        lambda w: bo.gribov_apply(params, w), lambda w: bo.heun_pm_apply(params, w),
        lambda w: bo.shift_apply(params, w),
    ]
    worst = 0.0
    for f in ops:
        lhs = f(a * u + b * v)
        rhs = a * f(u) + b * f(v)
        size = max(lhs.stop, rhs.stop)
        scale = max(1.0, float(np.max(np.abs(lhs.dense(size)))))
        worst = max(worst, float(np.max(np.abs(lhs.dense(size) - rhs.dense(size)))) / scale)
    return worst <= 1e-13, f"max relative deviation {worst:.3g}"


# --- jacobi ----------------------------------------------------------------------------

_SPECTRUM_CASES = [(mu, 1.0, n) for mu in (0.5, 1.0, 2.0) for n in (2, 5, 16, 32, 64)]


def _spectra():
    return [jc.truncated_spectrum(jc.ScalarJacobiSpec(mu, lam, n)) for mu, lam, n in _SPECTRUM_CASES]


@check("jacobi", "trace_determinant", "sum of roots = trace and product = det, n <= 64")
def _trace_det():
    worst_t = worst_d = 0.0
    for res in _spectra():
        spec = jc.ScalarJacobiSpec(res.mu, res.lam, res.n)
        trace = res.mu * res.n * (res.n + 1) / 2
        worst_t = max(worst_t, abs(res.eigenvalues.sum() - trace) / abs(trace))
        p0, _, log_scale = jc.charpoly_eval(spec, 0.0)
        log_det = np.log(abs(p0)) + log_scale
        log_prod = float(np.sum(np.log(np.abs(res.eigenvalues))))
        phase = np.angle(np.prod(res.eigenvalues / np.abs(res.eigenvalues)) / (p0 / abs(p0)))
        worst_d = max(worst_d, abs(np.expm1(log_prod - log_det)) + abs(phase))
    ok = worst_t <= 1e-8 and worst_d <= 1e-8
    return ok, f"trace rel err {worst_t:.3g}, det rel err {worst_d:.3g}"


@check("jacobi", "residual_bound", "every reported root has scaled residual <= tol")
def _residual_bound():
    worst = max(float(r.residuals.max() / r.tol) for r in _spectra())
    return worst <= 1.0, f"max residual/tol {worst:.3g}"


@check("jacobi", "homogeneity", "spectrum(mu, lam) = lam * spectrum(mu/lam, 1)")
def _homogeneity():
    worst = 0.0
    for mu, lam, n in [(2.0, 2.0, 16), (3.0, 0.5, 12), (1.0, 3.0, 24)]:
        a = jc.truncated_spectrum(jc.ScalarJacobiSpec(mu, lam, n)).eigenvalues
        b = lam * jc.truncated_spectrum(jc.ScalarJacobiSpec(mu / lam, 1.0, n)).eigenvalues
        # nearest match: sorting can split conjugate pairs differently
        gap = np.min(np.abs(a[:, None] - b[None, :]), axis=1)
        worst = max(worst, float(np.max(gap / np.maximum(1.0, np.abs(a)))))
    return worst <= 1e-10, f"max relative deviation {worst:.3g}"


@check("jacobi", "conjugate_pairs", "non-real roots occur in conjugate pairs, n <= 64")
def _conjugate_pairs():
    worst = 0.0
    for res in _spectra():
        z = res.eigenvalues
        for w in z:
            worst = max(worst, float(np.min(np.abs(z - np.conj(w)))) / max(1.0, abs(w)))
    return worst <= 1e-8, f"max pairing gap {worst:.3g}"


@check("jacobi", "b_log_concave", "b_{k-1} b_{k+1} <= b_k^2 for k <= 10^4 in integers")
def _log_concave():
    ok = jc.log_concavity_check(10_000)
    return ok, "holds" if ok else "fails"


@check("jacobi", "lemma33_threshold", "exact-norm block inequality holds from the reported i0 on")
def _lemma33():
    parts, ok = [], True
    for p, m in [(1, 1), (1, 2), (2, 1), (2, 3)]:
        spec = jc.BlockJacobiSpec(p, m, 200)
        i0 = jc.lemma33_threshold(spec, exact=True)
        # brute-force recheck of the reported threshold
        norms = [jc.block_entries(spec, i)[1:] for i in range(1, spec.J + 1)]
        holds = [norms[i - 2][0] * norms[i][0] <= (1 + 1e-12) / norms[i - 1][1] ** 2
                 for i in range(2, spec.J)]
        if i0 is None:
            ok &= not holds[-1]
        else:
            ok &= all(holds[i0 - 2:]) and (i0 == 2 or not holds[i0 - 3])
        parts.append(f"(p={p},m={m}) i0={i0}")
    return ok, "; ".join(parts)


# --- ortho_poly ------------------------------------------------------------------------

_COMPLEX_GRID = [complex(a, b) for a in (-3.0, -1.0, 0.5, 2.0, 4.0) for b in (-2.0, 0.0, 1.0, 3.0)]


@check("ortho_poly", "parity", "P_n(-x) = (-1)^{n-1} P_n(x), n <= 60")
def _parity():
    worst = 0.0
    for x in (0.5, 1.0, 2.0, 5.0):
        P, _ = op.first_second_sequence(60, x)
        Pm, _ = op.first_second_sequence(60, -x)
        sign = (-1.0) ** np.arange(60)
        worst = max(worst, float(np.max(np.abs(Pm - sign * P) / np.maximum(1.0, np.abs(P)))))
    return worst <= 1e-10, f"max relative defect {worst:.3g}"


@check("ortho_poly", "wronskian", "b_n (P_n Q_{n+1} - P_{n+1} Q_n) = 1 for n <= 60 on a complex grid")
def _wronskian():
    worst = max(op.wronskian_residual(n, x) for n in range(1, 61) for x in _COMPLEX_GRID)
    return worst <= 1e-9, f"max residual {worst:.3g}"


@check("ortho_poly", "canonical_recurrence", "first-kind recurrence residual")
def _recurrence():
    worst = max(op.recurrence_residual(60, x) for x in _COMPLEX_GRID)
    return worst <= 1e-10, f"max relative residual {worst:.3g}"


@check("ortho_poly", "phi_tail_shape", "phi positive, decreasing on [0, 20]; u phi < 1 < (u + 1/u) phi")
def _phi_shape():
    u = np.linspace(0.0, 20.0, 2001)
    v = op.phi_tail(u)
    mono = bool(np.all(v > 0) and np.all(np.diff(v) < 0))
    w = u[u >= 1]
    pw = v[u >= 1]
    sandwich = bool(np.all(w * pw < 1) and np.all((w + 1 / w) * pw > 1))
    return mono and sandwich, f"monotone={mono}, sandwich={sandwich}"


@check("ortho_poly", "integer_families", "Kouba and plasma P_n: nonnegative integers, plasma parity")
def _integer_families():
    ok = True
    for n in range(0, 31):
        P, _ = op.kouba_polys(n)
        ok &= all(isinstance(c, int) and c >= 0 for c in P.coeffs)
    for n in range(0, 21):
        P, _, _ = op.plasma_polys(n)
        ok &= all(isinstance(c, int) and c >= 0 for c in P.coeffs)
        ok &= all(c == 0 for k, c in enumerate(P.coeffs) if (n - k) % 2)
    return ok, "holds" if ok else "fails"


# --- deficiency ------------------------------------------------------------------------

@check("deficiency", "zeta_alpha", "Raabe fit recovers alpha for 1/n^alpha")
def _zeta_alpha():
    errs = []
    for a in (0.5, 1.5, 2.0, 3.0):
        cls = df.classify_series(lambda n, a=a: n ** (-a), 1000, 10_000)
        errs.append(abs(cls.alpha_estimate - a))
    return max(errs) <= 0.05, f"max |alpha error| {max(errs):.3g}"


@check("deficiency", "eigenvector_linear_in_seed", "seeds (c, c xi/sqrt2) scale the solution by c")
def _linear_seed():
    worst = 0.0
    for xi in (0.0, 1.0, 2 + 3j, -5j):
        c = 0.75 - 1.25j
        base = df.eigenvector_seeded(xi, 400, 1.0, xi / np.sqrt(2))
        scaled = df.eigenvector_seeded(xi, 400, c, c * xi / np.sqrt(2))
        worst = max(worst, float(np.max(np.abs(scaled - c * base) / np.maximum(1e-300, np.abs(c * base)))))
    return worst <= 1e-12, f"max relative deviation {worst:.3g}"


@check("deficiency", "block_m1_matches_scalar", "km_block_test(p=1, m=1) agrees with the scalar verdict")
def _block_scalar():
    _, _, scalar = df.scalar_zero_solutions(2000)
    block = df.km_block_test(1, 1, 1000)
    spec = jc.BlockJacobiSpec(1, 1, 50)
    entries = np.concatenate([jc.block_entries(spec, i)[0] for i in range(1, 51)])
    same_entries = np.allclose(entries, bo.jacobi_b(np.arange(1, 51)), rtol=1e-13)
    ok = scalar.indices == block.indices == (1, 1) and same_entries
    return ok, f"scalar {scalar.indices}, block {block.indices}, beta_k = b_k: {same_entries}"


@check("deficiency", "b_inverse_summable", "1/b_n convergent with alpha near 1.5; partial sum < 2.7")
def _b_inverse():
    cls = df.classify_series(lambda n: 1.0 / bo.jacobi_b(n), 1000, 10_000)
    total = float(np.sum(1.0 / bo.jacobi_b(np.arange(1, 100_001))))
    ok = cls.verdict == "convergent" and abs(cls.alpha_estimate - 1.5) <= 0.05 and total < 2.7
    return ok, f"alpha {cls.alpha_estimate:.4f} ({cls.verdict}), sum {total:.5f}"


@check("deficiency", "eigenvector_bound", "M = sup |u_n| sqrt(n) ln n is finite and attained well inside [10, 5000]")
def _eigen_bound():
    parts, ok = [], True
    for xi in (0.0, 1.0, 2 + 3j, -5j):
        tail = df.eigenvector_at(xi, 5000)
        inside = tail.bound_index is not None and tail.bound_index < 0.9 * 5000
        ok &= bool(np.isfinite(tail.bound_constant)) and inside
        parts.append(f"xi={xi}: M={tail.bound_constant:.4g} at n={tail.bound_index}")
    return ok, "; ".join(parts)


# --- inverse_op ------------------------------------------------------------------------

@check("inverse_op", "right_inverse", "||H K u_n - u_n|| <= 1e-10 for n <= 200")
def _right_inverse():
    worst = max(io.right_inverse_residual(lam, 200) for lam in (1.0, 0.1, 10.0))
    return worst <= 1e-10, f"max residual {worst:.3g}"


@check("inverse_op", "representation_equality", "quadrature and recurrence agree on u_2..u_10, y in [0, 3]")
def _representation():
    spec = io.KernelSpec(0.0, 1.0)
    ys = np.linspace(0.0, 3.0, 12)
    ledger = io.ledger_build(1.0, 12)
    worst = 0.0
    for n in range(2, 11):
        v = bo.CoefficientVector.basis_vector(n, "u")
        quad = io.apply_quadrature(spec, lambda s, v=v: v.evaluate(s).real, ys)
        _, rec = io.apply_recurrence(1.0, v, ys, ledger)
        worst = max(worst, float(np.max(np.abs(quad - rec))))
    return worst <= 1e-7, f"max abs diff {worst:.3g}"


@check("inverse_op", "ledger_orthogonality", "P_{n-2} has no u_n component")
def _ledger_orth():
    ledger = io.ledger_build(1.0, 200)
    ok = all(ledger.poly_coefficients(n - 2).size <= n - 2 for n in range(3, 201))
    mat = ledger.poly_matrix(200)
    ok &= bool(np.all(np.tril(mat) == 0))  # column c holds P_c, supported on u_1..u_c
    return ok, "holds" if ok else "fails"


@check("inverse_op", "p_n_direct_norm", "ledger p_n equals ||P_n||^2 from coefficients, n <= 200")
def _p_direct():
    ledger = io.ledger_build(1.0, 200)
    worst = max(abs(float(np.sum(ledger.poly_coefficients(n) ** 2)) / ledger.p[n] - 1) for n in range(1, 201))
    return worst <= 1e-12, f"max relative deviation {worst:.3g}"


@check("inverse_op", "kernel_positivity", "N(y, s) > 0 on a 100 x 100 grid")
def _kernel_positive():
    worst = np.inf
    for mu in (0.0, 1.0):
        spec = io.KernelSpec(mu, 1.0)
        g = np.linspace(0.12, spec.L, 100)
        worst = min(worst, float(io.kernel_eval(spec, g[:, None], g[None, :]).min()))
    return worst > 0, f"min kernel value {worst:.3g}"


@check("inverse_op", "v1_membership", "sum of squared v_1 coefficients converges")
def _v1_membership():
    g, d = io.v1_coefficients(1.0, 10_000)
    terms = g**2 + d**2
    cls = df.classify_series(terms[1000:], 1000, terms.size - 1002)
    partial = np.cumsum(terms)
    # Cauchy differences S_{2n} - S_n shrink
    diffs = [partial[2 * n] - partial[n] for n in (500, 1000, 2000, 4000)]
    ok = cls.verdict == "convergent" and all(a > b for a, b in zip(diffs, diffs[1:]))
    return ok, f"alpha {cls.alpha_estimate:.4f} ({cls.verdict}), Cauchy diffs {', '.join(f'{x:.3g}' for x in diffs)}"


# --- cli -------------------------------------------------------------------------------

@check("cli", "determinism", "identical invocations give byte-identical output")
def _determinism():
    from .cli import render

    argvs = [
        ["spectrum", "--mu", "1", "--lambda", "1", "--n", "12"],
        ["deficiency", "--p", "1", "--m", "2", "--jmax", "200"],
        ["polys", "--kind", "plasma_P", "--n", "6"],
        ["kernel-apply", "--mu", "0", "--lambda", "1", "--coeffs", "0,1,0.5", "--ymax", "2", "--samples", "5"],
    ]
    same = all(render(a) == render(a) for a in argvs)
    return same, "byte-identical" if same else "outputs differ"


def select(names=None) -> list[Check]:
    if not names:
        return list(REGISTRY)
    chosen = [c for c in REGISTRY if c.key in names or c.module in names]
    unknown = set(names) - {c.key for c in chosen} - {c.module for c in chosen}
    if unknown:
        raise KeyError(f"unknown checks: {', '.join(sorted(unknown))}")
    return chosen


def run_check(c: Check) -> CheckResult:
    t0 = time.perf_counter()
    try:
        ok, detail = c.run()
    except Exception as exc:  # a crash is a failed invariant, reported by name
        ok, detail = False, f"{type(exc).__name__}: {exc}"
    return CheckResult(c.key, bool(ok), detail, time.perf_counter() - t0)


def run_checks(names=None) -> list[CheckResult]:
    return [run_check(c) for c in select(names)]
