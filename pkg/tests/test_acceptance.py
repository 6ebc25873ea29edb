"""Acceptance criteria 1-10, each with its runtime budget.

Every test records one ``criterion N: PASS|FAIL`` line, printed in the
terminal summary and inline.
"""
import math
import time
from contextlib import contextmanager

import mpmath
import numpy as np
import pytest

from conftest import ACCEPTANCE_LINES
from gribov.basis_ops import CoefficientVector
from gribov.deficiency import eigenvector_at, km_block_test, scalar_zero_solutions
from gribov.inverse_op import (
    KernelSpec,
    apply_quadrature,
    apply_recurrence,
    finite_rank_error,
    ledger_build,
    nystrom_perron,
    right_inverse_residual,
    stirling_sandwich_check,
    v1_coefficient_fits,
    v1_eval,
    v1_series,
)
from gribov.jacobi import ScalarJacobiSpec, charpoly_eval, sigma0_curve, truncated_spectrum
from gribov.ortho_poly import first_second_sequence, kouba_polys, plasma_polys, wronskian_residual


class Clock:
    def __init__(self):
        self.seconds = 0.0

    @contextmanager
    def run(self):
        t0 = time.perf_counter()
        try:
            yield
        finally:
            self.seconds += time.perf_counter() - t0


@pytest.fixture
def report(capsys):
    lines = []

    def record(number, checks, clock, budget):
        checks = dict(checks, runtime=clock.seconds < budget)
        failed = [k for k, ok in checks.items() if not ok]
        status = "PASS" if not failed else "FAIL"
        line = f"criterion {number}: {status} ({clock.seconds:.2f} s of {budget:g} s)"
        if failed:
            line += " failed: " + ", ".join(failed)
        ACCEPTANCE_LINES.append(line)
        with capsys.disabled():
            print("\n" + line)
        lines.append(line)
        assert not failed, line

    return record


def test_criterion_01_right_inverse(report):
    clock = Clock()
    with clock.run():
        r = right_inverse_residual(1.0, 200)
    # ||u_n|| = 1, so absolute and relative residuals coincide
    report(1, {"residual<=1e-10": r <= 1e-10}, clock, 1.0)


def test_criterion_02_representations(report):
    clock = Clock()
    spec = KernelSpec(0.0, 1.0)
    ys = np.linspace(0.0, 3.0, 12)
    worst = 0.0
    with clock.run():
        ledger = ledger_build(1.0, 12)
        for n in range(2, 11):
            v = CoefficientVector.basis_vector(n, "u")
            quad = apply_quadrature(spec, lambda s, v=v: v.evaluate(s).real, ys)
            _, rec = apply_recurrence(1.0, v, ys, ledger)
            worst = max(worst, float(np.max(np.abs(quad - rec))))
    report(2, {"max_diff<=1e-7": worst <= 1e-7}, clock, 10.0)


def test_criterion_03_sigma0_cross_validation(report):
    clock = Clock()
    mus = [0.5, 1.0, 2.0, 4.0]
    with clock.run():
        matrix = [p.sigma0.real for p in sigma0_curve(1.0, mus, 1024)]
        nystrom = [nystrom_perron(KernelSpec(mu, 1.0, 12.0, 400)).sigma0 for mu in mus]
    rel = [abs(a - b) / abs(a) for a, b in zip(matrix, nystrom)]
    increasing = all(a < b for a, b in zip(matrix, matrix[1:])) and all(a < b for a, b in zip(nystrom, nystrom[1:]))
    report(3, {"agree<=1e-3": max(rel) <= 1e-3, "increasing": increasing}, clock, 60.0)


def test_criterion_04_wronskian_parity(report):
    clock = Clock()
    grid = [complex(a, b) for a in (-3.0, -1.0, 0.5, 2.0, 4.0) for b in (-2.0, 0.0, 1.0, 3.0)]
    with clock.run():
        w = max(wronskian_residual(n, x) for n in range(1, 61) for x in grid)
        parity = 0.0
        for x in grid:
            P, _ = first_second_sequence(60, x)
            Pm, _ = first_second_sequence(60, -x)
            sign = (-1.0) ** np.arange(60)
            parity = max(parity, float(np.max(np.abs(Pm - sign * P) / np.maximum(1, np.abs(P)))))
    report(4, {"wronskian<=1e-9": w <= 1e-9, "parity<=1e-10": parity <= 1e-10}, clock, 1.0)


def test_criterion_05_deficiency(report):
    clock = Clock()
    checks = {}
    with clock.run():
        _, _, scalar = scalar_zero_solutions(2000)
        checks["scalar(1,1)"] = scalar.indices == (1, 1)
        for p, m in [(1, 1), (1, 2), (2, 1), (2, 3)]:
            rep = km_block_test(p, m, 500)
            checks[f"indices({p},{m})"] = rep.indices == (m, m)
            checks[f"fit({p},{m})"] = abs(rep.decay_exponent_fit + (p + m / 2)) <= 0.1
    report(5, checks, clock, 30.0)


def test_criterion_06_eigenvector_decay(report):
    clock = Clock()
    checks = {}
    with clock.run():
        for xi in (0.0, 1.0, 2 + 3j, -5j):
            tail = eigenvector_at(xi, 5000)
            checks[f"M_finite({xi})"] = math.isfinite(tail.bound_constant)
            ratio = tail.cauchy_ratio(2500)
            checks[f"cauchy({xi})={ratio:.3g}"] = ratio <= 1e-3
    report(6, checks, clock, 5.0)


def test_criterion_07_compactness_ledger(report):
    clock = Clock()
    with clock.run():
        ledger = ledger_build(1.0, 5000)
        n = np.arange(100, 5001)
        scaled = ledger.p[n] * n**1.5
        errs = [finite_rank_error(1.0, m) for m in (25, 50, 100)]
    checks = {
        "p_n_ratio<=3": scaled.max() / scaled.min() <= 3,
        "empirical<=bound": all(e.empirical <= e.bound for e in errs),
        "bound_decreasing": errs[0].bound > errs[1].bound > errs[2].bound,
    }
    report(7, checks, clock, 10.0)


def test_criterion_08_v1_series(report):
    clock = Clock()
    ys = [0.25, 0.5, 1.0, 1.5, 2.0]
    with clock.run():
        series = v1_series(1.0, 400).evaluate(np.array(ys)).real
        quad = v1_eval(1.0, np.array(ys))
        fg, fd = v1_coefficient_fits(1.0, 200, 2000)
    checks = {
        "series_vs_quadrature<=1e-8": float(np.max(np.abs(series - quad))) <= 1e-8,
        "fit_gamma": -0.80 <= fg <= -0.70,
        "fit_delta": -0.80 <= fd <= -0.70,
    }
    report(8, checks, clock, 5.0)


def test_criterion_09_exact_identities(report):
    clock = Clock()
    checks = {}
    with clock.run():
        checks["plasma"] = all(plasma_polys(n)[2] == (-2) ** n * math.factorial(n) for n in range(21))
        kouba = [kouba_polys(n)[0] for n in range(7)]
        stirling = stirling_sandwich_check(10_000)
    checks["stirling"] = stirling.upper_margin_min >= -1e-12 and stirling.lower_margin_min >= 0
    mpmath.mp.dps = 30
    worst = 0.0
    for n, P in enumerate(kouba):
        for x in (-1.3, -0.4, 0.0, 0.9, 2.2):
            ref = float(mpmath.exp(-x * x / 2) * mpmath.diff(lambda t: mpmath.exp(t * t / 2), x, n))
            worst = max(worst, abs(P(x) - ref) / max(1.0, abs(ref)))
    checks["kouba<=1e-8"] = worst <= 1e-8
    report(9, checks, clock, 5.0)


def test_criterion_10_truncation_sanity(report):
    clock = Clock()
    checks = {}
    with clock.run():
        for mu, lam in [(3.0, 1.0), (1.0, 1.0)]:
            z = truncated_spectrum(ScalarJacobiSpec(mu, lam, 2)).eigenvalues
            disc = np.sqrt(complex(9 * mu**2 - 8 * mu**2 - 8 * lam**2))
            ref = sorted([(3 * mu - disc) / 2, (3 * mu + disc) / 2], key=lambda w: (w.real, w.imag))
            checks[f"n2({mu},{lam})"] = float(np.max(np.abs(z - ref))) <= 1e-12
        trace_ok = det_ok = pair_ok = True
        for mu in (0.5, 1.0, 2.0):
            for n in (4, 16, 32, 64):
                spec = ScalarJacobiSpec(mu, 1.0, n)
                z = truncated_spectrum(spec).eigenvalues
                trace = mu * n * (n + 1) / 2
                trace_ok &= abs(z.sum() - trace) <= 1e-8 * trace
                p0, _, s = charpoly_eval(spec, 0.0)
                det_ok &= abs(np.sum(np.log(np.abs(z))) - (math.log(abs(p0)) + s)) <= 1e-8
                pair_ok &= all(np.min(np.abs(z - np.conj(w))) <= 1e-8 * max(1, abs(w)) for w in z)
        checks.update(trace=trace_ok, determinant=det_ok, conjugate_pairs=pair_ok)
        homog = 0.0
        for mu, lam, n in [(2.0, 2.0, 32), (3.0, 0.5, 16)]:
            a = truncated_spectrum(ScalarJacobiSpec(mu, lam, n)).eigenvalues
            b = lam * truncated_spectrum(ScalarJacobiSpec(mu / lam, 1.0, n)).eigenvalues
            homog = max(homog, float(np.max(np.min(np.abs(a[:, None] - b[None, :]), axis=1) / np.abs(a))))
        checks["homogeneity<=1e-10"] = homog <= 1e-10
    report(10, checks, clock, 10.0)
