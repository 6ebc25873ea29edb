import cmath
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from gribov.errors import DomainError, NonConvergence
from gribov.fitting import decay_exponent
from gribov.jacobi import (
    BlockJacobiSpec,
    ScalarJacobiSpec,
    block_entries,
    charpoly_eval,
    lemma33_threshold,
    log_concavity_check,
    sigma0,
    sigma0_curve,
    truncated_spectrum,
)


def quadratic_roots(mu, lam):
    # det [[mu - x, i lam sqrt2], [i lam sqrt2, 2 mu - x]] = x^2 - 3 mu x + 2 mu^2 + 2 lam^2
    disc = cmath.sqrt(9 * mu**2 - 4 * (2 * mu**2 + 2 * lam**2))
    return sorted([(3 * mu - disc) / 2, (3 * mu + disc) / 2], key=lambda z: (z.real, z.imag))


def test_charpoly_n1():
    spec = ScalarJacobiSpec(1.0, 1.0, 1)
    for x in (0.0, 1.0, 2.5 + 1j):
        p, d, s = charpoly_eval(spec, x)
        assert p * math.exp(s) == pytest.approx(1 - x)
        assert d * math.exp(s) == pytest.approx(-1)


@pytest.mark.parametrize("mu, lam", [(3, 1), (1, 1)])
def test_n2_roots_against_quadratic_formula(mu, lam):
    res = truncated_spectrum(ScalarJacobiSpec(mu, lam, 2))
    for z, w in zip(res.eigenvalues, quadratic_roots(mu, lam)):
        assert abs(z - w) <= 1e-12
    assert np.all(res.residuals <= 1e-12)


def test_n2_mu1_is_complex_pair():
    z = truncated_spectrum(ScalarJacobiSpec(1, 1, 2)).eigenvalues
    assert z[0] == pytest.approx(complex(1.5, -math.sqrt(7) / 2), abs=1e-12)
    assert z[1] == pytest.approx(complex(1.5, math.sqrt(7) / 2), abs=1e-12)


def test_n1_diagonal():
    res = truncated_spectrum(ScalarJacobiSpec(2, 5, 1))
    assert res.eigenvalues.tolist() == [2]


def test_n3_zero_diagonal():
    z = truncated_spectrum(ScalarJacobiSpec(0, 1, 3)).eigenvalues
    expected = sorted([0, 1j * math.sqrt(14), -1j * math.sqrt(14)], key=lambda w: (w.real, w.imag))
    np.testing.assert_allclose(z, expected, atol=1e-12)


@pytest.mark.parametrize("mu, n", [(0.5, 10), (1.0, 20), (2.0, 30)])
def test_against_dense_eigensolver(mu, n):
    spec = ScalarJacobiSpec(mu, 1.0, n)
    ours = truncated_spectrum(spec).eigenvalues
    ref = np.linalg.eigvals(spec.matrix())
    gap = np.min(np.abs(ours[:, None] - ref[None, :]), axis=1)
    assert np.max(gap / np.abs(ours)) <= 1e-8


@pytest.mark.parametrize("mu", [0.5, 1.0, 2.0])
@pytest.mark.parametrize("n", [8, 32, 64])
def test_trace_and_determinant(mu, n):
    spec = ScalarJacobiSpec(mu, 1.0, n)
    res = truncated_spectrum(spec)
    trace = mu * n * (n + 1) / 2
    assert abs(res.eigenvalues.sum() - trace) <= 1e-8 * trace
    p0, _, log_scale = charpoly_eval(spec, 0.0)
    log_prod = np.sum(np.log(np.abs(res.eigenvalues)))
    assert abs(log_prod - (math.log(abs(p0)) + log_scale)) <= 1e-8
    assert len(res.eigenvalues) == n


@pytest.mark.parametrize("n", [9, 40, 64])
def test_conjugate_pairing(n):
    z = truncated_spectrum(ScalarJacobiSpec(0.5, 1.0, n)).eigenvalues
    for w in z:
        assert np.min(np.abs(z - np.conj(w))) <= 1e-8 * max(1, abs(w))


@settings(max_examples=15, deadline=None)
@given(mu=st.floats(0.2, 3.0), lam=st.floats(0.25, 4.0), n=st.integers(2, 24))
def test_homogeneity(mu, lam, n):
    a = truncated_spectrum(ScalarJacobiSpec(mu, lam, n)).eigenvalues
    b = lam * truncated_spectrum(ScalarJacobiSpec(mu / lam, 1.0, n)).eigenvalues
    gap = np.min(np.abs(a[:, None] - b[None, :]), axis=1)
    assert np.max(gap / np.maximum(1, np.abs(a))) <= 1e-10


def test_sorted_and_deterministic():
    spec = ScalarJacobiSpec(0.7, 1.0, 24)
    a = truncated_spectrum(spec)
    b = truncated_spectrum(spec)
    np.testing.assert_array_equal(a.eigenvalues, b.eigenvalues)
    keys = list(zip(a.eigenvalues.real, a.eigenvalues.imag))
    assert keys == sorted(keys)


def test_charpoly_rescaling_keeps_large_n_finite():
    p, d, s = charpoly_eval(ScalarJacobiSpec(1.0, 1.0, 400), 3.0 + 1j)
    assert np.isfinite(p) and np.isfinite(d) and s > 100


def test_aberth_gives_up_on_ill_conditioned_truncation():
    with pytest.raises(NonConvergence):
        truncated_spectrum(ScalarJacobiSpec(4.0, 1.0, 64), tol=1e-12, method="aberth")


def test_input_validation():
    with pytest.raises(DomainError):
        truncated_spectrum(ScalarJacobiSpec(1, 1, 4), tol=0)
    with pytest.raises(DomainError):
        truncated_spectrum(ScalarJacobiSpec(1, 1, 5000))
    with pytest.raises(DomainError):
        ScalarJacobiSpec(1, 1, 0)
    with pytest.raises(DomainError):
        sigma0_curve(1.0, [1.0, -1.0], 8)


def test_sigma0_large_mu():
    pt = sigma0(ScalarJacobiSpec(100.0, 1.0, 64))
    assert 100 <= pt.sigma0.real <= 101


def test_sigma0_monotone_n512():
    pts = sigma0_curve(1.0, [1.0, 2.0, 4.0], 512)
    vals = [p.sigma0.real for p in pts]
    assert vals[0] < vals[1] < vals[2]


def test_sigma0_lambda_scaling_n128():
    a = sigma0(ScalarJacobiSpec(2.0, 2.0, 128)).sigma0
    b = sigma0(ScalarJacobiSpec(1.0, 1.0, 128)).sigma0
    assert abs(a - 2 * b) <= 1e-8 * abs(a)


def test_sigma0_threads_do_not_change_result():
    a = sigma0_curve(1.0, [0.5, 1.0, 2.0], 48, threads=1)
    b = sigma0_curve(1.0, [0.5, 1.0, 2.0], 48, threads=3)
    assert a == b


def test_log_concavity():
    assert log_concavity_check(10_000)


def test_block_entries_p1_m1():
    entries, norm, inv = block_entries(BlockJacobiSpec(1, 1), 2)
    assert entries.tolist() == pytest.approx([2 * math.sqrt(3)])
    assert norm == pytest.approx(2 * math.sqrt(3))


def test_block_entries_p1_m2():
    entries, norm, inv = block_entries(BlockJacobiSpec(1, 2), 1)
    assert entries.tolist() == pytest.approx([math.sqrt(6), 4 * math.sqrt(3)])
    assert norm == pytest.approx(4 * math.sqrt(3))
    assert inv == pytest.approx(1 / math.sqrt(6))


def test_block_index_out_of_range():
    with pytest.raises(DomainError):
        block_entries(BlockJacobiSpec(1, 1, J=10), 11)


@pytest.mark.parametrize("p, m", [(1, 1), (1, 2), (2, 1), (2, 3)])
def test_block_norm_growth(p, m):
    spec = BlockJacobiSpec(p, m)
    i = np.arange(50, 501)
    norms = np.array([block_entries(spec, k)[1] for k in i])
    assert decay_exponent(i, norms, full_range=True) == pytest.approx(p + m / 2, abs=0.05)


def test_lemma33_thresholds():
    assert lemma33_threshold(BlockJacobiSpec(1, 1, 200)) == 2
    # with exact norms the inequality fails for every large i when m >= 2
    assert lemma33_threshold(BlockJacobiSpec(1, 2, 200)) is None
    assert lemma33_threshold(BlockJacobiSpec(1, 2, 200), exact=False) is not None


def test_spectrum_json_schema():
    obj = truncated_spectrum(ScalarJacobiSpec(3, 1, 2)).to_json_obj()
    assert list(obj) == ["n", "mu", "lambda", "eig_re", "eig_im", "residual"]
    assert obj["eig_re"] == pytest.approx([4, 5])
