import json
import math
from fractions import Fraction
from xml.etree import ElementTree

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from scipy.special import zeta

from gribov.fitting import decay_exponent, power_law, power_tail
from gribov.output import fmt_float, to_csv, to_json
from gribov.quadrature import composite_rule, graded_edges, uniform_rule
from gribov.svg import line_plot


@given(st.floats(allow_nan=False, allow_infinity=False))
def test_float_round_trip(x):
    assert float(fmt_float(x)) == x


def test_json_writer():
    text = to_json({"a": 0.1, "b": [1, 2.5], "c": float("nan"), "d": None, "e": Fraction(-3, 4), "f": True})
    obj = json.loads(text)
    assert obj == {"a": 0.1, "b": [1, 2.5], "c": None, "d": None, "e": ["-3", "4"], "f": True}
    assert '"a": 0.10000000000000001' in text


def test_csv_writer():
    text = to_csv(["x", "y", "n"], [(0.5, float("inf"), 3), (1e-20, -2.0, 4)])
    assert text == "x,y,n\n0.5,,3\n9.9999999999999995e-21,-2,4\n"


def test_svg_is_well_formed():
    svg = line_plot([0, 1, 2], {"a": [1.0, 4.0, 9.0], "b & c": [0.0, float("nan"), 1.0]}, title="t<1>")
    root = ElementTree.fromstring(svg)
    assert root.tag.endswith("svg")
    assert len([e for e in root.iter() if e.tag.endswith("polyline")]) == 2


def test_svg_degenerate_data():
    ElementTree.fromstring(line_plot([1.0], {"flat": [2.0]}))


def test_composite_rule_integrates_polynomials():
    x, w = composite_rule([0.0, 0.5, 2.0], order=10)
    assert np.dot(w, x**7) == pytest.approx(2.0**8 / 8, rel=1e-14)


def test_uniform_rule_node_count():
    x, w = uniform_rule(0.0, 12.0, 400)
    assert x.size == 400 and w.sum() == pytest.approx(12.0)


def test_graded_edges_cover_range():
    e = graded_edges(0.01, 5.0)
    assert e[0] == 0 and e[-1] == pytest.approx(5.0) and np.all(np.diff(e) > 0)


def test_power_fits():
    n = np.arange(10, 1001, dtype=float)
    vals = 3.0 * n**-1.5
    assert decay_exponent(n, vals) == pytest.approx(-1.5)
    c, s = power_law(n, vals)
    assert c == pytest.approx(3.0) and s == pytest.approx(-1.5)
    assert power_tail(n, vals, 1000) == pytest.approx(3.0 * zeta(1.5, 1001))
    assert math.isinf(power_tail(n, 1 / n, 1000))
