"""Tests for the expression language: tokens, precedence, errors, printing,
and agreement of evaluated derivatives with finite differences."""

import math

import numpy as np
import pytest

from finslerconn.ad import ChartJets
from finslerconn.expr import (
    BinOp,
    Call,
    ExprCovectorField,
    ExprError,
    ExprMatrixField,
    ExprScalarField,
    FieldSpec,
    Neg,
    Num,
    Var,
    evaluate,
    format_expression,
    parse_expression,
)


def _value(text, x, y, n=2, order=0):
    jets = ChartJets.at(x, y, order)
    return float(evaluate(parse_expression(text, n), jets).val)


# ---------------------------------------------------------------------------
# parsing and precedence


def test_precedence_product_over_sum():
    assert _value("1 + 2*3", [0, 0], [1, 1]) == 7.0
    assert _value("(1 + 2)*3", [0, 0], [1, 1]) == 9.0


def test_precedence_power_over_unary_minus():
    assert _value("-2^2", [0, 0], [1, 1]) == -4.0
    assert _value("(-2)^2", [0, 0], [1, 1]) == 4.0


def test_left_associativity():
    assert _value("8/4/2", [0, 0], [1, 1]) == 1.0
    assert _value("8 - 4 - 2", [0, 0], [1, 1]) == 2.0


def test_chained_power_is_left_associative():
    assert _value("2^3^2", [0, 0], [1, 1]) == 64.0  # (2^3)^2


def test_variables_read_chart_slots():
    assert _value("x1 + 10*x2 + 100*y1 + 1000*y2", [1, 2], [3, 4]) == 4321.0


def test_functions_evaluate():
    assert _value("sqrt(y1)", [0, 0], [4, 1]) == 2.0
    assert _value("exp(x1)", [0.5, 0], [1, 1]) == pytest.approx(math.exp(0.5))
    assert _value("log(exp(1))", [0, 0], [1, 1]) == pytest.approx(1.0)
    assert _value("sin(x1)^2 + cos(x1)^2", [0.7, 0], [1, 1]) == pytest.approx(1.0)
    assert _value("abs(x1)", [-0.3, 0], [1, 1]) == pytest.approx(0.3)


def test_rational_and_negative_exponents():
    assert _value("y1^(3/2)", [0, 0], [4, 1]) == 8.0
    assert _value("y1^-2", [0, 0], [4, 1]) == pytest.approx(1 / 16)
    assert _value("y1^1.5", [0, 0], [4, 1]) == 8.0


def test_scientific_notation_numbers():
    assert _value("1e2 + 2.5e-1", [0, 0], [1, 1]) == pytest.approx(100.25)


def test_unary_plus_and_nested_negation():
    assert _value("+5", [0, 0], [1, 1]) == 5.0
    assert _value("--5", [0, 0], [1, 1]) == 5.0
    assert _value("2*-3", [0, 0], [1, 1]) == -6.0


# ---------------------------------------------------------------------------
# errors carry offsets


def test_unknown_identifier_offset():
    with pytest.raises(ExprError) as err:
        parse_expression("y1 + foo*2", 2)
    assert err.value.offset == 5


def test_variable_index_out_of_range():
    with pytest.raises(ExprError) as err:
        parse_expression("x3 + 1", 2)
    assert err.value.offset == 0
    assert "chart dimension" in str(err.value)
    parse_expression("x3 + 1", 3)  # fine at n = 3


def test_x0_is_not_a_variable():
    with pytest.raises(ExprError):
        parse_expression("x0", 2)


def test_unbalanced_parens():
    with pytest.raises(ExprError) as err:
        parse_expression("(y1 + 2", 2)
    assert err.value.offset == 7


def test_trailing_garbage():
    with pytest.raises(ExprError) as err:
        parse_expression("y1 2", 2)
    assert err.value.offset == 3


def test_unexpected_character():
    with pytest.raises(ExprError) as err:
        parse_expression("y1 @ 2", 2)
    assert err.value.offset == 3


def test_nonconstant_exponent_rejected():
    with pytest.raises(ExprError) as err:
        parse_expression("y1^x1", 2)
    assert "constant" in str(err.value)


def test_function_requires_parens():
    with pytest.raises(ExprError):
        parse_expression("sqrt y1", 2)


def test_empty_input():
    with pytest.raises(ExprError):
        parse_expression("", 2)


# ---------------------------------------------------------------------------
# printing round-trip


ROUND_TRIP_SOURCES = [
    "y1 + y2*x1",
    "-x1^2 + (x1*y2)^3",
    "sqrt(y1^2 + exp(2*x1)*y2^2)",
    "1/(1 + x1^2) - abs(y2)/2",
    "sin(x1)*cos(y1) - log(2 + x2^2)",
    "y1^(3/2) + y2^-2",
    "8/4/2 - (8 - 4 - 2)",
    "--y1 + -(x1 + x2)",
    "2.5e-1*y1 + 0.125",
]


@pytest.mark.parametrize("src", ROUND_TRIP_SOURCES)
def test_format_parse_round_trip(src):
    ast = parse_expression(src, 2)
    printed = format_expression(ast)
    again = parse_expression(printed, 2)
    assert again == ast
    # and the printed form is stable under one more cycle
    assert format_expression(again) == printed


def test_round_trip_preserves_values():
    jets = ChartJets.at([0.3, -0.2], [0.9, 1.4], 2)
    for src in ROUND_TRIP_SOURCES:
        ast = parse_expression(src, 2)
        a = evaluate(ast, jets)
        b = evaluate(parse_expression(format_expression(ast), 2), jets)
        assert np.allclose(a.coef, b.coef, atol=1e-14)


def test_ast_shapes():
    ast = parse_expression("sqrt(y1) + -x1*2", 2)
    assert isinstance(ast, BinOp) and ast.op == "+"
    assert isinstance(ast.left, Call) and isinstance(ast.left.arg, Var)
    assert isinstance(ast.right, BinOp) and isinstance(ast.right.left, Neg)
    assert isinstance(ast.right.right, Num)


# ---------------------------------------------------------------------------
# randomized polynomial fields vs finite differences


def _random_poly_text(rng, n, degree=4, terms=6):
    names = [f"x{i+1}" for i in range(n)] + [f"y{i+1}" for i in range(n)]
    parts = []
    for _ in range(terms):
        c = rng.uniform(-1.0, 1.0)
        factors = [f"{c:.6f}"]
        for _ in range(rng.integers(0, degree + 1)):
            factors.append(str(rng.choice(names)))
        parts.append("*".join(factors))
    return " + ".join(parts)


def test_random_polynomials_match_finite_differences():
    rng = np.random.default_rng(1234)
    h = 1e-5
    worst = 0.0
    for trial in range(1000):
        n = int(rng.integers(1, 4))
        text = _random_poly_text(rng, n)
        field = ExprScalarField(n, text)
        x0 = rng.uniform(-0.6, 0.6, size=n)
        y0 = rng.uniform(0.4, 1.5, size=n)
        s = field.eval(ChartJets.at(x0, y0, 1))
        slot = int(rng.integers(0, 2 * n))
        ep = np.zeros(2 * n)
        ep[slot] = h
        fp = field.eval(ChartJets.at(x0 + ep[:n], y0 + ep[n:], 0)).val
        fm = field.eval(ChartJets.at(x0 - ep[:n], y0 - ep[n:], 0)).val
        fd = float(fp - fm) / (2 * h)
        alpha = [0] * (2 * n)
        alpha[slot] = 1
        ad = float(s.extract(alpha))
        worst = max(worst, abs(ad - fd) / (1.0 + abs(fd)))
    assert worst < 1e-5


# ---------------------------------------------------------------------------
# field adapters


def test_covector_field_shape_and_values():
    f = ExprCovectorField(2, ["y1/2", "x1*y2"])
    s = f.eval(ChartJets.at([3.0, 0.0], [4.0, 5.0], 1))
    assert s.shape == (2,)
    assert s.val == pytest.approx([2.0, 15.0])
    with pytest.raises(ValueError):
        ExprCovectorField(2, ["y1"])


def test_matrix_field_shape_and_values():
    f = ExprMatrixField(2, [["1", "x1"], ["0", "y2"]])
    s = f.eval(ChartJets.at([3.0, 0.0], [4.0, 5.0], 1))
    assert s.shape == (2, 2)
    assert np.allclose(s.val, [[1.0, 3.0], [0.0, 5.0]])
    with pytest.raises(ValueError):
        ExprMatrixField(2, [["1", "x1"]])


def test_field_spec_builders():
    assert FieldSpec("scalar", 2, ("y1 + y2",)).build().describe() == "y1 + y2"
    cov = FieldSpec("covector", 2, ("y1", "0")).build()
    assert isinstance(cov, ExprCovectorField)
    mat = FieldSpec("matrix", 2, ("1", "0", "0", "1")).build()
    assert isinstance(mat, ExprMatrixField)
    with pytest.raises(ValueError):
        FieldSpec("matrix", 2, ("1", "0")).build()
    with pytest.raises(ValueError):
        FieldSpec("tensor", 2, ("1",)).build()


def test_parse_errors_surface_through_adapters():
    with pytest.raises(ExprError):
        ExprScalarField(2, "y1 + y7")
