"""Expression parsing, printing, and evaluation of closed-form fields."""

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hgeom import (
    DomainError,
    ParseError,
    evaluate_scalar_field,
    evaluate_scalar_value,
    format_scalar_field,
    parse_scalar_field,
    seed_coordinates,
)
from hgeom.fields import Add, Call, Div, Mul, Neg, Num, PowInt, Sub, Var

DIM = 4


def roundtrip(text: str) -> str:
    return format_scalar_field(parse_scalar_field(text, DIM))


class TestParsing:
    def test_number_literals(self):
        for text, value in [("2", 2.0), ("2.5", 2.5), ("1e-3", 1e-3), ("2.5E+2", 250.0)]:
            fe = parse_scalar_field(text, DIM)
            assert evaluate_scalar_value(fe, [0.0] * DIM) == value

    def test_pi_constant_folds(self):
        fe = parse_scalar_field("pi", DIM)
        assert isinstance(fe.ast, Num)
        assert fe.ast.value == math.pi

    def test_variable_indices_are_one_based(self):
        fe = parse_scalar_field("u3", DIM)
        assert isinstance(fe.ast, Var)
        assert fe.ast.index == 2

    def test_precedence_power_binds_tighter_than_unary_minus(self):
        fe = parse_scalar_field("-u1^2", DIM)
        assert isinstance(fe.ast, Neg)
        assert isinstance(fe.ast.a, PowInt)

    def test_power_is_right_associative_and_folds(self):
        fe = parse_scalar_field("u1^2^3", DIM)
        assert isinstance(fe.ast, PowInt)
        assert fe.ast.exponent == 8

    def test_subtraction_is_left_associative(self):
        value = evaluate_scalar_value(parse_scalar_field("u1-u2-u3", DIM), [10.0, 3.0, 2.0, 0.0])
        assert value == 5.0

    def test_mul_binds_tighter_than_add(self):
        value = evaluate_scalar_value(parse_scalar_field("1+2*u1", DIM), [3.0, 0.0, 0.0, 0.0])
        assert value == 7.0

    def test_parenthesized_exponent_folds(self):
        fe = parse_scalar_field("u1^(2+1)", DIM)
        assert isinstance(fe.ast, PowInt)
        assert fe.ast.exponent == 3

    def test_function_call(self):
        fe = parse_scalar_field("cosh(u1)", DIM)
        assert isinstance(fe.ast, Call)
        assert fe.ast.name == "cosh"


class TestParseErrors:
    def test_unterminated_call_reports_position_five(self):
        with pytest.raises(ParseError) as err:
            parse_scalar_field("cosh(", DIM)
        assert err.value.position == 5
        assert "expected expression" in str(err.value)

    def test_variable_beyond_dimension(self):
        with pytest.raises(ParseError, match="exceeds chart dimension 4"):
            parse_scalar_field("u9", DIM)

    def test_u0_is_not_a_variable(self):
        with pytest.raises(ParseError, match="unknown identifier"):
            parse_scalar_field("u0", DIM)

    def test_unknown_identifier(self):
        with pytest.raises(ParseError, match="unknown identifier 'coshh'"):
            parse_scalar_field("coshh(u1)", DIM)

    def test_non_constant_exponent(self):
        with pytest.raises(ParseError, match="constant integer") as err:
            parse_scalar_field("u1^u2", DIM)
        assert err.value.position == 2

    def test_fractional_exponent(self):
        with pytest.raises(ParseError, match="constant integer"):
            parse_scalar_field("u1^1.5", DIM)

    def test_missing_close_paren(self):
        with pytest.raises(ParseError) as err:
            parse_scalar_field("(u1", DIM)
        assert err.value.position == 3

    def test_trailing_operator(self):
        with pytest.raises(ParseError) as err:
            parse_scalar_field("u1 +", DIM)
        assert err.value.position == 4

    def test_empty_expression(self):
        with pytest.raises(ParseError, match="empty expression"):
            parse_scalar_field("", DIM)

    def test_unexpected_character(self):
        with pytest.raises(ParseError, match="unexpected character"):
            parse_scalar_field("u1 @ u2", DIM)

    def test_function_requires_parenthesis(self):
        with pytest.raises(ParseError, match="'\\(' after function"):
            parse_scalar_field("cosh u1", DIM)


class TestPrinting:
    def test_minimal_parentheses(self):
        assert roundtrip("(u1+u2)*u3") == "(u1+u2)*u3"
        assert roundtrip("u1+(u2*u3)") == "u1+u2*u3"
        assert roundtrip("u1-(u2-u3)") == "u1-(u2-u3)"
        assert roundtrip("(u1-u2)-u3") == "u1-u2-u3"
        assert roundtrip("-(u1+u2)") == "-(u1+u2)"
        assert roundtrip("(-u1)^2") == "(-u1)^2"
        assert roundtrip("-u1^2") == "-u1^2"
        assert roundtrip("u1/(u2*u3)") == "u1/(u2*u3)"
        assert roundtrip("(u1/u2)*u3") == "u1/u2*u3"
        assert roundtrip("cosh(u1)^2") == "cosh(u1)^2"

    def test_print_then_parse_is_identity_on_ast(self):
        for text in [
            "-sinh(u1)*cos(u3)^2 + u2/(1+u4^2)",
            "coth(u1)*cos(u3)",
            "1/(cosh(u1)*cos(u3))",
            "exp(2*u1) - ln(u2+3)",
        ]:
            fe = parse_scalar_field(text, DIM)
            reparsed = parse_scalar_field(format_scalar_field(fe), DIM)
            assert reparsed.ast == fe.ast


def ast_strategy():
    # The fixed-point property quantifies over the parser's image: literals
    # are nonnegative there (a leading '-' always parses as Neg).
    leaves = st.one_of(
        st.builds(Num, st.floats(min_value=0, max_value=4, allow_nan=False).map(lambda v: round(v, 3))),
        st.builds(Var, st.integers(min_value=0, max_value=DIM - 1)),
    )

    def extend(children):
        unary = st.one_of(
            st.builds(Neg, children),
            st.builds(Call, st.sampled_from(["sinh", "cosh", "tanh", "sin", "cos", "exp"]), children),
        )
        binary = st.one_of(
            st.builds(Add, children, children),
            st.builds(Sub, children, children),
            st.builds(Mul, children, children),
            st.builds(Div, children, children),
            st.builds(PowInt, children, st.integers(min_value=0, max_value=4)),
        )
        return st.one_of(unary, binary)

    return st.recursive(leaves, extend, max_leaves=12)


class TestRoundTripProperty:
    @given(ast_strategy())
    @settings(max_examples=150, deadline=None)
    def test_parse_of_print_is_fixed_point(self, ast):
        from hgeom.fields import FieldExpr

        fe = FieldExpr(ast, DIM)
        printed = format_scalar_field(fe)
        reparsed = parse_scalar_field(printed, DIM)
        assert reparsed.ast == ast
        assert format_scalar_field(reparsed) == printed


class TestEvaluation:
    def test_jet_and_value_paths_agree(self):
        text = "sinh(u1)*cos(u2) + u1^3/(u2+2)"
        fe = parse_scalar_field(text, 2)
        coords = [0.7, 0.4]
        jet = evaluate_scalar_field(fe, seed_coordinates(coords))
        plain = evaluate_scalar_value(fe, coords)
        expected = math.sinh(0.7) * math.cos(0.4) + 0.7**3 / 2.4
        assert jet.value == pytest.approx(expected, rel=1e-15)
        assert plain == pytest.approx(expected, rel=1e-15)

    def test_jet_gradient_of_known_field(self):
        fe = parse_scalar_field("u1^2*u2", 2)
        jet = evaluate_scalar_field(fe, seed_coordinates([3.0, 5.0]))
        np.testing.assert_allclose(jet.grad, [30.0, 9.0])
        np.testing.assert_allclose(jet.hess, [[10.0, 6.0], [6.0, 0.0]])

    def test_wrong_jet_count_rejected(self):
        fe = parse_scalar_field("u1", 4)
        with pytest.raises(ValueError, match="4"):
            evaluate_scalar_field(fe, seed_coordinates([1.0, 2.0]))

    def test_domain_error_propagates(self):
        fe = parse_scalar_field("ln(u1)", 1)
        with pytest.raises(DomainError):
            evaluate_scalar_field(fe, seed_coordinates([-1.0]))
        with pytest.raises(DomainError):
            evaluate_scalar_value(fe, [-1.0])

    def test_value_path_division_guard(self):
        fe = parse_scalar_field("1/u1", 1)
        with pytest.raises(DomainError):
            evaluate_scalar_value(fe, [0.0])

    @given(
        st.floats(min_value=0.3, max_value=1.4),
        st.floats(min_value=-2.0, max_value=2.0),
    )
    @settings(max_examples=60, deadline=None)
    def test_value_equals_jet_value_on_sphere_like_fields(self, a, b):
        for text in ["-sinh(u1)^2", "cosh(u1)*cos(u2)", "coth(u1)+u2^3"]:
            fe = parse_scalar_field(text, 2)
            jet = evaluate_scalar_field(fe, seed_coordinates([a, b]))
            assert evaluate_scalar_value(fe, [a, b]) == pytest.approx(
                jet.value, rel=1e-14, abs=1e-14
            )
