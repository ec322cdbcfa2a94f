import math
from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from pde.numeric import (
    BinaryOp,
    Call,
    DivideByZeroError,
    DomainError,
    ExprSyntaxError,
    Number,
    NumericError,
    Paren,
    UnbalancedParenError,
    UnknownFunctionError,
    eval_expr,
    format_value,
    parse_expr,
    render_expr,
)


def oracle_eval(tree):
    """Brute-force structural evaluator, written independently of eval_expr."""
    if isinstance(tree, Number):
        return Fraction(tree.value)
    if isinstance(tree, Paren):
        return oracle_eval(tree.child)
    if isinstance(tree, Call):
        x = oracle_eval(tree.argument)
        return math.sqrt(x) if tree.func == "sqrt" else math.log10(x)
    a = oracle_eval(tree.left)
    b = oracle_eval(tree.right)
    return {
        "+": lambda: a + b,
        "-": lambda: a - b,
        "*": lambda: a * b,
        "/": lambda: a / b,
        "^": lambda: a ** int(b),
    }[tree.op]()


# Expected values below were produced by oracle_eval before freezing, and the
# oracle re-checks them on every run.
TABLE = [
    ("2 + 3", 5, "2 plus 3"),
    ("10 / 2", 5, "10 divided by 2"),
    ("5 * (3 + 4)", 35, "5 multiplied by (3 plus 4)"),
    ("2 ^ 3", 8, "2 raised to the power of 3"),
    ("sqrt(16)", 4, "square root of 16"),
    ("log(100)", 2, "logarithm of 100"),
]


@pytest.mark.parametrize("text,value,english", TABLE)
def test_reference_rows(text, value, english):
    tree = parse_expr(text)
    assert eval_expr(tree) == value
    assert oracle_eval(tree) == value
    assert render_expr(tree) == english


def test_ast_shapes():
    assert parse_expr("5 * (3 + 4)") == BinaryOp(
        "*", Number(5), Paren(BinaryOp("+", Number(3), Number(4)))
    )
    assert parse_expr("2 ^ 3") == BinaryOp("^", Number(2), Number(3))
    assert parse_expr("sqrt(16)") == Call("sqrt", Number(16))


def test_precedence_and_associativity():
    assert eval_expr(parse_expr("2 + 3 * 4")) == 14
    assert eval_expr(parse_expr("2 * 3 ^ 2")) == 18
    assert eval_expr(parse_expr("2 ^ 3 ^ 2")) == 512  # right-associative
    assert eval_expr(parse_expr("8 / 4 / 2")) == 1  # left-associative
    assert eval_expr(parse_expr("8 - 4 - 2")) == 2


def test_hash_prefixed_numbers():
    assert eval_expr(parse_expr("#10 / #2")) == 5
    assert parse_expr("#12") == Number(12)


def test_exact_rational_division():
    assert eval_expr(parse_expr("1 / 3")) == Fraction(1, 3)
    assert eval_expr(parse_expr("10 / 4")) == Fraction(5, 2)
    assert eval_expr(parse_expr("1 / 3 * 3")) == 1


def test_arbitrary_precision_integers():
    big = "9" * 50
    tree = parse_expr(f"{big} + 1")
    assert eval_expr(tree) == 10**50
    assert eval_expr(parse_expr(f"{big} * {big}")) == int(big) ** 2


def test_divide_by_zero_surfaces_at_eval_not_parse():
    tree = parse_expr("1 / 0")  # parsing is fine
    with pytest.raises(DivideByZeroError):
        eval_expr(tree)
    with pytest.raises(DivideByZeroError):
        eval_expr(parse_expr("1 / (2 - 2)"))


def test_domain_errors():
    with pytest.raises(DomainError):
        eval_expr(parse_expr("sqrt(1 - 2)"))
    with pytest.raises(DomainError):
        eval_expr(parse_expr("log(0)"))


def test_unary_minus_is_rejected():
    with pytest.raises(ExprSyntaxError):
        parse_expr("-1")
    with pytest.raises(ExprSyntaxError):
        parse_expr("2 + -3")


def test_negative_results_are_fine():
    assert eval_expr(parse_expr("1 - 2")) == -1


def test_unknown_function():
    with pytest.raises(UnknownFunctionError):
        parse_expr("foo(3)")


def test_unbalanced_parens():
    with pytest.raises(UnbalancedParenError):
        parse_expr("(2 + 3")
    with pytest.raises(UnbalancedParenError):
        parse_expr("2)")


def test_empty_and_trailing_garbage():
    with pytest.raises(ExprSyntaxError):
        parse_expr("")
    with pytest.raises(ExprSyntaxError):
        parse_expr("2 3")


def test_exponent_guard():
    with pytest.raises(NumericError):
        eval_expr(parse_expr("9 ^ 99999999"))


def test_whitespace_is_optional():
    assert parse_expr("5*(3+4)") == parse_expr("5 * (3 + 4)")


def test_symbol_rendering_reparses_to_the_same_tree():
    for text, _, _ in TABLE:
        tree = parse_expr(text)
        assert parse_expr(render_expr(tree, "symbols")) == tree


def test_format_value():
    assert format_value(eval_expr(parse_expr("sqrt(16)"))) == "4"
    assert format_value(eval_expr(parse_expr("1 / 3"))) == "1/3"
    assert format_value(eval_expr(parse_expr("2 + 3"))) == "5"


small_ints = st.integers(min_value=0, max_value=999)


@given(small_ints, small_ints)
def test_addition_and_multiplication_commute(a, b):
    assert eval_expr(BinaryOp("+", Number(a), Number(b))) == eval_expr(
        BinaryOp("+", Number(b), Number(a))
    )
    assert eval_expr(BinaryOp("*", Number(a), Number(b))) == eval_expr(
        BinaryOp("*", Number(b), Number(a))
    )


@given(small_ints)
def test_identity_laws(a):
    assert eval_expr(BinaryOp("^", Number(a), Number(1))) == a
    assert eval_expr(BinaryOp("/", Number(a), Number(1))) == a


@given(
    st.recursive(
        small_ints.map(Number),
        lambda children: st.builds(
            BinaryOp,
            st.sampled_from(["+", "-", "*"]),
            children,
            children,
        )
        | children.map(Paren),
        max_leaves=12,
    )
)
def test_eval_matches_oracle_on_closed_operations(tree):
    assert eval_expr(tree) == oracle_eval(tree)
