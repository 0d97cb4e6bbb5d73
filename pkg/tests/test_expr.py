import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from avpsolve import errors
from avpsolve.errors import EvaluationError, SystemCompileError, UnknownIdentifierError
from avpsolve.expr import BinOp, Call, Neg, Num, Var, compile_function, compile_system, evaluate, parse, to_text

from expr_corpus import MALFORMED, POINT, VALID


def within_ulp(got: float, want: float, ulps: int = 1) -> bool:
    return got == want or abs(got - want) <= ulps * math.ulp(want)


@pytest.mark.parametrize("text, want", VALID)
def test_corpus_value(text, want):
    x, y = POINT
    assert within_ulp(evaluate(parse(text), x, y), want)


@pytest.mark.parametrize("text, kind, offset", MALFORMED)
def test_malformed_offsets(text, kind, offset):
    with pytest.raises(getattr(errors, kind)) as info:
        parse(text)
    assert info.value.offset == offset
    assert f"offset {offset}" in str(info.value)


def test_precedence_tree():
    assert parse("-x^2") == Neg(BinOp("^", Var("x"), Num(2.0)))
    assert parse("2^3^2") == BinOp("^", Num(2.0), BinOp("^", Num(3.0), Num(2.0)))
    assert parse("1-2-3") == BinOp("-", BinOp("-", Num(1.0), Num(2.0)), Num(3.0))


def test_expected_set_reported():
    with pytest.raises(errors.ExprSyntaxError) as info:
        parse("2 ^ x")
    assert info.value.expected == {"number", "("}


@pytest.mark.parametrize(
    "text, check",
    [
        ("1 / 0", lambda v: v == math.inf),
        ("-1 / 0", lambda v: v == -math.inf),
        ("0 / 0", math.isnan),
        ("ln(0)", lambda v: v == -math.inf),
        ("ln(-1)", math.isnan),
        ("sqrt(-1)", math.isnan),
        ("exp(1000)", lambda v: v == math.inf),
        ("(-8) ^ (1/3)", math.isnan),
    ],
)
def test_domain_errors_give_nonfinite(text, check):
    assert check(evaluate(parse(text), 0.0, [0.0]))


def test_y_alias_only_for_scalar():
    f = compile_function("y * 2", 1)
    assert f(0.0, np.array([3.0])) == 6.0
    with pytest.raises(UnknownIdentifierError):
        compile_function("y * 2", 2)


def test_unbound_variable_at_evaluation():
    with pytest.raises(EvaluationError):
        evaluate(parse("y3"), 0.0, [1.0, 2.0])


def test_compile_system_aggregates_failures():
    with pytest.raises(SystemCompileError) as info:
        compile_system(["y1 +", "y2", "q"], 3)
    assert [i for i, _ in info.value.failures] == [0, 2]


def test_compile_system_evaluates():
    sys_ = compile_system(["y2", "-y1"], 2)
    assert list(sys_(0.0, [1.0, 2.0])) == [2.0, -1.0]


# ---- parse / print / parse ----------------------------------------------------

numbers = st.floats(0, 1e6, allow_nan=False).map(lambda v: Num(float(v)))
leaves = numbers | st.sampled_from([Var("x"), Var("y1"), Var("y2")])


def _extend(children):
    return (
        st.builds(Neg, children)
        | st.builds(BinOp, st.sampled_from("+-*/"), children, children)
        | st.builds(BinOp, st.just("^"), children, children)
        | st.builds(Call, st.sampled_from(["sin", "cos", "exp", "ln", "sqrt", "abs", "tan"]), children)
    )


trees = st.recursive(leaves, _extend, max_leaves=12)


@settings(max_examples=300, deadline=None)
@given(trees)
def test_parse_print_parse(tree):
    assert parse(to_text(tree)) == tree
