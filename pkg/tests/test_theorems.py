import math
import random

import numpy as np
import pytest

from rectmvt.expr import BinOp, Const, Var, EvaluationError, evaluate, parse
from rectmvt.harness import FunctionFamily, derive_seed, generate_function, generate_rectangle
from rectmvt.theorems import (
    DegenerateError,
    DomainError,
    HypothesisError,
    Rectangle,
    TheoremCase,
    boggio1d_residual,
    boggio2d_residual,
    build_cauchy_auxiliary,
    build_reciprocal_transform,
    corner_difference,
    fts_expansion_check,
    pompeiu1d_residual,
    pompeiu2d_residual,
    pompeiu_operator,
    pompeiu_rhs,
    reciprocal_rectangle,
    rect_cauchy_residual,
    rect_mvt_residual,
    rect_rolle_residual,
)

SQ6 = math.sqrt(6.0)


def _interior_points(rect: Rectangle, n: int, seed: int):
    rng = random.Random(seed)
    for _ in range(n):
        yield (
            rng.uniform(rect.x1 + 0.05 * rect.width, rect.x2 - 0.05 * rect.width),
            rng.uniform(rect.y1 + 0.05 * rect.height, rect.y2 - 0.05 * rect.height),
        )


# -- Rectangle -----------------------------------------------------------------


def test_rectangle_ordering_enforced():
    with pytest.raises(ValueError):
        Rectangle(1.0, 1.0, 0.0, 1.0)
    with pytest.raises(ValueError):
        Rectangle(0.0, 1.0, 2.0, 1.0)


def test_rectangle_zero_free():
    assert Rectangle(1, 2, 1, 3).zero_free()
    assert Rectangle(-2, -1, 1, 2).zero_free()
    assert not Rectangle(-1, 2, 1, 3).zero_free()
    assert not Rectangle(1, 2, -1, 3).zero_free()


def test_theorem_case_validation():
    f = parse("x*y")
    TheoremCase("rmvt", f)
    TheoremCase("cauchy", f, parse("x+y"))
    with pytest.raises(ValueError):
        TheoremCase("cauchy", f)
    with pytest.raises(ValueError):
        TheoremCase("rmvt", f, parse("x"))
    with pytest.raises(ValueError):
        TheoremCase("nonsense", f)


# -- corner difference ----------------------------------------------------------


def test_corner_difference_bilinear():
    assert corner_difference(parse("x*y"), Rectangle(1, 2, 1, 2)) == 1.0


def test_corner_difference_constant_cancels():
    assert corner_difference(parse("7"), Rectangle(0, 1, 2, 5)) == 0.0


def test_corner_difference_quartic():
    assert corner_difference(parse("x^2*y^2"), Rectangle(1, 2, 1, 3)) == 24.0


# -- rectangular Rolle ----------------------------------------------------------


def test_rolle_rejects_violated_corner_identity():
    with pytest.raises(HypothesisError):
        rect_rolle_residual(parse("x*y - x - y"), Rectangle(0, 1, 0, 1))


def test_rolle_sine_product():
    field = rect_rolle_residual(parse("sin(x)*sin(y)"), Rectangle(0.0, math.pi, 0.0, math.pi))
    # R(x, y) = cos(x)cos(y); vanishes on the line x = pi/2
    assert field.residual(math.pi / 2, 1.0) == pytest.approx(0.0, abs=1e-15)
    assert field.residual(1.0, 1.0) == pytest.approx(math.cos(1.0) ** 2, rel=1e-12)


def test_rolle_constant_function_identically_zero():
    field = rect_rolle_residual(parse("3"), Rectangle(0, 1, 0, 1))
    for x, y in _interior_points(field.rectangle, 10, 5):
        assert field.residual(x, y) == 0.0


# -- rectangular MVT ------------------------------------------------------------


def test_rmvt_residual_closed_form():
    field = rect_mvt_residual(parse("x^2*y"), Rectangle(0, 1, 0, 1))
    assert field.decomposition["delta_f"] == 1.0
    for x, y in _interior_points(field.rectangle, 20, 31):
        assert field.residual(x, y) == pytest.approx(1.0 - 2.0 * x, rel=1e-12, abs=1e-12)


def test_rmvt_bilinear_residual_vanishes():
    field = rect_mvt_residual(parse("x*y"), Rectangle(-1.5, 2.0, 0.5, 4.0))
    for x, y in _interior_points(field.rectangle, 20, 37):
        assert abs(field.residual(x, y)) <= 1e-13 * field.scale


def test_rmvt_sine_product_closed_form():
    field = rect_mvt_residual(parse("sin(x)*sin(y)"), Rectangle(0, math.pi / 2, 0, math.pi / 2))
    assert field.decomposition["delta_f"] == pytest.approx(1.0, rel=1e-15)
    for x, y in _interior_points(field.rectangle, 20, 41):
        want = 1.0 - (math.pi / 2) ** 2 * math.cos(x) * math.cos(y)
        assert field.residual(x, y) == pytest.approx(want, rel=1e-12, abs=1e-12)


# -- rectangular Cauchy ----------------------------------------------------------


def test_cauchy_residual_closed_form():
    field = rect_cauchy_residual(parse("x^2*y^2"), parse("x*y"), Rectangle(1, 2, 1, 3))
    assert field.decomposition["delta_f"] == 24.0
    assert field.decomposition["delta_g"] == 2.0
    for x, y in _interior_points(field.rectangle, 20, 43):
        assert field.residual(x, y) == pytest.approx(24.0 - 8.0 * x * y, rel=1e-12)
    # the zero curve x*y = 3 passes through (1.5, 2)
    assert field.residual(1.5, 2.0) == pytest.approx(0.0, abs=1e-12)


def test_cauchy_reduces_to_rmvt_for_bilinear_g():
    rng = random.Random(47)
    family = FunctionFamily("polynomial", max_degree=4)
    for i in range(20):
        rect = generate_rectangle(derive_seed(500, i))
        f = generate_function(family, derive_seed(501, i))
        cauchy = rect_cauchy_residual(f, parse("x*y"), rect)
        mvt = rect_mvt_residual(f, rect)
        for _ in range(20):
            x = rng.uniform(rect.x1 + 0.05 * rect.width, rect.x2 - 0.05 * rect.width)
            y = rng.uniform(rect.y1 + 0.05 * rect.height, rect.y2 - 0.05 * rect.height)
            assert abs(cauchy.residual(x, y) - mvt.residual(x, y)) <= 1e-12 * cauchy.scale


def test_cauchy_equal_functions_vanish():
    f = parse("x^2*y + x*y^2")
    field = rect_cauchy_residual(f, f, Rectangle(0.5, 2.0, 0.5, 2.0))
    for x, y in _interior_points(field.rectangle, 10, 53):
        assert field.residual(x, y) == 0.0


def test_cauchy_degenerate_g_rejected():
    # additively separable g has an exactly zero corner difference
    with pytest.raises(DegenerateError):
        rect_cauchy_residual(parse("x^2*y^2"), parse("x^2 + y^2"), Rectangle(1, 2, 1, 3))


# -- Pompeiu operator and 2-D residual -------------------------------------------


def test_pompeiu_operator_annihilations():
    rng = random.Random(59)
    one, x, y, xy = parse("1"), parse("x"), parse("y"), parse("x*y")
    for _ in range(20):
        xi1 = rng.uniform(-4, 4)
        xi2 = rng.uniform(-4, 4)
        assert abs(pompeiu_operator(one, xi1, xi2) - 1.0) <= 1e-14
        assert abs(pompeiu_operator(x, xi1, xi2)) <= 1e-14
        assert abs(pompeiu_operator(y, xi1, xi2)) <= 1e-14
        assert abs(pompeiu_operator(xy, xi1, xi2)) <= 1e-14


def test_pompeiu_operator_quartic_closed_form():
    rng = random.Random(61)
    tree = parse("x^2*y^2")
    for _ in range(20):
        xi1 = rng.uniform(0.5, 3)
        xi2 = rng.uniform(0.5, 3)
        want = xi1 ** 2 * xi2 ** 2
        assert pompeiu_operator(tree, xi1, xi2) == pytest.approx(want, rel=1e-13)


def test_pompeiu_rhs_examples():
    r = Rectangle(1, 2, 1, 3)
    assert pompeiu_rhs(parse("1"), r) == pytest.approx(1.0, rel=1e-15)
    assert abs(pompeiu_rhs(parse("x*y"), r)) <= 1e-14
    assert pompeiu_rhs(parse("x^2*y^2"), r) == pytest.approx(6.0, rel=1e-15)


def test_pompeiu2d_residual_closed_form():
    field = pompeiu2d_residual(parse("x^2*y^2"), Rectangle(1, 2, 1, 3))
    assert field.decomposition["rhs"] == pytest.approx(6.0, rel=1e-15)
    for x, y in _interior_points(field.rectangle, 20, 67):
        assert field.residual(x, y) == pytest.approx(x * x * y * y - 6.0, rel=1e-12, abs=1e-12)
    # (1.5, 2*sqrt(6)/3) sits on the zero curve xi1*xi2 = sqrt(6)
    assert abs(field.residual(1.5, 2.0 * SQ6 / 3.0)) <= 1e-12 * field.scale


def test_pompeiu2d_bilinear_identically_zero():
    field = pompeiu2d_residual(parse("x*y"), Rectangle(1, 2, 1, 3))
    for x, y in _interior_points(field.rectangle, 10, 71):
        assert abs(field.residual(x, y)) <= 1e-13 * field.scale


def test_pompeiu2d_requires_zero_free_rectangle():
    with pytest.raises(DomainError):
        pompeiu2d_residual(parse("x*y"), Rectangle(-1, 2, 1, 3))


# -- Boggio 2-D -------------------------------------------------------------------


def test_boggio2d_bilinear_g_proportional_to_pompeiu():
    rng = random.Random(73)
    family = FunctionFamily("polynomial", max_degree=4)
    for i in range(20):
        rect = generate_rectangle(derive_seed(600, i), zero_free=True)
        f = generate_function(family, derive_seed(601, i))
        boggio = boggio2d_residual(f, parse("x*y"), rect)
        pomp = pompeiu2d_residual(f, rect)
        delta_f = boggio.decomposition["delta_f"]
        for _ in range(20):
            x = rng.uniform(rect.x1 + 0.05 * rect.width, rect.x2 - 0.05 * rect.width)
            y = rng.uniform(rect.y1 + 0.05 * rect.height, rect.y2 - 0.05 * rect.height)
            want = -pomp.residual(x, y) / delta_f
            assert abs(boggio.residual(x, y) - want) <= 1e-10 * boggio.scale


def test_boggio2d_equal_functions_vanish():
    f = parse("x^2*y^2 + x*y")
    field = boggio2d_residual(f, f, Rectangle(1, 2, 1, 3))
    for x, y in _interior_points(field.rectangle, 10, 79):
        assert field.residual(x, y) == 0.0


def test_boggio2d_zero_curve_matches_pompeiu():
    field = boggio2d_residual(parse("x^2*y^2"), parse("x*y"), Rectangle(1, 2, 1, 3))
    # zero where the Pompeiu operator of f equals 6, i.e. on xi1*xi2 = sqrt(6)
    assert abs(field.residual(1.5, 2.0 * SQ6 / 3.0)) <= 1e-12 * field.scale


def test_boggio2d_preconditions():
    with pytest.raises(DomainError):
        boggio2d_residual(parse("x^2*y^2"), parse("x*y"), Rectangle(-1, 2, 1, 3))
    with pytest.raises(DegenerateError):
        boggio2d_residual(parse("x^2 + y^2"), parse("x*y"), Rectangle(1, 2, 1, 3))
    with pytest.raises(DegenerateError):
        boggio2d_residual(parse("x*y"), parse("x^2 + y^2"), Rectangle(1, 2, 1, 3))


# -- one-dimensional residuals -----------------------------------------------------


def test_pompeiu1d_closed_form():
    field = pompeiu1d_residual(parse("x^2"), 1.0, 2.0)
    assert field.decomposition["rhs"] == pytest.approx(-2.0, rel=1e-15)
    for xi in np.linspace(1.05, 1.95, 15):
        assert field.residual(float(xi)) == pytest.approx(2.0 - xi * xi, rel=1e-13)
    assert field.residual(math.sqrt(2.0)) == pytest.approx(0.0, abs=1e-15)


def test_pompeiu1d_linear_and_constant_vanish():
    linear = pompeiu1d_residual(parse("x"), 1.0, 2.0)
    constant = pompeiu1d_residual(parse("1"), 1.0, 2.0)
    for xi in np.linspace(1.05, 1.95, 15):
        assert abs(linear.residual(float(xi))) <= 1e-14
        assert abs(constant.residual(float(xi))) <= 1e-14


def test_pompeiu1d_rejects_interval_containing_zero():
    with pytest.raises(DomainError):
        pompeiu1d_residual(parse("x^2"), -1.0, 2.0)


def test_boggio1d_reduces_to_pompeiu_for_identity_g():
    pomp = pompeiu1d_residual(parse("x^2"), 1.0, 2.0)
    bogg = boggio1d_residual(parse("x^2"), parse("x"), 1.0, 2.0)
    rng = random.Random(83)
    for _ in range(20):
        xi = rng.uniform(1.01, 1.99)
        a, b = pomp.residual(xi), bogg.residual(xi)
        assert abs(a - b) <= 1e-14 * max(1.0, abs(a))


def test_boggio1d_equal_functions_vanish_numerically():
    f = parse("x^3 + x")
    field = boggio1d_residual(f, f, 1.0, 2.0)
    for xi in np.linspace(1.05, 1.95, 10):
        assert abs(field.residual(float(xi))) <= 1e-13 * field.scale


def test_boggio1d_cubic_closed_form():
    # f = x^2, g = x^3 on [1, 2]: constant 4/7, residual xi^2/3 - 4/7
    field = boggio1d_residual(parse("x^2"), parse("x^3"), 1.0, 2.0)
    assert field.decomposition["rhs"] == pytest.approx(4.0 / 7.0, rel=1e-15)
    for xi in np.linspace(1.05, 1.95, 15):
        assert field.residual(float(xi)) == pytest.approx(xi * xi / 3.0 - 4.0 / 7.0, rel=1e-13)
    root = math.sqrt(12.0 / 7.0)
    assert 1.0 < root < 2.0
    assert field.residual(root) == pytest.approx(0.0, abs=1e-15)


def test_boggio1d_degenerate_g_rejected():
    # g with equal endpoint values
    with pytest.raises(DegenerateError):
        boggio1d_residual(parse("x^2"), parse("(x-1.5)^2"), 1.0, 2.0)


def test_boggio1d_gprime_zero_surfaces_as_evaluation_error():
    field = boggio1d_residual(parse("x^2"), parse("(x-1.5)^3"), 1.0, 2.0)
    with pytest.raises(EvaluationError):
        field.residual(1.5)


# -- proof constructions ------------------------------------------------------------


def test_build_cauchy_auxiliary_structure_and_values():
    f, g = parse("x^2*y^2"), parse("x*y")
    rect = Rectangle(1, 2, 1, 3)
    aux = build_cauchy_auxiliary(f, g, rect)
    assert aux == BinOp("-", BinOp("*", Const(24.0), g), BinOp("*", Const(2.0), f))
    for x, y in _interior_points(rect, 10, 89):
        want = 24.0 * x * y - 2.0 * x * x * y * y
        assert evaluate(aux, x, y) == pytest.approx(want, rel=1e-13)


def test_build_cauchy_auxiliary_corner_identity():
    family = FunctionFamily("polynomial", max_degree=4)
    for i in range(50):
        rect = generate_rectangle(derive_seed(700, i))
        f = generate_function(family, derive_seed(701, i))
        g = generate_function(family, derive_seed(702, i))
        aux = build_cauchy_auxiliary(f, g, rect)
        delta_f = corner_difference(f, rect)
        delta_g = corner_difference(g, rect)
        scale = 1.0 + abs(delta_f * delta_g)
        assert abs(corner_difference(aux, rect)) <= 1e-10 * scale


def test_build_cauchy_auxiliary_equal_functions_vanish():
    f = parse("x^2*y + y")
    rect = Rectangle(0.5, 1.5, 0.5, 1.5)
    aux = build_cauchy_auxiliary(f, f, rect)
    for x, y in _interior_points(rect, 10, 97):
        assert evaluate(aux, x, y) == 0.0


def test_build_reciprocal_transform_examples():
    transform = build_reciprocal_transform(parse("x*y"))
    for x, y in _interior_points(Rectangle(0.5, 3, 0.5, 3), 10, 101):
        assert evaluate(transform, x, y) == pytest.approx(1.0, rel=1e-14)
    assert build_reciprocal_transform(parse("1")) == BinOp(
        "*", BinOp("*", Var("x"), Var("y")), Const(1.0)
    )
    quartic = build_reciprocal_transform(parse("x^2*y^2"))
    assert evaluate(quartic, 2.0, 4.0) == pytest.approx(0.125, rel=1e-14)


def test_reciprocal_rectangle_examples():
    assert reciprocal_rectangle(Rectangle(1, 2, 1, 3)) == Rectangle(0.5, 1.0, 1.0 / 3.0, 1.0)
    assert reciprocal_rectangle(Rectangle(-2, -1, 1, 2)) == Rectangle(-1.0, -0.5, 0.5, 1.0)
    with pytest.raises(DomainError):
        reciprocal_rectangle(Rectangle(-1, 2, 1, 3))


def test_fts_expansion_bilinear():
    left, right = fts_expansion_check(parse("x*y"), 2.0, 3.0)
    assert abs(left) <= 1e-14
    assert abs(right) <= 1e-14


def test_fts_expansion_constant():
    left, right = fts_expansion_check(parse("1"), 0.7, -2.3)
    assert left == 1.0
    assert right == 1.0


def test_fts_expansion_random_cases():
    family = FunctionFamily("polynomial", max_degree=4)
    rng = random.Random(103)
    for i in range(50):
        f = generate_function(family, derive_seed(800, i))
        t = rng.choice((-1, 1)) * rng.uniform(0.4, 3.0)
        s = rng.choice((-1, 1)) * rng.uniform(0.4, 3.0)
        left, right = fts_expansion_check(f, t, s)
        assert abs(left - right) <= 1e-9 * (1.0 + abs(right))


# -- existence on a fine grid --------------------------------------------------------


def test_residual_fields_attain_zero_or_both_signs():
    family = FunctionFamily("polynomial", max_degree=4)
    for i in range(10):
        rect = generate_rectangle(derive_seed(110, i), zero_free=True)
        f = generate_function(family, derive_seed(111, i))
        field = pompeiu2d_residual(f, rect)
        n = 65
        xs = rect.x1 + (np.arange(n) + 0.5) * (rect.width / n)
        ys = rect.y1 + (np.arange(n) + 0.5) * (rect.height / n)
        values = np.asarray(field.residual(xs[np.newaxis, :], ys[:, np.newaxis]))
        values = np.broadcast_to(values, (n, n))
        tiny = np.abs(values).min() <= 1e-9 * field.scale
        both_signs = values.min() < 0.0 < values.max()
        assert tiny or both_signs
