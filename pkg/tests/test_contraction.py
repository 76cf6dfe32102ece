import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from gcfp.contraction import (
    check_quasi_dominance,
    rhs_gc,
    rhs_gregus,
    rhs_quasi,
    validate_params,
    verify_condition,
    verify_monotone,
)
from gcfp.errors import ConfigError, ParameterError, PreconditionError, SparseRelationError
from gcfp.graph import Digraph, EdgeRelation, strip_graph
from gcfp.mapping import MappingHandle
from gcfp.space import ConvexSpace

UNIT = ConvexSpace.box((0,), (1,))
HALF = MappingHandle("halving-to-anchor", UNIT, anchor=(0.0,))
ORDER = Digraph(UNIT, EdgeRelation("componentwise-order"))
LINE = ConvexSpace(dimension=1, sample_lower=(-50.0,), sample_upper=(50.0,))
SHIFT = MappingHandle("shift", LINE, vector=(1.0,))
P = validate_params("graph-gc-strict", 0.5, 0.5, 0.2)


class TestValidateParams:
    def test_valid(self):
        p = validate_params("graph-gc-strict", 0.5, 0.5, 0.2)
        assert (p.a, p.b, p.c) == (0.5, 0.5, 0.2)

    def test_strict_rejects_large_c(self):
        with pytest.raises(ParameterError, match="c < 1/2 required"):
            validate_params("graph-gc-strict", 0.9, 0.1, 5 / 9)

    def test_ciric_bound(self):
        # (4 - 0.5)/(8 - 0.5) = 7/15 = 0.4666... < 0.47
        assert (4 - 0.5) / (8 - 0.5) == pytest.approx(7 / 15)
        with pytest.raises(ParameterError, match=r"\(4-a\)/\(8-a\)"):
            validate_params("ciric-cg", 0.5, 0.5, 0.47)
        validate_params("ciric-cg", 0.5, 0.5, 0.46)

    @pytest.mark.parametrize(
        "variant,a,b,c,match",
        [
            ("gregus", 0.5, 0.25, 0.1, "c absent"),
            ("gregus", 0.5, 0.3, None, "a \\+ 2p = 1"),
            ("gregus", 1.0, 0.0, None, "0 < a < 1"),
            ("drm", 0.5, 0.5, 0.5, "c < 1/2"),
            ("graph-gc", 0.5, 0.5, 0.51, "c <= 1/2"),
            ("graph-gc", 0.5, 0.4, 0.2, "a \\+ b = 1"),
            ("graph-gc", 0.5, 0.5, -0.1, "c >= 0"),
            ("raw", 0.5, -0.5, 0.2, ">= 0"),
            ("bogus", 0.5, 0.5, 0.2, "unknown"),
        ],
    )
    def test_each_bound_named(self, variant, a, b, c, match):
        with pytest.raises(ParameterError, match=match):
            validate_params(variant, a, b, c)

    def test_graph_gc_allows_half(self):
        validate_params("graph-gc", 0.5, 0.5, 0.5)


def test_rhs_gc_halving_hand_value():
    # d(x,y)=1; c[d(0,0.5)+d(1,0)] = 0.3; b*max{0, 0.5} = 0.25
    assert rhs_gc(UNIT, HALF, (0,), (1,), P) == pytest.approx(0.75, abs=1e-15)
    assert UNIT.distance(HALF((0.0,)), HALF((1.0,))) == 0.5


def test_rhs_gc_fixed_point_pair():
    assert rhs_gc(UNIT, HALF, (0,), (0,), P) == 0.0


def test_rhs_gc_shift_hand_value():
    raw = validate_params("raw", 0.9, 0.1, 5 / 9)
    # c[|0-1.5| + |0.5-1|] = 10/9; 0.9*10/9 + 0.1*1 = 1.1
    assert rhs_gc(LINE, SHIFT, (0,), (0.5,), raw) == pytest.approx(1.1, abs=1e-15)


def test_rhs_gc_rejects_gregus():
    with pytest.raises(PreconditionError):
        rhs_gc(UNIT, HALF, (0,), (1,), validate_params("gregus", 0.5, 0.25))


def test_rhs_quasi():
    assert rhs_quasi(UNIT, HALF, (0,), (1,), 1.0) == 1.0
    assert rhs_quasi(UNIT, HALF, (0,), (0,), 1.0) == 0.0
    assert rhs_quasi(UNIT, HALF, (0.3,), (0.9,), 0.0) == 0.0


def test_rhs_gregus():
    assert rhs_gregus(UNIT, HALF, (0,), (1,), 0.5, 0.25) == pytest.approx(0.625, abs=1e-15)
    assert rhs_gregus(UNIT, HALF, (0,), (0,), 0.5, 0.25) == 0.0
    with pytest.raises(ParameterError):
        rhs_gregus(UNIT, HALF, (0,), (1,), 1.0, 0.0)


def test_verify_condition_halving():
    report = verify_condition(UNIT, ORDER, HALF, P, 100_000, 0)
    assert report.ok and report.samples_tested == 100_000


def test_verify_condition_shift_holds_with_large_c():
    raw = validate_params("raw", 0.9, 0.1, 5 / 9)
    g = Digraph(LINE, EdgeRelation("componentwise-order"))
    report = verify_condition(LINE, g, SHIFT, raw, 100_000, 1)
    assert report.ok
    # Independent case analysis: rhs - lhs = max(u, 1) + 0.1 - u >= 0.1 with u = |x - y|.
    assert report.worst_margin <= -0.1 + 1e-9


def test_verify_condition_doubling_violates():
    half_line = ConvexSpace(dimension=1, lower=(0.0,), sample_lower=(0.0,), sample_upper=(1.0,))
    double = MappingHandle("affine", half_line, matrix=((2.0,),))
    g = Digraph(half_line, EdgeRelation("componentwise-order"))
    report = verify_condition(half_line, g, double, P, 10_000, 2)
    assert report.violation_count > 0
    # Hand value at (0, 1): lhs 2, rhs 0.5*max{1, 0.2*3} + 0.5*max{0, 1} = 1.
    assert rhs_gc(half_line, double, (0,), (1,), P) == pytest.approx(1.0)


def test_doubling_on_unit_box_is_not_a_self_map():
    with pytest.raises(ConfigError, match="leaves its domain"):
        MappingHandle("affine", UNIT, matrix=((2.0,),))


def test_verify_condition_sparse_relation():
    verts = tuple((float(i) / 10,) for i in range(11))
    m = tuple(tuple(i == j for j in range(11)) for i in range(11))
    table = Digraph(UNIT, EdgeRelation("finite-table", vertices=verts, matrix=m))
    # Exhaustive path handles tables; the sparse diagnostic applies to sampled kinds.
    assert verify_condition(UNIT, table, MappingHandle("named-builtin", UNIT, name="identity"),
                            P, 10, 0).samples_tested == 11
    fibre = strip_graph()
    with pytest.raises(SparseRelationError):
        # Uniform proposals never hit a fibre when the relation is swapped for a table-free check.
        verify_condition(fibre.space, fibre, MappingHandle("named-builtin", fibre.space, name="identity"),
                         P, 5, 0)


def test_verify_monotone_examples():
    box = ConvexSpace.box((0, 0), (1, 1))
    order = Digraph(box, EdgeRelation("componentwise-order"))
    affine = MappingHandle("affine", box, matrix=((0.3, 0.1), (0.0, 0.4)), vector=(0.2, 0.3))
    assert verify_monotone(order, affine, 10_000, 0).ok
    g = Digraph(LINE, EdgeRelation("componentwise-order"))
    assert verify_monotone(g, SHIFT, 10_000, 0).ok
    # Swap preserves the componentwise order ...
    swap = MappingHandle("named-builtin", box, name="swap")
    assert verify_monotone(order, swap, 10_000, 0).ok
    # ... but breaks the fibre order: (0.5,0.2)->(0.5,0.9) maps to (0.2,0.5),(0.9,0.5).
    fibre = Digraph(box, EdgeRelation("fixed-first-coordinate-order"))
    assert not fibre.has_edge(swap((0.5, 0.2)), swap((0.5, 0.9)))
    assert verify_monotone(fibre, swap, 10_000, 0).violation_count > 0
    reflect = MappingHandle("affine", UNIT, matrix=((-1.0,),), vector=(1.0,))
    assert verify_monotone(ORDER, reflect, 1000, 0).violation_count > 0


def test_quasi_dominance():
    raw = validate_params("raw", 0.4, 0.4, 0.5)
    assert check_quasi_dominance(UNIT, HALF, raw, 10_000, 0).ok
    with pytest.raises(PreconditionError, match="a \\+ b < 1"):
        check_quasi_dominance(UNIT, HALF, validate_params("graph-gc", 0.5, 0.5, 0.5), 10, 0)
    with pytest.raises(PreconditionError, match="c <= 1/2"):
        check_quasi_dominance(UNIT, HALF, validate_params("raw", 0.4, 0.4, 0.6), 10, 0)


def test_finite_table_condition_exhaustive():
    verts = ((0.0,), (0.5,), (1.0,))
    m = tuple(tuple(i <= j for j in range(3)) for i in range(3))
    g = Digraph(UNIT, EdgeRelation("finite-table", vertices=verts, matrix=m))
    const = MappingHandle("affine", UNIT, matrix=((0.0,),), vector=(0.0,))
    rep = verify_condition(UNIT, g, const, P, 0, 0)
    assert rep.ok and rep.samples_tested == 6
    assert verify_monotone(g, const, 0, 0).ok


pairs = st.tuples(st.floats(0, 1), st.floats(0, 1))
coef = st.floats(0, 2)


@settings(max_examples=200, deadline=None)
@given(pairs, coef, coef, coef, st.floats(0, 1))
def test_rhs_gc_monotone_in_parameters(xy, a, b, c, bump):
    x, y = (xy[0],), (xy[1],)
    base = rhs_gc(UNIT, HALF, x, y, validate_params("raw", a, b, c))
    for a2, b2, c2 in ((a + bump, b, c), (a, b + bump, c), (a, b, c + bump)):
        assert rhs_gc(UNIT, HALF, x, y, validate_params("raw", a2, b2, c2)) >= base - 1e-15


@settings(max_examples=200, deadline=None)
@given(pairs, st.floats(0, 3), st.floats(0, 3))
def test_rhs_quasi_monotone_in_k(xy, k1, k2):
    k1, k2 = sorted((k1, k2))
    x, y = (xy[0],), (xy[1],)
    assert rhs_quasi(UNIT, HALF, x, y, k1) <= rhs_quasi(UNIT, HALF, x, y, k2)


@settings(max_examples=200, deadline=None)
@given(pairs, st.floats(0.01, 0.49), st.floats(0.01, 0.49), st.floats(0, 0.5))
def test_quasi_dominance_pointwise(xy, a, b, c):
    x, y = (xy[0],), (xy[1],)
    gc = rhs_gc(UNIT, HALF, x, y, validate_params("raw", a, b, c))
    assert gc <= rhs_quasi(UNIT, HALF, x, y, a + b) + 1e-12


def test_verification_monotone_in_relation():
    # The fibre relation is a subset of the componentwise order on the box.
    box = ConvexSpace.box((0, 0), (1, 1))
    affine = MappingHandle("affine", box, matrix=((0.3, 0.1), (0.0, 0.4)), vector=(0.2, 0.3))
    p = validate_params("graph-gc", 0.6, 0.4, 0.1)
    big = verify_condition(box, Digraph(box, EdgeRelation("componentwise-order")), affine, p, 20_000, 0)
    small = verify_condition(box, Digraph(box, EdgeRelation("fixed-first-coordinate-order")), affine, p, 20_000, 0)
    assert big.ok and small.ok
