import numpy as np
import pytest

from gcfp.errors import ConfigError, PreconditionError
from gcfp.graph import (
    Digraph,
    EdgeRelation,
    check_graph_axioms,
    check_interval_convexity,
    check_property_star,
    demo_g_complete_strip,
    strip_graph,
    strip_space,
)
from gcfp.space import ConvexSpace

BOX2 = ConvexSpace.box((0, 0), (1, 1))
ORDER2 = Digraph(BOX2, EdgeRelation("componentwise-order"))
AFFINE2 = Digraph(BOX2, EdgeRelation("custom-affine-order", order_matrix=((1.0, 1.0), (0.0, 1.0))))
LINE = ConvexSpace.box((0,), (2,))


def _table(edges, transitive=False):
    verts = ((0.0,), (1.0,), (2.0,))
    m = [[i == j for j in range(3)] for i in range(3)]
    for i, j in edges:
        m[i][j] = True
    return Digraph(LINE, EdgeRelation("finite-table", vertices=verts, matrix=m), transitive)


def test_has_edge_examples():
    assert ORDER2.has_edge((0, 0), (1, 0.5))
    assert not ORDER2.has_edge((0.5, 0), (0.2, 1))
    strip = strip_graph()
    assert not strip.has_edge((0.5, 0.2), (0.6, 0.9))
    assert strip.has_edge((0.5, 0.2), (0.5, 0.9))


@pytest.mark.parametrize("g", [ORDER2, AFFINE2, strip_graph(), _table([(0, 1), (1, 2), (0, 2)])])
def test_reflexive(g):
    rng = np.random.default_rng(0)
    p = g.relation.sample_vertices(rng, g.space, 10_000)
    assert g.edges(p, p).all()


def test_axioms_sampled_orders():
    for g in (ORDER2, AFFINE2, strip_graph()):
        report = check_graph_axioms(g, 10_000, 3)
        assert report.ok, report.violations[:3]
        assert report.samples_tested > 10_000


def test_finite_table_transitivity_violation():
    g = _table([(0, 1), (1, 2)])
    report = check_graph_axioms(g, 0, 0)
    assert report.violation_count == 1
    assert report.violations[0].points == ((0.0,), (1.0,), (2.0,))


def test_finite_table_complete_relation():
    g = _table([(i, j) for i in range(3) for j in range(3)], transitive=True)
    assert check_graph_axioms(g, 0, 0).ok


def test_finite_table_construction_checks():
    with pytest.raises(ConfigError):
        _table([(0, 1), (1, 2)], transitive=True)
    with pytest.raises(ConfigError):
        EdgeRelation("finite-table", vertices=((0.0,), (1.0,)), matrix=((False, True), (False, True)))
    g = _table([(0, 1), (1, 2), (0, 2)])
    with pytest.raises(PreconditionError):
        g.has_edge((0.5,), (1.0,))


def test_finite_table_exhaustive_large():
    n = 200
    verts = tuple((float(i),) for i in range(n))
    m = tuple(tuple(i <= j for j in range(n)) for i in range(n))
    g = Digraph(ConvexSpace.box((0,), (n,)), EdgeRelation("finite-table", vertices=verts, matrix=m))
    report = check_graph_axioms(g, 0, 0)
    assert report.ok and report.samples_tested >= n**3


def test_interval_convexity():
    for g in (ORDER2, AFFINE2, strip_graph()):
        assert check_interval_convexity(g, 10_000, 4).ok
    with pytest.raises(PreconditionError, match="finite tables"):
        check_interval_convexity(_table([(0, 1), (1, 2), (0, 2)]), 10, 0)


def test_interval_convexity_endpoint():
    x = np.array([0.2, 0.3])
    y1 = np.array([0.5, 0.9])
    y2 = np.array([0.9, 0.4])
    assert ORDER2.has_edge(x, BOX2.combine(y1, y2, 1.0))


def test_property_star_increasing():
    n = np.arange(1, 101)
    seq = np.stack([1 - 1 / n, np.zeros(100)], axis=1)
    g = Digraph(ConvexSpace.box((0, 0), (1, 1)), EdgeRelation("componentwise-order"))
    rep = check_property_star(g, seq, (1.0, 0.0), tolerance=0.02)
    assert rep.direction == "increasing"
    assert rep.tail_all and rep.edge_indices == list(range(100))


def test_property_star_constant_and_strip():
    g = ORDER2
    rep = check_property_star(g, [(0.3, 0.3)] * 5, (0.3, 0.3))
    assert rep.tail_all
    n = np.arange(1, 101)
    seq = np.stack([np.full(100, 0.5), 1 - 1 / n], axis=1)
    rep = check_property_star(strip_graph(), seq, (0.5, 1.0), tolerance=0.02)
    assert rep.tail_all


def test_property_star_errors():
    with pytest.raises(PreconditionError, match="not G-monotone"):
        check_property_star(ORDER2, [(0, 0), (1, 0), (0.5, 0)], (0.5, 0))
    with pytest.raises(PreconditionError, match="does not reach"):
        check_property_star(ORDER2, [(0, 0), (0.1, 0)], (1, 0))


@pytest.mark.parametrize("n", [2, 100])
def test_strip_demo(n):
    rep = demo_g_complete_strip(n)
    assert rep.ok
    assert rep.monotone.limit == (0.5, 1.0) and rep.monotone.limit_in_space
    assert rep.escaping.limit == (1.0, 0.0) and not rep.escaping.limit_in_space
    assert rep.escaping.cauchy and not rep.escaping.g_monotone


def test_strip_space_membership():
    assert not strip_space().contains((1.0, 0.0))
    with pytest.raises(PreconditionError):
        demo_g_complete_strip(1)
