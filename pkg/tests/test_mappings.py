"""Set-valued polyhedral mappings and their coderivative calculus.

Coderivatives of the linear maps below are their adjoints, worked out by
hand, so the engine's graph machinery is checked against closed answers.
"""

import pytest

from polystat.exceptions import PolystatError, PreconditionError
from polystat.geometry import EMPTY, ConvexPolyhedron, PolyUnion, union_equal
from polystat.mappings import (
    PolyMapping,
    compose,
    product,
    product_qualification,
    sigma_subregularity_check,
)
from polystat.rational import rat


def _poly(dim, ineq=(), eq=()):
    return ConvexPolyhedron(
        dim,
        ineq=[(tuple(map(rat, a)), rat(b)) for a, b in ineq],
        eq=[(tuple(map(rat, e)), rat(d)) for e, d in eq],
    )


def _linear_map(matrix):
    """Graph of z -> matrix z as a single equality piece."""
    m = len(matrix)
    n = len(matrix[0])
    eq = []
    for i, row in enumerate(matrix):
        coeffs = [rat(-v) for v in row] + [rat(0)] * m
        coeffs[n + i] = rat(1)
        eq.append((tuple(coeffs), rat(0)))
    return PolyMapping(n, m, PolyUnion(n + m, [ConvexPolyhedron(n + m, eq=eq)]))


def _kink_map():
    """x -> {0} for x <= 0 glued to 0 -> [0, inf); graph is the kink set."""
    a = _poly(2, ineq=[((1, 0), 0)], eq=[((0, 1), 0)])
    b = _poly(2, ineq=[((0, -1), 0)], eq=[((1, 0), 0)])
    return PolyMapping(1, 1, PolyUnion(2, [a, b]))


def test_image_domain_inverse():
    s = _kink_map()
    img = s.image_at((-1,))
    assert img.contains((0,)) and not img.contains((1,))
    img0 = s.image_at((0,))
    assert img0.contains((5,)) and not img0.contains((-1,))
    assert s.image_at((1,)) is EMPTY
    dom = s.domain()
    assert dom.contains((-3,)) and dom.contains((0,)) and not dom.contains((1,))
    inv = s.inverse()
    assert inv.has_graph_point((0,), (-2,))
    assert inv.has_graph_point((3,), (0,))
    assert not inv.has_graph_point((1,), (1,))


def test_locally_bounded():
    s = _kink_map()
    assert s.locally_bounded_at((-1,)) is True
    assert s.locally_bounded_at((0,)) is False
    with pytest.raises(PreconditionError):
        s.locally_bounded_at((1,))


def test_linear_coderivative_is_the_adjoint():
    s = _linear_map([[1, 2], [0, 1]])
    data = s.coderivative_at((3, -1), (1, -1))
    for eta in ((1, 0), (0, 1), (2, -3), (rat("1/2"), rat("1/3"))):
        got = data.at(eta)
        want = (eta[0], 2 * rat(eta[0]) + eta[1])
        assert got.contains(want)
        piece = got.pieces[0]
        assert piece.same_set(ConvexPolyhedron.singleton(want))


def test_coderivative_regularity_flags():
    # invertible linear map: both criteria hold
    s = _linear_map([[1, 2], [0, 1]])
    assert s.criterion_check((0, 0), (0, 0), "aubin") is True
    assert s.criterion_check((0, 0), (0, 0), "metric_regularity") is True
    # constant branch of the kink: single-valued (aubin) but not onto
    k = _kink_map()
    data = k.coderivative_at((-1,), (0,))
    assert data.aubin() is True
    assert data.metric_regular() is False
    with pytest.raises(PreconditionError):
        k.criterion_check((-1,), (0,), "nonsense")


def test_coderivative_needs_graph_point():
    s = _kink_map()
    with pytest.raises(PreconditionError):
        s.coderivative_at((1,), (0,))


def test_kernel_and_zero_image():
    k = _kink_map()
    data = k.coderivative_at((-1,), (0,))
    zero_img = data.zero_image()
    assert zero_img.contains((0,)) and not zero_img.contains((1,))
    kernel = data.kernel()
    assert kernel.contains((7,)) and kernel.contains((-7,))


def test_compose_graph_and_intermediate():
    double = _linear_map([[2]])
    band = PolyMapping(
        1, 1, PolyUnion(2, [_poly(2, ineq=[((1, -1), 0), ((-1, 1), 1)])])
    )
    comp, mid = compose(double, band)
    assert comp.n_in == 1 and comp.n_out == 1
    # w in 2z + [0, 1]
    assert comp.has_graph_point((1,), (2,))
    assert comp.has_graph_point((1,), (rat("5/2"),))
    assert not comp.has_graph_point((1,), (rat("7/2"),))
    link = mid.image_at((1, rat("5/2")))
    assert link.contains((2,))
    assert not link.contains((1,))


def test_chain_rule_bound_by_hand():
    double = _linear_map([[2]])
    band = PolyMapping(
        1, 1, PolyUnion(2, [_poly(2, ineq=[((1, -1), 0), ((-1, 1), 1)])])
    )
    comp, _ = compose(double, band)
    d_comp = comp.coderivative_at((0,), (0,))
    d_band = band.coderivative_at((0,), (0,))
    # on the active edge: D*(band)(nu) = {nu} for nu >= 0, then the outer
    # adjoint doubles it
    for nu in (rat(1), rat(3)):
        inner = d_band.at((nu,))
        assert inner.contains((nu,))
        got = d_comp.at((nu,))
        assert got.contains((2 * nu,))
        assert not got.contains((2 * nu + 1,))
    assert d_comp.at((-1,)) is EMPTY


def test_product_rule():
    p = product(_linear_map([[1]]), _linear_map([[-1]]))
    assert p.n_out == 2
    assert p.has_graph_point((2,), (2, -2))
    data = p.coderivative_at((0,), (0, 0))
    got = data.at((1, 2))
    assert got.pieces[0].same_set(ConvexPolyhedron.singleton((-1,)))


def test_product_qualification_smooth_case():
    rep = product_qualification(
        _linear_map([[1]]), _linear_map([[-1]]), (0,), (0,), (0,)
    )
    assert rep["qualification_holds"] is True
    assert rep["polyhedral"] is True
    assert "polyhedral-graph-subregularity" in rep["certificates"]


def test_sigma_subregularity_report():
    rep = sigma_subregularity_check(
        _linear_map([[1]]), _linear_map([[1]]), (0,), (0,), (0,)
    )
    assert rep["product_subregular"] is True
    assert rep["polyhedral_fallback"] is True
    assert isinstance(rep["range_condition_holds"], bool)
    assert "polyhedral-graph-subregularity" in rep["certificates"]


def test_mapping_json_round_trip():
    s = _kink_map()
    back = PolyMapping.from_json(s.to_json())
    ok, witness = union_equal(back.graph, s.graph)
    assert ok, witness
    with pytest.raises(PreconditionError):
        PolyMapping.from_json({**s.to_json(), "note": "hi"})


def test_compose_dimension_mismatch():
    with pytest.raises(PreconditionError):
        compose(_linear_map([[1], [1]]), _linear_map([[1]]))
