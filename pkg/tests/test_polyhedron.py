"""Polyhedron and union behavior: membership, algebra, serialization.

Projection results are checked by membership oracles (a point is in the
projection iff some lift is feasible), not against the eliminator's own
output.
"""

import pytest

from polystat.exceptions import PolystatError
from polystat.geometry import EMPTY, ConvexPolyhedron, PolyUnion
from polystat.rational import rat


def _box(*bounds):
    return ConvexPolyhedron.from_box(bounds)


def test_box_membership():
    b = _box((-1, 1), (0, 2))
    assert b.contains((0, 0))
    assert b.contains((-1, 2))
    assert not b.contains((-1, rat("21/10")))
    assert not b.is_empty()


def test_bad_box_is_loud():
    with pytest.raises(PolystatError):
        _box((1, -1))


def test_singleton():
    s = ConvexPolyhedron.singleton(("1/2", -3))
    assert s.contains((rat("1/2"), -3))
    assert not s.contains((rat("1/2"), -2))


def test_empty_detection():
    p = ConvexPolyhedron(1, ineq=[((rat(1),), rat(0)), ((rat(-1),), rat(-1))])
    assert p.is_empty()
    assert p.feasible_point() is None


def test_intersect_and_feasible_point():
    a = _box((0, 2), (0, 2))
    b = _box((1, 3), (1, 3))
    both = a.intersect(b)
    pt = both.feasible_point()
    assert pt is not None
    assert a.contains(pt) and b.contains(pt)


def test_product_and_embed():
    a = _box((0, 1))
    b = _box((5, 6))
    prod = a.product(b)
    assert prod.dim == 2
    assert prod.contains((1, 5))
    emb = a.embed(3, (1,))
    assert emb.contains((99, rat("1/2"), -99))
    assert not emb.contains((0, 2, 0))


def test_slice_fixes_coordinates():
    p = _box((0, 1), (0, 1), (0, 1))
    sl = p.slice({1: rat("1/2")})
    assert sl.dim == 2
    assert sl.contains((0, 1))
    sl_out = p.slice({1: rat(7)})
    assert sl_out.is_empty()


def test_translate_and_negate():
    p = _box((0, 1))
    q = p.translate((5,))
    assert q.contains((rat("11/2"),)) and not q.contains((0,))
    r = p.negate()
    assert r.contains((-1,)) and not r.contains((rat("1/2"),))


def test_elimination_matches_membership_oracle():
    # shadow of {(x, y): 0 <= y <= 1, x = 2y} is exactly [0, 2]
    p = ConvexPolyhedron(
        2,
        ineq=[((rat(0), rat(1)), rat(1)), ((rat(0), rat(-1)), rat(0))],
        eq=[((rat(1), rat(-2)), rat(0))],
    )
    proj = p.eliminate((1,))
    assert proj.dim == 1
    for x, inside in ((0, True), (2, True), (rat("9/10"), True), (rat("21/10"), False), (-1, False)):
        assert proj.contains((x,)) is inside
        lifted = p.slice({0: rat(x)})
        assert lifted.is_empty() is (not inside)


def test_project_onto():
    p = _box((0, 1), (2, 3), (4, 5))
    q = p.project_onto((0, 2))
    assert q.dim == 2
    assert q.contains((rat("1/2"), rat("9/2")))
    assert not q.contains((rat("9/2"), rat("1/2")))
    with pytest.raises(PolystatError):
        p.project_onto((2, 0))


def test_linear_preimage():
    # preimage of [0, 1] under x -> 2x is [0, 1/2]
    seg = _box((0, 1))
    pre = seg.linear_preimage([[rat(2)]])
    assert pre.contains((rat("1/2"),))
    assert not pre.contains((rat("3/5"),))
    shifted = seg.linear_preimage([[rat(1)]], offset=(rat(5),))
    assert shifted.contains((-5,)) and shifted.contains((-4,))
    assert not shifted.contains((-6,))


def test_linear_image():
    seg = _box((0, 1), (0, 1))
    img = seg.linear_image([[rat(1), rat(1)]])
    assert img.dim == 1
    assert img.contains((2,)) and img.contains((0,))
    assert not img.contains((rat("21/10"),))


def test_recession_cone():
    p = ConvexPolyhedron(
        2,
        ineq=[((rat(-1), rat(0)), rat(0)), ((rat(0), rat(-1)), rat(5))],
    )
    cone = p.recession_cone()
    assert cone.contains((1, 1))
    assert cone.contains((0, 0))
    assert not cone.contains((-1, 0))


def test_row_valid():
    p = _box((0, 1))
    assert p.row_valid((rat(1),), rat(1))
    assert p.row_valid((rat(1),), rat(2))
    assert not p.row_valid((rat(1),), rat("1/2"))


def test_subset_and_same_set():
    small = _box((0, 1))
    big = _box((-1, 2))
    assert small.subset_of(big)
    assert not big.subset_of(small)
    redundant = ConvexPolyhedron(
        1,
        ineq=[((rat(1),), rat(1)), ((rat(2),), rat(2)), ((rat(-1),), rat(0))],
    )
    assert redundant.same_set(small)


def test_relint_point_avoids_faces():
    p = _box((0, 1), (0, 1))
    pt = p.relint_point()
    assert all(0 < v < 1 for v in pt)
    line = ConvexPolyhedron(2, eq=[((rat(1), rat(1)), rat(1))])
    pt = line.relint_point()
    assert pt[0] + pt[1] == 1


def test_lp_method():
    p = _box((0, 1), (0, 2))
    res = p.lp((1, 1))
    assert res.status == "optimal" and res.value == 3
    res = p.lp((1, 0), maximize=False, extra_ineq=[((rat(1), rat(0)), rat("1/3"))])
    assert res.value == 0
    res = p.lp((0, 1), extra_eq=[((rat(1), rat(0)), rat("1/2"))])
    assert res.value == 2


def test_polyhedron_json_round_trip():
    p = ConvexPolyhedron(
        2,
        ineq=[((rat("1/2"), rat(-1)), rat("3/7"))],
        eq=[((rat(0), rat(1)), rat(2))],
    )
    data = p.to_json()
    q = ConvexPolyhedron.from_json(data)
    assert q.same_set(p)
    with pytest.raises(PolystatError):
        ConvexPolyhedron.from_json({**data, "color": "blue"})


def test_union_basics():
    u = PolyUnion(1, [_box((0, 1)), _box((5, 6))])
    assert u.contains((rat("1/2"),)) and u.contains((6,))
    assert not u.contains((3,))
    assert u.feasible_point() is not None


def test_union_maybe_empty():
    empty_piece = ConvexPolyhedron(
        1, ineq=[((rat(1),), rat(0)), ((rat(-1),), rat(-1))]
    )
    got = PolyUnion.maybe(1, [empty_piece])
    assert got is EMPTY
    assert EMPTY.is_empty()
    assert not EMPTY.contains((0,))


def test_union_algebra():
    u = PolyUnion(2, [_box((0, 1), (0, 1)), _box((2, 3), (2, 3))])
    sliced = u.slice({0: rat("1/2")})
    assert sliced.contains((rat("1/2"),))
    assert not sliced.contains((rat("5/2"),))
    shadow = u.eliminate((1,))
    assert shadow.contains((3,)) and not shadow.contains((rat("3/2"),))
    moved = u.translate((10, 10))
    assert moved.contains((10, 10))
    inter = u.intersect(PolyUnion(2, [_box((1, 2), (1, 2))]))
    assert inter is not EMPTY and inter.contains((1, 1))
    gone = u.intersect(PolyUnion(2, [_box((9, 10), (9, 10))]))
    assert gone is EMPTY


def test_union_pruned_drops_contained_pieces():
    u = PolyUnion(1, [_box((0, 3)), _box((1, 2))])
    assert len(u.pruned().pieces) == 1


def test_union_json_round_trip():
    u = PolyUnion(1, [_box((0, 1)), _box((4, 4))])
    v = PolyUnion.from_json(u.to_json())
    assert v.contains((4,)) and v.contains((1,)) and not v.contains((2,))
    with pytest.raises(PolystatError):
        PolyUnion.from_json({"dim": 1, "pieces": [], "junk": 0})
