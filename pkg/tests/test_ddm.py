"""Double description and hull conversions, cross-checked two ways.

dd_cone output is compared against the Fourier-Motzkin hull builder
(vrep_to_hrep), which is an independent code path, and against hand
geometry for the small fixed cases.
"""

import random

from polystat.geometry import ConvexPolyhedron, vrep_to_hrep
from polystat.geometry.ddm import (
    cone_from_generators,
    cone_generators,
    generators,
    polar_cone_hrep,
)
from polystat.rational import rat


def _cone(dim, rows):
    return ConvexPolyhedron(dim, ineq=[(tuple(map(rat, r)), rat(0)) for r in rows])


def test_quadrant_generators():
    cone = _cone(2, [(-1, 0), (0, -1)])
    rays, lines = cone_generators(cone)
    assert not lines
    assert sorted(rays) == [(rat(0), rat(1)), (rat(1), rat(0))]


def test_halfplane_has_a_line():
    cone = _cone(2, [(-1, 0)])
    rays, lines = cone_generators(cone)
    assert len(lines) == 1
    assert lines[0][0] == 0
    assert len(rays) == 1 and rays[0][1] == 0 and rays[0][0] > 0


def test_polar_of_quadrant():
    cone = _cone(2, [(-1, 0), (0, -1)])
    polar = polar_cone_hrep(cone)
    assert polar.contains((-1, -1))
    assert polar.contains((0, 0))
    assert not polar.contains((1, 0))


def test_cone_from_generators_round_trip():
    rays = [(1, 0), (1, 1)]
    cone = cone_from_generators(2, rays=rays)
    assert cone.contains((2, 1))
    assert cone.contains((1, 1)) and cone.contains((1, 0))
    assert not cone.contains((0, 1))
    assert not cone.contains((-1, 0))


def test_polytope_vertices():
    square = ConvexPolyhedron.from_box([(0, 1), (0, 1)])
    points, rays, lines = generators(square)
    assert not rays and not lines
    assert sorted(points) == [
        (rat(0), rat(0)),
        (rat(0), rat(1)),
        (rat(1), rat(0)),
        (rat(1), rat(1)),
    ]


def test_unbounded_polyhedron_generators():
    p = ConvexPolyhedron(
        2,
        ineq=[
            ((rat(-1), rat(0)), rat(0)),
            ((rat(0), rat(-1)), rat(0)),
            ((rat(-1), rat(-1)), rat(-1)),
        ],
    )
    points, rays, lines = generators(p)
    assert not lines
    assert sorted(rays) == [(rat(0), rat(1)), (rat(1), rat(0))]
    assert sorted(points) == [(rat(0), rat(1)), (rat(1), rat(0))]


def test_vrep_against_membership():
    tri = vrep_to_hrep(2, points=[(0, 0), (2, 0), (0, 2)])
    assert tri.contains((rat("1/2"), rat("1/2")))
    assert tri.contains((2, 0))
    assert not tri.contains((rat("11/10"), 1))


def test_vrep_with_rays_and_lines():
    wedge = vrep_to_hrep(2, points=[(0, 0)], rays=[(1, 0)], lines=[(0, 1)])
    assert wedge.contains((3, -7))
    assert not wedge.contains((-1, 0))


def test_dd_and_fm_agree_on_random_cones():
    rng = random.Random(20240817)
    for _ in range(25):
        dim = rng.choice((2, 3))
        rows = [
            tuple(rat(rng.randint(-3, 3)) for _ in range(dim))
            for _ in range(rng.randint(1, 4))
        ]
        cone = ConvexPolyhedron(dim, ineq=[(r, rat(0)) for r in rows])
        rays, lines = cone_generators(cone)
        # every generator satisfies the H-rows...
        for g in list(rays) + list(lines):
            assert cone.contains(g)
        for l in lines:
            assert cone.contains(tuple(-x for x in l))
        # ...and the reconstructed cone is the same set
        if rays or lines:
            back = vrep_to_hrep(dim, points=[(0,) * dim], rays=rays, lines=lines)
        else:
            back = ConvexPolyhedron.singleton((0,) * dim)
        assert back.subset_of(cone) and cone.subset_of(back)
