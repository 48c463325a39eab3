import itertools

import pytest
from hypothesis import given
from hypothesis import strategies as st

from tromino_cube.geometry import (
    CORNERS,
    LINEAR_SYMMETRIES,
    ORIENTATIONS,
    BoxRegion,
    Instance,
    InstanceError,
    Isometry,
    Tiling,
    TrominoPlacement,
    apply,
    canonicalize,
    cells_of,
    corner_subcube,
    cube_symmetries,
    is_tromino,
    parse_direction,
)

isometries = st.builds(
    lambda i, shift: Isometry(*LINEAR_SYMMETRIES[i], shift),
    st.integers(0, 47),
    st.tuples(*[st.integers(-5, 5)] * 3),
)
cells = st.tuples(*[st.integers(-6, 6)] * 3)
placements = st.builds(
    lambda c, o: TrominoPlacement(c, *ORIENTATIONS[o]), cells, st.integers(0, 11)
)


def test_cells_of_examples():
    p = TrominoPlacement((0, 0, 0), parse_direction("+x"), parse_direction("+y"))
    assert cells_of(p) == {(0, 0, 0), (1, 0, 0), (0, 1, 0)}
    q = TrominoPlacement((2, 2, 2), parse_direction("-x"), parse_direction("+z"))
    assert cells_of(q) == {(2, 2, 2), (1, 2, 2), (2, 2, 3)}


def test_same_axis_arms_rejected():
    with pytest.raises(ValueError):
        TrominoPlacement((0, 0, 0), (1, 0, 0), (-1, 0, 0))


def test_twelve_orientations():
    assert len(ORIENTATIONS) == 12
    shapes = {frozenset(TrominoPlacement((0, 0, 0), a, b).cells) for a, b in ORIENTATIONS}
    assert len(shapes) == 12


def test_straight_triple_is_not_a_tromino():
    assert not is_tromino([(0, 0, 0), (1, 0, 0), (2, 0, 0)])
    assert is_tromino([(0, 0, 0), (1, 0, 0), (1, 1, 0)])


@given(placements)
def test_from_cells_round_trip(p):
    cs = list(p.cells)
    assert TrominoPlacement.from_cells(cs) == p
    assert TrominoPlacement.from_cells(cs[::-1]) == p


def test_instance_invariants():
    Instance(3)
    Instance(4, frozenset({(0, 0, 0)}))
    with pytest.raises(InstanceError):
        Instance(4)
    with pytest.raises(InstanceError):
        Instance(5, frozenset({(0, 0, 0)}))
    with pytest.raises(InstanceError):
        Instance(4, frozenset({(4, 0, 0)}))
    with pytest.raises(InstanceError):
        Instance(0)


def test_identity_fixes_cells():
    assert apply(Isometry(), (3, 1, 2)) == (3, 1, 2)


def test_quarter_turn_convention():
    rot = Isometry.rotation_z(4)
    assert rot.linear((1, 0, 0)) == (0, 1, 0)
    assert rot((1, 0, 0)) == (3, 1, 0)  # (x, y) -> (n-1-y, x)
    for x, y, z in itertools.product(range(4), repeat=3):
        assert rot((x, y, z)) == (3 - y, x, z)


def test_group_has_48_cube_symmetries():
    syms = cube_symmetries(5)
    assert len(syms) == 48 and syms[0].is_identity
    cube = set(itertools.product(range(5), repeat=3))
    for g in syms:
        assert {g(c) for c in cube} == cube


@given(isometries, isometries, cells)
def test_compose(a, b, c):
    assert a.compose(b)(c) == a(b(c))


@given(isometries, cells)
def test_inverse(a, c):
    assert a.inverse()(a(c)) == c
    assert a(a.inverse()(c)) == c


@given(isometries, placements)
def test_placement_image_matches_cell_images(g, p):
    assert set(g(p).cells) == {g(c) for c in p.cells}


def test_canonical_corner():
    canon, iso = canonicalize(Instance(4, frozenset({(3, 3, 3)})))
    assert canon.deficiencies == {(0, 0, 0)}
    assert apply(iso, Instance(4, frozenset({(3, 3, 3)}))) == canon


def test_canonical_pair_is_least_image():
    inst = Instance(5, frozenset({(0, 0, 0), (4, 4, 4)}))
    canon, _ = canonicalize(inst)
    images = [tuple(sorted(g.cell(c) for c in inst.deficiencies)) for g in cube_symmetries(5)]
    assert canon.sorted_deficiencies == min(images)


@given(st.integers(0, 47), st.lists(st.tuples(*[st.integers(0, 4)] * 3), min_size=2, max_size=2, unique=True))
def test_canonical_form_is_orbit_invariant(k, defs):
    inst = Instance(5, frozenset(defs))
    g = cube_symmetries(5)[k]
    assert canonicalize(apply(g, inst))[0] == canonicalize(inst)[0]


def test_canonical_classes_of_single_cells():
    classes = {canonicalize(Instance(4, frozenset({c})))[0] for c in itertools.product(range(4), repeat=3)}
    assert len(classes) == 4  # corner, edge, face, interior


def test_apply_tiling_keeps_trace():
    t = Tiling(Instance(1, frozenset({(0, 0, 0)})), (), ((1, "base"),))
    assert apply(Isometry(), t).trace == ((1, "base"),)


def test_apply_rejects_unknown():
    with pytest.raises(TypeError):
        apply(Isometry(), "cell")


def test_box_and_corner_subcubes():
    box = BoxRegion((1, 2, 3), (2, 2, 2))
    assert box.volume == 8 and len(list(box.cells())) == 8
    assert (2, 3, 4) in box and (3, 3, 4) not in box
    subs = [corner_subcube(7, 4, c) for c in CORNERS]
    assert subs[0].origin == (0, 0, 0) and subs[-1].origin == (3, 3, 3)
    with pytest.raises(ValueError):
        BoxRegion((0, 0, 0), (0, 1, 1))
