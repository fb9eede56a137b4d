"""Surface atlas, pixel field, rendering."""

import random

import numpy as np

from cubios.faces import (
    ALL_FACETS,
    FACE_FRAME,
    FACE_NORMAL,
    FacetAddress,
    GlobalFace,
    facet_index,
)
from cubios.geometry import ALL_TURNS, facet_permutation, new_standard_assembly
from cubios.surface import (
    FACE_PIXELS,
    FACET_PIXELS,
    Field,
    Heading,
    SurfaceCoord,
    cell_turn_map,
    embed,
    facet_at,
    facet_rings,
    heading_turn_map,
    render,
    render_net,
    step,
)

_OPP = {
    Heading.PU: Heading.NU,
    Heading.NU: Heading.PU,
    Heading.PV: Heading.NV,
    Heading.NV: Heading.PV,
}


def test_step_inside_a_face():
    r = step(SurfaceCoord(GlobalFace.F, 10, 10), Heading.PU)
    assert r.coord == SurfaceCoord(GlobalFace.F, 11, 10)
    assert r.heading is Heading.PU
    assert not r.blocked


def test_step_across_the_f_r_edge():
    r = step(SurfaceCoord(GlobalFace.F, 255, 10), Heading.PU)
    assert r.coord == SurfaceCoord(GlobalFace.R, 0, 10)
    assert r.heading is Heading.PU


def test_facet_at_quadrants():
    assert facet_at(SurfaceCoord(GlobalFace.U, 255, 255)) == FacetAddress(GlobalFace.U, 1, 1)
    assert facet_at(SurfaceCoord(GlobalFace.F, 127, 128)) == FacetAddress(GlobalFace.F, 1, 0)
    assert facet_at(SurfaceCoord(GlobalFace.F, 0, 0)) == FacetAddress(GlobalFace.F, 0, 0)


def test_embed_pixel_centers_are_exact():
    # s(k) = (2k+1-256)/256 has a power-of-two denominator: exact in floats
    assert embed(GlobalFace.F, 0, 0) == (-255 / 256, 255 / 256, 1.0)
    assert embed(GlobalFace.F, 255, 255) == (255 / 256, -255 / 256, 1.0)
    for face in GlobalFace:
        n = FACE_NORMAL[face]
        p = embed(face, 17, 200)
        axis = n.index(1) if 1 in n else n.index(-1)
        assert p[axis] == n[axis]
        assert all(abs(p[k]) < 1 for k in range(3) if k != axis)


def test_face_frames_are_right_handed_against_the_inward_normal():
    # reading order (u right, v down) makes u x v point INTO the cube
    for face in GlobalFace:
        u, v = FACE_FRAME[face]
        n = FACE_NORMAL[face]
        assert tuple(np.cross(u, v)) == tuple(-c for c in n)


def test_step_is_invertible():
    rng = random.Random(5)
    for _ in range(500):
        c = SurfaceCoord(
            rng.choice(list(GlobalFace)),
            rng.randrange(FACE_PIXELS),
            rng.randrange(FACE_PIXELS),
        )
        h = rng.choice(list(Heading))
        r = step(c, h)
        back = step(r.coord, _OPP[r.heading])
        assert back.coord == c
        assert back.heading == _OPP[h]


def test_straight_lines_close_after_1024_steps():
    rng = random.Random(9)
    for _ in range(20):
        c = SurfaceCoord(
            rng.choice(list(GlobalFace)),
            rng.randrange(FACE_PIXELS),
            rng.randrange(FACE_PIXELS),
        )
        h = rng.choice(list(Heading))
        pos, hdg = c, h
        for _ in range(4 * FACE_PIXELS):
            r = step(pos, hdg)
            pos, hdg = r.coord, r.heading
        assert (pos, hdg) == (c, h)


def test_six_rings_of_eight_cover_each_facet_twice():
    rings = facet_rings()
    assert len(rings) == 6
    counts = {f: 0 for f in ALL_FACETS}
    for ring in rings:
        assert len(ring) == 8
        assert len(set(ring)) == 8
        for f in ring:
            counts[f] += 1
    assert set(counts.values()) == {2}


def test_rings_are_closed_two_facet_runs():
    for ring in facet_rings():
        faces = [f.face for f in ring]
        # a band visits four faces, two cyclically adjacent facets on each
        assert len(set(faces)) == 4
        for face in set(faces):
            slots = [i for i, x in enumerate(faces) if x == face]
            assert len(slots) == 2
            assert (slots[1] - slots[0]) % 8 in (1, 7)


def test_field_reads_and_writes_by_coordinate_and_facet():
    fld = Field()
    fld[SurfaceCoord(GlobalFace.B, 3, 200)] = (9, 8, 7)
    assert fld[SurfaceCoord(GlobalFace.B, 3, 200)] == (9, 8, 7)
    f = FacetAddress(GlobalFace.L, 1, 0)
    fld.fill_facet(f, (1, 2, 3))
    rect = fld.facet_rect(f)
    assert rect.shape == (FACET_PIXELS, FACET_PIXELS, 3)
    assert (rect == (1, 2, 3)).all()
    # the rect is a live view into the face image
    rect[0, 0] = (4, 5, 6)
    assert fld[SurfaceCoord(GlobalFace.L, 0, FACET_PIXELS)] == (4, 5, 6)


def test_render_covers_all_24_displays():
    fld = Field()
    for face in GlobalFace:
        fld.fill_face(face, (200, 0, 0))
    out = render(fld, new_standard_assembly())
    assert len(out) == 24
    for buf in out.values():
        assert buf.shape == (FACET_PIXELS, FACET_PIXELS, 3)
        assert (buf == (200, 0, 0)).all()


def test_render_net_layout():
    fld = Field()
    fld.fill_face(GlobalFace.U, (0, 0, 255))
    ppm = render_net(fld)
    header = b"P6\n1024 768\n255\n"
    assert ppm.startswith(header)
    px = np.frombuffer(ppm[len(header) :], dtype=np.uint8).reshape(768, 1024, 3)
    # U sits in the cross at grid slot (row 0, col 1); F below it is black
    assert (px[0:256, 256:512] == (0, 0, 255)).all()
    assert (px[256:512, 256:512] == 0).all()


def test_cell_turn_map_at_size_2_is_the_facet_permutation():
    for t in ALL_TURNS:
        p = facet_permutation(t)
        cmap = cell_turn_map(t, 2)
        assert len(cmap) == 12
        for src, dst in cmap.items():
            i = facet_index(FacetAddress(src.face, src.v, src.u))
            j = facet_index(FacetAddress(dst.face, dst.v, dst.u))
            assert p[i] == j
        # unmoved facets are absent from the map
        moved = {i for i, j in enumerate(p) if i != j}
        assert {
            facet_index(FacetAddress(c.face, c.v, c.u)) for c in cmap
        } == moved


def test_heading_turn_map_composes_to_identity_in_four_turns():
    for t in ALL_TURNS:
        p = facet_permutation(t)
        hmap = heading_turn_map(t)
        for (f, h) in hmap:
            cf, ch = f, h
            for _ in range(4):
                ch = hmap[(cf, ch)]
                cf = ALL_FACETS[p[facet_index(cf)]]
            assert (cf, ch) == (f, h)
