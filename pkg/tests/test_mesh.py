import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from shrinkerlab.canonical import cylinder_tube, icosphere, make_canonical, plane_patch
from shrinkerlab.exceptions import DegeneracyError, OrientationError
from shrinkerlab.mesh import TriMesh, genus, read_off, write_field_csv, write_off

from conftest import torus_mesh

TETRA_V = [[0, 0, 0], [1, 0, 0], [0, 1, 0], [0, 0, 1]]
TETRA_T = [[0, 2, 1], [0, 1, 3], [0, 3, 2], [1, 2, 3]]


def test_tetrahedron_is_closed_genus_zero():
    m = TriMesh(TETRA_V, TETRA_T)
    assert m.is_closed
    assert not m.boundary_flags.any()
    assert m.euler_characteristic() == 2
    assert genus(m) == 0


def test_flipped_triangle_is_orientation_error():
    bad = [list(t) for t in TETRA_T]
    bad[0] = bad[0][::-1]
    with pytest.raises(OrientationError):
        TriMesh(TETRA_V, bad)


def test_non_manifold_edge_rejected():
    v = [[0, 0, 0], [1, 0, 0], [0, 1, 0], [0, -1, 0], [0, 0, 1]]
    # edge (0, 1) shared by three triangles
    t = [[0, 1, 2], [1, 0, 3], [0, 1, 4]]
    with pytest.raises(OrientationError):
        TriMesh(v, t)


def test_degenerate_triangle_rejected():
    v = [[0, 0, 0], [1, 0, 0], [0, 1, 0], [2, 0, 0], [1, 1e-14, 0]]
    with pytest.raises(DegeneracyError):
        TriMesh(v, [[0, 1, 2], [1, 3, 4]])


def test_arrays_are_read_only():
    m = TriMesh(TETRA_V, TETRA_T)
    with pytest.raises(ValueError):
        m.vertices[0, 0] = 5.0


@pytest.mark.parametrize(
    "mesh, expected",
    [
        (icosphere(2, 2.0), 0),
        (torus_mesh(), 1),
        (make_canonical("cylinder", 1), 0),  # annulus: sphere minus two disks
        (make_canonical("plane", 1), 0),
    ],
    ids=["sphere", "torus", "cylinder", "plane"],
)
def test_genus(mesh, expected):
    assert genus(mesh) == expected


def test_cylinder_has_two_boundary_loops():
    m = make_canonical("cylinder", 1)
    loops = m.boundary_loops()
    assert len(loops) == 2
    assert sum(len(l) for l in loops) == int(m.boundary_flags.sum())


def test_deleting_a_disk_never_raises_genus():
    m = torus_mesh()
    x = m.vertices
    # drop the triangles near one point of the torus: a disk
    centroid = x[m.triangles].mean(axis=1)
    keep = np.linalg.norm(centroid - np.array([4.0, 0.0, 0.0]), axis=1) > 0.8
    used = np.unique(m.triangles[keep])
    remap = -np.ones(m.n_vertices, dtype=int)
    remap[used] = np.arange(len(used))
    cut = TriMesh(x[used], remap[m.triangles[keep]])
    assert len(cut.boundary_loops()) == 1
    assert genus(cut) <= genus(m)


def test_off_round_trip(tmp_path):
    m = make_canonical("sphere", 1)
    p = write_off(m, tmp_path / "s.off")
    back = read_off(p)
    np.testing.assert_array_equal(back.vertices, m.vertices)
    np.testing.assert_array_equal(back.triangles, m.triangles)
    text = p.read_bytes()
    assert b"\r\n" not in text and text.startswith(b"OFF\n")


def test_off_rejects_missing_header(tmp_path):
    p = tmp_path / "bad.off"
    p.write_text("3 1 0\n0 0 0\n1 0 0\n0 1 0\n3 0 1 2\n")
    with pytest.raises(ValueError):
        read_off(p)


def test_field_csv_columns(tmp_path):
    m = TriMesh(TETRA_V, TETRA_T)
    p = write_field_csv(m, [1.0, 2.0, 3.0, 4.0], tmp_path / "f.csv")
    lines = p.read_text().splitlines()
    assert lines[0] == "vertex_id,x,y,z,value"
    assert lines[4].split(",")[0] == "3" and float(lines[4].split(",")[-1]) == 4.0


def test_canonical_generators():
    s = make_canonical("sphere", 4)
    assert s.is_closed and genus(s) == 0
    assert np.max(np.linalg.norm(s.vertices, axis=1)) == pytest.approx(2.0, abs=1e-12)
    p = make_canonical("plane", 2)
    assert np.all(p.vertices[:, 2] == 0)
    assert np.max(np.abs(p.vertices[:, :2])) == pytest.approx(8.0)
    c = make_canonical("cylinder", 2)
    np.testing.assert_allclose(np.hypot(c.vertices[:, 0], c.vertices[:, 1]), np.sqrt(2), atol=1e-12)
    assert np.max(np.abs(c.vertices[:, 2])) == pytest.approx(8.0)
    assert c.boundary_flags[np.abs(np.abs(c.vertices[:, 2]) - 8) < 1e-12].all()


def test_make_canonical_errors():
    with pytest.raises(ValueError):
        make_canonical("sphere", 0)
    with pytest.raises(ValueError):
        make_canonical("torus", 2)


@settings(max_examples=25, deadline=None)
@given(
    scale=st.floats(0.1, 10.0),
    angle=st.floats(0.0, 2 * np.pi),
    shift=st.tuples(*[st.floats(-5, 5)] * 3),
)
def test_topology_invariant_under_similarity(scale, angle, shift):
    m = torus_mesh(n_major=16, n_minor=8)
    c, s = np.cos(angle), np.sin(angle)
    rot = np.array([[c, -s, 0], [s, c, 0], [0, 0, 1]])
    moved = TriMesh(scale * m.vertices @ rot.T + np.array(shift), m.triangles)
    assert genus(moved) == 1
    np.testing.assert_allclose(moved.triangle_areas().sum(), scale**2 * m.triangle_areas().sum(), rtol=1e-10)


@settings(max_examples=10, deadline=None)
@given(cells=st.integers(2, 12))
def test_plane_patch_is_flat_disk(cells):
    m = plane_patch(cells, half_width=1.0)
    assert genus(m) == 0
    assert len(m.boundary_loops()) == 1
    # staggered rows leave a half-cell sawtooth on the left and right edges
    np.testing.assert_allclose(m.triangle_areas().sum(), 4.0 - 2.0 / cells, rtol=1e-12)
    assert np.all(m.triangle_normals()[:, 2] > 0)


@settings(max_examples=10, deadline=None)
@given(around=st.integers(8, 40))
def test_cylinder_tube_outward(around):
    m = cylinder_tube(around, half_length=2.0)
    cen = m.vertices[m.triangles].mean(axis=1)
    radial = cen * np.array([1, 1, 0])
    assert np.all(np.einsum("ij,ij->i", m.triangle_normals(), radial) > 0)
