import numpy as np
import pytest

from meshes import brute_nearest, icosphere, plane_mesh, trilinear_reference

from snapforge import distfield as dfm
from snapforge.surfacegen import HeightField, heightfield_to_mesh


class TestBuild:
    def test_sphere_center_voxel_stores_radius(self, sphere_mesh, sphere_df):
        # stored value at the node nearest the center = radius minus the
        # node's own offset, within the facet sag of the level-3 icosphere
        idx = np.round((np.zeros(3) - sphere_df.origin) / sphere_df.spacing).astype(int)
        node = sphere_df.origin + idx * sphere_df.spacing
        stored = float(sphere_df.values[tuple(idx)])
        assert stored == pytest.approx(1.0 - np.linalg.norm(node), abs=0.01)

    def test_plane_nodes_store_exact_heights(self, plane, plane_df):
        # nodes above the interior of the plane must store exactly |z|
        zs = plane_df.origin[2] + np.arange(plane_df.dims[2]) * plane_df.spacing
        x = plane_df.origin[0] + plane_df.spacing * (plane_df.dims[0] // 2)
        y = plane_df.origin[1] + plane_df.spacing * (plane_df.dims[1] // 2)
        ix = plane_df.dims[0] // 2
        iy = plane_df.dims[1] // 2
        assert abs(x) < 0.4 and abs(y) < 0.4  # interior column
        stored = plane_df.values[ix, iy, :]
        assert np.abs(stored - np.abs(zs)).max() < 1e-6

    def test_nodes_match_brute_force(self, rng):
        mesh = icosphere(subdivisions=2)  # 320 triangles
        df = dfm.build_distance_field(mesh, resolution=12)
        for _ in range(40):
            idx = tuple(rng.integers(0, d) for d in df.dims)
            p = df.origin + np.array(idx) * df.spacing
            expected, _ = brute_nearest(p, mesh.vertices, mesh.triangles)
            assert df.values[idx] == pytest.approx(expected, abs=1e-9)

    def test_bounding_volume_is_scaled_aabb(self, sphere_mesh, sphere_df):
        lo, hi = sphere_mesh.aabb()
        center = 0.5 * (lo + hi)
        want_lo = center - 0.7 * (hi - lo)
        want_hi = center + 0.7 * (hi - lo)
        flo, fhi = sphere_df.bounds()
        assert (flo <= want_lo + 1e-12).all()
        assert (fhi >= want_hi - 1e-12).all()
        # the ceil-to-grid slack stays below one voxel per side
        assert (flo > want_lo - sphere_df.spacing).all()
        assert (fhi < want_hi + 2 * sphere_df.spacing).all()

    def test_flat_mesh_gets_padded_volume(self, plane, plane_df):
        flo, fhi = plane_df.bounds()
        assert fhi[2] - flo[2] > 0.3  # room for the snap zone above z=0

    def test_resolution_floor(self, sphere_mesh):
        with pytest.raises(ValueError):
            dfm.build_distance_field(sphere_mesh, resolution=4)

    def test_values_nonnegative(self, sphere_df, plane_df):
        assert (sphere_df.values >= 0).all()
        assert (plane_df.values >= 0).all()


class TestSampleDistance:
    def test_node_identity(self, sphere_df, rng):
        for _ in range(25):
            idx = tuple(rng.integers(0, d) for d in sphere_df.dims)
            p = sphere_df.origin + np.array(idx) * sphere_df.spacing
            assert dfm.sample_distance(sphere_df, p) == pytest.approx(
                float(sphere_df.values[idx]), abs=1e-12
            )

    def test_midpoint_is_mean_of_neighbors(self, sphere_df):
        idx = (10, 12, 20)
        a = float(sphere_df.values[idx])
        b = float(sphere_df.values[11, 12, 20])
        p = sphere_df.origin + (np.array(idx) + [0.5, 0, 0]) * sphere_df.spacing
        assert dfm.sample_distance(sphere_df, p) == pytest.approx((a + b) / 2, abs=1e-12)

    def test_random_points_match_reference_interpolation(self, sphere_df, rng):
        lo, hi = sphere_df.bounds()
        for _ in range(100):
            p = rng.uniform(lo, hi)
            got = dfm.sample_distance(sphere_df, p)
            want = trilinear_reference(
                sphere_df.values, sphere_df.origin, sphere_df.spacing, p
            )
            assert got == pytest.approx(want, abs=1e-6 * sphere_df.spacing + 1e-12)

    def test_outside_field_signals_inf(self, sphere_df):
        lo, _ = sphere_df.bounds()
        assert dfm.sample_distance(sphere_df, lo - 1.0) == np.inf

    def test_lipschitz_with_discretization_slack(self, sphere_df, rng):
        lo, hi = sphere_df.bounds()
        for _ in range(200):
            a = rng.uniform(lo, hi)
            b = rng.uniform(lo, hi)
            da = dfm.sample_distance(sphere_df, a)
            db = dfm.sample_distance(sphere_df, b)
            assert abs(da - db) <= np.linalg.norm(a - b) + 2 * sphere_df.spacing


class TestSampleDirection:
    def test_above_plane_points_down(self, plane_df):
        d = dfm.sample_direction(plane_df, (0.05, -0.03, 0.1))
        assert d is not None
        assert np.linalg.norm(d - [0, 0, -1]) < 1e-3

    def test_above_sphere_pole_points_down(self, sphere_mesh, sphere_df):
        d = dfm.sample_direction(sphere_df, (0.0, 0.0, 1.3))
        assert d is not None
        assert np.dot(d, [0, 0, -1]) > np.cos(np.radians(2.0))

    def test_agrees_with_exact_direction_away_from_medial_axis(
        self, sphere_mesh, sphere_df, rng
    ):
        # exclusions mirror where the gradient is singular: the medial axis
        # and the surface kink (the buffer band uses exact normals there)
        checked = 0
        while checked < 60:
            p = rng.uniform(-1.3, 1.3, size=3)
            radius = np.linalg.norm(p)
            if radius < 2.5 * sphere_df.spacing:
                continue
            d = dfm.sample_direction(sphere_df, p)
            if d is None:
                continue
            _, closest = brute_nearest(p, sphere_mesh.vertices, sphere_mesh.triangles)
            to_surface = closest - p
            norm = np.linalg.norm(to_surface)
            if norm < 2.0 * sphere_df.spacing:
                continue
            cos = np.dot(d, to_surface / norm)
            assert cos > np.cos(np.radians(5.0))
            checked += 1

    def test_ambiguous_at_sphere_center(self, sphere_df):
        assert dfm.sample_direction(sphere_df, (0.0, 0.0, 0.0)) is None

    def test_outside_field_none(self, sphere_df):
        lo, _ = sphere_df.bounds()
        assert dfm.sample_direction(sphere_df, lo - 1.0) is None


class TestNearestSurfacePoint:
    def test_query_on_vertex(self, sphere_mesh):
        v = sphere_mesh.vertices[17]
        hit = dfm.nearest_surface_point(sphere_mesh, v)
        assert hit.distance == pytest.approx(0.0, abs=1e-12)
        assert np.allclose(hit.point, v, atol=1e-12)

    def test_above_plane_foot_of_perpendicular(self, plane):
        hit = dfm.nearest_surface_point(plane, (0.1, 0.2, 0.35))
        assert hit.distance == pytest.approx(0.35, abs=1e-12)
        assert np.allclose(hit.point, [0.1, 0.2, 0.0], atol=1e-12)
        assert np.allclose(hit.normal, [0, 0, 1], atol=1e-9)

    def test_thousand_random_queries_match_brute_force(self, rng):
        mesh = icosphere(subdivisions=2)
        pts = rng.uniform(-1.6, 1.6, size=(1000, 3))
        for p in pts:
            hit = dfm.nearest_surface_point(mesh, p)
            want, _ = brute_nearest(p, mesh.vertices, mesh.triangles)
            assert hit.distance == pytest.approx(want, abs=1e-9)

    def test_hit_consistency(self, sphere_mesh, rng):
        for _ in range(50):
            p = rng.uniform(-1.5, 1.5, size=3)
            hit = dfm.nearest_surface_point(sphere_mesh, p)
            assert hit.distance == pytest.approx(
                np.linalg.norm(np.asarray(p) - hit.point), abs=1e-9
            )
            assert np.linalg.norm(hit.normal) == pytest.approx(1.0, abs=1e-9)


class TestPersistence:
    def test_cache_roundtrip_bit_exact(self, tmp_path, sphere_df):
        path = tmp_path / "field.sdf"
        dfm.save_distance_field(path, sphere_df)
        back = dfm.load_distance_field(path)
        assert back.dims == tuple(sphere_df.dims)
        assert np.array_equal(back.values, sphere_df.values)
        assert np.allclose(back.origin, sphere_df.origin, atol=0)
        assert back.spacing == sphere_df.spacing

    def test_magic_check(self, tmp_path):
        path = tmp_path / "bad.sdf"
        path.write_bytes(b"NOPE" + b"\0" * 64)
        with pytest.raises(ValueError, match="not a distance-field cache"):
            dfm.load_distance_field(path)


def test_empty_mesh_rejected():
    mesh = plane_mesh(divisions=1)
    mesh.triangles = np.zeros((0, 3), dtype=np.int64)
    with pytest.raises(ValueError, match="empty mesh"):
        dfm.build_distance_field(mesh, 16)


def test_build_deterministic_under_threads(monkeypatch):
    mesh = icosphere(subdivisions=1)
    a = dfm.build_distance_field(mesh, resolution=10)
    monkeypatch.setenv("SNAPFORGE_THREADS", "1")
    b = dfm.build_distance_field(mesh, resolution=10)
    assert np.array_equal(a.values, b.values)
