import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from meshes import connected_8, plane_mesh

from snapforge import brushing as br
from snapforge import distfield as dfm
from snapforge import forcemodel as fm
from snapforge import simulator as sim


def band_spec(poly, half_width=3, dims=(64, 64)):
    return br.BandSpec(np.asarray(poly, dtype=float), half_width, dims[0], dims[1])


class TestBandTexture:
    def test_horizontal_band_is_strip(self):
        v_center = 32.5 / 64.0  # medial line through a texel-center row
        spec = band_spec([(0.1, v_center), (0.9, v_center)], half_width=3)
        band, medial = br.make_band_texture(spec)
        mid_cols = band[:, 20:40]
        assert (mid_cols.sum(axis=0) == 7).all()  # 2*3+1 texels tall
        assert (medial[:, 20:40].sum(axis=0) == 1).all()  # 1-texel medial

    def test_medial_subset_of_band(self):
        spec = band_spec([(0.2, 0.2), (0.8, 0.7), (0.5, 0.9)], half_width=2)
        band, medial = br.make_band_texture(spec)
        assert (band | ~medial).all()  # medial implies band

    def test_matches_bruteforce_distance_scan(self):
        spec = band_spec([(0.15, 0.3), (0.6, 0.8), (0.9, 0.4)], half_width=4)
        band, _ = br.make_band_texture(spec)
        w = h = 64
        pts = np.asarray(spec.polyline) * np.array([w, h])
        expect = np.zeros((h, w), dtype=bool)
        for i in range(h):
            for j in range(w):
                c = np.array([j + 0.5, i + 0.5])
                best = np.inf
                for k in range(len(pts) - 1):
                    a, b = pts[k], pts[k + 1]
                    ab = b - a
                    t = np.clip(np.dot(c - a, ab) / np.dot(ab, ab), 0, 1)
                    best = min(best, np.linalg.norm(c - (a + t * ab)))
                expect[i, j] = best <= spec.half_width
        assert np.array_equal(band, expect)

    def test_polyline_outside_unit_square_rejected(self):
        with pytest.raises(ValueError, match="unit square"):
            br.make_band_texture(band_spec([(0.5, 0.5), (1.2, 0.5)]))

    def test_half_width_floor(self):
        with pytest.raises(ValueError):
            br.make_band_texture(band_spec([(0.1, 0.5), (0.9, 0.5)], half_width=0))

    def test_spec_json_roundtrip(self):
        spec = band_spec([(0.1, 0.5), (0.9, 0.5)])
        back = br.BandSpec.from_json(spec.to_json())
        assert np.array_equal(back.polyline, spec.polyline)
        assert back.half_width == spec.half_width


class TestBrushSegment:
    def test_degenerate_segment_tags_one_texel(self):
        tex = br.BrushTexture(10, 10)
        br.brush_segment(tex, (0.34, 0.72), (0.34, 0.72))
        assert tex.tags.sum() == 1
        assert tex.tags[7, 3]

    def test_horizontal_run_is_exact(self):
        tex = br.BrushTexture(10, 10)
        br.brush_segment(tex, (0.1, 0.1), (0.5, 0.1))
        expect = np.zeros((10, 10), dtype=bool)
        expect[1, 1:6] = True
        assert np.array_equal(tex.tags, expect)

    def test_out_of_bounds_rejected(self):
        tex = br.BrushTexture(8, 8)
        with pytest.raises(ValueError):
            br.brush_segment(tex, (0.5, 0.5), (1.4, 0.5))

    def test_idempotent(self):
        tex = br.BrushTexture(32, 32)
        br.brush_segment(tex, (0.1, 0.2), (0.8, 0.9))
        first = tex.tags.copy()
        br.brush_segment(tex, (0.1, 0.2), (0.8, 0.9))
        assert np.array_equal(tex.tags, first)

    def test_erase_reverses_tagging(self):
        tex = br.BrushTexture(32, 32)
        br.brush_segment(tex, (0.1, 0.2), (0.8, 0.9))
        br.brush_segment(tex, (0.1, 0.2), (0.8, 0.9), erase=True)
        assert tex.tags.sum() == 0

    @given(
        st.tuples(
            st.floats(0.0, 1.0), st.floats(0.0, 1.0),
            st.floats(0.0, 1.0), st.floats(0.0, 1.0),
        )
    )
    @settings(max_examples=150, deadline=None)
    def test_any_single_segment_8_connected(self, uv):
        u0, v0, u1, v1 = uv
        tex = br.BrushTexture(48, 48)
        br.brush_segment(tex, (u0, v0), (u1, v1))
        assert tex.tags.any()
        assert connected_8(tex.tags)

    def test_long_fast_stroke_connected(self, rng):
        for _ in range(50):
            tex = br.BrushTexture(128, 128)
            a = rng.uniform(0.05, 0.15, 2)
            b = rng.uniform(0.8, 0.95, 2)
            br.brush_segment(tex, a, b)
            assert connected_8(tex.tags)

    def test_resolution_covariance(self, rng):
        for _ in range(20):
            a, b = rng.uniform(0, 1, 2), rng.uniform(0, 1, 2)
            coarse = br.BrushTexture(32, 32)
            fine = br.BrushTexture(64, 64)
            br.brush_segment(coarse, a, b)
            br.brush_segment(fine, a, b)
            for i, j in np.argwhere(coarse.tags):
                assert fine.tags[2 * i : 2 * i + 2, 2 * j : 2 * j + 2].any()


class TestRecordBrush:
    @pytest.fixture
    def scene(self, plane, plane_df):
        params = fm.ForceParams.defaults_for(plane, plane_df)
        return plane, plane_df, params

    def test_no_brush_events_empty_texture(self, scene):
        mesh, df, params = scene
        script = sim.TrajectoryScript.from_samples(
            100.0,
            [(0.0, (0, 0, 0.2), False, False), (0.5, (0.2, 0, 0.2), False, False)],
        )
        log = sim.run_trajectory(mesh, df, params, sim.MODE_HAPTIC, script)
        tex = br.record_brush(log, mesh, (64, 64))
        assert tex.tags.sum() == 0

    def test_straight_drag_brushes_straight_connected_curve(self, scene):
        mesh, df, params = scene
        samples = [
            (0.0, (-0.3, 0.0, 0.15), False, False),
            (0.5, (-0.3, 0.0, -0.005), False, True),
            (2.0, (0.3, 0.0, -0.005), False, True),
            (2.2, (0.3, 0.0, 0.2), False, False),
        ]
        script = sim.TrajectoryScript.from_samples(100.0, samples)
        log = sim.run_trajectory(mesh, df, params, sim.MODE_HAPTIC_SNAP, script)
        tex = br.record_brush(log, mesh, (64, 64))
        assert tex.tags.any()
        assert connected_8(tex.tags)
        rows = np.argwhere(tex.tags)[:, 0]
        assert rows.max() - rows.min() <= 1  # straight horizontal track in UV

    def test_no_haptic_pointer_brushing(self, scene):
        mesh, df, params = scene
        samples = [
            (0.0, (-0.2, 0.1, 0.2), False, True),
            (1.0, (0.2, 0.1, 0.2), False, True),
        ]
        script = sim.TrajectoryScript.from_samples(100.0, samples)
        log = sim.run_trajectory(mesh, df, params, sim.MODE_NO_HAPTIC, script)
        tex = br.record_brush(log, mesh, (64, 64))
        assert tex.tags.any()
        assert connected_8(tex.tags)

    def test_brush_in_free_space_skipped_and_counted(self, scene):
        mesh, df, params = scene
        samples = [
            (0.0, (0.0, 0.0, 0.3), False, True),
            (0.3, (0.1, 0.0, 0.3), False, True),
        ]
        script = sim.TrajectoryScript.from_samples(100.0, samples)
        log = sim.run_trajectory(mesh, df, params, sim.MODE_HAPTIC, script)
        tex = br.record_brush(log, mesh, (64, 64))
        assert tex.tags.sum() == 0
        assert tex.skipped == len(log)

    def test_replay_deterministic(self, scene):
        mesh, df, params = scene
        samples = [
            (0.0, (-0.2, -0.1, 0.1), False, True),
            (1.0, (0.25, 0.15, -0.005), False, True),
        ]
        script = sim.TrajectoryScript.from_samples(100.0, samples)
        log = sim.run_trajectory(mesh, df, params, sim.MODE_HAPTIC_SNAP, script)
        a = br.record_brush(log, mesh, (96, 96))
        b = br.record_brush(log, mesh, (96, 96))
        assert np.array_equal(a.tags, b.tags)


def test_mask_pgm_roundtrip(tmp_path):
    tex = br.BrushTexture(32, 16)
    br.brush_segment(tex, (0.1, 0.3), (0.9, 0.8))
    br.save_brush_texture(tmp_path / "b.pgm", tex)
    back = br.load_brush_texture(tmp_path / "b.pgm")
    assert back.width == 32 and back.height == 16
    assert np.array_equal(back.tags, tex.tags)


def test_surface_uv_barycentric(plane):
    uv = br.surface_uv(plane, np.array([0.5, 0.5, 0.2]))  # top-right corner
    assert np.allclose(uv, [1.0, 1.0], atol=1e-9)
    uv = br.surface_uv(plane, np.array([0.0, 0.0, 0.1]))  # center
    assert np.allclose(uv, [0.5, 0.5], atol=1e-9)
