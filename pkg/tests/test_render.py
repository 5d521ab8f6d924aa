"""
Tests für Kameras, Raycaster und Feature-Lifting
"""
import math

import numpy as np
import pytest

from src.render import (
    CameraInsideVoxelError,
    CameraPose,
    DepthMap,
    ViewFeatureMap,
    aggregate_features,
    default_tau,
    lift_block,
    raycast_depth,
    render_views,
    rig_directions,
    view_rig,
    visibility_mask,
    write_ppm,
)
from src.voxcore import SparseGrid

RED = (1.0, 0.0, 0.0)
BLUE = (0.0, 0.0, 1.0)


def front_camera(distance=5.0, size=9):
    """Kamera auf der -Y Seite, Blick auf das Zentrum von Voxel (1,1,1)"""
    return CameraPose((1.5, 1.5 - distance, 1.5), (1.5, 1.5, 1.5), (0.0, 0.0, 1.0), math.radians(40), size, size)


@pytest.fixture
def two_on_a_ray():
    """Rot vor Blau entlang +Y"""
    return SparseGrid((3, 3, 3), (1.0, 1.0, 1.0), np.array([[1, 1, 1], [1, 2, 1]]), np.array([RED, BLUE]))


@pytest.fixture
def two_sided_wall():
    """Zweilagige Wand: x = 1 rot, x = 2 blau"""
    coords, feats = [], []
    for y in range(4):
        for z in range(4):
            coords += [(1, y, z), (2, y, z)]
            feats += [RED, BLUE]
    return SparseGrid((4, 4, 4), (1.0, 1.0, 1.0), np.array(coords), np.array(feats))


class TestCamera:
    """Tests für CameraPose und das Kamera-Rig"""

    def test_degenerate_pose(self):
        """Test: Position = Blickziel"""
        with pytest.raises(ValueError):
            CameraPose((1.0, 1.0, 1.0), (1.0, 1.0, 1.0))

    def test_up_parallel_to_forward(self):
        """Test: up parallel zur Blickrichtung"""
        with pytest.raises(ValueError, match="parallel"):
            CameraPose((0.0, 0.0, 5.0), (0.0, 0.0, 0.0), (0.0, 0.0, 1.0))

    def test_center_ray_is_forward(self):
        """Test: Mittlerer Pixel blickt genau nach vorn"""
        cam = front_camera()
        dirs = cam.ray_directions()
        assert dirs.shape == (9, 9, 3)
        assert np.allclose(dirs[4, 4], cam.forward)

    def test_project_center(self):
        """Test: Blickziel landet im mittleren Pixel"""
        col, row, inside = front_camera().project(np.array([[1.5, 1.5, 1.5], [1.5, -10.0, 1.5]]))
        assert (col[0], row[0]) == (4, 4)
        assert inside.tolist() == [True, False]

    def test_rig_size_and_targets(self):
        """Test: 26 Kameras schauen auf das Blockzentrum"""
        cams = view_rig((3.0, 3.0, 3.0), 26, 16)
        assert len(cams) == 26
        assert all(c.look_at == (1.5, 1.5, 1.5) for c in cams)
        assert all(c.width == 16 and c.height == 16 for c in cams)

    def test_rig_count_bounds(self):
        """Test: Ungültige Kamerazahl"""
        with pytest.raises(ValueError):
            rig_directions(0)
        with pytest.raises(ValueError):
            rig_directions(27)
        assert len(rig_directions(6)) == 6


class TestRaycast:
    """Tests für raycast_depth"""

    def test_empty_grid(self):
        """Test: Leeres Gitter → alle Tiefen +inf"""
        depth, fmap = raycast_depth(SparseGrid.empty((3, 3, 3), (1.0, 1.0, 1.0), 3), front_camera())
        assert np.all(np.isinf(depth.depth))
        assert not fmap.features.any()

    def test_single_voxel_depth(self, single_voxel):
        """Test: Tiefe im Zentrum = d - s/2"""
        depth, _ = raycast_depth(single_voxel, front_camera(distance=5.0))
        assert depth.depth[4, 4] == pytest.approx(4.5, abs=1e-6)

    def test_front_most_feature(self, two_on_a_ray):
        """Test: Näherer Voxel liefert das Feature"""
        _, fmap = raycast_depth(two_on_a_ray, front_camera())
        assert fmap.features[4, 4].tolist() == list(RED)

    def test_anisotropic_cells(self):
        """Test: Anisotrope Zellen (coarse Voxel)"""
        grid = SparseGrid.occupancy_of((3, 3, 3), (2.0, 2.0, 1.0), np.array([[1, 1, 1]]))
        cam = CameraPose((3.0, -4.0, 1.5), (3.0, 3.0, 1.5), (0.0, 0.0, 1.0), math.radians(40), 9, 9)
        depth, _ = raycast_depth(grid, cam)
        assert depth.depth[4, 4] == pytest.approx(6.0, abs=1e-6)

    def test_camera_inside_voxel(self, single_voxel):
        """Test: Kamera in aktivem Voxel"""
        cam = CameraPose((1.5, 1.5, 1.5), (0.0, 0.0, 0.0))
        with pytest.raises(CameraInsideVoxelError):
            raycast_depth(single_voxel, cam)


class TestVisibility:
    """Tests für visibility_mask"""

    def test_single_voxel_visible(self, single_voxel):
        """Test: Einzelner Voxel vor der Kamera ist sichtbar"""
        cam = front_camera()
        depth, _ = raycast_depth(single_voxel, cam)
        assert visibility_mask(single_voxel, cam, depth, default_tau(single_voxel)).tolist() == [True]

    def test_occluded_voxel(self, two_on_a_ray):
        """Test: Voxel hinter einem anderen ist unsichtbar"""
        cam = front_camera()
        depth, _ = raycast_depth(two_on_a_ray, cam)
        assert visibility_mask(two_on_a_ray, cam, depth, default_tau(two_on_a_ray)).tolist() == [True, False]

    def test_outside_frustum(self, single_voxel):
        """Test: Voxel hinter der Kamera ist unsichtbar"""
        cam = CameraPose((1.5, -3.5, 1.5), (1.5, -10.0, 1.5))
        depth = DepthMap(np.full((cam.height, cam.width), 1.0))
        assert visibility_mask(single_voxel, cam, depth, 0.75).tolist() == [False]


class TestAggregateFeatures:
    """Tests für aggregate_features"""

    def test_one_view(self, single_voxel):
        """Test: Eine Ansicht → Feature des Pixels"""
        cam = front_camera()
        views = render_views(single_voxel, [cam])
        out = aggregate_features(single_voxel.occupancy(), views, default_tau(single_voxel))
        assert np.allclose(out.grid.features, single_voxel.features)
        assert out.unseen_count == 0

    def test_mean_of_two_views(self):
        """Test: Zwei sichtbare Ansichten → (u + v) / 2"""
        grid = SparseGrid.occupancy_of((3, 3, 3), (1.0, 1.0, 1.0), np.array([[1, 1, 1]]))
        cam_a = front_camera(distance=5.0)
        cam_b = CameraPose((1.5, 7.5, 1.5), (1.5, 1.5, 1.5), (0.0, 0.0, 1.0), math.radians(40), 9, 9)
        u, v = np.array([0.2, 0.4, 0.6]), np.array([0.6, 0.0, 0.2])
        views = [
            (cam_a, DepthMap(np.full((9, 9), 4.5)), ViewFeatureMap(np.broadcast_to(u, (9, 9, 3)).copy())),
            (cam_b, DepthMap(np.full((9, 9), 5.5)), ViewFeatureMap(np.broadcast_to(v, (9, 9, 3)).copy())),
        ]
        out = aggregate_features(grid, views, 0.75)
        assert np.allclose(out.grid.features[0], (u + v) / 2)
        assert out.view_counts.tolist() == [2]

    def test_two_sided_wall_no_contamination(self, two_sided_wall):
        """Test: Rote Seite ohne Blau-Anteil, naive Mittelung kontaminiert"""
        cams = [
            CameraPose((-6.0, 2.0, 2.0), (2.0, 2.0, 2.0), (0.0, 0.0, 1.0), math.radians(60), 16, 16),
            CameraPose((10.0, 2.0, 2.0), (2.0, 2.0, 2.0), (0.0, 0.0, 1.0), math.radians(60), 16, 16),
        ]
        views = render_views(two_sided_wall, cams)
        occ = two_sided_wall.occupancy()
        red = two_sided_wall.coords[:, 0] == 1
        aware = aggregate_features(occ, views, default_tau(occ), occlusion_aware=True)
        naive = aggregate_features(occ, views, default_tau(occ), occlusion_aware=False)
        assert np.all(aware.grid.features[red, 2] == 0.0)
        assert np.any(aware.grid.features[red, 0] > 0.0)
        assert np.max(naive.grid.features[red, 2]) > 0.0

    def test_no_views(self, single_voxel):
        """Test: Ohne Ansichten"""
        with pytest.raises(ValueError):
            aggregate_features(single_voxel.occupancy(), [], 0.75)


class TestLiftBlock:
    """Tests für lift_block und PPM-Dumps"""

    def test_lift_keeps_active_set(self, feature_block, tmp_path):
        """Test: Gleiche aktive Menge, Dumps werden geschrieben"""
        out = lift_block(feature_block, views=6, image_size=16, dump_dir=tmp_path / "views")
        assert np.array_equal(out.grid.coords, feature_block.coords)
        assert out.grid.channels == feature_block.channels
        assert len(out.view_counts) == len(feature_block)
        assert (tmp_path / "views" / "view_00_depth.ppm").exists()

    def test_lift_deterministic(self, feature_block):
        """Test: Zwei Läufe → identische Features"""
        a = lift_block(feature_block, views=6, image_size=16)
        b = lift_block(feature_block, views=6, image_size=16)
        assert a.grid == b.grid

    def test_write_ppm_header(self, tmp_path):
        """Test: P6 Header und Größe"""
        path = write_ppm(tmp_path / "x.ppm", np.zeros((2, 3, 3)))
        data = path.read_bytes()
        assert data.startswith(b"P6\n3 2\n255\n")
        assert len(data) == len(b"P6\n3 2\n255\n") + 18
