"""
Tests für Punkt-Sampling, Distanzen, Verteilungs-Metriken und Stabilität
"""
import itertools
import math

import numpy as np
import pytest

from src.metrics import (
    EvalReport,
    block_descriptor,
    chamfer,
    cov,
    cov_from_matrix,
    emd,
    emd_with_certificate,
    evaluate_blocks,
    fine_block_at,
    frechet_distance,
    frechet_surrogate,
    is_inner,
    lattice_regions,
    mmd,
    mmd_from_matrix,
    nna_from_matrices,
    nna,
    pairwise_distances,
    sample_points,
    stability_protocol,
)
from src.voxcore import SparseGrid


def point(*xyz):
    return np.array([xyz], dtype=float)


@pytest.fixture
def unit_voxel(unit_cell):
    """Ein Voxel in einem 1³ Gitter"""
    return SparseGrid.occupancy_of((1, 1, 1), unit_cell, np.array([[0, 0, 0]]))


@pytest.fixture
def floor_world():
    """Stationäre Welt: Boden überall, 7x7 Gitter bei N = 8"""
    n = 2 * 7 * 8
    coords = np.array([(x, y, 0) for x in range(n) for y in range(n)])
    return SparseGrid.occupancy_of((n, n, 8), (0.375, 0.375, 0.375), coords)


@pytest.fixture
def reference_blocks(dense_cube, feature_block):
    """Drei verschiedene Referenzblöcke"""
    slab = SparseGrid.occupancy_of((8, 8, 8), (0.375,) * 3, np.array([(x, y, 0) for x in range(8) for y in range(8)]))
    return [dense_cube, feature_block.occupancy(), slab]


class TestSamplePoints:
    """Tests für sample_points"""

    def test_area_uniform_on_cube(self, unit_voxel):
        """Test: 6000 Punkte → pro Fläche ≈ 1000"""
        pts = sample_points(unit_voxel, 6000, seed=0).points
        dist = np.minimum(pts, 1.0 - pts)
        axis = dist.argmin(axis=1)
        side = pts[np.arange(len(pts)), axis] > 0.5
        counts = np.bincount(axis * 2 + side, minlength=6)
        sigma = math.sqrt(6000 * (1 / 6) * (5 / 6))
        assert np.all(np.abs(counts - 1000) <= 4 * sigma)

    def test_points_on_surface(self, unit_voxel):
        """Test: Alle Punkte auf der Oberfläche in [0, 1]³"""
        pts = sample_points(unit_voxel, 500, seed=1).points
        assert pts.min() >= 0.0 and pts.max() <= 1.0
        assert np.all(np.minimum(pts, 1.0 - pts).min(axis=1) <= 1e-6)

    def test_seeds(self, feature_block):
        """Test: Gleicher Seed identisch, anderer Seed verschieden"""
        a = sample_points(feature_block, 64, seed=3, block_id=2)
        assert a.block_id == 2 and len(a) == 64
        assert np.array_equal(a.points, sample_points(feature_block, 64, seed=3).points)
        assert not np.array_equal(a.points, sample_points(feature_block, 64, seed=4).points)

    def test_empty(self, unit_cell):
        """Test: Leere Geometrie, n < 1"""
        with pytest.raises(ValueError):
            sample_points(SparseGrid.empty((2, 2, 2), unit_cell, 1), 10)
        with pytest.raises(ValueError):
            sample_points(SparseGrid.occupancy_of((2, 2, 2), unit_cell, np.array([[0, 0, 0]])), 0)


class TestChamfer:
    """Tests für chamfer"""

    def test_identical(self):
        """Test: X = Y → 0"""
        x = np.random.default_rng(0).random((20, 3))
        assert chamfer(x, x) == 0.0

    def test_hand_example(self):
        """Test: {(0,0,0)} gegen {(1,0,0)} → 2.0"""
        assert chamfer(point(0, 0, 0), point(1, 0, 0)) == pytest.approx(2.0)

    def test_symmetric(self):
        """Test: chamfer(X, Y) = chamfer(Y, X)"""
        rng = np.random.default_rng(1)
        x, y = rng.random((15, 3)), rng.random((9, 3))
        assert chamfer(x, y) == pytest.approx(chamfer(y, x))

    def test_empty(self):
        """Test: Leere Eingabe"""
        with pytest.raises(ValueError):
            chamfer(np.zeros((0, 3)), point(0, 0, 0))


class TestEMD:
    """Tests für emd"""

    def test_identical_multiset(self):
        """Test: X = Y als Multimenge → 0"""
        x = np.random.default_rng(0).random((10, 3))
        assert emd(x, x[::-1]) == pytest.approx(0.0)

    def test_hand_example(self):
        """Test: Optimale Zuordnung → (0 + √2) / 2"""
        x = np.array([[0.0, 0.0, 0.0], [1.0, 0.0, 0.0]])
        y = np.array([[0.0, 0.0, 0.0], [0.0, 1.0, 0.0]])
        assert emd(x, y) == pytest.approx(math.sqrt(2) / 2)

    def test_size_mismatch(self):
        """Test: Unterschiedliche Größen"""
        with pytest.raises(ValueError, match="equal-size"):
            emd(np.zeros((3, 3)), np.zeros((2, 3)))

    def test_auction_within_one_percent(self):
        """Test: Auktion und Hungarian auf n = 64 innerhalb 1%"""
        rng = np.random.default_rng(2)
        for _ in range(3):
            x, y = rng.random((64, 3)), rng.random((64, 3))
            exact = emd_with_certificate(x, y)
            approx = emd_with_certificate(x, y, exact_limit=0)
            assert exact.exact and not approx.exact
            assert approx.value >= exact.value - 1e-12
            assert approx.value <= 1.01 * exact.value
            assert approx.lower_bound <= exact.value + 1e-9
            assert approx.gap <= 0.01 + 1e-12

    def test_brute_force_oracle(self):
        """Test: Hungarian = Minimum über alle Permutationen (n ≤ 6)"""
        rng = np.random.default_rng(8)
        for trial in range(50):
            n = 1 + trial % 6
            x, y = rng.random((n, 3)), rng.random((n, 3))
            brute = min(
                np.linalg.norm(x - y[list(perm)], axis=1).mean()
                for perm in itertools.permutations(range(n))
            )
            assert emd(x, y) == pytest.approx(brute, abs=1e-12)

    def test_at_least_nearest_neighbour(self):
        """Test: emd ≥ mittlere NN-Distanz von X nach Y"""
        rng = np.random.default_rng(3)
        x, y = rng.random((30, 3)), rng.random((30, 3))
        nn = np.linalg.norm(x[:, None] - y[None], axis=2).min(axis=1).mean()
        assert emd(x, y) >= nn - 1e-12
        assert emd(x, y) == pytest.approx(emd(y, x))


class TestDistributionMetrics:
    """Tests für MMD, COV und 1-NNA"""

    def test_identical_sets(self):
        """Test: S_g = S_r → MMD 0, COV 1"""
        s = [point(0, 0, 0), point(5, 0, 0), point(0, 9, 0)]
        assert mmd(s, s, chamfer) == 0.0
        assert cov(s, s, chamfer) == 1.0

    def test_nna_single_pair(self):
        """Test: {A} gegen {B} → 1-NNA = 0"""
        assert nna([point(0, 0, 0)], [point(1, 0, 0)], chamfer) == 0.0

    def test_cov_half(self):
        """Test: Ein generiertes Sample, zwei Referenzen → COV = 1/2"""
        assert cov([point(0, 0, 0)], [point(1, 0, 0), point(3, 0, 0)], chamfer) == 0.5

    def test_separated_clusters(self):
        """Test: Getrennte Cluster → 1-NNA = 1"""
        rng = np.random.default_rng(4)
        s_g = [rng.random((5, 3)) for _ in range(4)]
        s_r = [rng.random((5, 3)) + 100.0 for _ in range(4)]
        assert nna(s_g, s_r, chamfer) == 1.0

    def test_tie_classifies_as_reference(self):
        """Test: Exakter Gleichstand zählt als Referenz"""
        s_g = [point(0, 0, 0), point(2, 0, 0)]
        s_r = [point(4, 0, 0), point(-10, 0, 0)]
        assert nna(s_g, s_r, chamfer) == 0.25

    def test_permutation_invariant(self):
        """Test: Reihenfolge der Mengen egal"""
        rng = np.random.default_rng(5)
        s_g = [rng.random((4, 3)) for _ in range(5)]
        s_r = [rng.random((4, 3)) for _ in range(5)]
        for metric in (mmd, cov, nna):
            assert metric(s_g, s_r, chamfer) == pytest.approx(metric(s_g[::-1], s_r[::-1], chamfer))

    def test_matrix_direction(self):
        """Test: MMD minimiert über generierte Samples"""
        dist = np.array([[1.0, 4.0], [2.0, 3.0]])
        assert mmd_from_matrix(dist) == 2.0
        assert cov_from_matrix(dist) == 0.5

    def test_worker_count_does_not_matter(self):
        """Test: Distanzmatrix unabhängig von der Thread-Zahl"""
        rng = np.random.default_rng(6)
        s = [rng.random((6, 3)) for _ in range(5)]
        assert np.array_equal(pairwise_distances(s, s, chamfer, workers=1), pairwise_distances(s, s, chamfer, workers=4))

    def test_exhaustive_oracles(self):
        """Test: COV und 1-NNA gegen Aufzählung (Mengen ≤ 8)"""
        rng = np.random.default_rng(9)
        for trial in range(20):
            n_g, n_r = 1 + trial % 8, 1 + (trial * 3) % 8
            pts = rng.random((n_g + n_r, 3))
            full = np.linalg.norm(pts[:, None] - pts[None], axis=2)
            gg, gr, rr = full[:n_g, :n_g], full[:n_g, n_g:], full[n_g:, n_g:]

            covered = {min(range(n_r), key=lambda j: gr[i, j]) for i in range(n_g)}
            assert cov_from_matrix(gr) == len(covered) / n_r

            total = n_g + n_r
            hits = 0
            for k in range(total):
                nearest = min((m for m in range(total) if m != k), key=lambda m: full[k, m])
                hits += (nearest < n_g) == (k < n_g)
            assert nna_from_matrices(gg, gr, rr) == pytest.approx(hits / total)

    def test_empty_sets(self):
        """Test: Leere Mengen"""
        with pytest.raises(ValueError):
            mmd([], [point(0, 0, 0)], chamfer)
        with pytest.raises(ValueError):
            nna([point(0, 0, 0)], [], chamfer)


class TestFrechet:
    """Tests für das Fréchet-Surrogat"""

    def test_identical(self):
        """Test: S_g = S_r → 0"""
        x = np.random.default_rng(0).standard_normal((200, 4))
        result = frechet_distance(x, x)
        assert result.score == pytest.approx(0.0, abs=1e-8)
        assert not result.regularized

    def test_mean_shift(self):
        """Test: Verschiebung δ → δ²"""
        x = np.random.default_rng(1).standard_normal((10000, 2))
        scores = []
        for delta in (0.1, 0.2, 0.4):
            y = x + np.array([delta, 0.0])
            scores.append(frechet_distance(y, x).score)
            assert scores[-1] == pytest.approx(delta ** 2, abs=1e-3)
        assert scores == sorted(scores)

    def test_singular_covariance_regularized(self, feature_block):
        """Test: Identische Blöcke → singuläre Kovarianz, regularisiert"""
        result = frechet_surrogate([feature_block] * 3, [feature_block] * 3)
        assert result.regularized
        assert result.score == pytest.approx(0.0, abs=1e-8)

    def test_too_few_samples(self, feature_block):
        """Test: Weniger als 2 Samples"""
        with pytest.raises(ValueError):
            frechet_surrogate([feature_block], [feature_block, feature_block])
        with pytest.raises(ValueError):
            frechet_distance(np.zeros((3, 2)), np.zeros((3, 4)))

    def test_descriptor(self, dense_cube, unit_cell):
        """Test: 18 Dimensionen, Belegung, Höhen-Histogramm"""
        d = block_descriptor(dense_cube)
        assert d.shape == (18,)
        assert d[0] == 1.0
        assert d[1:4] == pytest.approx([0.5, 0.5, 0.5])
        assert d[10:].sum() == pytest.approx(1.0)
        assert not block_descriptor(SparseGrid.empty((4, 4, 4), unit_cell, 1)).any()


class TestEvaluateBlocks:
    """Tests für evaluate_blocks"""

    def test_report_ranges(self, reference_blocks):
        """Test: COV, 1-NNA in [0, 1], MMD ≥ 0, Konventionen im Report"""
        report = evaluate_blocks(reference_blocks[::-1], reference_blocks, points=32, seed=1)
        assert isinstance(report, EvalReport)
        for value in (report.cov_cd, report.cov_emd, report.nna_cd, report.nna_emd):
            assert 0.0 <= value <= 1.0
        assert report.mmd_cd >= 0.0 and report.mmd_emd >= 0.0
        data = report.to_dict()
        assert data["points"] == 32 and data["seed"] == 1
        assert "cd" in data["conventions"]

    def test_deterministic(self, reference_blocks):
        """Test: Gleicher Seed → gleicher Report"""
        a = evaluate_blocks(reference_blocks, reference_blocks, points=16, seed=2)
        b = evaluate_blocks(reference_blocks, reference_blocks, points=16, seed=2)
        assert a.to_dict() == b.to_dict()

    def test_empty(self, reference_blocks):
        """Test: Leere generierte Menge"""
        with pytest.raises(ValueError):
            evaluate_blocks([], reference_blocks, points=16)


class TestStability:
    """Tests für das Innen/Außen-Protokoll"""

    def test_classification(self):
        """Test: (0, 0) innen, (5, 6) außen"""
        assert is_inner(0, 0) and is_inner(2, 2)
        assert not is_inner(5, 6) and not is_inner(3, 0)

    def test_region_counts(self):
        """Test: 7x7 → 9 innen, 40 außen"""
        inner, outer = lattice_regions(7, 7)
        assert len(inner) == 9
        assert len(outer) == 40
        assert outer[0] == (3, 0)

    def test_fine_block_under_cell(self, floor_world):
        """Test: Feinblock liegt unter der Zelle, deterministisch"""
        a = fine_block_at(floor_world, (3, 4), 8, seed=1)
        assert a.resolution == (8, 8, 8)
        assert len(a) == 64
        assert a == fine_block_at(floor_world, (3, 4), 8, seed=1)

    def test_world_too_small(self, floor_world, reference_blocks):
        """Test: Welt kleiner als 7x7"""
        with pytest.raises(ValueError, match="7x7"):
            stability_protocol(floor_world, (6, 7), reference_blocks, resolution=8)
        with pytest.raises(ValueError, match="too small"):
            stability_protocol(floor_world, (8, 8), reference_blocks, resolution=8)

    @pytest.mark.slow
    @pytest.mark.integration
    def test_protocol_counts(self, floor_world, reference_blocks):
        """Test: 9 innere und 40 äußere Blöcke gegen dieselbe Referenz"""
        inner, outer = stability_protocol(floor_world, (7, 7), reference_blocks, resolution=8, seed=3, points=16)
        assert inner.generated_count == 9
        assert outer.generated_count == 40
        assert inner.reference_count == outer.reference_count == 3

    @pytest.mark.slow
    @pytest.mark.integration
    def test_stationary_world_outer_matches_inner(self, floor_world, reference_blocks):
        """Test: Stationäre Welt → MMD-CD außen innerhalb 20% von innen"""
        inner, outer = stability_protocol(floor_world, (7, 7), reference_blocks, resolution=8, seed=3, points=128)
        assert inner.mmd_cd > 0
        assert abs(outer.mmd_cd - inner.mmd_cd) <= 0.2 * inner.mmd_cd
