"""
Tests für Trainingsmasken, Bedingungs-Bundle und Inpainting
"""
import numpy as np
import pytest

from src.inpaint import (
    ConditioningBundle,
    QuadrantSplit,
    assemble_condition,
    draw_split,
    inpaint_latent,
    inpaint_structure,
    make_training_masks,
)
from src.voxcore import BlockFrame, DenseMask, SparseGrid, SparseMask


@pytest.fixture
def slab():
    """8³ Belegung mit Bodenplatte z = 0"""
    vol = np.zeros((8, 8, 8))
    vol[:, :, 0] = 1.0
    return vol


@pytest.fixture
def structure(feature_block):
    """Aktive Menge eines 8³ Blocks"""
    return feature_block.occupancy()


@pytest.fixture
def known_latents(structure):
    """Bekannte 8-kanalige Latents auf allen aktiven Voxeln"""
    feats = np.random.default_rng(0).standard_normal((len(structure), 8)).astype(np.float32)
    return structure.with_features(feats)


class TestTrainingMasks:
    """Tests für QuadrantSplit und make_training_masks"""

    def test_midpoint_split_masks_three_quarters(self):
        """Test: Schnitt in der Mitte, Quadrant 0 behalten → 0.75"""
        mask = QuadrantSplit(16, 16, 0).dense_mask(32)
        assert mask.masked_fraction() == 0.75
        assert not mask.bits[:16, :16, :].any()
        assert mask.bits[16:, :, :].all()

    def test_split_bounds(self):
        """Test: Schnitte liegen in [N/4, 3N/4], behaltene Fläche positiv"""
        for seed in range(50):
            split = draw_split(32, seed)
            split.check_bounds(32)
            assert split.kept_area(32) > 0

    def test_invalid_quadrant(self):
        """Test: Quadrant außerhalb 0..3"""
        with pytest.raises(ValueError):
            QuadrantSplit(4, 4, 4)

    def test_out_of_bounds_split(self):
        """Test: Schnitt außerhalb der Grenzen"""
        with pytest.raises(ValueError):
            QuadrantSplit(1, 16, 0).check_bounds(32)

    def test_latent_mask_restricted_to_active(self, feature_block):
        """Test: m_l ⊆ aktive Menge, Bits stimmen mit m_s überein"""
        m_s, m_l, split = make_training_masks(BlockFrame.fine(3.0, 8), seed=4, active=feature_block)
        assert np.array_equal(m_l.coords, feature_block.coords)
        c = m_l.coords
        assert np.array_equal(m_l.bits, m_s.bits[c[:, 0], c[:, 1], c[:, 2]])

    def test_deterministic(self):
        """Test: Gleicher Seed → gleiche Maske"""
        frame = BlockFrame.fine(3.0, 8)
        a, _, sa = make_training_masks(frame, seed=9)
        b, _, sb = make_training_masks(frame, seed=9)
        assert sa == sb
        assert np.array_equal(a.bits, b.bits)


class TestAssembleCondition:
    """Tests für assemble_condition"""

    def test_full_mask(self):
        """Test: m ≡ 1 → bekannte Tokens null"""
        clean = np.random.default_rng(0).random((4, 3))
        bundle = assemble_condition(np.zeros((4, 3)), np.ones((4, 1)), clean)
        assert not bundle.known.any()

    def test_empty_mask(self):
        """Test: m ≡ 0 → bekannt = ℓ0"""
        clean = np.random.default_rng(1).random((4, 3))
        bundle = assemble_condition(np.zeros((4, 3)), np.zeros(4), clean)
        assert np.array_equal(bundle.known, clean)

    def test_mixed_mask_and_layout(self):
        """Test: Null genau wo m = 1, Reihenfolge [noisy | mask | known]"""
        noisy = np.full((3, 2), 7.0)
        clean = np.full((3, 2), 2.0)
        mask = np.array([[1.0], [0.0], [1.0]])
        bundle = assemble_condition(noisy, mask, clean)
        assert bundle.known[:, 0].tolist() == [0.0, 2.0, 0.0]
        stacked = bundle.concat()
        assert stacked.shape == (3, bundle.channels)
        assert stacked[1].tolist() == [7.0, 7.0, 0.0, 2.0, 2.0]
        back = ConditioningBundle.split(stacked)
        assert np.array_equal(back.mask, mask)

    def test_shape_mismatch(self):
        """Test: Unterschiedliche Formen"""
        with pytest.raises(ValueError):
            assemble_condition(np.zeros((3, 2)), np.zeros((3, 1)), np.zeros((3, 3)))
        with pytest.raises(ValueError):
            assemble_condition(np.zeros((3, 2)), np.zeros((2, 1)), np.zeros((3, 2)))

    def test_non_binary_mask(self):
        """Test: Maske nicht binär"""
        with pytest.raises(ValueError, match="binary"):
            assemble_condition(np.zeros((2, 1)), np.array([0.5, 1.0]), np.zeros((2, 1)))


class TestInpaintStructure:
    """Tests für inpaint_structure"""

    def test_zero_mask_returns_known(self, structure_model, slab, condition):
        """Test: m_s ≡ 0 → Ausgabe = bekanntes Volumen"""
        out = inpaint_structure(structure_model, slab, DenseMask.full((8, 8, 8), False), condition, seed=1, steps=2)
        assert np.array_equal(out, slab.astype(bool))

    def test_full_mask_ignores_known(self, structure_model, slab, condition):
        """Test: m_s ≡ 1 → bekannter Inhalt ohne Wirkung"""
        mask = np.ones((8, 8, 8), dtype=bool)
        a = inpaint_structure(structure_model, slab, mask, condition, seed=1, steps=2)
        b = inpaint_structure(structure_model, np.zeros((8, 8, 8)), mask, condition, seed=1, steps=2)
        assert np.array_equal(a, b)

    def test_known_region_preserved(self, structure_model, slab, condition):
        """Test: Bekannter Bereich bleibt bitidentisch"""
        mask = QuadrantSplit(4, 4, 0).dense_mask(8)
        out = inpaint_structure(structure_model, slab, mask, condition, seed=3, steps=2)
        assert out.dtype == bool
        assert np.array_equal(out[~mask.bits], slab.astype(bool)[~mask.bits])

    def test_known_region_preserved_randomized(self, structure_model, condition):
        """Test: 100 zufällige Aufrufe, m = 0 immer bitidentisch"""
        rng = np.random.default_rng(12)
        for k in range(100):
            known = rng.random((8, 8, 8)) < 0.3
            mask = rng.random((8, 8, 8)) < rng.uniform(0.1, 0.9)
            out = inpaint_structure(structure_model, known, mask, condition, seed=k, steps=1)
            assert np.array_equal(out[~mask], known[~mask])

    @pytest.mark.slow
    def test_trained_model_completes_floor(self, slab_model, slab, condition):
        """Test: Auf Bodenplatten trainiert → Boden deckt ≥ 80% der maskierten Spalten"""
        mask = QuadrantSplit(4, 4, 0).dense_mask(8)
        known = np.where(mask.bits, 0.0, slab)
        masked_columns = mask.bits[:, :, 0]
        coverage = [
            inpaint_structure(slab_model, known, mask, condition, seed=s, steps=50)[:, :, 0][masked_columns].mean()
            for s in range(3)
        ]
        assert np.mean(coverage) >= 0.8

    def test_deterministic(self, structure_model, slab, condition):
        """Test: Gleicher Seed → gleiches Ergebnis"""
        mask = QuadrantSplit(4, 4, 1).dense_mask(8)
        a = inpaint_structure(structure_model, slab, mask, condition, seed=5, steps=2)
        b = inpaint_structure(structure_model, slab, mask, condition, seed=5, steps=2)
        assert np.array_equal(a, b)

    def test_requires_structure_model(self, latent_model, slab, condition):
        """Test: Latent-Generator ist kein Struktur-Generator"""
        with pytest.raises(ValueError, match="structure"):
            inpaint_structure(latent_model, slab, np.ones((8, 8, 8), dtype=bool), condition, seed=0)

    def test_mask_shape(self, structure_model, slab, condition):
        """Test: Maskenform passt nicht"""
        with pytest.raises(ValueError):
            inpaint_structure(structure_model, slab, np.ones((4, 4, 4), dtype=bool), condition, seed=0)


class TestInpaintLatent:
    """Tests für inpaint_latent"""

    def test_all_known(self, latent_model, structure, known_latents, condition):
        """Test: Alles bekannt → Ausgabe = bekannte Latents"""
        mask = SparseMask(structure.coords, np.zeros(len(structure), dtype=bool))
        out = inpaint_latent(latent_model, structure, known_latents, mask, condition, seed=0, steps=2)
        assert out.latents == known_latents

    def test_empty_structure(self, latent_model, condition, unit_cell):
        """Test: Leere Struktur → leerer Latent-Block"""
        empty = SparseGrid.empty((8, 8, 8), unit_cell, 1)
        mask = SparseMask(np.zeros((0, 3)), np.zeros(0))
        out = inpaint_latent(latent_model, empty, empty, mask, condition, seed=0)
        assert len(out.latents) == 0
        assert out.latents.channels == 8

    def test_known_preserved_masked_generated(self, latent_model, structure, known_latents, condition):
        """Test: Latents nur auf aktiven Voxeln, bekannte exakt erhalten"""
        bits = structure.coords[:, 0] >= 4
        mask = SparseMask(structure.coords, bits)
        out = inpaint_latent(latent_model, structure, known_latents, mask, condition, seed=2, steps=2)
        assert np.array_equal(out.latents.coords, structure.coords)
        assert np.array_equal(out.latents.features[~bits], known_latents.features[~bits])
        assert not np.array_equal(out.latents.features[bits], known_latents.features[bits])

    def test_missing_from_mask_is_generated(self, latent_model, structure, condition):
        """Test: Voxel ohne Maskeneintrag werden erzeugt"""
        mask = SparseMask(np.zeros((0, 3)), np.zeros(0))
        empty_known = SparseGrid.empty(structure.resolution, structure.cell_size, 8)
        out = inpaint_latent(latent_model, structure, empty_known, mask, condition, seed=2, steps=2)
        assert len(out.latents) == len(structure)

    def test_mask_outside_structure(self, latent_model, structure, known_latents, condition):
        """Test: Maskenkoordinate außerhalb der Struktur"""
        mask = SparseMask(np.array([[7, 7, 7]]), np.array([True]))
        with pytest.raises(ValueError, match="not an active"):
            inpaint_latent(latent_model, structure, known_latents, mask, condition, seed=0)

    def test_missing_known_latent(self, latent_model, structure, condition):
        """Test: Unmaskierter Voxel ohne bekannten Latent"""
        mask = SparseMask(structure.coords, np.zeros(len(structure), dtype=bool))
        empty_known = SparseGrid.empty(structure.resolution, structure.cell_size, 8)
        with pytest.raises(ValueError, match="no known latent"):
            inpaint_latent(latent_model, structure, empty_known, mask, condition, seed=0)

    def test_requires_latent_model(self, structure_model, structure, known_latents, condition):
        """Test: Struktur-Generator ist kein Latent-Generator"""
        mask = SparseMask(structure.coords, np.ones(len(structure), dtype=bool))
        with pytest.raises(ValueError, match="latent"):
            inpaint_latent(structure_model, structure, known_latents, mask, condition, seed=0)
