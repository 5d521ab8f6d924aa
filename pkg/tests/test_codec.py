"""
Tests für den Latent-Codec, Meshing und PLY
"""
import numpy as np
import pytest

from src.codec import (
    CodecParams,
    decode,
    decode_ply,
    encode,
    encode_ply,
    export_ply,
    extract_mesh,
    fit_trained_linear,
    fixed_orthonormal,
    merge_meshes,
    mesh_blocks,
    read_ply,
    reconstruction_error,
    run_codec_ablation,
    weld_vertices,
)
from src.procgen import CurationConfig, curate_blocks, generate_world, slice_block
from src.voxcore import BlockFormatError, BlockLevel, SparseGrid


@pytest.fixture(scope="module")
def scene_blocks():
    """Fünf verschiedene kuratierte Feinblöcke aus einer Prozedur-Welt"""
    world = generate_world(seed=7, rooms=4)
    cfg = CurationConfig()
    result = curate_blocks(world, BlockLevel.FINE, 12, cfg, seed=3)
    origins = list(dict.fromkeys(result.origins))[:5]
    return [slice_block(world, origin, cfg.frame(BlockLevel.FINE)) for origin in origins]


@pytest.fixture
def two_adjacent(unit_cell):
    """Zwei Voxel, die sich eine Fläche teilen"""
    feats = np.array([[1.0, 0.0, 0.0], [0.0, 1.0, 0.0]])
    return SparseGrid((2, 1, 1), unit_cell, np.array([[0, 0, 0], [1, 0, 0]]), feats)


class TestLinearCodec:
    """Tests für encode / decode"""

    def test_orthonormal_round_trip(self, feature_block):
        """Test: C_z ≥ C_f → exakte Rekonstruktion, Konfidenz 1"""
        params = fixed_orthonormal(6, 8, seed=1)
        assert np.allclose(params.encoder.T @ params.encoder, np.eye(6), atol=1e-10)
        out, conf = decode(encode(feature_block, params), params)
        assert np.allclose(out.features, feature_block.features, atol=1e-5)
        assert np.all(conf == 1.0)
        assert reconstruction_error(out, feature_block) < 1e-10

    def test_encode_keeps_active_set(self, feature_block):
        """Test: Latents liegen auf derselben aktiven Menge"""
        latent = encode(feature_block, fixed_orthonormal(6, 8))
        assert np.array_equal(latent.latents.coords, feature_block.coords)
        assert latent.latents.channels == 8

    def test_seed_determinism(self):
        """Test: Gleicher Seed → gleiche Matrizen"""
        assert np.array_equal(fixed_orthonormal(6, 8, 4).encoder, fixed_orthonormal(6, 8, 4).encoder)
        assert not np.array_equal(fixed_orthonormal(6, 8, 4).encoder, fixed_orthonormal(6, 8, 5).encoder)

    def test_channel_mismatch(self, feature_block):
        """Test: Falsche Kanalzahl"""
        with pytest.raises(ValueError, match="channels"):
            encode(feature_block, fixed_orthonormal(3, 8))

    def test_trained_linear_recovers_identity(self):
        """Test: Gelernter Codec rekonstruiert Trainingsdaten"""
        x = np.random.default_rng(0).random((200, 6))
        params = fit_trained_linear(x, x, latent_channels=8)
        z = x @ params.encoder.T
        rec = z @ params.decoder[:-1].T
        assert np.allclose(rec, x, atol=1e-8)
        assert params.bias[:-1].tolist() == [0.0] * 6

    def test_trained_linear_empty(self):
        """Test: Keine Voxel"""
        with pytest.raises(ValueError):
            fit_trained_linear(np.zeros((0, 6)), np.zeros((0, 6)))

    def test_params_save_load(self, tmp_path):
        """Test: npz Speichern und Laden"""
        params = fixed_orthonormal(6, 8, seed=2)
        back = CodecParams.load(params.save(tmp_path / "codec.npz"))
        assert back.mode == "fixed_orthonormal"
        assert np.array_equal(back.decoder, params.decoder)

    def test_invalid_mode(self):
        """Test: Unbekannter Modus"""
        p = fixed_orthonormal(3, 4)
        with pytest.raises(ValueError, match="mode"):
            CodecParams("pca", 0, p.encoder, p.decoder, p.bias)


class TestMesh:
    """Tests für extract_mesh"""

    def test_single_voxel_cube(self, single_voxel):
        """Test: Ein Voxel → 12 Dreiecke, 8 Eckpunkte, geschlossene Fläche"""
        mesh = extract_mesh(single_voxel)
        assert mesh.triangle_count == 12
        assert mesh.vertices.shape == (8, 3)
        assert mesh.euler_characteristic() == 2
        assert np.all(mesh.face_colors == [255, 0, 0])

    def test_outward_normals(self, single_voxel):
        """Test: Normalen zeigen nach außen"""
        mesh = extract_mesh(single_voxel)
        centroids = mesh.vertices[mesh.faces].mean(axis=1)
        outward = centroids - np.array([1.5, 1.5, 1.5])
        assert np.all(np.sum(mesh.face_normals() * outward, axis=1) > 0)

    def test_shared_face_not_emitted(self, two_adjacent):
        """Test: Zwei benachbarte Voxel → 20 Dreiecke"""
        mesh = extract_mesh(two_adjacent)
        assert mesh.triangle_count == 20
        assert mesh.vertices.shape[0] == 12

    def test_low_confidence_dropped(self, two_adjacent):
        """Test: Konfidenz unter 0.5 → Voxel wird nicht vermascht"""
        mesh = extract_mesh(two_adjacent, confidence=np.array([1.0, 0.2]))
        assert mesh.triangle_count == 12

    def test_empty(self, unit_cell):
        """Test: Leeres Gitter → leeres Mesh"""
        assert extract_mesh(SparseGrid.empty((2, 2, 2), unit_cell, 3)).triangle_count == 0

    def test_origin_offset(self, single_voxel):
        """Test: Ursprung verschiebt die Eckpunkte"""
        mesh = extract_mesh(single_voxel, origin=(10.0, 0.0, 0.0))
        assert mesh.vertices[:, 0].min() == pytest.approx(11.0)

    def test_block_seam(self, two_adjacent):
        """Test: Keine Flächen an der Blockgrenze"""
        meshes = mesh_blocks(two_adjacent, (1, 1, 1))
        assert [m.triangle_count for m in meshes] == [10, 10]
        world = weld_vertices(merge_meshes(meshes))
        assert world.triangle_count == 20
        assert world.vertices.shape[0] == 12
        assert world.euler_characteristic() == 2


class TestPLY:
    """Tests für PLY Export / Import"""

    def test_header_counts(self, single_voxel, tmp_path):
        """Test: Header mit 8 Vertices und 12 Faces"""
        path = export_ply(extract_mesh(single_voxel), tmp_path / "cube.ply")
        data = path.read_bytes()
        assert data.startswith(b"ply\nformat binary_little_endian 1.0\n")
        assert b"element vertex 8\n" in data
        assert b"element face 12\n" in data

    def test_read_back(self, two_adjacent, tmp_path):
        """Test: Gelesenes Mesh ist identisch"""
        mesh = extract_mesh(two_adjacent)
        assert read_ply(export_ply(mesh, tmp_path / "m.ply")).same_as(mesh)

    def test_not_a_ply(self):
        """Test: Keine PLY-Datei"""
        with pytest.raises(BlockFormatError):
            decode_ply(b"WGB1....")

    def test_truncated_body(self, single_voxel):
        """Test: Abgeschnittener Körper"""
        with pytest.raises(BlockFormatError):
            decode_ply(encode_ply(extract_mesh(single_voxel))[:-5])


class TestCodecAblation:
    """Tests für run_codec_ablation"""

    def test_four_variants(self, feature_block):
        """Test: 2 × 2 Varianten mit Scores"""
        table = run_codec_ablation([feature_block], [feature_block], latent_channels=8, views=6, image_size=16)
        assert len(table) == 4
        assert set(table["aggregation"]) == {"naive", "occlusion_aware"}
        assert set(table["decoder"]) == {"fixed", "retrained"}
        assert (table["mse"] >= 0).all()

    @pytest.mark.slow
    def test_retrained_beats_fixed_on_heldout(self, scene_blocks):
        """Test: Gelernter Decoder rekonstruiert Held-out Blöcke besser als der feste"""
        train_blocks, heldout = scene_blocks[:3], scene_blocks[3:]
        assert sum(len(b) for b in train_blocks) >= 1000
        table = run_codec_ablation(train_blocks, heldout, latent_channels=3, views=6, image_size=16)
        for aggregation in ("naive", "occlusion_aware"):
            rows = table[table["aggregation"] == aggregation].set_index("decoder")
            assert rows.loc["retrained", "mse"] < rows.loc["fixed", "mse"]

    def test_trained_linear_beats_fixed_on_true_features(self, scene_blocks):
        """Test: trained_linear auf ≥ 1000 Voxeln, Fehler auf Held-out Voxeln kleiner"""
        train_feats = np.concatenate([b.features for b in scene_blocks[:3]])
        trained = fit_trained_linear(train_feats, train_feats, latent_channels=3, seed=1)
        fixed = fixed_orthonormal(6, 3, seed=1)
        for block in scene_blocks[3:]:
            err_trained = reconstruction_error(decode(encode(block, trained), trained)[0], block)
            err_fixed = reconstruction_error(decode(encode(block, fixed), fixed)[0], block)
            assert err_trained < err_fixed

    def test_needs_blocks(self, feature_block):
        """Test: Ohne Held-out Blöcke"""
        with pytest.raises(ValueError):
            run_codec_ablation([feature_block], [])
