import json

import numpy as np
import pytest

from classdiff import (
    DataError,
    build_cache,
    from_arrays,
    load_cache,
    load_dataset,
    save_cache,
    save_dataset,
)


def write_manifest(tmp_path, classes, dataset_id="ds"):
    """classes: list of (label, filename, text-or-array)."""
    entries = []
    for label, fname, content in classes:
        path = tmp_path / fname
        if fname.endswith(".npy"):
            np.save(path, content)
        else:
            path.write_text(content)
        entries.append({"label": label, "file": fname})
    manifest = tmp_path / "manifest.json"
    manifest.write_text(json.dumps({"dataset_id": dataset_id, "classes": entries}))
    return manifest


class TestLoadDataset:
    def test_smallest_valid_input(self, tmp_path):
        manifest = write_manifest(
            tmp_path,
            [("a", "a.csv", "1,0\n0,1\n"), ("b", "b.csv", "1,1\n2,0\n")],
        )
        ds = load_dataset(manifest)
        assert ds.dim == 2
        assert ds.n_classes == 2
        assert ds.labels() == ["a", "b"]
        assert ds.classes[0].vectors.shape == (2, 2)

    def test_dimension_mismatch_names_offending_class(self, tmp_path):
        manifest = write_manifest(
            tmp_path,
            [("A", "a.csv", "1,0\n"), ("B", "b.csv", "1,0,0\n")],
        )
        with pytest.raises(DataError, match="'B'"):
            load_dataset(manifest)

    def test_zero_vector_reports_row(self, tmp_path):
        manifest = write_manifest(
            tmp_path,
            [("a", "a.csv", "1,0\n0,0\n"), ("b", "b.csv", "1,1\n")],
        )
        with pytest.raises(DataError, match="row 1"):
            load_dataset(manifest)

    def test_nan_rejected(self, tmp_path):
        manifest = write_manifest(
            tmp_path,
            [("a", "a.npy", np.array([[1.0, np.nan]])), ("b", "b.csv", "1,1\n")],
        )
        with pytest.raises(DataError, match="non-finite"):
            load_dataset(manifest)

    def test_missing_file(self, tmp_path):
        manifest = tmp_path / "manifest.json"
        manifest.write_text(
            json.dumps({"dataset_id": "x", "classes": [{"label": "a", "file": "gone.csv"}]})
        )
        with pytest.raises(DataError, match="not found"):
            load_dataset(manifest)

    def test_missing_manifest(self, tmp_path):
        with pytest.raises(DataError, match="manifest"):
            load_dataset(tmp_path / "nope.json")

    def test_duplicate_labels_rejected(self, tmp_path):
        manifest = write_manifest(
            tmp_path, [("a", "a.csv", "1,0\n"), ("a", "b.csv", "0,1\n")]
        )
        with pytest.raises(DataError, match="duplicate"):
            load_dataset(manifest)

    def test_npy_float32_upcast(self, tmp_path):
        arr = np.array([[1, 2], [3, 4]], dtype=np.float32)
        manifest = write_manifest(tmp_path, [("a", "a.npy", arr), ("b", "b.csv", "5,6\n")])
        ds = load_dataset(manifest)
        assert ds.classes[0].vectors.dtype == np.float64
        np.testing.assert_array_equal(ds.classes[0].vectors, arr.astype(np.float64))

    def test_deterministic(self, tmp_path):
        manifest = write_manifest(
            tmp_path, [("a", "a.csv", "1,2\n3,4\n"), ("b", "b.csv", "5,6\n")]
        )
        d1 = load_dataset(manifest)
        d2 = load_dataset(manifest)
        for b1, b2 in zip(d1.classes, d2.classes):
            np.testing.assert_array_equal(b1.vectors, b2.vectors)


class TestBuildCache:
    def test_three_four_vector(self):
        ds = from_arrays("t", [("a", [[3.0, 4.0]]), ("b", [[1.0, 0.0]])])
        cache = build_cache(ds)
        np.testing.assert_allclose(cache.unit_vectors[0], [[0.6, 0.8]])
        np.testing.assert_allclose(cache.class_sums[0], [0.6, 0.8])
        assert cache.class_counts[0] == 1

    def test_identical_unit_vectors(self):
        ds = from_arrays("t", [("a", [[1.0, 0.0], [1.0, 0.0]]), ("b", [[0.0, 1.0]])])
        cache = build_cache(ds)
        np.testing.assert_allclose(cache.class_sums[0], [2.0, 0.0])
        assert cache.class_counts[0] == 2

    def test_orthogonal_unit_vectors(self):
        ds = from_arrays("t", [("a", [[1.0, 0.0], [0.0, 1.0]]), ("b", [[1.0, 1.0]])])
        cache = build_cache(ds)
        np.testing.assert_allclose(cache.class_sums[0], [1.0, 1.0])
        assert cache.class_counts[0] == 2

    def test_rows_unit_norm_and_sums_consistent(self):
        rng = np.random.default_rng(7)
        ds = from_arrays(
            "t", [(f"c{i}", rng.normal(size=(5, 6)) * 10) for i in range(3)]
        )
        cache = build_cache(ds)
        for u, s in zip(cache.unit_vectors, cache.class_sums):
            np.testing.assert_allclose(np.linalg.norm(u, axis=1), 1.0, atol=1e-6)
            np.testing.assert_allclose(u.sum(axis=0), s, atol=1e-6)


class TestCachePersistence:
    def make_cache(self):
        ds = from_arrays(
            "t",
            [("a", [[1.0, 0.0], [0.0, 1.0]]), ("b", [[3.0, 4.0]])],
        )
        return build_cache(ds)

    def test_round_trip_bit_exact(self, tmp_path):
        cache = self.make_cache()
        path = tmp_path / "c.bin"
        save_cache(cache, path)
        loaded = load_cache(path)
        assert loaded.labels == cache.labels
        assert loaded.class_counts == cache.class_counts
        for a, b in zip(loaded.unit_vectors, cache.unit_vectors):
            assert a.tobytes() == b.tobytes()
        for a, b in zip(loaded.class_sums, cache.class_sums):
            assert a.tobytes() == b.tobytes()

    def test_wrong_magic(self, tmp_path):
        path = tmp_path / "c.bin"
        path.write_bytes(b"NOTCACHE" + b"\x00" * 32)
        with pytest.raises(DataError, match="CDCACHE1"):
            load_cache(path)

    def test_truncated_file(self, tmp_path):
        cache = self.make_cache()
        path = tmp_path / "c.bin"
        save_cache(cache, path)
        blob = path.read_bytes()
        path.write_bytes(blob[: len(blob) - 7])
        with pytest.raises(DataError, match="checksum|truncated"):
            load_cache(path)

    def test_corrupted_byte(self, tmp_path):
        cache = self.make_cache()
        path = tmp_path / "c.bin"
        save_cache(cache, path)
        blob = bytearray(path.read_bytes())
        blob[20] ^= 0xFF
        path.write_bytes(bytes(blob))
        with pytest.raises(DataError, match="checksum"):
            load_cache(path)


class TestSaveDataset:
    @pytest.mark.parametrize("fmt", ["npy", "csv"])
    def test_round_trip(self, tmp_path, fmt):
        rng = np.random.default_rng(3)
        ds = from_arrays("rt", [(f"c{i}", rng.normal(size=(4, 3))) for i in range(2)])
        manifest = save_dataset(ds, tmp_path / fmt, fmt=fmt)
        loaded = load_dataset(manifest)
        assert loaded.dataset_id == "rt"
        assert loaded.labels() == ds.labels()
        for a, b in zip(loaded.classes, ds.classes):
            np.testing.assert_allclose(a.vectors, b.vectors, atol=1e-12)
