import json
import struct

import numpy as np
import pytest

from tspcluster.io import (
    BadMagicError,
    EmptyDataError,
    EvalReport,
    FileFormatError,
    NonFiniteValueError,
    TruncatedFileError,
    VersionMismatchError,
    read_assignments,
    read_csv_embeddings,
    read_embeddings,
    read_labels,
    write_assignments,
    write_embeddings,
    write_labels,
    write_report,
)


class TestEmbeddingsRoundTrip:
    def test_values_identical(self, tmp_path):
        path = tmp_path / "m.tspe"
        x = np.array([[1.5, -2.25], [0.0, 3.5], [0.0009765625, 7.0]])
        write_embeddings(path, x)
        assert np.array_equal(read_embeddings(path), x)

    def test_bit_exact_on_disk(self, tmp_path):
        p1, p2 = tmp_path / "a.tspe", tmp_path / "b.tspe"
        rng = np.random.default_rng(0)
        x = rng.normal(size=(5, 4))
        write_embeddings(p1, x)
        write_embeddings(p2, read_embeddings(p1))
        assert p1.read_bytes() == p2.read_bytes()

    def test_float32_quantization_is_applied_once(self, tmp_path):
        path = tmp_path / "m.tspe"
        x = np.array([[0.1, 0.2]])
        write_embeddings(path, x)
        back = read_embeddings(path)
        assert np.array_equal(back, x.astype(np.float32).astype(np.float64))

    def test_header_layout(self, tmp_path):
        path = tmp_path / "m.tspe"
        write_embeddings(path, np.ones((3, 2)))
        blob = path.read_bytes()
        assert blob[:4] == b"TSPE"
        assert struct.unpack_from("<I", blob, 4)[0] == 1
        assert struct.unpack_from("<QQ", blob, 8) == (3, 2)
        assert len(blob) == 24 + 3 * 2 * 4


class TestEmbeddingsErrors:
    def test_bad_magic(self, tmp_path):
        path = tmp_path / "bad.tspe"
        path.write_bytes(b"XXXX" + b"\x00" * 24)
        with pytest.raises(BadMagicError) as err:
            read_embeddings(path)
        assert err.value.offset == 0

    def test_version_mismatch(self, tmp_path):
        path = tmp_path / "bad.tspe"
        path.write_bytes(b"TSPE" + struct.pack("<IQQ", 9, 1, 1) + b"\x00" * 4)
        with pytest.raises(VersionMismatchError) as err:
            read_embeddings(path)
        assert err.value.offset == 4

    def test_truncated_payload(self, tmp_path):
        path = tmp_path / "bad.tspe"
        path.write_bytes(b"TSPE" + struct.pack("<IQQ", 1, 2, 2) + b"\x00" * 8)
        with pytest.raises(TruncatedFileError):
            read_embeddings(path)

    def test_non_finite_value_offset(self, tmp_path):
        path = tmp_path / "bad.tspe"
        payload = np.array([1.0, np.inf, 2.0, 3.0], dtype="<f4").tobytes()
        path.write_bytes(b"TSPE" + struct.pack("<IQQ", 1, 2, 2) + payload)
        with pytest.raises(NonFiniteValueError) as err:
            read_embeddings(path)
        assert err.value.offset == 24 + 4

    def test_empty_dataset_rejected_on_read(self, tmp_path):
        path = tmp_path / "bad.tspe"
        path.write_bytes(b"TSPE" + struct.pack("<IQQ", 1, 0, 3))
        with pytest.raises(EmptyDataError, match="empty dataset"):
            read_embeddings(path)

    def test_empty_dataset_rejected_on_write(self, tmp_path):
        with pytest.raises(ValueError, match="empty dataset"):
            write_embeddings(tmp_path / "x.tspe", np.zeros((0, 3)))

    def test_float32_overflow_rejected_on_write(self, tmp_path):
        with pytest.raises(ValueError, match="32-bit"):
            write_embeddings(tmp_path / "x.tspe", np.array([[1e300]]))


class TestLabels:
    def test_round_trip_with_sentinel(self, tmp_path):
        path = tmp_path / "l.tspl"
        y = np.array([0, 1, 2, -1], dtype=np.int64)
        write_labels(path, y)
        assert np.array_equal(read_labels(path), y)
        assert b"\xff\xff\xff\xff" in path.read_bytes()

    def test_header_layout(self, tmp_path):
        path = tmp_path / "l.tspl"
        write_labels(path, np.array([5, 6]))
        blob = path.read_bytes()
        assert blob[:4] == b"TSPL"
        assert struct.unpack_from("<I", blob, 4)[0] == 1
        assert struct.unpack_from("<Q", blob, 8)[0] == 2
        assert len(blob) == 16 + 2 * 4

    def test_empty_labels_rejected(self, tmp_path):
        path = tmp_path / "l.tspl"
        path.write_bytes(b"TSPL" + struct.pack("<IQ", 1, 0))
        with pytest.raises(EmptyDataError, match="empty labels"):
            read_labels(path)

    def test_truncated_payload(self, tmp_path):
        path = tmp_path / "l.tspl"
        path.write_bytes(b"TSPL" + struct.pack("<IQ", 1, 3) + b"\x00" * 8)
        with pytest.raises(TruncatedFileError):
            read_labels(path)

    def test_bad_magic(self, tmp_path):
        path = tmp_path / "l.tspl"
        path.write_bytes(b"TSPE" + struct.pack("<IQ", 1, 1) + b"\x00" * 4)
        with pytest.raises(BadMagicError):
            read_labels(path)


class TestCsv:
    def test_basic_matrix(self, tmp_path):
        path = tmp_path / "m.csv"
        path.write_text("1.0,2.0\n3.0,4.0\n")
        x, labels = read_csv_embeddings(path)
        assert labels is None
        assert np.array_equal(x, np.array([[1.0, 2.0], [3.0, 4.0]]))

    def test_header_autodetection(self, tmp_path):
        path = tmp_path / "m.csv"
        path.write_text("a,b\n1.0,2.0\n")
        x, _ = read_csv_embeddings(path)
        assert x.shape == (1, 2)

    def test_ragged_row_names_line(self, tmp_path):
        path = tmp_path / "m.csv"
        path.write_text("1.0,2.0\n3.0\n")
        with pytest.raises(FileFormatError, match="line 2"):
            read_csv_embeddings(path)

    def test_non_numeric_cell_names_line(self, tmp_path):
        path = tmp_path / "m.csv"
        path.write_text("1.0,2.0\n3.0,oops\n")
        with pytest.raises(FileFormatError, match="line 2"):
            read_csv_embeddings(path)

    def test_matches_binary_format(self, tmp_path):
        rng = np.random.default_rng(1)
        x = rng.normal(size=(6, 3)).astype(np.float32)
        csv_path = tmp_path / "m.csv"
        csv_path.write_text(
            "\n".join(",".join(repr(float(v)) for v in row) for row in x) + "\n"
        )
        bin_path = tmp_path / "m.tspe"
        write_embeddings(bin_path, x.astype(np.float64))
        from_csv, _ = read_csv_embeddings(csv_path)
        from_bin = read_embeddings(bin_path)
        assert np.array_equal(from_csv, from_bin)

    def test_trailing_label_column(self, tmp_path):
        path = tmp_path / "m.csv"
        path.write_text("1.0,2.0,0\n3.0,4.0,1\n")
        x, labels = read_csv_embeddings(path, label_column=True)
        assert x.shape == (2, 2)
        assert np.array_equal(labels, np.array([0, 1]))

    def test_empty_csv_rejected(self, tmp_path):
        path = tmp_path / "m.csv"
        path.write_text("")
        with pytest.raises(EmptyDataError):
            read_csv_embeddings(path)


class TestAssignments:
    def test_round_trip(self, tmp_path):
        path = tmp_path / "a.txt"
        a = np.array([0, 3, 1, 1, 2])
        write_assignments(path, a)
        assert path.read_text() == "0\n3\n1\n1\n2\n"
        assert np.array_equal(read_assignments(path), a)

    def test_garbage_line_rejected(self, tmp_path):
        path = tmp_path / "a.txt"
        path.write_text("0\nnope\n")
        with pytest.raises(FileFormatError, match="line 2"):
            read_assignments(path)


class TestReport:
    def _report(self):
        return EvalReport(
            config={"command": "eval", "seed": 0},
            n_points=4,
            n_clusters=2,
            cluster_sizes=[2, 2],
            acc=1.0,
            nmi=1.0,
            ari=1.0,
            confusion=[[2, 0], [0, 2]],
        )

    def test_all_fields_present_and_sorted(self, tmp_path):
        path = tmp_path / "r.json"
        write_report(path, self._report())
        payload = json.loads(path.read_text())
        expected = {
            "config", "n_points", "n_clusters", "cluster_sizes", "acc",
            "nmi", "ari", "confusion", "per_point_consistency",
            "nmi_normalization",
        }
        assert set(payload) == expected
        assert payload["nmi_normalization"] == "arithmetic"
        keys = list(payload)
        assert keys == sorted(keys)

    def test_out_of_range_metric_rejected(self, tmp_path):
        report = self._report()
        report.acc = 1.5
        with pytest.raises(ValueError, match="acc"):
            write_report(tmp_path / "r.json", report)
