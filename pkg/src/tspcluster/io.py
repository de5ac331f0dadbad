"""Bit-exact file formats: TSPE embeddings, TSPL labels, CSV, assignments, reports.

Binary layouts (all little-endian):

    TSPE:  magic "TSPE" | u32 version=1 | u64 rows | u64 cols | rows*cols f32 row-major
    TSPL:  magic "TSPL" | u32 version=1 | u64 count | count u32 labels

On disk values are 32-bit; readers widen to float64.  The label sentinel
0xFFFFFFFF marks unlabeled points and maps to -1 in memory.  Assignments are
plain text, one decimal integer per line.  Reports are JSON with sorted keys.
"""

import dataclasses
import json
import struct

import numpy as np

from ._validation import UNLABELED, check_embeddings, check_labels

EMBEDDING_MAGIC = b"TSPE"
LABEL_MAGIC = b"TSPL"
FORMAT_VERSION = 1

_LABEL_SENTINEL = 0xFFFFFFFF
_MAX_LABEL = _LABEL_SENTINEL - 1


class FileFormatError(ValueError):
    """Malformed input file; ``offset`` is the byte position of the problem."""

    def __init__(self, message, offset=0):
        super().__init__(f"{message} (byte offset {offset})")
        self.offset = offset


class BadMagicError(FileFormatError):
    pass


class VersionMismatchError(FileFormatError):
    pass


class TruncatedFileError(FileFormatError):
    pass


class NonFiniteValueError(FileFormatError):
    pass


class EmptyDataError(FileFormatError):
    pass


def _read_header(blob, magic, path):
    """Validate magic/version and return the u64 pair at offsets 8 and 16."""
    if len(blob) < 4 or blob[:4] != magic:
        raise BadMagicError(
            f"{path}: bad magic {blob[:4]!r}, expected {magic!r}", offset=0
        )
    if len(blob) < 8:
        raise TruncatedFileError(f"{path}: truncated header", offset=len(blob))
    (version,) = struct.unpack_from("<I", blob, 4)
    if version != FORMAT_VERSION:
        raise VersionMismatchError(
            f"{path}: unsupported version {version}, expected {FORMAT_VERSION}",
            offset=4,
        )
    if len(blob) < 24 and magic == EMBEDDING_MAGIC:
        raise TruncatedFileError(f"{path}: truncated header", offset=len(blob))
    if len(blob) < 16 and magic == LABEL_MAGIC:
        raise TruncatedFileError(f"{path}: truncated header", offset=len(blob))
    return blob


def write_embeddings(path, x):
    """Write a TSPE file.  Values are narrowed to float32 on disk."""
    x = check_embeddings(x)
    with np.errstate(over="ignore"):
        payload = x.astype("<f4")
    if not np.all(np.isfinite(payload)):
        raise ValueError("embeddings overflow the 32-bit on-disk format")
    header = EMBEDDING_MAGIC + struct.pack(
        "<IQQ", FORMAT_VERSION, x.shape[0], x.shape[1]
    )
    with open(path, "wb") as fh:
        fh.write(header)
        fh.write(payload.tobytes(order="C"))


def read_embeddings(path):
    """Read a TSPE file into an n x d float64 matrix."""
    with open(path, "rb") as fh:
        blob = fh.read()
    _read_header(blob, EMBEDDING_MAGIC, path)
    rows, cols = struct.unpack_from("<QQ", blob, 8)
    if rows == 0 or cols == 0:
        raise EmptyDataError(f"{path}: empty dataset ({rows} x {cols})", offset=8)
    expected = rows * cols * 4
    got = len(blob) - 24
    if got != expected:
        raise TruncatedFileError(
            f"{path}: payload has {got} bytes, expected {expected}",
            offset=24 + min(got, expected),
        )
    flat = np.frombuffer(blob, dtype="<f4", count=rows * cols, offset=24)
    bad = np.flatnonzero(~np.isfinite(flat))
    if bad.size:
        raise NonFiniteValueError(
            f"{path}: non-finite value at element {bad[0]}",
            offset=24 + 4 * int(bad[0]),
        )
    return flat.astype(np.float64).reshape(rows, cols)


def write_labels(path, y):
    """Write a TSPL file; -1 entries are stored as the 0xFFFFFFFF sentinel."""
    y = check_labels(y)
    if np.any(y > _MAX_LABEL):
        raise ValueError(f"label values must be <= {_MAX_LABEL}")
    payload = np.where(y == UNLABELED, _LABEL_SENTINEL, y).astype("<u4")
    header = LABEL_MAGIC + struct.pack("<IQ", FORMAT_VERSION, y.shape[0])
    with open(path, "wb") as fh:
        fh.write(header)
        fh.write(payload.tobytes())


def read_labels(path):
    """Read a TSPL file into an int64 vector; sentinel entries become -1."""
    with open(path, "rb") as fh:
        blob = fh.read()
    _read_header(blob, LABEL_MAGIC, path)
    (count,) = struct.unpack_from("<Q", blob, 8)
    if count == 0:
        raise EmptyDataError(f"{path}: empty labels", offset=8)
    expected = count * 4
    got = len(blob) - 16
    if got != expected:
        raise TruncatedFileError(
            f"{path}: payload has {got} bytes, expected {expected}",
            offset=16 + min(got, expected),
        )
    raw = np.frombuffer(blob, dtype="<u4", count=count, offset=16)
    return np.where(raw == _LABEL_SENTINEL, UNLABELED, raw.astype(np.int64))


def read_csv_embeddings(path, label_column=False):
    """Read a numeric CSV into (matrix, labels-or-None).

    A non-numeric first line is treated as a header and skipped.  With
    ``label_column=True`` the trailing column is parsed as integer labels.
    Values pass through float32 so CSV and TSPE of the same data agree
    exactly.  Ragged or non-numeric rows raise with their 1-based line
    number.
    """
    rows = []
    labels = []
    width = None
    with open(path, "r", encoding="utf-8") as fh:
        lines = fh.read().splitlines()
    start = 0
    if lines:
        try:
            [float(cell) for cell in lines[0].split(",")]
        except ValueError:
            start = 1
    for lineno, line in enumerate(lines[start:], start=start + 1):
        if not line.strip():
            continue
        cells = line.split(",")
        if width is None:
            width = len(cells)
            if label_column and width < 2:
                raise FileFormatError(
                    f"{path}: need at least 2 columns for a label column", offset=0
                )
        elif len(cells) != width:
            raise FileFormatError(
                f"{path}: ragged row at line {lineno}: "
                f"{len(cells)} columns, expected {width}"
            )
        try:
            values = [float(cell) for cell in cells]
        except ValueError:
            raise FileFormatError(
                f"{path}: non-numeric cell at line {lineno}"
            ) from None
        if label_column:
            lab = values[-1]
            if lab != int(lab):
                raise FileFormatError(
                    f"{path}: non-integer label at line {lineno}"
                )
            labels.append(int(lab))
            values = values[:-1]
        rows.append(values)
    if not rows:
        raise EmptyDataError(f"{path}: empty dataset", offset=0)
    x = np.asarray(rows, dtype=np.float64)
    if not np.all(np.isfinite(x)):
        raise NonFiniteValueError(f"{path}: non-finite value in CSV")
    x = x.astype(np.float32).astype(np.float64)
    y = np.asarray(labels, dtype=np.int64) if label_column else None
    return x, y


def write_assignments(path, assignments):
    """One decimal cluster index per line, in input row order."""
    assignments = check_labels(assignments, name="assignments")
    with open(path, "w", encoding="utf-8") as fh:
        for a in assignments:
            fh.write(f"{int(a)}\n")


def read_assignments(path):
    """Inverse of write_assignments."""
    values = []
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                values.append(int(line))
            except ValueError:
                raise FileFormatError(
                    f"{path}: non-integer assignment at line {lineno}"
                ) from None
    if not values:
        raise EmptyDataError(f"{path}: empty assignments", offset=0)
    return np.asarray(values, dtype=np.int64)


@dataclasses.dataclass
class EvalReport:
    """Full evaluation output of one pipeline run.

    ``confusion`` rows are ground-truth classes, columns predicted clusters,
    so each row sums to that class's point count.  ``nmi_normalization``
    records the normalizer convention so scores stay comparable across runs.
    """

    config: dict
    n_points: int
    n_clusters: int
    cluster_sizes: list
    acc: float = None
    nmi: float = None
    ari: float = None
    confusion: list = None
    per_point_consistency: dict = None
    nmi_normalization: str = "arithmetic"

    def validate(self):
        if self.acc is not None and not 0.0 <= self.acc <= 1.0:
            raise ValueError(f"acc out of range: {self.acc}")
        if self.nmi is not None and not 0.0 <= self.nmi <= 1.0:
            raise ValueError(f"nmi out of range: {self.nmi}")
        if self.ari is not None and not -1.0 <= self.ari <= 1.0:
            raise ValueError(f"ari out of range: {self.ari}")
        return self


def write_report(path, report):
    """Serialize an EvalReport as JSON with stable key ordering."""
    report.validate()
    payload = dataclasses.asdict(report)
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True)
        fh.write("\n")
