"""Reading and writing subjective-score CSV files.

Two layouts are accepted:

``long``
    one answer per row, header ``pvs_id,subject_id,score`` (extra columns
    are ignored; an optional ``M`` column declares the scale per row).
``wide``
    one item per row, ``pvs_id`` followed by its scores; blank cells are
    skipped so items may have different numbers of answers.
"""

import csv
import io
from dataclasses import dataclass
from pathlib import Path

from .core import DEFAULT_M, ScoreSample

__all__ = ["DataError", "Dataset", "parse_scores_csv", "write_scores_csv"]


class DataError(ValueError):
    """Malformed or out-of-range input data."""


@dataclass
class Dataset:
    samples: list
    M: int = DEFAULT_M
    source_path: str = ""

    def __post_init__(self):
        ids = [s.id for s in self.samples]
        if len(set(ids)) != len(ids):
            raise DataError("sample ids must be unique")
        if any(s.M != self.M for s in self.samples):
            raise DataError("all samples must share one scale")

    def __len__(self):
        return len(self.samples)

    def __iter__(self):
        return iter(self.samples)


def _parse_score(text, row_number, M):
    try:
        value = float(text)
    except ValueError:
        raise DataError(f"row {row_number}: score {text!r} is not a number") from None
    if value != int(value):
        raise DataError(f"row {row_number}: score {text!r} is not an integer")
    if not 1 <= value <= M:
        raise DataError(f"row {row_number}: score {int(value)} outside 1..{M}")
    return int(value)


def _parse_long(reader, M):
    header = next(reader, None)
    if header is None:
        raise DataError("empty file")
    header = [h.strip() for h in header]
    missing = {"pvs_id", "subject_id", "score"} - set(header)
    if missing:
        raise DataError(f"row 1: long format needs columns {sorted(missing)}")
    i_id, i_score = header.index("pvs_id"), header.index("score")
    i_m = header.index("M") if "M" in header else None
    scores = {}
    declared = set()
    for row_number, row in enumerate(reader, start=2):
        if not row or all(not cell.strip() for cell in row):
            continue
        if len(row) < len(header):
            raise DataError(f"row {row_number}: expected {len(header)} fields, got {len(row)}")
        row_m = M
        if i_m is not None:
            try:
                row_m = int(row[i_m])
            except ValueError:
                raise DataError(f"row {row_number}: bad M value {row[i_m]!r}") from None
            declared.add(row_m)
            if len(declared) > 1:
                raise DataError(f"row {row_number}: mixed M values {sorted(declared)}")
            if row_m != M:
                raise DataError(f"row {row_number}: M={row_m} disagrees with the requested M={M}")
        pvs = row[i_id].strip()
        if not pvs:
            raise DataError(f"row {row_number}: empty pvs_id")
        scores.setdefault(pvs, []).append(_parse_score(row[i_score].strip(), row_number, row_m))
    return scores


def _parse_wide(reader, M):
    header = next(reader, None)
    if header is None:
        raise DataError("empty file")
    if not header or header[0].strip() != "pvs_id":
        raise DataError("row 1: wide format must start with a pvs_id column")
    scores = {}
    for row_number, row in enumerate(reader, start=2):
        if not row or all(not cell.strip() for cell in row):
            continue
        pvs = row[0].strip()
        if not pvs:
            raise DataError(f"row {row_number}: empty pvs_id")
        if pvs in scores:
            raise DataError(f"row {row_number}: duplicate pvs_id {pvs!r}")
        values = [_parse_score(cell.strip(), row_number, M) for cell in row[1:] if cell.strip()]
        if not values:
            raise DataError(f"row {row_number}: no scores for {pvs!r}")
        scores[pvs] = values
    return scores


def parse_scores_csv(source, format="long", M=DEFAULT_M):
    """Load a :class:`Dataset` from a CSV path or an open text stream.

    Raises :class:`DataError` naming the offending row for anything that
    does not parse or falls outside ``1..M``.
    """
    if format not in ("long", "wide"):
        raise ValueError(f"format must be 'long' or 'wide', got {format!r}")
    if isinstance(source, (str, Path)):
        path = str(source)
        with open(source, newline="", encoding="utf-8") as handle:
            text = handle.read()
    else:
        path = getattr(source, "name", "<stream>")
        text = source.read()
    reader = csv.reader(io.StringIO(text))
    scores = _parse_long(reader, M) if format == "long" else _parse_wide(reader, M)
    if not scores:
        raise DataError("no score rows found")
    samples = [ScoreSample(values, M=M, id=pvs) for pvs, values in scores.items()]
    return Dataset(samples, M=M, source_path=path)


def write_scores_csv(samples, stream, format="long"):
    """Write samples in either layout; parses back with :func:`parse_scores_csv`."""
    writer = csv.writer(stream, lineterminator="\n")
    if format == "long":
        writer.writerow(["pvs_id", "subject_id", "score"])
        for sample in samples:
            for j, score in enumerate(sample.scores, start=1):
                writer.writerow([sample.id, f"s{j}", int(score)])
    elif format == "wide":
        width = max(s.n for s in samples)
        writer.writerow(["pvs_id"] + [f"s{j}" for j in range(1, width + 1)])
        for sample in samples:
            writer.writerow([sample.id] + [int(v) for v in sample.scores])
    else:
        raise ValueError(f"format must be 'long' or 'wide', got {format!r}")
