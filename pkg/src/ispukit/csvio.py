"""CSV surfaces shared by the library and the command line.

Stream files:         index,x,y,z[,label]        one acquisition per row
Feature dumps:        f00..f29,window_index[,label]
Classification logs:  window_index,label,prob0..prob4[,true_label]

Floats are written in shortest round-trip decimal form so replaying a file
is byte-deterministic.
"""

import csv

from .errors import StreamParseError
from .features import VECTOR_LENGTH, Acquisition, feature_column_names
from .labels import ClassLabel

STREAM_HEADER = ("index", "x", "y", "z")


def write_stream_csv(rows, fh, with_labels: bool = True) -> int:
    """Write (index, x, y, z, label) tuples; returns the row count."""
    writer = csv.writer(fh, lineterminator="\n")
    writer.writerow(STREAM_HEADER + ("label",) if with_labels else STREAM_HEADER)
    count = 0
    for index, x, y, z, label in rows:
        if with_labels:
            writer.writerow((index, x, y, z, int(label)))
        else:
            writer.writerow((index, x, y, z))
        count += 1
    return count


def read_stream_csv(fh):
    """Yield (Acquisition, label-or-None) rows, validating as it goes.

    Raises StreamParseError with the 1-based line number on any malformed
    header or row.
    """
    reader = csv.reader(fh)
    try:
        header = next(reader)
    except StopIteration:
        raise StreamParseError("empty stream file, expected a header", 1) from None
    header = [h.strip() for h in header]
    if tuple(header[:4]) != STREAM_HEADER:
        raise StreamParseError(
            f"header must start with {','.join(STREAM_HEADER)}, got {','.join(header)}", 1
        )
    labeled = len(header) > 4 and header[4] == "label"
    for line_no, row in enumerate(reader, start=2):
        if not row:
            continue
        try:
            index, x, y, z = (int(v) for v in row[:4])
            label = ClassLabel(int(row[4])) if labeled else None
            acq = Acquisition(index, x, y, z)
        except (ValueError, IndexError) as exc:
            raise StreamParseError(str(exc), line_no) from exc
        yield acq, label


def write_features_csv(rows, fh, with_labels: bool) -> int:
    """Write (window_index, values, label-or-None) feature rows."""
    writer = csv.writer(fh, lineterminator="\n")
    header = feature_column_names() + ["window_index"]
    if with_labels:
        header.append("label")
    writer.writerow(header)
    count = 0
    for window_index, values, label in rows:
        row = [repr(float(v)) for v in values] + [window_index]
        if with_labels:
            row.append(int(label))
        writer.writerow(row)
        count += 1
    return count


def read_features_csv(fh):
    """Yield (window_index, 30 floats, label-or-None) from a feature dump."""
    reader = csv.reader(fh)
    try:
        header = next(reader)
    except StopIteration:
        raise StreamParseError("empty feature file, expected a header", 1) from None
    header = [h.strip() for h in header]
    expected = feature_column_names()
    if header[:VECTOR_LENGTH] != expected or "window_index" not in header:
        raise StreamParseError(
            "header must carry f00..f29 and window_index", 1
        )
    windex_col = header.index("window_index")
    label_col = header.index("label") if "label" in header else None
    for line_no, row in enumerate(reader, start=2):
        if not row:
            continue
        try:
            values = [float(v) for v in row[:VECTOR_LENGTH]]
            window_index = int(row[windex_col])
            label = ClassLabel(int(row[label_col])) if label_col is not None else None
        except (ValueError, IndexError) as exc:
            raise StreamParseError(str(exc), line_no) from exc
        yield window_index, values, label


def is_feature_header(header_line: str) -> bool:
    """Distinguish a feature dump from a raw stream by its header row."""
    return header_line.split(",")[0].strip() == "f00"


def write_classification_log(events, fh, with_truth: bool) -> int:
    """Write classification events: (window_index, label, probs, true-or-None)."""
    writer = csv.writer(fh, lineterminator="\n")
    header = ["window_index", "label"] + [f"prob{i}" for i in range(5)]
    if with_truth:
        header.append("true_label")
    writer.writerow(header)
    count = 0
    for window_index, label, probs, truth in events:
        row = [window_index, int(label)] + [repr(float(p)) for p in probs]
        if with_truth:
            row.append(int(truth))
        writer.writerow(row)
        count += 1
    return count
