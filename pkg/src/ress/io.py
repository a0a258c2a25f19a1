"""Delimited matrix input, JSON configs and versioned report documents."""

from __future__ import annotations

import csv
import io
import json
import math
import os
from dataclasses import asdict, dataclass, field

import numpy as np

from .errors import ConfigError, DataError, ParseError
from .simulation import SimConfig

SCHEMA_VERSION = 1


@dataclass
class LoadedMatrix:
    values: np.ndarray
    names: list[str]
    labels: list[str] | None = None

    @property
    def n_t(self) -> int:
        return self.values.shape[0]

    @property
    def p(self) -> int:
        return self.values.shape[1]


def _guess_delimiter(path, first_line: str) -> str:
    ext = os.path.splitext(str(path))[1].lower()
    if ext in (".tsv", ".tab"):
        return "\t"
    if "\t" in first_line and "," not in first_line:
        return "\t"
    return ","


def _is_number(s: str) -> bool:
    try:
        float(s)
    except ValueError:
        return False
    return True


def load_matrix(path, delimiter=None, header=None, label_column=None) -> LoadedMatrix:
    """Read a delimited file with observations in rows and features in columns.

    Parameters
    ----------
    path : str or path-like
    delimiter : str, optional
        Defaults to tab for ``.tsv`` files or tab-only first lines, else comma.
    header : bool, optional
        Whether the first row holds column names; guessed when None (a
        header is assumed if any cell of the first row is not numeric).
    label_column : str or int, optional
        Group label column for two-sample data, by header name or 1-based
        position. It is removed from the numeric matrix.

    Raises
    ------
    ParseError
        Ragged rows, non-numeric or non-finite cells; carries 1-based
        file ``row`` and ``column``.
    """
    with open(path, newline="") as fh:
        text = fh.read()
    first = text.split("\n", 1)[0]
    if delimiter is None:
        delimiter = _guess_delimiter(path, first)
    rows = [
        (lineno, r)
        for lineno, r in enumerate(csv.reader(io.StringIO(text), delimiter=delimiter), start=1)
        if r and any(c.strip() for c in r)
    ]
    if not rows:
        raise ParseError("empty input file")

    width = len(rows[0][1])
    for lineno, r in rows:
        if len(r) != width:
            raise ParseError(f"expected {width} fields, found {len(r)}", row=lineno)

    label_idx = None
    if isinstance(label_column, int) or (isinstance(label_column, str) and label_column.isdigit()):
        label_idx = int(label_column) - 1
        if not 0 <= label_idx < width:
            raise ParseError(f"label column {label_column} out of range 1..{width}")

    if header is None:
        cells = [c for k, c in enumerate(rows[0][1]) if k != label_idx]
        header = not all(_is_number(c.strip()) for c in cells)
    names = None
    if header:
        names = [c.strip() for c in rows[0][1]]
        rows = rows[1:]
        if label_column is not None and label_idx is None:
            if label_column not in names:
                raise ParseError(f"label column {label_column!r} not found in header", row=1)
            label_idx = names.index(label_column)
    elif label_column is not None and label_idx is None:
        raise ParseError(f"label column {label_column!r} given by name but the file has no header")

    keep = [k for k in range(width) if k != label_idx]
    if names is None:
        names = [f"V{k + 1}" for k in range(width)]
    names = [names[k] for k in keep]

    values = np.empty((len(rows), len(keep)))
    labels = [] if label_idx is not None else None
    for i, (lineno, r) in enumerate(rows):
        if label_idx is not None:
            labels.append(r[label_idx].strip())
        for j, k in enumerate(keep):
            cell = r[k].strip()
            try:
                v = float(cell)
            except ValueError:
                raise ParseError(f"non-numeric value {cell!r}", row=lineno, column=k + 1) from None
            if not math.isfinite(v):
                raise ParseError(f"non-finite value {cell!r}", row=lineno, column=k + 1)
            values[i, j] = v
    if values.shape[0] == 0:
        raise ParseError("no data rows")
    return LoadedMatrix(values=values, names=names, labels=labels)


def split_groups(m: LoadedMatrix, groups=None):
    """Divide a labelled matrix into ``(x, z, (label_x, label_z))``.

    Without ``groups`` the labels must take exactly two values, ordered by
    first appearance.
    """
    if m.labels is None:
        raise DataError("two-sample analysis needs a label column")
    labels = np.array(m.labels)
    if groups is None:
        seen = list(dict.fromkeys(m.labels))
        if len(seen) != 2:
            raise DataError(f"expected exactly two group labels, found {len(seen)}: {seen[:10]}")
        groups = seen
    gx, gz = groups
    x, z = m.values[labels == gx], m.values[labels == gz]
    for g, a in ((gx, x), (gz, z)):
        if a.shape[0] == 0:
            raise DataError(f"group {g!r} has no observations")
    return x, z, (gx, gz)


def load_config(path) -> SimConfig:
    try:
        with open(path) as fh:
            d = json.load(fh)
    except json.JSONDecodeError as exc:
        raise ConfigError("<root>", f"invalid JSON: {exc}") from None
    return SimConfig.from_dict(d)


def _num(x):
    """JSON-safe float: +inf/nan become None."""
    x = float(x)
    return x if math.isfinite(x) else None


@dataclass
class AnalysisReport:
    """Result of one ``analyze`` run; ``threshold`` None means +infinity."""

    mode: str
    method: str
    alpha: float
    seed: int
    n_obs: list[int]
    p: int
    threshold: float | None
    rejected: list[int]  # 1-based
    rejected_names: list[str]
    curve: list[list[float]]
    features: dict[str, list] = field(default_factory=dict)
    split: dict | None = None
    bootstrap_b: int | None = None
    groups: list[str] | None = None
    timing: float | None = None
    schema_version: int = SCHEMA_VERSION

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, d: dict) -> "AnalysisReport":
        if d.get("schema_version") != SCHEMA_VERSION:
            raise DataError(f"unsupported report schema version {d.get('schema_version')!r}")
        return cls(**d)

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, allow_nan=False) + "\n"

    @classmethod
    def from_json(cls, text: str) -> "AnalysisReport":
        return cls.from_dict(json.loads(text))

    def to_csv(self) -> str:
        buf = io.StringIO()
        cols = list(self.features)
        wr = csv.writer(buf, lineterminator="\n")
        wr.writerow(["index", *cols, "rejected"])
        rej = set(self.rejected)
        n = len(self.features.get("name", []))
        for j in range(n):
            wr.writerow([j + 1, *(_fmt(self.features[c][j]) for c in cols), int(j + 1 in rej)])
        return buf.getvalue()


def _fmt(v):
    if isinstance(v, float):
        return repr(v)
    return v


def rows_to_csv(rows: list[dict], fieldnames=None) -> str:
    buf = io.StringIO()
    fieldnames = fieldnames or (list(rows[0]) if rows else None)
    if fieldnames:
        wr = csv.DictWriter(buf, fieldnames=fieldnames, lineterminator="\n")
        wr.writeheader()
        for r in rows:
            wr.writerow({k: _fmt(v) for k, v in r.items()})
    return buf.getvalue()


def dumps(obj) -> str:
    return json.dumps(obj, indent=2, allow_nan=False) + "\n"
