"""
Survey data and scale definitions.

A scale definition is an INI-style file::

    [scale]
    name = trust_ai_16
    min = 1
    max = 7

    [factor:understandability]
    items = u1, u2

    [criterion:trust]
    column = trust

    [criterion:trust_propensity]
    items = tp1, tp2

    [statements]
    u1 = I understand how the AI system works ...

Factor order follows section order.  A criterion is either a single
``column`` or the unweighted mean of several ``items``.
"""

import configparser
import csv
import io
from dataclasses import dataclass, field
from importlib import resources

import numpy as np

from .errors import EmptyDataset, MalformedCsv, MissingColumn, SpecInvalid, ZeroVariance

ID_COLUMNS = ("respondent_id", "id")


@dataclass(frozen=True)
class Criterion:
    name: str
    columns: tuple

    @property
    def is_composite(self):
        return len(self.columns) > 1


@dataclass(frozen=True)
class ScaleSpec:
    """Ordered factor -> item mapping plus declared criterion variables."""

    factors: tuple  # ((factor_id, (item_id, ...)), ...)
    scale_min: int = 1
    scale_max: int = 7
    criteria: tuple = ()
    name: str = "scale"
    statements: dict = field(default_factory=dict, compare=False)

    def __post_init__(self):
        if self.scale_min >= self.scale_max:
            raise SpecInvalid("scale_min must be below scale_max")
        if not self.factors:
            raise SpecInvalid("scale has no factors")
        seen = set()
        for fid, items in self.factors:
            if len(items) < 2:
                raise SpecInvalid(f"factor {fid!r} needs at least 2 items")
            for item in items:
                if item in seen:
                    raise SpecInvalid(f"item {item!r} assigned to more than one factor")
                seen.add(item)
        for crit in self.criteria:
            if crit.name in seen or seen.intersection(crit.columns):
                raise SpecInvalid(f"criterion {crit.name!r} overlaps scale items")

    @property
    def factor_ids(self):
        return [fid for fid, _ in self.factors]

    @property
    def item_ids(self):
        return [item for _, items in self.factors for item in items]

    def items_of(self, factor_id):
        for fid, items in self.factors:
            if fid == factor_id:
                return list(items)
        raise KeyError(factor_id)

    def item_indices(self, factor_id):
        ids = self.item_ids
        return [ids.index(i) for i in self.items_of(factor_id)]

    def criterion(self, name):
        for crit in self.criteria:
            if crit.name == name:
                return crit
        raise KeyError(name)

    @property
    def criterion_columns(self):
        cols = []
        for crit in self.criteria:
            cols.extend(c for c in crit.columns if c not in cols)
        return cols


def _split_list(value):
    return tuple(v.strip() for v in value.replace("\n", ",").split(",") if v.strip())


def parse_spec(text):
    """Parse scale-definition text (INI) into a :class:`ScaleSpec`."""
    cp = configparser.ConfigParser(interpolation=None)
    cp.optionxform = str
    try:
        cp.read_string(text)
    except configparser.Error as exc:
        raise SpecInvalid(str(exc)) from exc

    scale = cp["scale"] if cp.has_section("scale") else {}
    try:
        lo = int(scale.get("min", 1))
        hi = int(scale.get("max", 7))
    except ValueError as exc:
        raise SpecInvalid("scale bounds must be integers") from exc

    factors, criteria = [], []
    for section in cp.sections():
        kind, _, name = section.partition(":")
        if kind == "factor":
            if "items" not in cp[section]:
                raise SpecInvalid(f"[{section}] has no items")
            factors.append((name, _split_list(cp[section]["items"])))
        elif kind == "criterion":
            sec = cp[section]
            if "items" in sec:
                cols = _split_list(sec["items"])
            else:
                cols = (sec.get("column", name),)
            criteria.append(Criterion(name, cols))
    statements = dict(cp["statements"]) if cp.has_section("statements") else {}
    return ScaleSpec(
        factors=tuple(factors),
        scale_min=lo,
        scale_max=hi,
        criteria=tuple(criteria),
        name=scale.get("name", "scale"),
        statements=statements,
    )


def load_spec(path):
    with open(path, encoding="utf-8") as fh:
        return parse_spec(fh.read())


def bundled_spec(name="trust_ai_16"):
    """The 8-factor, 16-item trust instrument shipped with the package."""
    text = resources.files("scaleval").joinpath("data", f"{name}.spec").read_text("utf-8")
    return parse_spec(text)


@dataclass(frozen=True, eq=False)
class LikertMatrix:
    """Complete-case integer responses, respondents x items, in spec order."""

    item_ids: tuple
    responses: np.ndarray
    scale_min: int = 1
    scale_max: int = 7
    criteria: dict = field(default_factory=dict)  # raw criterion columns, name -> float array
    respondent_ids: tuple = None
    n_dropped: int = 0

    def __post_init__(self):
        r = np.asarray(self.responses)
        if r.ndim != 2 or r.shape[1] != len(self.item_ids):
            raise ValueError("responses must be (n_respondents, n_items)")
        if r.size and (r.min() < self.scale_min or r.max() > self.scale_max):
            raise ValueError("responses outside scale bounds")

    @property
    def n_respondents(self):
        return self.responses.shape[0]

    @property
    def n_items(self):
        return self.responses.shape[1]

    def columns(self, item_ids):
        idx = [self.item_ids.index(i) for i in item_ids]
        return self.responses[:, idx]

    def criterion_score(self, criterion):
        """Unweighted mean of a criterion's columns."""
        cols = [self.criteria[c] for c in criterion.columns]
        return np.mean(np.column_stack(cols), axis=1)

    def __eq__(self, other):
        if not isinstance(other, LikertMatrix):
            return NotImplemented
        return (
            self.item_ids == other.item_ids
            and self.scale_min == other.scale_min
            and self.scale_max == other.scale_max
            and self.respondent_ids == other.respondent_ids
            and np.array_equal(self.responses, other.responses)
            and self.criteria.keys() == other.criteria.keys()
            and all(np.array_equal(self.criteria[k], other.criteria[k]) for k in self.criteria)
        )


def _parse_int(token):
    token = token.strip()
    if not token:
        return None
    try:
        value = float(token)
    except ValueError:
        return None
    if not value.is_integer():
        return None
    return int(value)


def _parse_float(token):
    token = token.strip()
    if not token:
        return None
    try:
        value = float(token)
    except ValueError:
        return None
    return value if np.isfinite(value) else None


def parse_responses(csv_text, spec):
    """
    Read a response CSV into a :class:`LikertMatrix`.

    Rows with a missing, non-integer or out-of-range item response (or a
    missing value in a present criterion column) are dropped and counted in
    ``n_dropped``.  Columns are reordered to the spec's item order.
    """
    reader = csv.reader(io.StringIO(csv_text))
    try:
        header = next(reader)
    except StopIteration:
        raise EmptyDataset("response file is empty") from None
    except csv.Error as exc:
        raise MalformedCsv(1, str(exc)) from exc
    header = [h.strip() for h in header]
    if header and header[0].startswith("﻿"):
        header[0] = header[0][1:]
    pos = {name: i for i, name in enumerate(header)}

    for item in spec.item_ids:
        if item not in pos:
            raise MissingColumn(item)
    item_pos = [pos[i] for i in spec.item_ids]
    crit_cols = [c for c in spec.criterion_columns if c in pos]
    id_col = next((c for c in ID_COLUMNS if c in pos), None)

    rows, crit_rows, ids = [], [], []
    dropped = 0
    line = 1
    try:
        for record in reader:
            line += 1
            if not record or all(not t.strip() for t in record):
                continue
            if len(record) != len(header):
                raise MalformedCsv(line, f"expected {len(header)} fields, got {len(record)}")
            values = [_parse_int(record[i]) for i in item_pos]
            if any(v is None or v < spec.scale_min or v > spec.scale_max for v in values):
                dropped += 1
                continue
            cvals = [_parse_float(record[pos[c]]) for c in crit_cols]
            if any(v is None for v in cvals):
                dropped += 1
                continue
            rows.append(values)
            crit_rows.append(cvals)
            if id_col is not None:
                ids.append(record[pos[id_col]].strip())
    except csv.Error as exc:
        raise MalformedCsv(line, str(exc)) from exc

    if not rows:
        raise EmptyDataset(f"no complete rows ({dropped} dropped)")
    crit = np.array(crit_rows, dtype=float).reshape(len(rows), len(crit_cols))
    return LikertMatrix(
        item_ids=tuple(spec.item_ids),
        responses=np.array(rows, dtype=np.int64),
        scale_min=spec.scale_min,
        scale_max=spec.scale_max,
        criteria={c: crit[:, j] for j, c in enumerate(crit_cols)},
        respondent_ids=tuple(ids) if id_col is not None else None,
        n_dropped=dropped,
    )


def load_responses(path, spec):
    with open(path, encoding="utf-8", newline="") as fh:
        return parse_responses(fh.read(), spec)


def to_csv(data):
    """Serialize a :class:`LikertMatrix` to CSV text that parses back identically."""
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    crit_names = list(data.criteria)
    header = list(data.item_ids) + crit_names
    if data.respondent_ids is not None:
        header = ["respondent_id"] + header
    w.writerow(header)
    for i, row in enumerate(data.responses):
        out = [str(int(v)) for v in row] + [repr(float(data.criteria[c][i])) for c in crit_names]
        if data.respondent_ids is not None:
            out = [data.respondent_ids[i]] + out
        w.writerow(out)
    return buf.getvalue()


def _matrix(data):
    if isinstance(data, LikertMatrix):
        return np.asarray(data.responses, dtype=float), list(data.item_ids)
    x = np.asarray(data, dtype=float)
    return x, [f"v{j + 1}" for j in range(x.shape[1])]


def covariance_matrix(data):
    """Sample covariance (n - 1 denominator) of the item columns."""
    x, ids = _matrix(data)
    n = x.shape[0]
    if n < 3:
        raise EmptyDataset("need at least 3 respondents")
    xc = x - x.mean(axis=0)
    s = xc.T @ xc / (n - 1)
    s = 0.5 * (s + s.T)
    var = np.diag(s)
    for j, v in enumerate(var):
        if not v > 0:
            raise ZeroVariance(ids[j])
    return s


def correlation_matrix(data):
    """Pearson correlation matrix with an exact unit diagonal."""
    s = covariance_matrix(data)
    d = 1.0 / np.sqrt(np.diag(s))
    r = s * np.outer(d, d)
    r = np.clip(0.5 * (r + r.T), -1.0, 1.0)
    np.fill_diagonal(r, 1.0)
    return r


def cov_to_corr(s):
    d = 1.0 / np.sqrt(np.diag(s))
    r = s * np.outer(d, d)
    np.fill_diagonal(r, 1.0)
    return r


@dataclass(frozen=True)
class DescriptiveRow:
    item_id: str
    mode: int
    median: float
    mean: float


def descriptives(data):
    """Mode (smallest on ties), median and mean per item."""
    x, ids = _matrix(data)
    if x.size == 0:
        raise EmptyDataset("no responses")
    rows = []
    for j, item in enumerate(ids):
        col = x[:, j]
        values, counts = np.unique(col, return_counts=True)
        mode = values[np.argmax(counts)]  # unique() sorts, argmax takes the first max
        rows.append(DescriptiveRow(item, int(mode), float(np.median(col)), float(col.mean())))
    return rows
