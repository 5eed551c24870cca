"""
Expert content validation: CVI, chance agreement and Cohen's kappa.

Relevance ratings (round 1) decide which items survive; clarity ratings
(round 2) are labelled only for survivors.  Ratings use a 1-5 agreement
scale and a rating of 4 or 5 counts as agreement.
"""

import csv
import io
from dataclasses import dataclass
from math import comb

from .errors import DegenerateChance, EaOutOfRange, MalformedCsv, TooFewExperts

AGREE_MIN = 4
RATING_RANGE = (1, 5)

CVI_EXCELLENT = 0.79  # strictly above
CVI_REVISION = 0.7  # strictly above
KAPPA_EXCELLENT = 0.74
KAPPA_GOOD = 0.6
KAPPA_FAIR = 0.40


def item_cvi(ratings):
    """Count of experts rating 4 or 5, and that count over the panel size."""
    ratings = list(ratings)
    if len(ratings) < 2:
        raise TooFewExperts(f"need at least 2 expert ratings, got {len(ratings)}")
    ea = sum(1 for r in ratings if r >= AGREE_MIN)
    return ea, ea / len(ratings)


def chance_agreement(n_experts, ea):
    """Binomial probability of exactly `ea` agreements out of `n_experts` fair coin flips."""
    if not 0 <= ea <= n_experts:
        raise EaOutOfRange(f"ea={ea} outside [0, {n_experts}]")
    return comb(n_experts, ea) * 0.5**n_experts


def kappa(cvi, pc):
    if pc >= 1.0:
        raise DegenerateChance("chance agreement of 1 leaves kappa undefined")
    return (cvi - pc) / (1.0 - pc)


def cvi_label(cvi):
    if cvi > CVI_EXCELLENT:
        return "Excellent"
    if cvi > CVI_REVISION:
        return "For Revision"
    return "Invalid"


def kappa_label(k, low="Invalid"):
    """
    Kappa band.  ``[0.59, 0.6)`` is folded into Fair; anything below 0.40
    gets `low` ("Invalid" for relevance, "Poor" for clarity).
    """
    if k >= KAPPA_EXCELLENT:
        return "Excellent"
    if k >= KAPPA_GOOD:
        return "Good"
    if k >= KAPPA_FAIR:
        return "Fair"
    return low


def classify_item(cvi, k):
    """
    Return ``(cvi_label, kappa_label, decision)``.

    An item is removed when its CVI falls in the Invalid band; kappa only
    refines the label.
    """
    cl = cvi_label(cvi)
    decision = "remove" if cl == "Invalid" else "keep"
    return cl, kappa_label(k), decision


@dataclass(frozen=True)
class ContentValidityRow:
    item_id: str
    ea: int
    cvi: float
    pc: float
    kappa: float
    cvi_label: str
    kappa_label: str
    decision: str
    clarity_kappa: float = None
    clarity_label: str = None
    factor_id: str = None


@dataclass(frozen=True)
class ExpertRatingSet:
    """Relevance and clarity ratings, one per expert per item."""

    item_ids: tuple
    expert_ids: tuple
    relevance: dict  # item_id -> tuple of ratings in expert order
    clarity: dict
    factors: dict = None  # item_id -> factor_id, optional

    def __post_init__(self):
        n = len(self.expert_ids)
        for item in self.item_ids:
            for dim in (self.relevance, self.clarity):
                r = dim[item]
                if len(r) != n:
                    raise ValueError(f"item {item!r} has {len(r)} ratings for {n} experts")
                if any(not RATING_RANGE[0] <= v <= RATING_RANGE[1] for v in r):
                    raise ValueError(f"item {item!r} has a rating outside 1..5")

    @property
    def n_experts(self):
        return len(self.expert_ids)


def _dropped_for_revision(items, factors, labels):
    """
    Items set aside because their factor already has two items that are
    Excellent on both CVI and kappa; only "For Revision" items are affected.
    """
    excellent = {}
    for item in items:
        if labels[item][:2] == ("Excellent", "Excellent"):
            f = factors.get(item)
            excellent[f] = excellent.get(f, 0) + 1
    return {
        item
        for item in items
        if item in factors and labels[item][0] == "For Revision" and excellent.get(factors[item], 0) >= 2
    }


def evaluate_content(ratings):
    """
    Round-1 rows for every item; clarity kappa and label for round-2 items.

    Decisions are ``keep``, ``remove`` (CVI Invalid) or ``drop`` (a "For
    Revision" item in a factor that already has two doubly-Excellent items;
    only applied when item factors are known).
    """
    n = ratings.n_experts
    stats, labels = {}, {}
    for item in ratings.item_ids:
        ea, cvi = item_cvi(ratings.relevance[item])
        pc = chance_agreement(n, ea)
        k = kappa(cvi, pc)
        stats[item] = (ea, cvi, pc, k)
        labels[item] = classify_item(cvi, k)
    factors = ratings.factors or {}
    dropped = _dropped_for_revision(ratings.item_ids, factors, labels)
    rows = []
    for item in ratings.item_ids:
        cl, kl, decision = labels[item]
        if item in dropped:
            decision = "drop"
        ck = clab = None
        if decision == "keep":
            cea, ccvi = item_cvi(ratings.clarity[item])
            ck = kappa(ccvi, chance_agreement(n, cea))
            clab = kappa_label(ck, low="Poor")
        rows.append(ContentValidityRow(item, *stats[item], cl, kl, decision, ck, clab, factors.get(item)))
    return rows


def parse_expert_ratings(csv_text):
    """
    Read ``expert_id,item_id,relevance,clarity[,factor_id]`` rows.

    Item order follows first appearance; expert order likewise.
    """
    reader = csv.DictReader(io.StringIO(csv_text))
    required = {"expert_id", "item_id", "relevance", "clarity"}
    if reader.fieldnames is None or not required <= {f.strip() for f in reader.fieldnames}:
        raise MalformedCsv(1, f"header must contain {sorted(required)}")
    items, experts = [], []
    rel, cla, factors = {}, {}, {}
    for lineno, row in enumerate(reader, start=2):
        row = {k.strip(): (v or "").strip() for k, v in row.items() if k is not None}
        try:
            e, i = row["expert_id"], row["item_id"]
            r, c = int(row["relevance"]), int(row["clarity"])
        except (KeyError, ValueError) as exc:
            raise MalformedCsv(lineno, str(exc)) from exc
        if i not in rel:
            items.append(i)
            rel[i], cla[i] = {}, {}
        if e not in experts:
            experts.append(e)
        if e in rel[i]:
            raise MalformedCsv(lineno, f"duplicate rating for expert {e!r}, item {i!r}")
        rel[i][e], cla[i][e] = r, c
        if row.get("factor_id"):
            factors[i] = row["factor_id"]
    for i in items:
        missing = [e for e in experts if e not in rel[i]]
        if missing:
            raise MalformedCsv(0, f"item {i!r} lacks ratings from {missing}")
    return ExpertRatingSet(
        item_ids=tuple(items),
        expert_ids=tuple(experts),
        relevance={i: tuple(rel[i][e] for e in experts) for i in items},
        clarity={i: tuple(cla[i][e] for e in experts) for i in items},
        factors=factors or None,
    )


def ratings_to_csv(ratings):
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    header = ["expert_id", "item_id", "relevance", "clarity"]
    if ratings.factors:
        header.append("factor_id")
    w.writerow(header)
    for item in ratings.item_ids:
        for j, e in enumerate(ratings.expert_ids):
            row = [e, item, ratings.relevance[item][j], ratings.clarity[item][j]]
            if ratings.factors:
                row.append(ratings.factors.get(item, ""))
            w.writerow(row)
    return buf.getvalue()
