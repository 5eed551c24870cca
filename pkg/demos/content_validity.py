"""
Content validity from an expert panel
=====================================

Seven experts rate each candidate item for relevance on a 1..5 scale.  An
item counts as endorsed by an expert who answers 4 or 5.  The index of
content validity is the endorsed share; a binomial chance term turns it
into a kappa.
"""

from scaleval.content import ExpertRatingSet, chance_agreement, evaluate_content, item_cvi, kappa

###############################################################################
# One item, six of seven experts in agreement.

ea, cvi = item_cvi([5, 4, 5, 4, 4, 5, 2])
pc = chance_agreement(7, ea)
print(f"EA={ea}  CVI={cvi:.3f}  PC={pc:.3f}  kappa={kappa(cvi, pc):.3f}")

###############################################################################
# A small panel over two factors.  Items whose CVI falls in the revision band
# are dropped when their factor already holds two items that are excellent on
# both CVI and kappa; clarity is only scored for the items that survive.

relevance = {
    "a1": [5] * 7,
    "a2": [5] * 6 + [2],
    "a3": [5] * 5 + [2, 2],
    "b1": [4] * 5 + [1, 1],
    "b2": [4] * 3 + [1] * 4,
}
clarity = {item: [5] * 7 for item in relevance}
ratings = ExpertRatingSet(
    expert_ids=tuple(f"e{i}" for i in range(1, 8)),
    item_ids=tuple(relevance),
    relevance=relevance,
    clarity=clarity,
    factors={"a1": "A", "a2": "A", "a3": "A", "b1": "B", "b2": "B"},
)
for row in evaluate_content(ratings):
    print(f"{row.item_id:<4}{row.cvi:.3f}  {row.cvi_label:<13}{row.kappa_label:<10}{row.decision}")
