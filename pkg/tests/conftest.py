import numpy as np
import pytest

from scaleval.content import ExpertRatingSet
from scaleval.data import bundled_spec

# (factor, item, EA, CVI, PC, kappa, CVI label, kappa label, clarity label or "")
# Published expert review of the 40 candidate items, seven experts.
CONTENT_TABLE = [
    ("understandability", "u1", 7, "1.000", "0.008", "1.000", "Excellent", "Excellent", "Excellent"),
    ("understandability", "u2", 6, "0.857", "0.055", "0.849", "Excellent", "Excellent", "Excellent"),
    ("understandability", "u3", 1, "0.143", "0.055", "0.093", "Invalid", "Invalid", ""),
    ("understandability", "u4", 4, "0.571", "0.273", "0.410", "Invalid", "Fair", ""),
    ("understandability", "u5", 3, "0.429", "0.273", "0.214", "Invalid", "Invalid", ""),
    ("technical_competence", "tc1", 6, "0.857", "0.055", "0.849", "Excellent", "Excellent", "Excellent"),
    ("technical_competence", "tc2", 5, "0.714", "0.164", "0.658", "For Revision", "Good", "Poor"),
    ("technical_competence", "tc3", 3, "0.429", "0.273", "0.214", "Invalid", "Invalid", ""),
    ("technical_competence", "tc4", 5, "0.714", "0.164", "0.658", "For Revision", "Good", "Excellent"),
    ("technical_competence", "tc5", 4, "0.571", "0.273", "0.410", "Invalid", "Fair", ""),
    ("reliability", "r1", 6, "0.857", "0.055", "0.849", "Excellent", "Excellent", "Fair"),
    ("reliability", "r2", 5, "0.714", "0.164", "0.658", "For Revision", "Good", "Excellent"),
    ("reliability", "r3", 5, "0.714", "0.164", "0.658", "For Revision", "Good", "Poor"),
    ("reliability", "r4", 2, "0.286", "0.164", "0.146", "Invalid", "Invalid", ""),
    ("reliability", "r5", 4, "0.571", "0.273", "0.410", "Invalid", "Fair", ""),
    ("helpfulness", "h1", 7, "1.000", "0.008", "1.000", "Excellent", "Excellent", "Excellent"),
    ("helpfulness", "h2", 6, "0.857", "0.055", "0.849", "Excellent", "Excellent", "Good"),
    ("helpfulness", "h3", 3, "0.429", "0.273", "0.214", "Invalid", "Invalid", ""),
    ("helpfulness", "h4", 1, "0.143", "0.055", "0.093", "Invalid", "Invalid", ""),
    ("helpfulness", "h5", 4, "0.571", "0.273", "0.410", "Invalid", "Fair", ""),
    ("personal_attachment", "pa1", 7, "1.000", "0.008", "1.000", "Excellent", "Excellent", "Excellent"),
    ("personal_attachment", "pa2", 6, "0.857", "0.055", "0.849", "Excellent", "Excellent", "Good"),
    ("personal_attachment", "pa3", 5, "0.714", "0.164", "0.658", "For Revision", "Good", ""),
    ("personal_attachment", "pa4", 4, "0.571", "0.273", "0.410", "Invalid", "Fair", ""),
    ("personal_attachment", "pa5", 3, "0.429", "0.273", "0.214", "Invalid", "Invalid", ""),
    ("user_autonomy", "ua1", 7, "1.000", "0.008", "1.000", "Excellent", "Excellent", "Excellent"),
    ("user_autonomy", "ua2", 6, "0.857", "0.055", "0.849", "Excellent", "Excellent", "Excellent"),
    ("user_autonomy", "ua3", 7, "1.000", "0.008", "1.000", "Excellent", "Excellent", "Excellent"),
    ("user_autonomy", "ua4", 5, "0.714", "0.164", "0.658", "For Revision", "Good", ""),
    ("user_autonomy", "ua5", 4, "0.571", "0.273", "0.410", "Invalid", "Fair", ""),
    ("faith", "f1", 6, "0.857", "0.055", "0.849", "Excellent", "Excellent", "Fair"),
    ("faith", "f2", 6, "0.857", "0.055", "0.849", "Excellent", "Excellent", "Excellent"),
    ("faith", "f3", 7, "1.000", "0.008", "1.000", "Excellent", "Excellent", "Excellent"),
    ("faith", "f4", 4, "0.571", "0.273", "0.410", "Invalid", "Fair", ""),
    ("faith", "f5", 5, "0.714", "0.164", "0.658", "For Revision", "Good", ""),
    ("institution_credibility", "ic1", 6, "0.857", "0.055", "0.849", "Excellent", "Excellent", "Good"),
    ("institution_credibility", "ic2", 6, "0.857", "0.055", "0.849", "Excellent", "Excellent", "Good"),
    ("institution_credibility", "ic3", 1, "0.143", "0.055", "0.093", "Invalid", "Invalid", ""),
    ("institution_credibility", "ic4", 4, "0.571", "0.273", "0.410", "Invalid", "Fair", ""),
    ("institution_credibility", "ic5", 5, "0.714", "0.164", "0.658", "For Revision", "Good", ""),
]

# clarity EA that lands in each published clarity band (7 experts)
CLARITY_EA = {"Excellent": 7, "Good": 5, "Fair": 4, "Poor": 3, "": 6}

N_EXPERTS = 7


def ratings_with_ea(ea, n=N_EXPERTS):
    """A rating vector with exactly `ea` agreements, mixing 4s/5s and 1-3s."""
    agree = [5 if j % 2 == 0 else 4 for j in range(ea)]
    disagree = [1 + (j % 3) for j in range(n - ea)]
    return tuple(agree + disagree)


def build_rating_set(table=CONTENT_TABLE, n=N_EXPERTS):
    items = tuple(row[1] for row in table)
    return ExpertRatingSet(
        item_ids=items,
        expert_ids=tuple(f"e{j + 1}" for j in range(n)),
        relevance={row[1]: ratings_with_ea(row[2], n) for row in table},
        clarity={row[1]: ratings_with_ea(CLARITY_EA[row[8]], n) for row in table},
        factors={row[1]: row[0] for row in table},
    )


@pytest.fixture
def content_ratings():
    return build_rating_set()


@pytest.fixture(scope="session")
def spec():
    return bundled_spec()


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


# -- acceptance summary -------------------------------------------------------

ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for line in ACCEPTANCE_LINES:
        terminalreporter.write_line(line)
