"""Entity and relation kinds shared across modules."""

from enum import Enum


class EntityKind(str, Enum):
    CONDITION = "condition"
    TREATMENT = "treatment"
    SYMPTOM = "symptom"
    GENETIC_MARKER = "genetic_marker"
    NUTRIENT = "nutrient"


class RelKind(str, Enum):
    TREATS = "TREATS"
    HAS_SYMPTOM = "HAS_SYMPTOM"
    ASSOCIATED_GENE = "ASSOCIATED_GENE"
    INTERACTS_WITH = "INTERACTS_WITH"
    CONTRAINDICATED_WITH = "CONTRAINDICATED_WITH"
    ASSOCIATED_WITH = "ASSOCIATED_WITH"


# Keyword table for relation intent. Order matters only within a single term;
# across terms, the first term (in query order) that fires wins.
# Terms arrive stemmed, so patterns are written against stems. A trailing '*'
# is a prefix match on the term or its stem; otherwise the match is exact.
DEFAULT_TRIGGERS: tuple[tuple[str, RelKind], ...] = (
    ("contraind*", RelKind.CONTRAINDICATED_WITH),
    ("treat*", RelKind.TREATS),
    ("symptom*", RelKind.HAS_SYMPTOM),
    ("sign", RelKind.HAS_SYMPTOM),
    ("genet*", RelKind.ASSOCIATED_GENE),
    ("gene", RelKind.ASSOCIATED_GENE),
    ("herit*", RelKind.ASSOCIATED_GENE),
    ("interact*", RelKind.INTERACTS_WITH),
)
