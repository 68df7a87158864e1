"""Boolean verdicts tagged with how they were decided."""
from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum


class Confidence(str, Enum):
    EXACT = "EXACT"
    PROBABILISTIC = "PROBABILISTIC"
    SAMPLED = "SAMPLED"

    @staticmethod
    def combine(*tags: "Confidence") -> "Confidence":
        """Weakest tag wins: EXACT < PROBABILISTIC < SAMPLED."""
        order = [Confidence.EXACT, Confidence.PROBABILISTIC, Confidence.SAMPLED]
        worst = Confidence.EXACT
        for tag in tags:
            if order.index(tag) > order.index(worst):
                worst = tag
        return worst


@dataclass(frozen=True)
class Verdict:
    value: bool
    confidence: Confidence = Confidence.EXACT
    witness: dict | None = None
    detail: str = ""
    notes: tuple[str, ...] = field(default=())

    def __bool__(self) -> bool:
        return self.value

    @classmethod
    def all_of(cls, verdicts, detail: str = "") -> "Verdict":
        """Conjunction; the first failing verdict supplies the witness."""
        verdicts = list(verdicts)
        conf = Confidence.combine(*(v.confidence for v in verdicts))
        for v in verdicts:
            if not v.value:
                return cls(False, v.confidence, v.witness, v.detail or detail)
        return cls(True, conf, None, detail)
