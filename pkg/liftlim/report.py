"""Report models shared by every analysis."""

from typing import Any, Dict, List, Literal, Optional

from pydantic import BaseModel, Field

SCHEMA = "liftlim-report/1"

MODEL_DISCLAIMER = (
    "Answers are relative to the supplied base model; for spaces whose "
    "fundamental group is not finitely presented the model may differ from "
    "the fundamental group of the limit."
)


class Certainty(BaseModel):
    """Certified verdicts name their rule, horizon-limited ones their horizon."""

    kind: Literal["Certified", "HorizonLimited"]
    rule: Optional[str] = None
    horizon: Optional[int] = None

    @classmethod
    def certified(cls, rule: str) -> "Certainty":
        return cls(kind="Certified", rule=rule)

    @classmethod
    def horizon_limited(cls, horizon: int) -> "Certainty":
        return cls(kind="HorizonLimited", horizon=horizon)

    @property
    def is_certified(self) -> bool:
        return self.kind == "Certified"

    def __str__(self) -> str:
        if self.is_certified:
            return f"Certified ({self.rule})"
        return f"HorizonLimited({self.horizon})"


class AnalysisReport(BaseModel):
    """Outcome of one analysis command."""

    command: str
    verdict: str
    certainty: Certainty
    witnesses: List[Dict[str, Any]] = Field(default_factory=list)
    stages: List[Dict[str, Any]] = Field(default_factory=list)
    provenance: str = ""
    details: Dict[str, Any] = Field(default_factory=dict)
    disclaimer: Optional[str] = None

    @property
    def certified(self) -> bool:
        return self.certainty.is_certified

    def document(self) -> Dict[str, Any]:
        """Plain mapping for structured output, schema stamp first."""
        data = {"schema": SCHEMA}
        data.update(self.model_dump(exclude_none=True))
        return data
