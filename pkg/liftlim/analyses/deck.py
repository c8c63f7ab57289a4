"""Deck transformation groups of the stage coverings."""

import logging
from typing import Any, Dict, List, Optional

from ..errors import BudgetExceeded, NormalityViolation, UnsupportedBackend
from ..groups import AbelianGroup
from ..report import MODEL_DISCLAIMER, AnalysisReport, Certainty
from ..tower import BaseModel, Tower
from ..words import format_word
from .chains import STAGE_TEST, STATIONARY_CONSTANT, is_abelian_tower, tail_facts

logger = logging.getLogger(__name__)

ABELIAN_NORMAL = "abelian-normal"


def _transitive(t: Tower, m: BaseModel, i: int) -> Optional[bool]:
    """Whether ``phi_i(P) G_i`` is the whole stage group."""
    group, handle = t.group(i), t.subgroup(i)
    gens = list(m.map(i).images) + group.generators(handle)
    try:
        return group.includes(group.subgroup(gens), group.full())
    except (UnsupportedBackend, BudgetExceeded):
        return None


def deck_tower(t: Tower, horizon: Optional[int] = None, model: Optional[BaseModel] = None) -> AnalysisReport:
    """Quotients ``pi1(X_i)/G_i`` with their induced bondings.

    Raises:
        NormalityViolation: At the first stage whose thread entry is not
            normal, with the conjugate that escapes it
    """
    last = t.last_stage(horizon)
    stages: List[Dict[str, Any]] = []
    for i in range(last + 1):
        group, handle = t.group(i), t.subgroup(i)
        witness = group.normality_witness(handle)
        if witness is not None:
            raise NormalityViolation(i, format_word(witness))
        quotient = group.quotient(handle)
        row: Dict[str, Any] = {
            "stage": i,
            "order": quotient.get("order"),
            "abelian": quotient.get("abelian"),
        }
        if "structure" in quotient:
            row["structure"] = quotient["structure"]
        if i > 0:
            row["bonding"] = str(t.bonding(i - 1))
            if isinstance(group, AbelianGroup) and t.bonding(i - 1).is_identity():
                row["bonding_kind"] = "mod-reduction"
        if model is not None:
            row["acts_transitively"] = _transitive(t, model, i)
        stages.append(row)

    if t.system.tail is None:
        certainty = Certainty.certified(STAGE_TEST)
    elif is_abelian_tower(t):
        certainty = Certainty.certified(ABELIAN_NORMAL)
    else:
        facts = tail_facts(t)
        certainty = Certainty.certified(STATIONARY_CONSTANT) if facts.constant else Certainty.horizon_limited(last)

    details: Dict[str, Any] = {"limit": " <- ".join(_name(row) for row in stages)}
    if model is not None and all(row["acts_transitively"] for row in stages):
        details["action"] = "the base model acts freely and transitively on every stage fibre"
    logger.debug("deck tower with %d stages", len(stages))
    return AnalysisReport(
        command="deck",
        verdict="DeckTower",
        certainty=certainty,
        stages=stages,
        details=details,
        provenance="the deck group of a normal covering is pi1 of the stage modulo the thread entry",
        disclaimer=MODEL_DISCLAIMER if model is not None else None,
    )


def _name(row: Dict[str, Any]) -> str:
    if "structure" in row:
        return row["structure"]
    return f"order {row['order']}"
