"""Analyses over towers of coverings."""

from .coherence import (
    check_coherence,
    require_coherent,
    check_base_model,
    require_compatible
)
from .stability import (
    stability_analysis,
    fiber_model
)
from .fundamental import (
    pi1_membership,
    shape_kernel_membership,
    pi0_report,
    trivial_thread
)
from .deck import (
    deck_tower
)
from .density import (
    density
)
from .threads import (
    thread_meet,
    thread_from_subgroup,
    compare_threads,
    special_case_note,
    thread_report
)
from .lifting import (
    lift_exists
)
from .cofinal import (
    restrict_cofinal,
    restrict_model
)

__all__ = [
    # Coherence
    "check_coherence",
    "require_coherent",
    "check_base_model",
    "require_compatible",
    # Stability
    "stability_analysis",
    "fiber_model",
    # Fundamental group
    "pi1_membership",
    "shape_kernel_membership",
    "pi0_report",
    "trivial_thread",
    # Deck
    "deck_tower",
    # Density
    "density",
    # Threads
    "thread_meet",
    "thread_from_subgroup",
    "compare_threads",
    "special_case_note",
    "thread_report",
    # Lifting
    "lift_exists",
    # Cofinal
    "restrict_cofinal",
    "restrict_model",
]
