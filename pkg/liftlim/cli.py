"""liftlim command line interface."""

import argparse
import logging
import sys
from typing import Callable, Dict, List, Optional, Tuple

from . import __version__
from .analyses import (
    check_base_model,
    check_coherence,
    compare_threads,
    deck_tower,
    density,
    fiber_model,
    lift_exists,
    pi0_report,
    pi1_membership,
    require_coherent,
    require_compatible,
    restrict_cofinal,
    restrict_model,
    shape_kernel_membership,
    special_case_note,
    stability_analysis,
    thread_from_subgroup,
    thread_meet,
    thread_report,
)
from .config import Settings
from .errors import (
    BudgetExceeded,
    CoherenceViolation,
    IncompatibleModel,
    LiftlimError,
    ParseError,
    SpecReferenceError,
)
from .report import MODEL_DISCLAIMER, AnalysisReport
from .specfile import SpecDocument, load_spec
from .templates import render
from .tower import BaseModel, IndexSequence, Thread
from .validators import (
    COMMANDS,
    REPORT_FORMATS,
    ValidationError,
    validate_budget,
    validate_command,
    validate_horizon,
    validate_indices,
    validate_report_format,
)
from .words import Word, parse_words

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_ANALYSIS = 1
EXIT_INPUT = 2
EXIT_COHERENCE = 3
EXIT_BUDGET = 4
EXIT_UNCERTIFIED = 5


# ============================================================================
# Command Handlers
# ============================================================================

# Commands that read the [base] section; its maps are checked against the
# bondings before any of them runs.
MODEL_COMMANDS = ("pi1", "pi0", "deck", "density", "thread-from", "restrict")


def _model(doc: SpecDocument) -> BaseModel:
    if doc.model is None:
        raise SpecReferenceError("base")
    return doc.model


def _other_thread(doc: SpecDocument, name: Optional[str]) -> Thread:
    if name is not None:
        if name not in doc.threads:
            raise SpecReferenceError(name)
        return doc.threads[name]
    if not doc.threads:
        raise SpecReferenceError("thread")
    return next(iter(doc.threads.values()))


def _require(value: Optional[str], flag: str, command: str) -> str:
    if not value:
        raise ValidationError(f"Command '{command}' needs {flag}")
    return value


def _single_word(text: str, model: BaseModel) -> Word:
    words = parse_words(text, model.group.alphabet)
    if len(words) != 1:
        raise ValidationError(f"--word takes exactly one word here, got {len(words)}")
    return words[0]


def run_check(doc: SpecDocument, args: argparse.Namespace, horizon: int) -> AnalysisReport:
    report = check_coherence(doc.tower, horizon)
    if doc.model is not None:
        model_report = check_base_model(doc.tower, doc.model)
        report.details["base_model"] = model_report.verdict
        report.details.update(model_report.details)
        report.witnesses.extend(model_report.witnesses)
        report.disclaimer = MODEL_DISCLAIMER
    return report


def run_classify(doc: SpecDocument, args: argparse.Namespace, horizon: int) -> AnalysisReport:
    return stability_analysis(doc.tower, horizon)


def run_fiber(doc: SpecDocument, args: argparse.Namespace, horizon: int) -> AnalysisReport:
    return fiber_model(doc.tower, horizon)


def run_pi1(doc: SpecDocument, args: argparse.Namespace, horizon: int) -> AnalysisReport:
    model = _model(doc)
    w = _single_word(_require(args.word, "--word", "pi1"), model)
    if args.shape_kernel:
        return shape_kernel_membership(doc.tower, model, w, horizon)
    return pi1_membership(doc.tower, model, w, horizon)


def run_pi0(doc: SpecDocument, args: argparse.Namespace, horizon: int) -> AnalysisReport:
    return pi0_report(doc.tower, _model(doc), horizon)


def run_deck(doc: SpecDocument, args: argparse.Namespace, horizon: int) -> AnalysisReport:
    return deck_tower(doc.tower, horizon, doc.model)


def run_density(doc: SpecDocument, args: argparse.Namespace, horizon: int) -> AnalysisReport:
    return density(doc.tower, _model(doc), horizon)


def run_meet(doc: SpecDocument, args: argparse.Namespace, horizon: int) -> AnalysisReport:
    other = _other_thread(doc, args.thread)
    meet = thread_meet(doc.tower, doc.tower.thread, other)
    report = thread_report("meet", meet, horizon=horizon)
    report.details["classification"] = stability_analysis(meet, horizon).verdict
    return report


def run_compare(doc: SpecDocument, args: argparse.Namespace, horizon: int) -> AnalysisReport:
    return compare_threads(doc.tower, doc.tower.thread, _other_thread(doc, args.thread), horizon)


def run_thread_from(doc: SpecDocument, args: argparse.Namespace, horizon: int) -> AnalysisReport:
    model = _model(doc)
    generators = parse_words(_require(args.word, "--word", "thread-from"), model.group.alphabet)
    tower = thread_from_subgroup(doc.tower, model, generators)
    return thread_report("thread-from", tower, special_case_note(tower, model, generators), horizon)


def run_lift(doc: SpecDocument, args: argparse.Namespace, horizon: int) -> AnalysisReport:
    target = load_spec(_require(args.target, "--target", "lift"), settings=doc.settings, context=doc)
    if target.level_map is None:
        raise SpecReferenceError("map")
    require_coherent(target.tower, horizon)
    report = lift_exists(doc.tower, target.tower, target.level_map, horizon)
    if target.unverified:
        report.details["target_unverified"] = list(target.unverified)
    return report


def run_restrict(doc: SpecDocument, args: argparse.Namespace, horizon: int) -> AnalysisReport:
    """Restricted thread, with the base model restricted alongside when there is one."""
    text = _require(args.indices, "--indices", "restrict")
    validate_indices(text)
    seq = IndexSequence.parse(text)
    restricted = restrict_cofinal(doc.tower, seq)
    report = thread_report("restrict", restricted, horizon=horizon)
    report.details["indices"] = text
    report.details["classification"] = stability_analysis(restricted, horizon).verdict
    if doc.model is not None:
        model = restrict_model(doc.model, doc.tower, seq)
        report.details["density"] = density(restricted, model, horizon).verdict
        if args.word:
            report.details["pi1"] = pi1_membership(restricted, model, _single_word(args.word, model), horizon).verdict
        report.disclaimer = MODEL_DISCLAIMER
    return report


HANDLERS: Dict[str, Callable[[SpecDocument, argparse.Namespace, int], AnalysisReport]] = {
    "check": run_check,
    "classify": run_classify,
    "fiber": run_fiber,
    "pi1": run_pi1,
    "pi0": run_pi0,
    "deck": run_deck,
    "density": run_density,
    "meet": run_meet,
    "compare": run_compare,
    "thread-from": run_thread_from,
    "lift": run_lift,
    "restrict": run_restrict,
}


# ============================================================================
# Dispatch
# ============================================================================

def run_command(doc: SpecDocument, command: str, args: argparse.Namespace,
                horizon: Optional[int] = None) -> Tuple[AnalysisReport, int]:
    """Run one command on a parsed document.

    ``check`` reports coherence and base model compatibility. Every other
    command first requires a coherent thread, and the commands that read the
    base model require its maps to commute with the bondings.

    Returns:
        The report and the exit code it maps to

    Raises:
        CoherenceViolation: If the thread is not coherent
        IncompatibleModel: If a base model map disagrees with a bonding
    """
    validate_command(command)
    horizon = horizon or doc.settings.default_horizon
    validate_horizon(horizon)
    unverified = list(doc.unverified)
    if command == "check":
        report = run_check(doc, args, horizon)
        code = EXIT_OK
        if report.verdict != "Coherent" or report.details.get("base_model") == "Incompatible":
            code = EXIT_COHERENCE
    else:
        require_coherent(doc.tower, horizon)
        if command in MODEL_COMMANDS and doc.model is not None:
            unverified += require_compatible(doc.tower, doc.model)
        report = HANDLERS[command](doc, args, horizon)
        code = EXIT_OK
        if getattr(args, "require_certified", False) and not report.certified:
            code = EXIT_UNCERTIFIED
    if unverified:
        extra = [note for note in report.details.get("unverified", []) if note not in unverified]
        report.details["unverified"] = unverified + extra
    return report, code


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="liftlim",
        description="Analyse inverse limits of covering spaces given as towers of groups.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("command", choices=COMMANDS, help="Analysis to run")
    parser.add_argument("specfile", help="Tower spec file")
    parser.add_argument("--horizon", type=int, help="Number of stages to examine")
    parser.add_argument("--word", help="Word (pi1, restrict) or comma separated generators (thread-from) in the base model")
    parser.add_argument("--shape-kernel", action="store_true",
                        help="pi1: test membership in the shape kernel (trivial thread) instead")
    parser.add_argument("--target", help="Target spec file for lift")
    parser.add_argument("--thread", help="Named [thread] section for meet and compare (default: the first)")
    parser.add_argument("--indices", help="Cofinal index sequence for restrict, e.g. '0,2,4,...'")
    parser.add_argument("--report", choices=REPORT_FORMATS, help="Report format")
    parser.add_argument("--require-certified", action="store_true",
                        help="Exit 5 when the verdict is only horizon-limited")
    parser.add_argument("--budget", type=int, help="Maximum number of cosets defined in enumeration")
    parser.add_argument("-v", "--verbose", action="store_true", help="Debug logging on stderr")
    return parser


def main(argv: Optional[List[str]] = None) -> int:
    """Entry point of the ``liftlim`` command."""
    args = build_parser().parse_args(argv)
    logging.basicConfig(
        level=logging.DEBUG if args.verbose else logging.WARNING,
        format="%(levelname)s %(name)s: %(message)s",
        stream=sys.stderr,
    )

    try:
        settings = Settings.from_env()
        if args.budget is not None:
            validate_budget(args.budget)
        if args.horizon is not None:
            validate_horizon(args.horizon)
        doc = load_spec(args.specfile, settings=settings, max_cosets=args.budget)
        report, code = run_command(doc, args.command, args, args.horizon)
        report_format = args.report or doc.settings.report_format
        validate_report_format(report_format)
        sys.stdout.write(render(report, report_format))
        return code

    except (ParseError, SpecReferenceError, ValidationError) as e:
        print(f"Input error: {e}", file=sys.stderr)
        return EXIT_INPUT
    except OSError as e:
        print(f"Cannot read spec: {e}", file=sys.stderr)
        return EXIT_INPUT
    except (CoherenceViolation, IncompatibleModel) as e:
        print(f"Coherence error: {e}", file=sys.stderr)
        return EXIT_COHERENCE
    except BudgetExceeded as e:
        print(f"Budget exceeded: {e}", file=sys.stderr)
        return EXIT_BUDGET
    except LiftlimError as e:
        print(f"Error: {e}", file=sys.stderr)
        return EXIT_ANALYSIS


if __name__ == "__main__":
    sys.exit(main())
