"""Tests for the command line interface."""

import pytest
import yaml

from conftest import FIXTURES, SPECS
from liftlim.cli import (
    EXIT_COHERENCE,
    EXIT_INPUT,
    EXIT_OK,
    EXIT_UNCERTIFIED,
    HANDLERS,
    main,
)
from liftlim.validators import COMMANDS

DYADIC = str(SPECS / "dyadic-solenoid.spec")


@pytest.fixture(autouse=True)
def clean_environment(monkeypatch):
    monkeypatch.delenv("LIFTLIM_DEFAULT_HORIZON", raising=False)
    monkeypatch.delenv("LIFTLIM_MAX_COSETS", raising=False)


def run(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def test_every_command_has_a_handler():
    assert set(HANDLERS) == set(COMMANDS)


def test_classify(capsys):
    code, out, _ = run(capsys, "classify", DYADIC, "--horizon", "10")
    assert code == EXIT_OK
    assert out.startswith("classify: StrictLifting")
    assert "Certified (stationary-propagation)" in out


def test_pi1(capsys):
    code, out, _ = run(capsys, "pi1", DYADIC, "--word", "a^4")
    assert code == EXIT_OK
    assert "RejectedAtStage(3)" in out


def test_pi1_needs_a_word(capsys):
    code, _, err = run(capsys, "pi1", DYADIC)
    assert code == EXIT_INPUT
    assert "--word" in err


def test_structured_report_is_deterministic(capsys):
    _, first, _ = run(capsys, "density", DYADIC, "--report", "structured")
    _, second, _ = run(capsys, "density", DYADIC, "--report", "structured")
    assert first == second
    assert first.startswith("schema: liftlim-report/1")
    document = yaml.safe_load(first)
    assert document["verdict"] == "Dense(stagewise)"
    assert document["certainty"] == {"kind": "Certified", "rule": "stagewise"}


@pytest.mark.parametrize("command", ["check", "classify"])
def test_incoherent_thread(capsys, command):
    code, _, _ = run(capsys, command, str(FIXTURES / "incoherent.spec"))
    assert code == EXIT_COHERENCE


def test_require_certified(capsys):
    spec = str(FIXTURES / "prefix-dyadic.spec")
    assert run(capsys, "classify", spec)[0] == EXIT_OK
    code, out, _ = run(capsys, "classify", spec, "--require-certified")
    assert code == EXIT_UNCERTIFIED
    assert "HorizonLimited" in out


@pytest.mark.parametrize(
    "argv",
    [
        ["classify", str(FIXTURES / "malformed.spec")],
        ["classify", str(FIXTURES / "undefined.spec")],
        ["classify", DYADIC, "--budget", "0"],
        ["classify", DYADIC, "--horizon", "0"],
        ["classify", str(FIXTURES / "missing.spec")],
        ["restrict", DYADIC, "--indices", "4,2"],
    ],
)
def test_input_errors(capsys, argv):
    code, out, err = run(capsys, *argv)
    assert code == EXIT_INPUT
    assert out == ""
    assert err


def test_lift(capsys):
    code, out, _ = run(capsys, "lift", DYADIC, "--target", str(SPECS / "triadic-solenoid.spec"))
    assert code == EXIT_OK
    assert "lift: Obstructed(1)" in out


def test_restrict(capsys):
    code, out, _ = run(capsys, "restrict", DYADIC, "--indices", "0,2,4,...", "--horizon", "3")
    assert code == EXIT_OK
    assert "restrict: Thread" in out
    assert "thread=16Z" in out


def test_meet_and_compare(capsys):
    code, out, _ = run(capsys, "meet", DYADIC, "--thread", "triadic", "--horizon", "2")
    assert code == EXIT_OK
    assert "thread=36Z" in out
    code, out, _ = run(capsys, "compare", DYADIC)
    assert "NotIncluded(1)" in out


def test_unknown_thread(capsys):
    code, _, _ = run(capsys, "compare", DYADIC, "--thread", "pentadic")
    assert code == EXIT_INPUT


def test_thread_from(capsys):
    code, out, _ = run(capsys, "thread-from", DYADIC, "--word", "a^2", "--horizon", "2")
    assert code == EXIT_OK
    assert "thread=2Z" in out
    assert "note:" in out


def test_environment_horizon(capsys, monkeypatch):
    monkeypatch.setenv("LIFTLIM_DEFAULT_HORIZON", "3")
    _, out, _ = run(capsys, "fiber", DYADIC, "--report", "structured")
    assert len(yaml.safe_load(out)["details"]["counts"]) == 4

    monkeypatch.setenv("LIFTLIM_DEFAULT_HORIZON", "many")
    assert run(capsys, "fiber", DYADIC)[0] == EXIT_INPUT


# ============================================================================
# Golden reports
# ============================================================================

GOLDEN = sorted((FIXTURES / "golden").glob("*.yaml"))


def assert_subset(expected, actual, path="report"):
    """Every key of ``expected`` is present in ``actual`` with the same value."""
    if isinstance(expected, dict):
        assert isinstance(actual, dict), path
        for key, value in expected.items():
            assert key in actual, f"{path}.{key}"
            assert_subset(value, actual[key], f"{path}.{key}")
    else:
        assert expected == actual, path


@pytest.mark.parametrize("golden", GOLDEN, ids=lambda p: p.stem)
def test_golden_reports(capsys, golden):
    """Test structured reports of the shipped specs against recorded expectations."""
    spec, command = golden.stem.rsplit(".", 1)
    recorded = yaml.safe_load(golden.read_text())
    args = [str(SPECS / a) if a.endswith(".spec") else a for a in recorded["args"]]
    code, out, _ = run(capsys, command, str(SPECS / f"{spec}.spec"), "--report", "structured", *args)
    assert code == EXIT_OK
    assert_subset(recorded["expect"], yaml.safe_load(out))


CIRCLE_COMMANDS = [
    ("check", []),
    ("classify", []),
    ("fiber", []),
    ("pi0", []),
    ("deck", []),
    ("density", []),
    ("pi1", ["--word", "a^6"]),
    ("pi1", ["--word", "a^6", "--shape-kernel"]),
    ("thread-from", ["--word", "a^2"]),
    ("restrict", ["--indices", "0,2,4,..."]),
]
FINITE_COMMANDS = [("check", []), ("classify", []), ("deck", []), ("density", [])]

APPLICABLE = {
    "covering-circle": CIRCLE_COMMANDS,
    "dyadic-solenoid": CIRCLE_COMMANDS + [
        ("meet", ["--thread", "triadic"]),
        ("compare", []),
        ("lift", ["--target", str(SPECS / "triadic-solenoid.spec")]),
    ],
    "dyadic-times-three": [("check", []), ("classify", []), ("fiber", [])],
    "hawaiian": FINITE_COMMANDS,
    "p-solenoid": CIRCLE_COMMANDS,
    "product-tower": FINITE_COMMANDS,
    "triadic-solenoid": CIRCLE_COMMANDS,
    "warsawonoid": CIRCLE_COMMANDS,
}

RUNS = [(spec, command, args) for spec, commands in APPLICABLE.items() for command, args in commands]


def test_every_shipped_spec_is_covered():
    assert set(APPLICABLE) == {p.stem for p in SPECS.glob("*.spec")}


@pytest.mark.parametrize("spec, command, args", RUNS, ids=[f"{s}-{c}" for s, c, _ in RUNS])
def test_shipped_spec_reports(capsys, spec, command, args):
    """Test that every shipped spec gives a schema-stamped report for its commands."""
    code, out, err = run(capsys, command, str(SPECS / f"{spec}.spec"), "--report", "structured",
                         "--horizon", "4", *args)
    assert code == EXIT_OK, err
    document = yaml.safe_load(out)
    assert document["schema"] == "liftlim-report/1"
    assert document["command"] == command
    assert document["verdict"]


# ============================================================================
# Base model and unverified homomorphisms
# ============================================================================

DOUBLING_BONDING = """\
[group Z]
kind = abelian
generators = a

[hom double: Z -> Z]
a -> a^2

[tower]
tail: group=Z bonding=double thread_step=id thread0=a

[base]
group = Z
tail: map=id
"""

INFINITE_TARGET = """\
[defaults]
max_cosets = 50

[group B]
generators = a, b
relators = a^2

[group C2]
generators = x
relators = x^2

[hom h: C2 -> B]
x -> a

[tower]
stage 0: group=C2
"""


@pytest.fixture
def doubling_spec(tmp_path):
    path = tmp_path / "doubling.spec"
    path.write_text(DOUBLING_BONDING)
    return str(path)


@pytest.mark.parametrize("command", ["pi1", "density", "restrict"])
def test_incompatible_base_model_is_refused(capsys, doubling_spec, command):
    """Test that model commands stop when phi_i disagrees with the bonding."""
    code, out, err = run(capsys, command, doubling_spec, "--word", "a", "--indices", "0,1,2,...")
    assert code == EXIT_COHERENCE
    assert out == ""
    assert "base model does not commute" in err


def test_check_reports_incompatible_base_model(capsys, doubling_spec):
    code, out, _ = run(capsys, "check", doubling_spec, "--report", "structured")
    assert code == EXIT_COHERENCE
    document = yaml.safe_load(out)
    assert document["verdict"] == "Coherent"
    assert document["details"]["base_model"] == "Incompatible"
    assert "tail bonding" in document["witnesses"][-1]["issue"]


def test_thread_only_commands_ignore_the_base_model(capsys, doubling_spec):
    assert run(capsys, "classify", doubling_spec)[0] == EXIT_OK


def test_unverified_homomorphism_is_reported(capsys, tmp_path):
    """Test that a hom into an infinite presented group is kept and flagged."""
    path = tmp_path / "infinite.spec"
    path.write_text(INFINITE_TARGET)
    code, out, _ = run(capsys, "classify", str(path), "--report", "structured")
    assert code == EXIT_OK
    unverified = yaml.safe_load(out)["details"]["unverified"]
    assert unverified == ["hom h: relators x^2 not checked in B"]


def test_shape_kernel_flag(capsys):
    code, out, _ = run(capsys, "pi1", DYADIC, "--word", "a^4", "--shape-kernel")
    assert code == EXIT_OK
    assert "pi1: RejectedAtStage(0)" in out
    assert "kernels" in out


def test_restrict_carries_the_base_model(capsys):
    """Test density and pi1 on the restricted tower with the restricted model."""
    code, out, _ = run(capsys, "restrict", DYADIC, "--indices", "0,2,4,...", "--word", "a^4",
                       "--report", "structured")
    assert code == EXIT_OK
    document = yaml.safe_load(out)
    assert document["details"]["pi1"] == "RejectedAtStage(2)"
    assert document["details"]["density"] == "Dense(stagewise)"
    assert document["disclaimer"]


def test_single_word_expected(capsys):
    code, _, err = run(capsys, "pi1", DYADIC, "--word", "a, a^2")
    assert code == EXIT_INPUT
    assert "exactly one word" in err
