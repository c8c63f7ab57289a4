"""Tests for validators."""

import pytest
from liftlim.validators import (
    validate_horizon,
    validate_budget,
    validate_report_format,
    validate_command,
    validate_identifier,
    validate_indices,
    ValidationError
)


def test_validate_horizon():
    """Test horizon validation."""
    # Valid
    validate_horizon(1)
    validate_horizon(16)
    validate_horizon(500)

    # Invalid
    with pytest.raises(ValidationError):
        validate_horizon(0)
    with pytest.raises(ValidationError):
        validate_horizon(-3)
    with pytest.raises(ValidationError):
        validate_horizon(True)
    with pytest.raises(ValidationError):
        validate_horizon("16")


def test_validate_budget():
    """Test coset budget validation."""
    # Valid
    validate_budget(1)
    validate_budget(20000)

    # Invalid
    with pytest.raises(ValidationError):
        validate_budget(0)
    with pytest.raises(ValidationError):
        validate_budget(2.5)


def test_validate_report_format():
    """Test report format validation."""
    # Valid
    validate_report_format("text")
    validate_report_format("structured")

    # Invalid
    with pytest.raises(ValidationError):
        validate_report_format("json")
    with pytest.raises(ValidationError):
        validate_report_format("")


def test_validate_command():
    """Test command validation."""
    # Valid
    validate_command("check")
    validate_command("thread-from")
    validate_command("restrict")

    # Invalid
    with pytest.raises(ValidationError):
        validate_command("thread_from")
    with pytest.raises(ValidationError):
        validate_command("invalid")


def test_validate_identifier():
    """Test identifier validation."""
    # Valid
    validate_identifier("Z")
    validate_identifier("F_2")
    validate_identifier("_tmp1")

    # Invalid
    with pytest.raises(ValidationError):
        validate_identifier("2Z")
    with pytest.raises(ValidationError):
        validate_identifier("a-b")
    with pytest.raises(ValidationError):
        validate_identifier("")


def test_validate_indices():
    """Test index list validation."""
    # Valid
    assert validate_indices("0,2,4") == [0, 2, 4]
    assert validate_indices("0, 2, 4, ...") == [0, 2, 4]
    assert validate_indices("3") == [3]

    # Invalid
    with pytest.raises(ValidationError):
        validate_indices("0,2,2")
    with pytest.raises(ValidationError):
        validate_indices("4,2")
    with pytest.raises(ValidationError):
        validate_indices("0,...")
    with pytest.raises(ValidationError):
        validate_indices("0;2")
    with pytest.raises(ValidationError):
        validate_indices("")
