"""Runtime settings, read from the environment and overridden by CLI flags."""

import os
from typing import Literal, Mapping, Optional

from pydantic import BaseModel, Field, ValidationError as PydanticValidationError

from .cosets import EnumerationBudget
from .tower import DEFAULT_HORIZON
from .validators import ValidationError

ENV_HORIZON = "LIFTLIM_DEFAULT_HORIZON"
ENV_MAX_COSETS = "LIFTLIM_MAX_COSETS"


class Settings(BaseModel):
    default_horizon: int = Field(default=DEFAULT_HORIZON, gt=0)
    max_cosets: int = Field(default=20000, gt=0)
    max_deductions: int = Field(default=2000000, gt=0)
    report_format: Literal["text", "structured"] = "text"

    @classmethod
    def from_env(cls, environ: Optional[Mapping[str, str]] = None) -> "Settings":
        """Settings with ``LIFTLIM_*`` overrides applied.

        Raises:
            ValidationError: If a variable is not a positive integer
        """
        environ = os.environ if environ is None else environ
        values = {}
        for variable, key in ((ENV_HORIZON, "default_horizon"), (ENV_MAX_COSETS, "max_cosets")):
            raw = environ.get(variable)
            if raw is None or raw == "":
                continue
            try:
                values[key] = int(raw)
            except ValueError:
                raise ValidationError(f"{variable} must be a positive integer, got '{raw}'") from None
        try:
            return cls(**values)
        except PydanticValidationError as e:
            raise ValidationError(f"Invalid settings from environment: {e.errors()[0]['msg']}") from None

    def budget(self) -> EnumerationBudget:
        return EnumerationBudget(self.max_cosets, self.max_deductions)

    def override(self, **changes) -> "Settings":
        """Copy with the non-None keyword values replaced."""
        return self.model_copy(update={k: v for k, v in changes.items() if v is not None})
