"""Rendering of analysis reports as text or as a YAML document."""

from typing import Any

import yaml
from jinja2 import Environment, StrictUndefined

from .report import AnalysisReport

_environment = Environment(
    trim_blocks=True,
    lstrip_blocks=True,
    keep_trailing_newline=True,
    undefined=StrictUndefined,
)


def _scalar(value: Any) -> str:
    if value is None:
        return "?"
    if isinstance(value, bool):
        return "yes" if value else "no"
    if isinstance(value, dict):
        return ", ".join(f"{k}={_scalar(v)}" for k, v in value.items())
    if isinstance(value, (list, tuple)):
        return ", ".join(_scalar(v) for v in value)
    return str(value)


_environment.filters["scalar"] = _scalar

TEXT_TEMPLATE = _environment.from_string(
    """\
{{ report.command }}: {{ report.verdict }}
certainty: {{ certainty }}
{% if report.provenance %}
by: {{ report.provenance }}
{% endif %}
{% if report.witnesses %}
witnesses:
{% for witness in report.witnesses %}
  - {{ witness | scalar }}
{% endfor %}
{% endif %}
{% if report.stages %}
stages:
{% for row in report.stages %}
  {{ row | scalar }}
{% endfor %}
{% endif %}
{% for key, value in report.details.items() %}
{{ key }}: {{ value | scalar }}
{% endfor %}
{% if report.disclaimer %}
note: {{ report.disclaimer }}
{% endif %}
"""
)


def render_text(report: AnalysisReport) -> str:
    """Human readable report.

    Args:
        report: Analysis outcome

    Returns:
        Rendered text ending in a newline
    """
    return TEXT_TEMPLATE.render(report=report, certainty=str(report.certainty))


def render_structured(report: AnalysisReport) -> str:
    """Report as a single YAML document stamped with the report schema."""
    return yaml.safe_dump(report.document(), sort_keys=False, default_flow_style=False, allow_unicode=True)


def render(report: AnalysisReport, report_format: str = "text") -> str:
    if report_format == "structured":
        return render_structured(report)
    return render_text(report)
