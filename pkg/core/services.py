from typing import Any, Iterable, Optional

from rest_framework.renderers import JSONRenderer

from .catalog import CatalogReport, ReplayReport
from .conf import sandwichlab_setting
from .engel import VerdictReport
from .serializers import (
    FieldResultSerializer, OrderField, ReplayResultSerializer, ReportSerializer, VerdictReportSerializer,
)

# =================== helpers ===================


def _text_value(value: Any) -> str:
    if isinstance(value, dict):
        if set(value) == {"base", "exp"}:
            if value["exp"] in (0, 1):
                return str(value["base"])
            return f"{value['base']}^{value['exp']}"
        return ", ".join(f"{k}={_text_value(v)}" for k, v in value.items())
    if isinstance(value, (list, tuple)):
        return "[" + ", ".join(_text_value(v) for v in value) + "]"
    if value is None:
        return "-"
    if isinstance(value, bool):
        return "yes" if value else "no"
    return str(value)


# =================== reports ===================

def make_report(command: str, target: str, seed: int, verdict: str, fields: dict,
                counterexamples: Optional[Iterable[str]] = None) -> dict:
    report = {
        "tool_version": sandwichlab_setting("TOOL_VERSION"),
        "command": command,
        "target": target,
        "seed": seed,
        "verdict": verdict,
        "fields": fields,
        "counterexamples": list(counterexamples or []),
    }
    return ReportSerializer(report).data


def catalog_report_fields(report: CatalogReport) -> dict:
    return {f.name: FieldResultSerializer(f).data for f in report.fields}


def verdict_fields(report: VerdictReport) -> dict:
    data = dict(VerdictReportSerializer(report).data)
    data.pop("counterexample")
    return data


def replay_fields(report: ReplayReport) -> dict:
    return {
        "items": len(report.results),
        "mismatches": len(report.mismatches),
        "results": [ReplayResultSerializer(r).data for r in report.results],
    }


def order_json(value):
    return OrderField().to_representation(value)


# =================== rendering ===================

def render_json(report: dict) -> str:
    return JSONRenderer().render(report, renderer_context={"indent": 2}).decode("utf-8") + "\n"


def render_text(report: dict) -> str:
    lines = [
        f"command: {report['command']}",
    ]
    if report["target"]:
        lines.append(f"target: {report['target']}")
    lines.append(f"verdict: {report['verdict']}")
    for name, value in report["fields"].items():
        if isinstance(value, dict) and "results" in value:
            lines.append(f"{name}:")
            for r in value["results"]:
                mark = "ok" if r["ok"] else "MISMATCH"
                lines.append(f"  [{mark}] {r['expression']} = {r['computed']} (expected {r['expected']})")
        elif isinstance(value, str) and "\n" in value:
            lines.append(f"{name}:")
            lines.extend("  " + line for line in value.rstrip("\n").splitlines())
        else:
            lines.append(f"{name}: {_text_value(value)}")
    for ce in report["counterexamples"]:
        lines.append(f"counterexample: {ce}")
    return "\n".join(lines) + "\n"


def render(report: dict, fmt: str) -> str:
    return render_json(report) if fmt == "json" else render_text(report)
