"""
Report emission: JSON, per-task CSV tables and a markdown summary
"""

import io
import json
import logging
from datetime import datetime
from pathlib import Path
from typing import Dict, Iterable, Optional, Union

import pandas as pd
from jinja2 import Environment, FileSystemLoader, TemplateError

from src.pipeline.scenario import OutputFormat, ScenarioReport
from src.utils.error_handling import ReportIOError, UnsupportedFormat
from src.utils.settings import ROOT

logger = logging.getLogger(__name__)

TEMPLATES_DIR = ROOT / "templates" / "reports"
SUMMARY_TEMPLATE = "scenario_summary.md"


def _format(fmt: Union[str, OutputFormat]) -> OutputFormat:
    try:
        return OutputFormat(fmt)
    except ValueError:
        raise UnsupportedFormat(f"unsupported report format '{fmt}' (json or csv)") from None


def report_json(report: ScenarioReport, include_timings: bool = False) -> bytes:
    """Sorted keys, fixed indentation: identical reports give identical bytes."""
    text = json.dumps(report.to_dict(include_timings), sort_keys=True, indent=2, allow_nan=False)
    return (text + "\n").encode("utf-8")


def table_csv(rows: Iterable[Dict]) -> bytes:
    frame = pd.DataFrame(list(rows))
    buffer = io.StringIO()
    frame.to_csv(buffer, index=False, lineterminator="\n", float_format="%.12g")
    return buffer.getvalue().encode("utf-8")


def emit_report(
    report: ScenarioReport,
    fmt: Union[str, OutputFormat] = OutputFormat.JSON,
    destination: Optional[Union[str, Path]] = None,
) -> Dict[str, bytes]:
    """
    Serialize a report; optionally write it next to ``destination``

    JSON gives one file ``<stem>.json``; CSV gives one ``<stem>_<Task>.csv``
    per task in run order.

    Returns:
        File name -> content
    """
    fmt = _format(fmt)
    stem = Path(destination).stem if destination else report.scenario
    if fmt == OutputFormat.JSON:
        files = {f"{stem}.json": report_json(report)}
    else:
        files = {f"{stem}_{task}.csv": table_csv(rows) for task, rows in report.tables.items()}

    if destination is not None:
        directory = Path(destination).parent
        try:
            directory.mkdir(parents=True, exist_ok=True)
            for name, content in files.items():
                (directory / name).write_bytes(content)
        except OSError as e:
            raise ReportIOError(f"cannot write report to {directory}: {e}") from e
        logger.info(f"wrote {len(files)} {fmt.value} file(s) for '{report.scenario}' to {directory}")
    return files


class SummaryWriter:
    """Markdown summary over one or more scenario reports"""

    def __init__(self, templates_dir: Path = TEMPLATES_DIR):
        self.env = Environment(
            loader=FileSystemLoader(str(templates_dir)),
            trim_blocks=True,
            lstrip_blocks=True,
        )

    def render(self, reports: Iterable[ScenarioReport], errors: Optional[Dict] = None) -> str:
        reports = list(reports)
        context = {
            "report_date": datetime.now().strftime("%Y-%m-%d %H:%M"),
            "reports": [self._summarize(r) for r in reports],
            "passed": sum(1 for r in reports if r.passed),
            "total": len(reports),
            "errors": (errors or {}).get("all_errors", []),
        }
        try:
            return self.env.get_template(SUMMARY_TEMPLATE).render(**context)
        except TemplateError as e:
            raise ReportIOError(f"cannot render {SUMMARY_TEMPLATE}: {e}") from e

    @staticmethod
    def _summarize(report: ScenarioReport) -> Dict:
        r = report.results
        headline = {}
        if "VerifyCommutant" in r:
            headline["max commutator norm"] = r["VerifyCommutant"]["max_commutator_norm"]
            headline["nontrivial partners"] = r["VerifyCommutant"]["nontrivial_partner_count"]
        if "Spectrum" in r:
            headline["max root residual"] = r["Spectrum"]["max_root_residual"]
        if "Propagate" in r:
            headline["row defect"] = r["Propagate"]["row_defect"]
        if "CompareClosedForm" in r:
            headline["max closed-form residual"] = r["CompareClosedForm"]["max_residual"]
        if "ConvergenceStudy" in r and "converged" in r["ConvergenceStudy"]:
            headline["cutoff converged"] = r["ConvergenceStudy"]["converged"]
        return {
            "name": report.scenario,
            "kind": report.model["kind"],
            "passed": report.passed,
            "breaches": report.breaches,
            "headline": headline,
            "timings": report.timings,
        }


def write_summary(
    reports: Iterable[ScenarioReport],
    destination: Union[str, Path],
    errors: Optional[Dict] = None,
) -> Path:
    path = Path(destination)
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(SummaryWriter().render(reports, errors), encoding="utf-8")
    except OSError as e:
        raise ReportIOError(f"cannot write summary {path}: {e}") from e
    return path
