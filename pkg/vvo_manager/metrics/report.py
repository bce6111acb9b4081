import csv
import json
from dataclasses import dataclass
from io import StringIO
from logging import getLogger
from typing import Any, Dict, List, Optional, Sequence

from tabulate import tabulate

from vvo_manager.conf import settings
from vvo_manager.metrics.metrics import MetricsReport

logger = getLogger(__name__)


@dataclass(frozen=True)
class ReportRow:
    case: str
    lambda_p: str
    tap_range: str
    cb_range: str
    status: str
    metrics: Optional[MetricsReport] = None
    # Timings are kept for failed cells too, so a failure in the fixed stage still shows T_r
    t_relax: Optional[float] = None
    t_fixed: Optional[float] = None
    failed_stage: Optional[str] = None
    is_baseline: bool = False

    def values(self) -> Dict[str, Any]:
        """The row keyed by the CSV column names, None where there is no value"""
        metrics = self.metrics
        return {
            "case": self.case,
            "lambda_p": self.lambda_p,
            "tap_range": self.tap_range,
            "cb_range": self.cb_range,
            "mae_v": metrics.mae_v if metrics else None,
            "mae_q": metrics.mae_q if metrics else None,
            "t_relax_s": self.t_relax,
            "t_fixed_s": self.t_fixed,
            "delta_pg_mw": metrics.delta_pg if metrics else None,
            "pct_delta_cost": metrics.pct_delta_cost if metrics else None,
            "losses_mw": metrics.losses if metrics else None,
            "status": self.status,
        }


# Decimals per column in the text table
_TEXT_DECIMALS = {"mae_v": 3, "mae_q": 2, "t_relax_s": 1, "t_fixed_s": 1, "delta_pg_mw": 2, "pct_delta_cost": 2, "losses_mw": 2}


def _ordered(rows: Sequence[ReportRow]) -> List[ReportRow]:
    return [row for row in rows if row.is_baseline] + [row for row in rows if not row.is_baseline]


def _render_text(rows: List[ReportRow]) -> str:
    table, footnotes = [], []
    for row in rows:
        values = row.values()
        line = []
        for column in settings.REPORT_CSV_COLUMNS:
            value = values[column]
            if value is None:
                line.append(settings.REPORT_NA)
            elif column in _TEXT_DECIMALS:
                line.append("{:.{}f}".format(value, _TEXT_DECIMALS[column]))
            else:
                line.append(str(value))
        if row.failed_stage:
            footnotes.append("failed in the {} stage".format(row.failed_stage))
            line[-1] = "{} [{}]".format(line[-1], len(footnotes))
        table.append(line)
    text = tabulate(table, headers=settings.REPORT_TEXT_HEADERS, disable_numparse=True)
    for number, note in enumerate(footnotes, start=1):
        text += "\n[{}] {}".format(number, note)
    return text + "\n"


def _render_csv(rows: List[ReportRow]) -> str:
    buffer = StringIO()
    writer = csv.DictWriter(buffer, fieldnames=settings.REPORT_CSV_COLUMNS, lineterminator="\n")
    writer.writeheader()
    for row in rows:
        writer.writerow({key: "" if value is None else value for key, value in row.values().items()})
    return buffer.getvalue()


def _render_json(rows: List[ReportRow]) -> str:
    return json.dumps([dict(row.values(), failed_stage=row.failed_stage) for row in rows], indent=2) + "\n"


RENDERERS = {"text": _render_text, "csv": _render_csv, "json": _render_json}


def render_table(rows: Sequence[ReportRow], fmt: str = "text") -> str:
    """
    Render scenario results, the baseline row first
    :param rows: One ReportRow per scenario cell
    :param str fmt: text, csv or json
    :return: str: the rendered table
    """
    if fmt not in RENDERERS:
        raise ValueError("unknown report format {}, expected one of {}".format(fmt, settings.REPORT_FORMATS))
    logger.debug("Rendering {} report rows as {}".format(len(rows), fmt))
    return RENDERERS[fmt](_ordered(rows))


@dataclass(frozen=True)
class OracleComparison:
    label: str
    pipeline_objective: Optional[float]
    # Objective the enumeration found for the pipeline's own device assignment
    same_assignment_objective: Optional[float]
    best_objective: Optional[float]
    combinations: int

    @property
    def gap(self) -> Optional[float]:
        if self.pipeline_objective is None or not self.best_objective:
            return None
        return self.pipeline_objective / self.best_objective


def render_oracle_table(comparisons: Sequence[OracleComparison]) -> str:
    def number(value, spec="{:.6f}"):
        return settings.REPORT_NA if value is None else spec.format(value)

    table = [
        [
            c.label,
            c.combinations,
            number(c.pipeline_objective),
            number(c.same_assignment_objective),
            number(c.best_objective),
            number(c.gap, "{:.4f}"),
        ]
        for c in comparisons
    ]
    headers = ["scenario", "combinations", "pipeline", "enumerated (same devices)", "enumerated (best)", "ratio"]
    return tabulate(table, headers=headers, disable_numparse=True) + "\n"
