#-----------------------------------------------------------------------
# Purpose: Report envelope of one command and its JSON / CSV / xlsx output
# Programmer: Shanqin Jin
# Email: sjin@mun.ca
# Date: 2026-03-07
#-----------------------------------------------------------------------

import csv
import time
import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Dict, List, Optional

from openpyxl import Workbook
from openpyxl.styles import Alignment, Border, Font, Side

from MSL_Utils.Utils import utils

SCHEMA = "msl/1"


#-----------------------------------------------------------------------
@dataclass
class ReportEnvelope:
    """
    Everything one command reports. Certificates are numeric claims
    {value, tolerance, passed}; the gating ones decide the exit code.
    """

    command: str
    config: Dict[str, Any]
    certificates: Dict[str, Dict[str, Any]] = field(default_factory=dict)
    residuals: Dict[str, float] = field(default_factory=dict)
    verdicts: Dict[str, Any] = field(default_factory=dict)
    tables: Dict[str, List[Dict[str, Any]]] = field(default_factory=dict)
    data: Dict[str, Any] = field(default_factory=dict)
    timing: Dict[str, float] = field(default_factory=dict)
    gating: List[str] = field(default_factory=list)
    _start: float = field(default_factory=time.perf_counter, repr=False)

    def certify(self, name: str, value: float, tolerance: float, passed: Optional[bool] = None,
                gating: bool = True) -> bool:
        """Record value <= tolerance (or an explicit pass flag)."""
        value = float(value)
        if passed is None:
            passed = value <= tolerance
        self.certificates[name] = {"value": value, "tolerance": float(tolerance), "passed": bool(passed)}
        if gating and name not in self.gating:
            self.gating.append(name)
        if not passed:
            logging.warning(f"{self.command}: certificate '{name}' failed ({value:.3e} vs {tolerance:g})")
        return bool(passed)

    def certify_lower(self, name: str, value: float, bound: float, gating: bool = True) -> bool:
        """Record value >= bound."""
        return self.certify(name, value, bound, passed=float(value) >= bound, gating=gating)

    @property
    def failed_gates(self) -> List[str]:
        return [name for name in self.gating if not self.certificates[name]["passed"]]

    def finish(self):
        self.timing["seconds"] = time.perf_counter() - self._start

    def to_dict(self) -> Dict[str, Any]:
        return {
            "schema": SCHEMA,
            "command": self.command,
            "config": self.config,
            "certificates": self.certificates,
            "residuals": self.residuals,
            "verdicts": self.verdicts,
            "tables": self.tables,
            "data": self.data,
            "timing": self.timing,
        }
#-----------------------------------------------------------------------


#-----------------------------------------------------------------------
def report_paths(command: str, out: Optional[str] = None, results_dir: Optional[str] = None) -> Path:
    if out:
        path = Path(out)
        path.parent.mkdir(parents=True, exist_ok=True)
        return path
    if results_dir:
        folder = Path(results_dir)
        folder.mkdir(parents=True, exist_ok=True)
        stamp = time.strftime("%Y%m%d_%H%M%S")
        return folder / f"{utils.sanitize_filename(command)}_{stamp}.json"
    return utils.timestamped_result_path(command)


def write_report(envelope: ReportEnvelope, out: Optional[str] = None, results_dir: Optional[str] = None,
                 write_xlsx: bool = False) -> List[Path]:
    """JSON report, one CSV per table next to it and optionally an xlsx workbook."""
    envelope.finish()
    path = report_paths(envelope.command, out, results_dir)
    path.write_text(utils.dump_json(envelope.to_dict()) + "\n", encoding="utf-8")
    written = [path]

    for name, rows in envelope.tables.items():
        if rows:
            written.append(save_table_csv(rows, path.with_name(f"{path.stem}_{utils.sanitize_filename(name)}.csv")))
    if write_xlsx and envelope.tables:
        written.append(save_tables_to_excel(envelope.tables, path.with_suffix(".xlsx")))
    return written
#-----------------------------------------------------------------------


#-----------------------------------------------------------------------
def _cell(value):
    value = utils.to_jsonable(value)
    if isinstance(value, list):
        return str(value)
    return value


def save_table_csv(rows: List[Dict[str, Any]], path: Path) -> Path:
    headers = list(rows[0].keys())
    with open(path, "w", newline="", encoding="utf-8") as f:
        writer = csv.writer(f)
        writer.writerow(headers)
        for row in rows:
            writer.writerow([_cell(row.get(h)) for h in headers])
    return path


def save_tables_to_excel(tables: Dict[str, List[Dict[str, Any]]], filepath: Path) -> Path:
    """One sheet per table: bold bordered headers, bordered centred data, fitted widths."""
    wb = Workbook()
    wb.remove(wb.active)

    header_font = Font(bold=True)
    thin_border = Border(left=Side(style='thin'), right=Side(style='thin'), top=Side(style='thin'), bottom=Side(style='thin'))

    for name, rows in tables.items():
        if not rows:
            continue
        # sheet titles are limited to 31 characters
        ws = wb.create_sheet(title=utils.sanitize_filename(name)[:31])
        headers = list(rows[0].keys())
        ws.append(headers)
        for cell in ws[1]:
            cell.font = header_font
            cell.border = thin_border
            cell.alignment = Alignment(horizontal='center')

        for row in rows:
            ws.append([_cell(row.get(h)) for h in headers])
            for cell in ws[ws.max_row]:
                cell.border = thin_border
                cell.alignment = Alignment(horizontal='center')

        for col in ws.columns:
            max_length = 0
            column = col[0].column_letter
            for cell in col:
                if cell.value is not None:
                    max_length = max(max_length, len(str(cell.value)))
            ws.column_dimensions[column].width = max_length + 2

    if not wb.sheetnames:
        wb.create_sheet(title="empty")
    wb.save(filepath)
    return filepath
#-----------------------------------------------------------------------
