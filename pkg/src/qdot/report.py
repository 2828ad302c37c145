"""Reproduction of the published reference tables, with a unit audit.

Three reference tables of confined-dot energies are embedded verbatim:
the ground state (n_r = 0, m = 0) and two excited states (n_r = 0, m = 1 and
n_r = 1, m = 1), each listing a semiclassical and an exact energy per wall
radius.  The ground-state table is reproduced with Coulomb strength Z = 1,
the excited-state tables with Z = 2; no single strength reproduces all three,
and :func:`audit_units` demonstrates that by re-solving each table under the
other strength.  Reference rows whose printed digits disagree with the
recomputed value beyond the strict tolerance but within the 5e-3 band are
flagged "suspect transcription" rather than failed.
"""

from __future__ import annotations

import io
import json
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from datetime import datetime, timezone

from .errors import QdotError, ReportIOError
from .model import QuantumNumbers, RadialProblem
from .numerov import solve_exact
from .wkb import solve_wkb

#: printed reference digits are considered clean below this relative error
STRICT_TOL = 5e-4
#: between STRICT_TOL and this band a mismatch is graded "suspect
#: transcription" of the printed digits; beyond it the row is a hard failure
SUSPECT_BAND = 5e-3

DEFAULT_WKB_TOL = 5e-4
DEFAULT_EXACT_TOL = 5e-3


@dataclass(frozen=True)
class TableRow:
    """One reference row: geometry, level, strength and the two published energies."""

    table_id: int
    r0: float
    n_r: int
    m: int
    coulomb_strength: float
    paper_E_wkb: float
    paper_E_exact: float


def _rows(table_id, n_r, m, z, data):
    return tuple(
        TableRow(table_id, r0, n_r, m, z, e_wkb, e_exact) for r0, e_wkb, e_exact in data
    )


TABLE_1 = _rows(1, 0, 0, 1.0, [
    (0.4, 47.031, 44.505),
    (0.6, 22.989, 21.589),
    (0.7, 17.608, 16.513),
    (0.8, 14.013, 13.135),
    (0.9, 11.479, 10.762),
    (1.0, 9.6186, 9.0240),
    (1.5, 4.9446, 4.6693),
    (2.0, 3.1283, 2.9776),
    (3.0, 1.6742, 1.6152),
    (4.0, 1.0895, 1.0610),
    (5.0, 0.78678, 0.7712),
    (6.0, 0.60592, 0.59663),
    (9.0, 0.34399, 0.34126),
    (10.0, 0.29788, 0.29592),
    (12.0, 0.23288, 0.23180),
])

TABLE_2 = _rows(2, 0, 1, 2.0, [
    (0.5, 65.835, 66.613),
    (1.0, 18.479, 18.646),
    (1.5, 9.0618, 9.1573),
    (2.0, 5.6020, 5.6328),
    (3.0, 2.9121, 2.9225),
    (5.0, 1.3404, 1.3428),
    (6.0, 1.0288, 1.0303),
    (8.0, 0.68606, 0.68676),
    (10.0, 0.50576, 0.50621),
    (15.0, 0.29604, 0.29629),
    (20.0, 0.20500, 0.20518),
])

TABLE_3 = _rows(3, 1, 1, 2.0, [
    (0.5, 206.42, 206.51),
    (1.0, 54.222, 54.208),
    (1.2, 38.375, 38.356),
    (1.5, 25.249, 25.227),
    (2.0, 14.842, 14.821),
    (3.0, 7.1557, 7.1399),
    (4.0, 4.3329, 4.3209),
    (5.0, 2.9659, 2.9567),
    (6.0, 2.1910, 2.1837),
    (8.0, 1.3763, 1.3714),
    (10.0, 0.96993, 0.96643),
    (15.0, 0.52556, 0.52379),
    (20.0, 0.34602, 0.34496),
])

TABLES: dict[int, tuple[TableRow, ...]] = {1: TABLE_1, 2: TABLE_2, 3: TABLE_3}

TABLE_CAPTIONS = {
    1: "Ground state (n_r = 0, m = 0)",
    2: "Excited state (n_r = 0, m = 1)",
    3: "Excited state (n_r = 1, m = 1)",
}

CSV_COLUMNS = (
    "table,r0,n_r,m,Z,E_wkb,E_exact,rel_diff,paper_wkb,paper_exact,err_wkb,err_exact,pass"
)


@dataclass(frozen=True)
class Tolerances:
    wkb: float = DEFAULT_WKB_TOL
    exact: float = DEFAULT_EXACT_TOL


@dataclass
class RowResult:
    """Computed-vs-published record for one row (or one sweep point).

    ``passed`` is the strict flag (both errors within their tolerances);
    ``suspect`` marks rows outside tolerance but inside the 5e-3 transcription
    band; ``hard_failure`` marks rows beyond the band or rows whose solver
    raised (``failure`` carries the message).  Reference-free rows (sweeps)
    leave the comparison fields None.
    """

    table_id: int | None
    r0: float
    n_r: int
    m: int
    coulomb_strength: float
    e_wkb: float | None = None
    e_exact: float | None = None
    rel_diff: float | None = None
    paper_wkb: float | None = None
    paper_exact: float | None = None
    err_wkb: float | None = None
    err_exact: float | None = None
    passed: bool | None = None
    suspect: bool = False
    failure: str | None = None
    # solver diagnostic, not part of the emitted schema
    exact_mesh_error: float | None = None

    @property
    def hard_failure(self) -> bool:
        if self.failure is not None:
            return True
        if self.passed is None or self.passed:
            return False
        return not self.suspect


@dataclass
class AuditEntry:
    table_id: int
    z_table: float
    z_audit: float
    min_err: float
    max_err: float


@dataclass
class AuditSection:
    entries: list[AuditEntry]
    statement: str


@dataclass
class ReproductionReport:
    rows: list[RowResult]
    tolerances: Tolerances
    audit: AuditSection | None = None
    notes: list[str] = field(default_factory=list)

    @property
    def hard_failures(self) -> list[RowResult]:
        return [r for r in self.rows if r.hard_failure]

    @property
    def suspects(self) -> list[RowResult]:
        return [r for r in self.rows if r.suspect]

    @property
    def all_passed(self) -> bool:
        return not self.hard_failures


def worker_count() -> int:
    """Bounded fan-out width for row computations, from QDOT_THREADS."""
    env = os.environ.get("QDOT_THREADS")
    if env:
        try:
            n = int(env)
        except ValueError as exc:
            raise QdotError(f"QDOT_THREADS must be an integer, got {env!r}") from exc
        if n >= 1:
            return n
    return os.cpu_count() or 1


def _grade(err: float | None, tol: float) -> tuple[bool, bool]:
    """(within tolerance, suspect transcription).

    The suspect flag compares against the fixed STRICT_TOL/SUSPECT_BAND
    window, not the pass tolerance: a row can pass a loose tolerance and
    still carry digits that disagree with the recomputed value.
    """
    if err is None:
        return True, False
    return err <= tol, STRICT_TOL < err <= SUSPECT_BAND


def compute_row(
    row: TableRow,
    tolerances: Tolerances,
    *,
    coulomb_override: float | None = None,
    method: str = "both",
) -> RowResult:
    """Run the requested solvers for one reference row and grade the errors."""
    z = row.coulomb_strength if coulomb_override is None else coulomb_override
    result = RowResult(
        table_id=row.table_id,
        r0=row.r0,
        n_r=row.n_r,
        m=row.m,
        coulomb_strength=z,
        paper_wkb=row.paper_E_wkb,
        paper_exact=row.paper_E_exact,
    )
    problem = RadialProblem(r0=row.r0, coulomb_strength=z, m=row.m)
    qn = QuantumNumbers(n_r=row.n_r, m=row.m)
    try:
        if method in ("wkb", "both"):
            result.e_wkb = solve_wkb(qn, problem).E
            result.err_wkb = abs(result.e_wkb - row.paper_E_wkb) / row.paper_E_wkb
        if method in ("exact", "both"):
            exact = solve_exact(qn, problem)
            result.e_exact = exact.E
            result.err_exact = abs(result.e_exact - row.paper_E_exact) / row.paper_E_exact
            result.exact_mesh_error = exact.mesh_error_estimate
        if result.e_wkb is not None and result.e_exact is not None:
            result.rel_diff = abs(result.e_wkb - result.e_exact) / result.e_exact
    except QdotError as exc:
        result.failure = str(exc)
        result.passed = False
        return result
    ok_wkb, sus_wkb = _grade(result.err_wkb, tolerances.wkb)
    ok_exact, sus_exact = _grade(result.err_exact, tolerances.exact)
    result.passed = ok_wkb and ok_exact
    result.suspect = sus_wkb or sus_exact
    return result


def _table_ids(table_id) -> list[int]:
    if table_id == "all":
        return [1, 2, 3]
    tid = int(table_id)
    if tid not in TABLES:
        raise ValueError(f"table must be 1, 2, 3 or 'all', got {table_id!r}")
    return [tid]


def reproduce_table(
    table_id="all",
    tolerances: Tolerances | None = None,
    *,
    coulomb_override: float | None = None,
    with_audit: bool = True,
    max_workers: int | None = None,
) -> ReproductionReport:
    """Recompute every row of the selected reference table(s) with both solvers.

    Rows are independent and fan out across a bounded thread pool
    (``max_workers`` or QDOT_THREADS wide); assembly keeps the printed order.
    Solver failures are recorded on their row rather than aborting the table,
    so a report always shows all discrepancies at once.
    """
    tolerances = tolerances or Tolerances()
    rows = [row for tid in _table_ids(table_id) for row in TABLES[tid]]
    workers = max_workers or worker_count()

    def run(row):
        return compute_row(row, tolerances, coulomb_override=coulomb_override)

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(run, rows))
    else:
        results = [run(row) for row in rows]

    report = ReproductionReport(rows=results, tolerances=tolerances)
    if coulomb_override is not None:
        report.notes.append(
            f"Coulomb strength overridden to Z = {coulomb_override:g} for every row "
            "(audit mode); failures are expected."
        )
    #  rows that still pass their tolerance get one aggregate suspect note;
    #  rows that fail it are called out individually
    failing_suspects = [r for r in report.suspects if not r.passed]
    passing_suspects = [r for r in report.suspects if r.passed]
    for r in failing_suspects:
        which = []
        if r.err_wkb is not None and r.err_wkb > tolerances.wkb:
            which.append(f"WKB err {r.err_wkb:.2e}")
        if r.err_exact is not None and r.err_exact > tolerances.exact:
            which.append(f"exact err {r.err_exact:.2e}")
        report.notes.append(
            f"suspect transcription: table {r.table_id}, r0 = {r.r0:g} "
            f"({'; '.join(which)} exceeds the tolerance but lies within {SUSPECT_BAND:g})"
        )
    if passing_suspects:
        report.notes.append(
            f"suspect transcription: {len(passing_suspects)} passing rows have "
            f"printed digits between {STRICT_TOL:g} and {SUSPECT_BAND:g} relative "
            "from the recomputed values"
        )
    if with_audit and coulomb_override is None:
        report.audit = audit_units(max_workers=workers)
    return report


def audit_units(*, max_workers: int | None = None) -> AuditSection:
    """Re-solve each table under the other table's Coulomb strength.

    The ground-state table matches Z = 1 and the excited-state tables match
    Z = 2; swapping the strengths drives every row's relative error beyond
    10%, which is the recorded evidence that the reference tables do not share
    a single Coulomb convention.  Only the semiclassical solver runs here (it
    is cheap, and the mismatch is far above the WKB/exact gap).
    """
    swap = {1: 2.0, 2: 1.0, 3: 1.0}
    entries = []
    workers = max_workers or worker_count()

    def wkb_err(row, z):
        problem = RadialProblem(r0=row.r0, coulomb_strength=z, m=row.m)
        energy = solve_wkb(QuantumNumbers(n_r=row.n_r, m=row.m), problem).E
        return abs(energy - row.paper_E_wkb) / row.paper_E_wkb

    for tid, rows in TABLES.items():
        z_audit = swap[tid]
        if workers > 1:
            with ThreadPoolExecutor(max_workers=workers) as pool:
                errs = list(pool.map(lambda row: wkb_err(row, z_audit), rows))
        else:
            errs = [wkb_err(row, z_audit) for row in rows]
        entries.append(
            AuditEntry(
                table_id=tid,
                z_table=rows[0].coulomb_strength,
                z_audit=z_audit,
                min_err=min(errs),
                max_err=max(errs),
            )
        )
    worst = min(e.min_err for e in entries)
    statement = (
        "No single Coulomb strength reproduces all three reference tables: "
        "the ground-state table matches Z = 1 and the excited-state tables match Z = 2, "
        "but re-solving each table under the other strength leaves every row with a "
        f"relative error of at least {worst:.1%} (>10%). The tables therefore encode "
        "per-table Coulomb strengths, and this artifact treats Z as explicit input data."
    )
    return AuditSection(entries=entries, statement=statement)


def _fmt(value) -> str:
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, int):
        return str(value)
    return f"{value:.6g}"


def _round6(value):
    return None if value is None else float(f"{value:.6g}")


def _row_record(r: RowResult) -> dict:
    return {
        "table": r.table_id,
        "r0": _round6(r.r0),
        "n_r": r.n_r,
        "m": r.m,
        "Z": _round6(r.coulomb_strength),
        "E_wkb": _round6(r.e_wkb),
        "E_exact": _round6(r.e_exact),
        "rel_diff": _round6(r.rel_diff),
        "paper_wkb": _round6(r.paper_wkb),
        "paper_exact": _round6(r.paper_exact),
        "err_wkb": _round6(r.err_wkb),
        "err_exact": _round6(r.err_exact),
        "pass": r.passed,
    }


def render_csv(report: ReproductionReport) -> str:
    lines = [CSV_COLUMNS]
    for r in report.rows:
        rec = _row_record(r)
        lines.append(
            ",".join(
                _fmt(rec[key])
                for key in (
                    "table", "r0", "n_r", "m", "Z",
                    "E_wkb", "E_exact", "rel_diff",
                    "paper_wkb", "paper_exact", "err_wkb", "err_exact", "pass",
                )
            )
        )
    return "\n".join(lines) + "\n"


def render_json(report: ReproductionReport, *, timestamp: bool = False) -> str:
    payload: dict = {
        "tolerances": {"wkb": report.tolerances.wkb, "exact": report.tolerances.exact},
        "rows": [_row_record(r) for r in report.rows],
        "summary": {
            "rows": len(report.rows),
            "passed": sum(1 for r in report.rows if r.passed),
            "suspect": len(report.suspects),
            "hard_failures": len(report.hard_failures),
        },
        "notes": report.notes,
    }
    for r, rec in zip(report.rows, payload["rows"]):
        rec["suspect"] = r.suspect
        if r.failure:
            rec["failure"] = r.failure
    if report.audit:
        payload["audit"] = {
            "statement": report.audit.statement,
            "entries": [
                {
                    "table": e.table_id,
                    "Z_table": e.z_table,
                    "Z_audit": e.z_audit,
                    "min_err": _round6(e.min_err),
                    "max_err": _round6(e.max_err),
                }
                for e in report.audit.entries
            ],
        }
    if timestamp:
        payload["timestamp"] = datetime.now(timezone.utc).isoformat()
    return json.dumps(payload, indent=2) + "\n"


def _status(r: RowResult) -> str:
    if r.failure:
        return "error"
    if r.passed:
        return "pass*" if r.suspect else "pass"
    return "suspect" if r.suspect else "fail"


def render_markdown(report: ReproductionReport, *, timestamp: bool = False) -> str:
    out = io.StringIO()
    out.write("# Reference-table reproduction\n\n")
    out.write(
        f"Tolerances: WKB {report.tolerances.wkb:g}, exact {report.tolerances.exact:g} "
        f"(relative). Rows beyond tolerance but within {SUSPECT_BAND:g} are marked "
        "suspect transcription.\n")
    by_table: dict[int | None, list[RowResult]] = {}
    for r in report.rows:
        by_table.setdefault(r.table_id, []).append(r)
    for tid, rows in by_table.items():
        caption = TABLE_CAPTIONS.get(tid, "Sweep")
        z = rows[0].coulomb_strength
        out.write(f"\n## Table {tid}. {caption}, Z = {z:g}\n\n")
        out.write("| r0 | ref E(WKB) | E(WKB) | err | ref E(exact) | E(exact) | err | status |\n")
        out.write("|---:|---:|---:|---:|---:|---:|---:|:---|\n")
        for r in rows:
            if r.failure:
                out.write(f"| {_fmt(r.r0)} | {_fmt(r.paper_wkb)} | | | {_fmt(r.paper_exact)} | | | error: {r.failure} |\n")
                continue
            out.write(
                f"| {_fmt(r.r0)} | {_fmt(r.paper_wkb)} | {_fmt(r.e_wkb)} | {_fmt(r.err_wkb)} "
                f"| {_fmt(r.paper_exact)} | {_fmt(r.e_exact)} | {_fmt(r.err_exact)} "
                f"| {_status(r)} |\n"
            )
    if report.notes:
        out.write("\n## Notes\n\n")
        for note in report.notes:
            out.write(f"- {note}\n")
    if report.audit:
        out.write("\n## Coulomb-strength audit\n\n")
        out.write(report.audit.statement + "\n\n")
        out.write("| table | Z used | Z audit | min err | max err |\n")
        out.write("|---:|---:|---:|---:|---:|\n")
        for e in report.audit.entries:
            out.write(
                f"| {e.table_id} | {e.z_table:g} | {e.z_audit:g} "
                f"| {_fmt(e.min_err)} | {_fmt(e.max_err)} |\n"
            )
    if timestamp:
        out.write(f"\nGenerated {datetime.now(timezone.utc).isoformat()}\n")
    return out.getvalue()


def emit(
    report: ReproductionReport,
    fmt: str = "csv",
    destination=None,
    *,
    timestamp: bool = False,
) -> bytes:
    """Serialize a report as csv, json or md; optionally write it to a path.

    The byte stream is deterministic for fixed inputs unless ``timestamp`` is
    set (csv never carries a timestamp; its schema is fixed).
    """
    if fmt == "csv":
        text = render_csv(report)
    elif fmt == "json":
        text = render_json(report, timestamp=timestamp)
    elif fmt == "md":
        text = render_markdown(report, timestamp=timestamp)
    else:
        raise ValueError(f"format must be csv, json or md, got {fmt!r}")
    data = text.encode()
    if destination is not None:
        try:
            with open(destination, "wb") as fh:
                fh.write(data)
        except OSError as exc:
            raise ReportIOError(f"cannot write report to {destination}: {exc}") from exc
    return data
