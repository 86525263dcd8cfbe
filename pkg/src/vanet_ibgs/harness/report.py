"""CSV output for benchmark rows and per-signature verdicts."""

import csv
import io

from .pipeline import BenchReport, BenchRow

REPORT_HEADER = ["mode", "n", "pairings", "wall_s", "accepted", "rejected", "false_accepts", "batch_size"]
VERDICT_HEADER = ["index", "group", "verdict", "reason", "l"]
MODE_ORDER = {"individual-original": 0, "individual-modified": 1, "batch": 2}


def _rows(report):
    rows = report.rows if isinstance(report, BenchReport) else list(report)
    return sorted(rows, key=lambda r: MODE_ORDER.get(r.mode, len(MODE_ORDER)))


def report_text(report) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(REPORT_HEADER)
    for r in _rows(report):
        w.writerow([r.mode, r.n, r.pairings, repr(float(r.wall_s)), r.accepted, r.rejected,
                    r.false_accepts, r.batch_size])
    return buf.getvalue()


def emit_report(report, path):
    """Write the rows of ``report`` (a BenchReport or list of BenchRow)."""
    with open(path, "w", newline="") as fh:
        fh.write(report_text(report))
    return path


def parse_report(path):
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header != REPORT_HEADER:
            raise ValueError(f"{path}: unexpected header {header}")
        rows = []
        for lineno, rec in enumerate(reader, 2):
            if len(rec) != len(REPORT_HEADER):
                raise ValueError(f"{path}:{lineno}: expected {len(REPORT_HEADER)} fields")
            mode, n, pairings, wall, acc, rej, fa, b = rec
            rows.append(BenchRow(mode, int(n), int(pairings), float(wall), int(acc), int(rej), int(fa), int(b)))
    return rows


def emit_verdicts(verdicts, fh):
    w = csv.writer(fh, lineterminator="\n")
    w.writerow(VERDICT_HEADER)
    for v in verdicts:
        w.writerow([v.index, v.group, "accept" if v.accepted else "reject", v.reason or "", v.l])
