"""Check reports and their CSV/JSON serialization."""
from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass, field, replace

PASS_RTOL = 1e-9

CSV_COLUMNS = (
    "inequality_id", "depth", "seed", "generator", "p", "q", "r", "rho",
    "lambda", "alpha", "lhs", "rhs", "ratio", "bound", "pass",
)
_FLOAT_FIELDS = ("p", "q", "r", "rho", "lambda", "alpha", "lhs", "rhs", "ratio", "bound")
_INT_FIELDS = ("depth", "seed")


def compute_ratio(lhs, rhs):
    if rhs == 0:
        return math.inf if lhs > 0 else 1.0
    return lhs / rhs


@dataclass(frozen=True)
class CheckReport:
    """One evaluated inequality instance.

    ``rhs`` is the norm expression without any constant; ``bound`` is the
    explicit constant when one is known, in which case ``passed`` means
    ``ratio <= bound * (1 + 1e-9)``.  Without a bound ``passed`` only records
    that the ratio is finite.
    """

    inequality_id: str
    lhs: float
    rhs: float
    ratio: float
    bound: float | None = None
    passed: bool = True
    depth: int | None = None
    seed: int | None = None
    generator: str | None = None
    p: float | None = None
    q: float | None = None
    r: float | None = None
    rho: float | None = None
    lam: float | None = None
    alpha: float | None = None
    note: str = ""
    meta: dict = field(default_factory=dict, compare=False)

    @classmethod
    def make(cls, inequality_id, lhs, rhs, bound=None, **params):
        lhs, rhs = float(lhs), float(rhs)
        if lhs < 0 or rhs < 0:
            raise ValueError("report sides must be nonnegative")
        ratio = compute_ratio(lhs, rhs)
        if bound is None:
            passed = math.isfinite(ratio)
        else:
            passed = ratio <= bound * (1.0 + PASS_RTOL)
        return cls(inequality_id, lhs, rhs, ratio, None if bound is None else float(bound), bool(passed), **params)

    def with_params(self, **params):
        return replace(self, **params)

    @property
    def sort_key(self):
        def k(x):
            return (x is None, x if x is not None else 0)
        return (self.inequality_id, k(self.depth), k(self.seed), self.generator or "",
                k(self.p), k(self.q), k(self.r), k(self.rho), k(self.lam), k(self.alpha))

    def to_row(self):
        return {
            "inequality_id": self.inequality_id, "depth": self.depth, "seed": self.seed,
            "generator": self.generator, "p": self.p, "q": self.q, "r": self.r, "rho": self.rho,
            "lambda": self.lam, "alpha": self.alpha, "lhs": self.lhs, "rhs": self.rhs,
            "ratio": self.ratio, "bound": self.bound, "pass": self.passed,
        }

    @classmethod
    def from_row(cls, row):
        def num(key, conv):
            v = row.get(key)
            if v is None or v == "":
                return None
            return conv(v)

        passed = row["pass"]
        if isinstance(passed, str):
            passed = passed.strip().lower() == "true"
        return cls(
            inequality_id=row["inequality_id"],
            lhs=num("lhs", float), rhs=num("rhs", float), ratio=num("ratio", float),
            bound=num("bound", float), passed=bool(passed),
            depth=num("depth", int), seed=num("seed", int), generator=row.get("generator") or None,
            p=num("p", float), q=num("q", float), r=num("r", float), rho=num("rho", float),
            lam=num("lambda", float), alpha=num("alpha", float),
        )


def fmt_float(x):
    """17 significant digits, enough to round-trip any double."""
    return format(x, ".17g")


def _cell(key, v):
    if v is None:
        return ""
    if key == "pass":
        return "true" if v else "false"
    if key in _FLOAT_FIELDS:
        return fmt_float(v)
    return str(v)


def sorted_reports(reports):
    return sorted(reports, key=lambda rep: rep.sort_key)


def to_csv(reports):
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_COLUMNS)
    for rep in reports:
        row = rep.to_row()
        writer.writerow([_cell(k, row[k]) for k in CSV_COLUMNS])
    return buf.getvalue()


def from_csv(text):
    return [CheckReport.from_row(row) for row in csv.DictReader(io.StringIO(text))]


def _json_value(key, v):
    # JSON has no infinity literal; spell non-finite floats as strings
    if key in _FLOAT_FIELDS and v is not None and not math.isfinite(v):
        return fmt_float(v)
    return v


def to_json(reports, indent=2):
    rows = [{k: _json_value(k, v) for k, v in rep.to_row().items()} for rep in reports]
    return json.dumps(rows, indent=indent)


def from_json(text):
    rows = json.loads(text)
    return [CheckReport.from_row(row) for row in rows]
