"""
📋 Scan Reports Module
ScanReport records, JSON/CSV serialization and atomic persistence
"""

import csv
import io
import json
import logging
import os
import tempfile
from dataclasses import asdict, dataclass, field
from datetime import datetime, timezone

logger = logging.getLogger(__name__)

SCHEMA = "bnscan/1"

CSV_COLUMNS = [
    "graph", "genus", "d", "r", "rho", "use_sharp", "count",
    "classes_tested", "jacobian_order", "exhausted", "status",
]


@dataclass
class CellRecord:
    """W^r_d of one graph: exact class count plus capped witnesses"""

    graph: str
    genus: int
    d: int
    r: int
    rho: int
    use_sharp: bool
    count: int
    classes_tested: int
    jacobian_order: int
    witnesses: list = field(default_factory=list)

    @property
    def exhausted(self) -> bool:
        return self.classes_tested == self.jacobian_order

    @property
    def empty(self) -> bool:
        return self.count == 0

    @property
    def status(self) -> str:
        return "empty" if self.empty else "nonempty"

    def to_dict(self) -> dict:
        payload = asdict(self)
        payload["exhausted"] = self.exhausted
        payload["status"] = self.status
        return payload

    @classmethod
    def from_dict(cls, data: dict) -> "CellRecord":
        names = cls.__dataclass_fields__.keys()
        return cls(**{k: v for k, v in data.items() if k in names})


@dataclass
class ScanReport:
    mode: str
    parameters: dict
    graphs: list = field(default_factory=list)
    records: list = field(default_factory=list)
    findings: list = field(default_factory=list)
    violations: list = field(default_factory=list)
    skipped: list = field(default_factory=list)
    run: dict = field(default_factory=dict)

    @property
    def complete(self) -> bool:
        return not self.skipped

    def stamp(self, elapsed_seconds: float, jobs: int, task_seconds: list = None):
        """Run-dependent data; everything outside `run` is deterministic.

        `task_seconds` holds one {graph, d, use_sharp, seconds} entry per scan task.
        """
        self.run = {
            "generated_at": datetime.now(timezone.utc).isoformat(timespec="seconds"),
            "elapsed_seconds": round(elapsed_seconds, 3),
            "jobs": jobs,
            "task_seconds": task_seconds or [],
        }

    def to_dict(self) -> dict:
        return {
            "schema": SCHEMA,
            "mode": self.mode,
            "parameters": self.parameters,
            "complete": self.complete,
            "graphs": self.graphs,
            "records": [record.to_dict() for record in self.records],
            "findings": self.findings,
            "violations": self.violations,
            "skipped": self.skipped,
            "run": self.run,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True) + "\n"

    def to_csv(self) -> str:
        buffer = io.StringIO()
        writer = csv.DictWriter(buffer, fieldnames=CSV_COLUMNS, lineterminator="\n")
        writer.writeheader()
        for record in self.records:
            row = record.to_dict()
            writer.writerow({column: row[column] for column in CSV_COLUMNS})
        return buffer.getvalue()

    @classmethod
    def from_dict(cls, data: dict) -> "ScanReport":
        if data.get("schema") != SCHEMA:
            raise ValueError(f"unsupported report schema {data.get('schema')!r}")
        return cls(
            mode=data["mode"],
            parameters=data["parameters"],
            graphs=data["graphs"],
            records=[CellRecord.from_dict(r) for r in data["records"]],
            findings=data["findings"],
            violations=data["violations"],
            skipped=data["skipped"],
            run=data.get("run", {}),
        )

    def describe(self) -> str:
        empty = sum(1 for r in self.records if r.empty)
        text = f"📋 **Scan report** ({self.mode})\n\n"
        text += f"• Graphs: {len(self.graphs)}\n"
        text += f"• Cells: {len(self.records)} ({empty} empty)\n"
        text += f"• Violations: {len(self.violations)}\n"
        if self.skipped:
            text += f"• ⚠️ Skipped: {len(self.skipped)} (partial report)\n"
        for violation in self.violations[:10]:
            text += f"  ❌ {violation['graph']} d={violation['d']} r={violation['r']}: {violation['reason']}\n"
        return text


def atomic_write(path, content: str):
    """Write via a temporary file in the same directory, then rename over the target"""
    directory = os.path.dirname(os.path.abspath(path))
    os.makedirs(directory, exist_ok=True)
    fd, temp_path = tempfile.mkstemp(prefix=".tmp-", dir=directory)
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as handle:
            handle.write(content)
        os.replace(temp_path, path)
    except BaseException:
        if os.path.exists(temp_path):
            os.unlink(temp_path)
        raise
    logger.info(f"💾 Wrote {path}")


def load_report(path) -> ScanReport:
    with open(path, encoding="utf-8") as handle:
        return ScanReport.from_dict(json.load(handle))
