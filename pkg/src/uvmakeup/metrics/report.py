"""Evaluation reports: per-sample records, exact mean aggregates, JSONL."""

import hashlib
import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from ..errors import DataError


def config_hash(obj):
    """Stable short hash of a JSON-serializable config."""
    blob = json.dumps(obj, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(blob.encode()).hexdigest()[:16]


@dataclass
class EvalReport:
    """Per-sample metric values plus their arithmetic-mean aggregates.

    Aggregates are recomputed from the stored per-sample values, in storage
    order, so a reader can verify them bit-for-bit.
    """

    task: str
    dataset: str
    models: dict = field(default_factory=dict)
    config_hash: str = ""
    samples: list = field(default_factory=list)
    failures: list = field(default_factory=list)

    def add(self, sample_id, values):
        clean = {}
        for key, val in values.items():
            val = float(val)
            if not np.isfinite(val):
                raise DataError("non-finite %s for sample %r" % (key, sample_id))
            clean[key] = val
        self.samples.append({"id": str(sample_id), **clean})

    def add_failure(self, sample_id, reason):
        self.failures.append({"id": str(sample_id), "reason": str(reason)})

    def metric_names(self):
        names = []
        for rec in self.samples:
            for key in rec:
                if key != "id" and key not in names:
                    names.append(key)
        return names

    def aggregates(self):
        agg = {}
        for name in self.metric_names():
            vals = [rec[name] for rec in self.samples if name in rec]
            agg[name] = float(np.mean(vals))
        agg["sample_count"] = len(self.samples)
        agg["failure_count"] = len(self.failures)
        return agg

    def save(self, path):
        """Write the line-delimited report and a sibling summary JSON."""
        path = Path(path)
        header = {
            "record": "header",
            "task": self.task,
            "dataset": self.dataset,
            "models": self.models,
            "config_hash": self.config_hash,
        }
        with open(path, "w") as f:
            f.write(json.dumps(header) + "\n")
            for rec in self.samples:
                f.write(json.dumps({"record": "sample", **rec}) + "\n")
            for rec in self.failures:
                f.write(json.dumps({"record": "failure", **rec}) + "\n")
            f.write(json.dumps({"record": "summary", **self.aggregates()}) + "\n")
        summary_path = path.with_suffix(path.suffix + ".summary.json")
        summary_path.write_text(json.dumps(self.aggregates(), indent=2) + "\n")
        return summary_path

    @classmethod
    def load(cls, path):
        lines = [
            json.loads(ln) for ln in Path(path).read_text().splitlines() if ln.strip()
        ]
        if not lines or lines[0].get("record") != "header":
            raise DataError("not an evaluation report: %s" % path)
        head = lines[0]
        report = cls(
            task=head["task"],
            dataset=head["dataset"],
            models=head.get("models", {}),
            config_hash=head.get("config_hash", ""),
        )
        stored_summary = None
        for rec in lines[1:]:
            kind = rec.pop("record")
            if kind == "sample":
                report.samples.append(rec)
            elif kind == "failure":
                report.failures.append(rec)
            elif kind == "summary":
                stored_summary = rec
        if stored_summary is not None and stored_summary != report.aggregates():
            raise DataError("summary does not match per-sample records: %s" % path)
        return report
