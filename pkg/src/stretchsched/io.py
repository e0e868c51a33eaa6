"""JSON and CSV formats: instances, schedules, Gantt rows, forest/block dumps and check reports.

Every rational is written as a "num/den" string; decimals appear only in
display columns.
"""

from __future__ import annotations

import csv
import io
import json
from fractions import Fraction
from pathlib import Path

from .model import Instance, Job, Schedule, decimal, fmt, stretch_report

SCHEDULE_FORMAT = "stretchsched.schedule.v1"
REPORT_FORMAT = "stretchsched.report.v1"


def _time(value) -> Fraction:
    if isinstance(value, bool) or isinstance(value, float):
        raise ValueError(f"times must be integers or 'num/den' strings, got {value!r}")
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, str):
        return Fraction(value)
    raise ValueError(f"unsupported time value {value!r}")


def instance_from_dict(data: dict) -> Instance:
    try:
        jobs = tuple(Job(int(row["id"]), _time(row["release"]), _time(row["processing"])) for row in data["jobs"])
        return Instance(jobs, int(data.get("machines", 1)))
    except (KeyError, TypeError, ZeroDivisionError) as exc:
        raise ValueError(f"malformed instance: {exc}") from exc


def instance_to_dict(instance: Instance) -> dict:
    return {
        "machines": instance.machines,
        "jobs": [
            {"id": job.id, "release": fmt(job.release), "processing": fmt(job.processing)} for job in instance.jobs
        ],
    }


def read_instance(path: str | Path) -> Instance:
    with open(path, encoding="utf-8") as fh:
        return instance_from_dict(json.load(fh))


def write_instance(instance: Instance, path: str | Path) -> None:
    Path(path).write_text(json.dumps(instance_to_dict(instance), indent=2) + "\n", encoding="utf-8")


def schedule_to_dict(schedule: Schedule, with_report: bool = True) -> dict:
    out = {
        "format": SCHEDULE_FORMAT,
        "policy": schedule.policy,
        "preemptive": schedule.preemptive,
        "speed": fmt(schedule.speed),
        "convention": schedule.convention.value,
        "instance": instance_to_dict(schedule.instance),
        "segments": [
            {"job": seg.job_id, "machine": seg.machine, "start": fmt(seg.start), "end": fmt(seg.end)}
            for seg in schedule.segments
        ],
    }
    if with_report:
        out["report"] = stretch_report(schedule).to_dict()
    return out


def gantt_rows(schedule: Schedule) -> list[dict]:
    return [
        {
            "job": seg.job_id,
            "machine": seg.machine,
            "start": decimal(seg.start),
            "end": decimal(seg.end),
            "start_exact": fmt(seg.start),
            "end_exact": fmt(seg.end),
        }
        for seg in schedule.segments
    ]


GANTT_FIELDS = ["job", "machine", "start", "end", "start_exact", "end_exact"]


def gantt_csv(schedule: Schedule) -> str:
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=GANTT_FIELDS, lineterminator="\n")
    writer.writeheader()
    writer.writerows(gantt_rows(schedule))
    return buf.getvalue()


def _q(value: Fraction | None) -> str | None:
    return None if value is None else fmt(value)


def _plain(value):
    """Details may hold Fractions and tuples; make them JSON-ready."""
    if isinstance(value, Fraction):
        return fmt(value)
    if isinstance(value, dict):
        return {k: _plain(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_plain(v) for v in value]
    return value


def report_to_dict(report) -> dict:
    summary = {
        name: {
            "counts": entry["counts"],
            "worst_ratio": _q(entry["worst_ratio"]),
            "worst_ratio_decimal": None if entry["worst_ratio"] is None else decimal(entry["worst_ratio"]),
            "worst_instance": entry["worst_instance"],
            "limit_at_worst": _q(entry["limit_at_worst"]),
        }
        for name, entry in report.summary().items()
    }
    instances = []
    for item in report.instances:
        instances.append(
            {
                "index": item.index,
                "label": item.label,
                "n": item.instance.n,
                "m": item.instance.machines,
                "delta": fmt(item.delta),
                "totals": {k: _q(v) for k, v in item.totals.items()},
                "checks": [
                    {
                        "name": check.name,
                        "verdict": check.verdict,
                        "lhs": _q(check.lhs),
                        "rhs": _q(check.rhs),
                        "ratio": _q(check.ratio),
                        "limit": _q(check.limit),
                        "details": _plain(check.details),
                        **({"counterexample": instance_to_dict(item.instance)} if check.failed else {}),
                    }
                    for check in item.checks
                ],
            }
        )
    return {
        "format": REPORT_FORMAT,
        "header": {"generated_at": report.generated_at},
        "config": report.config.to_dict(),
        "ok": report.ok,
        "summary": summary,
        "instances": instances,
    }


def report_json(report) -> str:
    return json.dumps(report_to_dict(report), indent=2, sort_keys=False) + "\n"


REPORT_FIELDS = [
    "instance",
    "label",
    "n",
    "m",
    "delta",
    "check",
    "verdict",
    "lhs",
    "lhs_decimal",
    "rhs",
    "rhs_decimal",
    "ratio",
    "ratio_decimal",
    "limit",
    "counterexample",
]


def report_rows(data: dict) -> list[dict]:
    """One row per (instance, check) from a report dictionary."""
    rows = []
    for item in data["instances"]:
        for check in item["checks"]:
            row = {
                "instance": item["index"],
                "label": item["label"],
                "n": item["n"],
                "m": item["m"],
                "delta": item["delta"],
                "check": check["name"],
                "verdict": check["verdict"],
                "counterexample": json.dumps(check["counterexample"], separators=(",", ":"))
                if "counterexample" in check
                else "",
            }
            for key in ("lhs", "rhs", "ratio", "limit"):
                row[key] = check[key] or ""
            for key in ("lhs", "rhs", "ratio"):
                row[key + "_decimal"] = decimal(Fraction(check[key])) if check[key] else ""
            rows.append(row)
    return rows


def report_csv(data: dict) -> str:
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=REPORT_FIELDS, lineterminator="\n")
    writer.writeheader()
    writer.writerows(report_rows(data))
    return buf.getvalue()


def strip_header(data: dict) -> dict:
    """Report without its timestamp header, for byte-level comparisons."""
    return {k: v for k, v in data.items() if k != "header"}


def blocks_dump(blocks, omms: Schedule, sptm: Schedule) -> dict:
    """Per block: members, boundary index and first/last completion under OMMS and SPTM."""
    completions = {"omms": omms.completions(), "sptm": sptm.completions()}
    out = []
    for block in blocks:
        row = block.to_dict()
        for name, done in completions.items():
            times = [done[j] for j in block.jobs]
            row[name] = {"first_completion": fmt(min(times)), "last_completion": fmt(max(times))}
        out.append(row)
    return {"machines": omms.instance.machines, "blocks": out}


def write_text(path: str | Path, text: str) -> None:
    Path(path).write_text(text, encoding="utf-8")


def write_json(path: str | Path, data: dict) -> None:
    write_text(path, json.dumps(data, indent=2) + "\n")
