"""Deterministic CSV / JSON writers with a provenance line."""

import csv
import io
import json
import sys

SCHEMA = 1


def flags_line(flags: dict) -> str:
    items = ",".join(f"{k}={flags[k]}" for k in sorted(flags))
    return f"#flags={items};schema={SCHEMA}"


def render_csv(fields, rows, flags: dict) -> str:
    buf = io.StringIO()
    buf.write(flags_line(flags) + "\n")
    w = csv.DictWriter(buf, fieldnames=list(fields), lineterminator="\n")
    w.writeheader()
    for row in rows:
        w.writerow(row)
    return buf.getvalue()


def render_json(obj: dict, flags: dict) -> str:
    payload = {"schema": SCHEMA, "flags": {k: flags[k] for k in sorted(flags)}}
    payload.update(obj)
    return json.dumps(payload, indent=2, sort_keys=True, default=str) + "\n"


def emit(text: str, out: str = "-"):
    if out in (None, "-"):
        sys.stdout.write(text)
        sys.stdout.flush()
        return
    with open(out, "w", newline="") as fh:
        fh.write(text)
