"""Result tables: pooled per-user samples plus percentile summaries.

CSV header::

    scenario,axis_value,metric,sample_db

Sample rows come first, one per pooled sample in ascending order. Summary
rows follow, flagged in the metric field as ``mf_sinr;summary=true;p=0.5``
with the percentile value in ``sample_db``. Numbers carry 6 significant
digits. JSONL rows carry the flag as separate ``summary`` and ``percentile``
fields and write non-finite values as null.
"""

from __future__ import annotations

import csv
import io
import json
import math
from pathlib import Path

from .montecarlo import ExperimentResult

COLUMNS = ("scenario", "axis_value", "metric", "sample_db")
METRICS = ("mf_sinr", "zf_snr")
SUMMARY_PERCENTILES = (0.1, 0.5, 0.9)


def fmt(x):
    return f"{x:.6g}"


def summary_metric(metric, p):
    return f"{metric};summary=true;p={fmt(p)}"


def split_metric(field):
    """``(metric, percentile or None)`` from a CSV metric field."""
    parts = field.split(";")
    if len(parts) == 3 and parts[1] == "summary=true" and parts[2].startswith("p="):
        return parts[0], float(parts[2][2:])
    return field, None


def result_rows(results):
    """Yield row dicts for ``(label, axis_value, ExperimentResult)`` triples."""
    for label, axis_value, res in results:
        av = "" if axis_value is None else str(axis_value)
        for metric in METRICS:
            for x in res.cdf(metric).sorted_samples:
                yield {"scenario": label, "axis_value": av, "metric": metric,
                       "sample_db": float(x), "summary": False, "percentile": None}
        for metric in METRICS:
            cdf = res.cdf(metric)
            for p in SUMMARY_PERCENTILES:
                yield {"scenario": label, "axis_value": av, "metric": metric,
                       "sample_db": cdf.percentile(p), "summary": True,
                       "percentile": p}


def _normalize(results):
    if isinstance(results, ExperimentResult):
        results = [(results.config.label, None, results)]
    results = list(results)
    if not results:
        raise ValueError("refusing to write an empty result set")
    return results


def render(results, format="csv") -> str:
    results = _normalize(results)
    rows = result_rows(results)
    buf = io.StringIO(newline="")
    if format == "csv":
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(COLUMNS)
        for r in rows:
            metric = (summary_metric(r["metric"], r["percentile"]) if r["summary"]
                      else r["metric"])
            w.writerow([r["scenario"], r["axis_value"], metric, fmt(r["sample_db"])])
    elif format == "jsonl":
        for r in rows:
            x = float(fmt(r["sample_db"]))
            r["sample_db"] = x if math.isfinite(x) else None
            buf.write(json.dumps(r, sort_keys=False) + "\n")
    else:
        raise ValueError(f"unknown format {format!r}; use csv or jsonl")
    return buf.getvalue()


def emit_results(results, path, format="csv"):
    """Write results to ``path`` as UTF-8 CSV or JSONL.

    ``results`` is an :class:`ExperimentResult` or an iterable of
    ``(label, axis_value, ExperimentResult)``.
    """
    text = render(results, format)
    with open(Path(path), "w", encoding="utf-8", newline="") as fh:
        fh.write(text)


def read_results_csv(path):
    """Parse an emitted CSV back into ``(samples, summaries)``.

    ``samples`` maps ``(scenario, axis_value, metric)`` to a list of floats;
    ``summaries`` maps the same key plus the percentile to its value.
    """
    samples, summaries = {}, {}
    with open(path, encoding="utf-8", newline="") as fh:
        reader = csv.DictReader(fh)
        if tuple(reader.fieldnames or ()) != COLUMNS:
            raise ValueError(f"unexpected header {reader.fieldnames}")
        for row in reader:
            metric, p = split_metric(row["metric"])
            key = (row["scenario"], row["axis_value"], metric)
            if p is not None:
                summaries[key + (p,)] = float(row["sample_db"])
            else:
                samples.setdefault(key, []).append(float(row["sample_db"]))
    return samples, summaries
