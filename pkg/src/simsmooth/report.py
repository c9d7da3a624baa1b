"""Evaluation report serialization: delimited rows plus a JSON mirror.

Reports embed the full run configuration so a run can be reproduced from
its own output.  All formatting is deterministic: fixed column order,
sorted JSON keys, shortest round-trip float repr, no timestamps.
"""

from __future__ import annotations

import json

SCHEMA_VERSION = 1

TSV_COLUMNS = (
    "base_model",
    "method",
    "fold",
    "beta",
    "n_trials",
    "incorrect",
    "ties",
    "error_rate",
)


def report_rows(reports):
    rows = []
    for r in reports:
        rows.append(
            {
                "base_model": r.base_model,
                "method": r.method,
                "fold": r.fold,
                "beta": r.beta,
                "n_trials": r.n_trials,
                "incorrect": r.incorrect,
                "ties": r.ties,
                "error_rate": r.error_rate,
            }
        )
    return rows


def _cell(value):
    if value is None:
        return ""
    if isinstance(value, float):
        return repr(value)
    return str(value)


def render_tsv(reports, config=None, meta=None):
    lines = ["# simsmooth evaluate report v%d" % SCHEMA_VERSION]
    if config is not None:
        lines.append("# config: %s" % json.dumps(config, sort_keys=True))
    if meta is not None:
        lines.append("# meta: %s" % json.dumps(meta, sort_keys=True))
    lines.append("\t".join(TSV_COLUMNS))
    for row in report_rows(reports):
        lines.append("\t".join(_cell(row[c]) for c in TSV_COLUMNS))
    return "\n".join(lines) + "\n"


def render_json(reports, config=None, meta=None, paired=None):
    doc = {
        "schema_version": SCHEMA_VERSION,
        "config": config,
        "meta": meta,
        "reports": report_rows(reports),
    }
    if paired is not None:
        doc["paired"] = paired
    return json.dumps(doc, sort_keys=True, indent=2) + "\n"


def paired_section(reports, reference="AVG"):
    """Fold-paired comparisons of ``reference`` against the other methods."""
    from .evaluation import paired_difference

    by_cell = {}
    for r in reports:
        by_cell.setdefault((r.base_model, r.method), []).append(r)
    section = []
    for (base, method), rs in sorted(by_cell.items()):
        ref = by_cell.get((base, reference))
        if method == reference or ref is None:
            continue
        diff = paired_difference(ref, rs)
        section.append(
            {
                "base_model": base,
                "method_a": reference,
                "method_b": method,
                "fold_diffs": list(diff.fold_diffs),
                "mean_diff": diff.mean,
                "t_stat": diff.t_stat,
                "zero_variance": diff.zero_variance,
            }
        )
    return section


def parse_embedded_config(tsv_text):
    """Recover the config dict embedded in a rendered TSV report."""
    for line in tsv_text.splitlines():
        if line.startswith("# config: "):
            return json.loads(line[len("# config: ") :])
    raise ValueError("no embedded config found")
