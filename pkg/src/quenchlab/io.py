"""CSV/JSON emitters for every experiment product.

CSV floats use repr (shortest round-trip, up to 17 significant digits).
Each CSV has a JSON sidecar carrying the full config, schema version, and
the fixed basis/spin conventions.
"""

from __future__ import annotations

import json
import os

import numpy as np

SCHEMA_VERSION = 1

CONVENTIONS = {
    "bit_order": "site 0 = least-significant bit",
    "spin": "bit 0 <-> spin-up <-> sigma^z = +1",
    "entropy_units": "nats",
    "af_pattern": "spin-up on even sites (|0101...> with site 0 up)",
    "flip_site": "L // 2 (0-based)",
}


def _fmt(x) -> str:
    if isinstance(x, (float, np.floating)):
        return repr(float(x))
    return str(x)


def write_csv(path: str, header, rows):
    with open(path, "w") as f:
        f.write(",".join(header) + "\n")
        for row in rows:
            f.write(",".join(_fmt(x) for x in row) + "\n")


def write_metadata(path: str, payload: dict):
    with open(path, "w") as f:
        json.dump(
            {"schema_version": SCHEMA_VERSION, "conventions": CONVENTIONS, **payload},
            f,
            indent=2,
            default=_json_default,
        )
        f.write("\n")


def _json_default(obj):
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (np.floating,)):
        return float(obj)
    raise TypeError(f"cannot serialize {type(obj)}")


def quench_series_rows(series):
    """Header and rows for a QuenchSeries CSV (retained sectors only)."""
    qs = sorted(series.pq)
    header = ["t"] + [f"P_Q{q:+d}" for q in qs] + ["S_half", "survival"]
    rows = []
    for k, t in enumerate(series.grid.times):
        rows.append(
            [t]
            + [series.pq[q][k] for q in qs]
            + [series.entropy[k], series.survival[k]]
        )
    return header, rows


def write_quench_series(outdir: str, name: str, series, config: dict):
    header, rows = quench_series_rows(series)
    csv_path = os.path.join(outdir, f"{name}.csv")
    write_csv(csv_path, header, rows)
    write_metadata(
        os.path.join(outdir, f"{name}.json"),
        {
            "product": "quench_series",
            "config": config,
            "omitted_sectors": list(series.omitted_sectors),
            "max_norm_deviation": float(series.norm_deviation.max()),
        },
    )
    return csv_path


def write_ensemble_result(outdir: str, name: str, result, config: dict):
    qs = sorted(result.mean_pq)
    header = (
        ["t"]
        + [f"P_Q{q:+d}" for q in qs]
        + [f"se_P_Q{q:+d}" for q in qs]
        + ["S_half", "se_S_half"]
    )
    rows = []
    for k, t in enumerate(result.times):
        rows.append(
            [t]
            + [result.mean_pq[q][k] for q in qs]
            + [result.se_pq[q][k] for q in qs]
            + [result.mean_entropy[k], result.se_entropy[k]]
        )
    csv_path = os.path.join(outdir, f"{name}.csv")
    write_csv(csv_path, header, rows)
    write_metadata(
        os.path.join(outdir, f"{name}.json"),
        {
            "product": "ensemble_result",
            "config": config,
            "mean_N": result.mean_n,
            "se_N": result.se_n,
            "N_per_realization": result.n_values,
            "n_averaging": "mean of per-realization N",
        },
    )
    return csv_path


def write_spectrum(outdir: str, name: str, energies, entropies, weights, config: dict):
    csv_path = os.path.join(outdir, f"{name}.csv")
    write_csv(
        csv_path,
        ["E", "S_half", "weight"],
        zip(energies, entropies, weights),
    )
    write_metadata(
        os.path.join(outdir, f"{name}.json"),
        {"product": "spectrum", "config": config, "weight_sum": float(np.sum(weights))},
    )
    return csv_path


def write_n_table(outdir: str, name: str, rows, config: dict):
    csv_path = os.path.join(outdir, f"{name}.csv")
    write_csv(csv_path, ["L", "gamma", "N"], [(r["L"], r["gamma"], r["N"]) for r in rows])
    write_metadata(
        os.path.join(outdir, f"{name}.json"),
        {"product": "n_scaling", "config": config, "table": rows},
    )
    return csv_path


def write_training(outdir: str, name: str, result, ansatz, config: dict):
    csv_path = os.path.join(outdir, f"{name}_history.csv")
    write_csv(
        csv_path,
        ["iteration", "P"],
        [(i, p) for i, p in enumerate(result.history)],
    )
    with open(os.path.join(outdir, f"{name}_parameters.json"), "w") as f:
        json.dump(
            {
                "schema_version": SCHEMA_VERSION,
                "layout": "per composite layer: Rx row, Ry row, Rz row, ZZ row",
                "L": ansatz.L,
                "n_layers": ansatz.n_layers,
                "theta": result.theta.tolist(),
                "final_P": float(result.history[-1]),
                "converged": result.converged,
                "diverged": result.diverged,
            },
            f,
            indent=2,
        )
        f.write("\n")
    write_metadata(
        os.path.join(outdir, f"{name}.json"),
        {
            "product": "training",
            "config": config,
            "final_P": float(result.history[-1]),
            "iterations": int(len(result.history) - 1),
        },
    )
    return csv_path


def write_bound_report(outdir: str, name: str, report, config: dict):
    csv_path = os.path.join(outdir, f"{name}.csv")
    write_csv(
        csv_path,
        ["t", "O_nonth", "O_th_inst", "cross", "exact", "margin",
         "truncated_low", "truncated_high"],
        zip(report.times, report.o_nonth, report.o_th_inst, report.cross,
            report.exact, report.margin, report.truncated_low, report.truncated_high),
    )
    write_metadata(
        os.path.join(outdir, f"{name}.json"),
        {
            "product": "bound_report",
            "config": config,
            "delta": report.delta,
            "delta_est": report.delta_est,
            "o_th_late": report.o_th_late,
            "min_margin": float(report.margin.min()),
        },
    )
    return csv_path
