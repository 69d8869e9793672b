"""Command-line entry point: experiment recipes over the library modules.

Subcommands: spectrum | quench | nscaling | disorder | train | bounds.
Each reads an optional TOML config plus --set section.key=value overrides
and writes CSV + JSON (and PNG figures unless --no-plots) to the output
directory (flag, else $QUENCHLAB_OUTDIR, else cwd).

Exit codes: 0 success, 1 config error, 2 numerical failure, 3 resource cap.
"""

from __future__ import annotations

import argparse
import ast
import copy
import os
import sys

import numpy as np

try:
    import tomllib as tomli
except ImportError:
    import tomli

from . import io as qio
from . import plotting
from .bounds import (
    expectation_decomposition,
    hsi_decompose,
    pauli_string_observable,
    verify_loose_bound,
)
from .circuit import Ansatz, OptimizerConfig, optimize, select_target_subspace
from .dynamics import TimeGrid, quench_series
from .ensemble import EnsembleConfig, run_ensemble
from .hamiltonians import (
    DimensionCapError,
    HamiltonianSpecU1,
    HamiltonianSpecU1Disordered,
    HamiltonianSpecZ2,
    build_h_u1,
    build_h_u1_disordered,
    build_h_z2,
)
from .hilbert import ChargeMap, ParityMap, make_product_state
from .spectra import (
    EigensolverError,
    diagonalize,
    n_statistic,
    overlaps,
    spectral_entropies,
)

OUTPUT_DIR_ENV = "QUENCHLAB_OUTDIR"

EXIT_OK = 0
EXIT_CONFIG = 1
EXIT_NUMERICAL = 2
EXIT_RESOURCE = 3


class ConfigError(Exception):
    pass


DEFAULTS = {
    "experiment": {
        "profile": "ci",
        "workers": 1,
        "l_cap": 14,
    },
    "model": {
        "family": "u1",          # u1 | z2 | u1_disordered
        "L": 12,
        "gamma": 0.9,
        "lambda1": 0.2,
        "lambda2": 0.32,
        "h": 1e-7,
        "delta1": 0.84,
        "mu": 0.8,
        "W": 0.0,
        "fields": [],            # explicit fields for disorder-free runs
    },
    "initial": {"kind": "F"},
    "grid": {"t_max": 50.0, "points": 501},
    "ensemble": {"R": -1, "master_seed": 2024},   # R=-1: profile default
    "nscaling": {"L_values": [8, 10, 12], "gamma_values": [0.9], "threshold": 0.8},
    "circuit": {
        "n_layers": 5,
        "rule": "n_set",
        "threshold": 0.8,
        "k": 0,
        "learning_rate": 0.02,
        "max_iterations": 2000,
        "patience": 100,
        "tolerance": 1e-6,
        "init": "zeros",
    },
    "bounds": {"observable_axis": "z", "observable_site": -1},   # -1: L // 2
}

PROFILE_R = {"full": 400, "ci": 50}


def load_config(path, overrides):
    cfg = copy.deepcopy(DEFAULTS)
    if path is not None:
        try:
            with open(path, "rb") as f:
                user = tomli.load(f)
        except (OSError, tomli.TOMLDecodeError) as exc:
            raise ConfigError(f"cannot read config {path}: {exc}") from exc
        for section, values in user.items():
            if section not in cfg:
                raise ConfigError(f"unknown config section [{section}]")
            if not isinstance(values, dict):
                raise ConfigError(f"[{section}] must be a table")
            for key, val in values.items():
                if key not in cfg[section]:
                    raise ConfigError(f"unknown key {key!r} in [{section}]")
                cfg[section][key] = val
    for item in overrides or []:
        if "=" not in item or "." not in item.split("=", 1)[0]:
            raise ConfigError(f"--set expects section.key=value, got {item!r}")
        target, raw = item.split("=", 1)
        section, key = target.split(".", 1)
        if section not in cfg or key not in cfg[section]:
            raise ConfigError(f"unknown config key {target!r}")
        try:
            cfg[section][key] = ast.literal_eval(raw)
        except (ValueError, SyntaxError):
            cfg[section][key] = raw
    if cfg["experiment"]["profile"] not in PROFILE_R:
        raise ConfigError(f"unknown profile {cfg['experiment']['profile']!r}")
    if cfg["ensemble"]["R"] == -1:
        cfg["ensemble"]["R"] = PROFILE_R[cfg["experiment"]["profile"]]
    return cfg


def _fields_for(cfg, L):
    fields = cfg["model"]["fields"]
    if fields:
        if len(fields) != L:
            raise ConfigError(f"model.fields length {len(fields)} != L={L}")
        return tuple(float(f) for f in fields)
    return tuple(0.0 for _ in range(L))


def build_model(cfg, L=None, gamma=None):
    m = cfg["model"]
    L = m["L"] if L is None else L
    gamma = m["gamma"] if gamma is None else gamma
    cap = cfg["experiment"]["l_cap"]
    family = m["family"]
    if family == "u1":
        return build_h_u1(
            HamiltonianSpecU1(
                L=L, gamma=gamma, lambda1=m["lambda1"], lambda2=m["lambda2"], h=m["h"]
            ),
            cap=cap,
        )
    if family == "z2":
        W = m["W"] if m["W"] > 0 else 2.4
        return build_h_z2(
            HamiltonianSpecZ2(
                L=L, gamma=gamma, fields=_fields_for(cfg, L), delta1=m["delta1"], W=W
            ),
            cap=cap,
        )
    if family == "u1_disordered":
        W = m["W"] if m["W"] > 0 else 4.8
        return build_h_u1_disordered(
            HamiltonianSpecU1Disordered(
                L=L, gamma=gamma, fields=_fields_for(cfg, L), mu=m["mu"], W=W
            ),
            cap=cap,
        )
    raise ConfigError(f"unknown model family {family!r}")


def _sector_map(cfg, space):
    return ParityMap.build(space) if cfg["model"]["family"] == "z2" else ChargeMap.build(space)


def _grid(cfg):
    return TimeGrid.linear(cfg["grid"]["t_max"], cfg["grid"]["points"])


def _spectral_setup(cfg):
    H = build_model(cfg)
    sd = diagonalize(H)
    psi = make_product_state(cfg["initial"]["kind"], cfg["model"]["L"])
    return H, sd, psi


def cmd_spectrum(cfg, outdir, plots):
    _, sd, psi = _spectral_setup(cfg)
    entropies = spectral_entropies(sd, cfg["model"]["L"] // 2)
    weights = overlaps(psi, sd).weights
    qio.write_spectrum(outdir, "spectrum", sd.energies, entropies, weights, cfg)
    if plots:
        plotting.plot_spectrum(outdir, "spectrum", sd.energies, entropies, weights)


def cmd_quench(cfg, outdir, plots):
    _, sd, psi = _spectral_setup(cfg)
    series = quench_series(sd, psi, _grid(cfg), cmap=_sector_map(cfg, psi.space))
    qio.write_quench_series(outdir, "quench", series, cfg)
    if plots:
        plotting.plot_quench(outdir, "quench", series)


def cmd_nscaling(cfg, outdir, plots):
    rows = []
    for L in cfg["nscaling"]["L_values"]:
        for g in cfg["nscaling"]["gamma_values"]:
            sd = diagonalize(build_model(cfg, L=L, gamma=g))
            psi = make_product_state(cfg["initial"]["kind"], L)
            n, _ = n_statistic(overlaps(psi, sd), cfg["nscaling"]["threshold"])
            rows.append({"L": int(L), "gamma": float(g), "N": n})
    qio.write_n_table(outdir, "nscaling", rows, cfg)
    if plots:
        plotting.plot_n_scaling(outdir, "nscaling", rows)


def cmd_disorder(cfg, outdir, plots):
    family = cfg["model"]["family"]
    if family == "u1":
        raise ConfigError("disorder requires model.family z2 or u1_disordered")
    m = cfg["model"]
    default_w = 2.4 if family == "z2" else 4.8
    ecfg = EnsembleConfig(
        family=family,
        L=m["L"],
        gamma=m["gamma"],
        W=m["W"] if m["W"] > 0 else default_w,
        R=cfg["ensemble"]["R"],
        master_seed=cfg["ensemble"]["master_seed"],
        coupling=m["delta1"] if family == "z2" else m["mu"],
        t_max=cfg["grid"]["t_max"],
        t_points=cfg["grid"]["points"],
    )
    result = run_ensemble(
        ecfg,
        cfg["initial"]["kind"],
        workers=cfg["experiment"]["workers"],
        checkpoint_dir=os.path.join(outdir, "checkpoints"),
    )
    qio.write_ensemble_result(outdir, "disorder", result, cfg)
    if plots:
        plotting.plot_ensemble(outdir, "disorder", result)


def cmd_train(cfg, outdir, plots):
    _, sd, psi = _spectral_setup(cfg)
    c = cfg["circuit"]
    target = select_target_subspace(
        sd, psi, rule=c["rule"], threshold=c["threshold"],
        k=c["k"] if c["k"] > 0 else None,
    )
    ansatz = Ansatz(L=cfg["model"]["L"], n_layers=c["n_layers"])
    result = optimize(
        ansatz, psi, target,
        OptimizerConfig(
            learning_rate=c["learning_rate"],
            max_iterations=c["max_iterations"],
            patience=c["patience"],
            tolerance=c["tolerance"],
            init=c["init"],
        ),
    )
    qio.write_training(outdir, "train", result, ansatz, cfg)
    if plots:
        plotting.plot_training(outdir, "train", result.history)


def cmd_bounds(cfg, outdir, plots):
    _, sd, psi = _spectral_setup(cfg)
    c = cfg["circuit"]
    target = select_target_subspace(sd, psi, rule="n_set", threshold=c["threshold"])
    decomp = hsi_decompose(psi, target)
    site = cfg["bounds"]["observable_site"]
    site = cfg["model"]["L"] // 2 if site < 0 else site
    obs = pauli_string_observable(
        psi.space, ((site, cfg["bounds"]["observable_axis"]),)
    )
    report = expectation_decomposition(decomp, sd, obs, _grid(cfg))
    verify_loose_bound(report)
    qio.write_bound_report(outdir, "bounds", report, cfg)
    if plots:
        plotting.plot_bounds(outdir, "bounds", report)


COMMANDS = {
    "spectrum": cmd_spectrum,
    "quench": cmd_quench,
    "nscaling": cmd_nscaling,
    "disorder": cmd_disorder,
    "train": cmd_train,
    "bounds": cmd_bounds,
}


def make_parser():
    parser = argparse.ArgumentParser(
        prog="quenchlab",
        description="Spin-chain quench laboratory: spectra, dynamics, "
        "disorder ensembles, circuit training, observable bounds.",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        p = sub.add_parser(name)
        p.add_argument("config", nargs="?", default=None, help="TOML config file")
        p.add_argument("--set", action="append", default=[], metavar="SECTION.KEY=VALUE")
        p.add_argument("--output-dir", default=None)
        p.add_argument("--no-plots", action="store_true")
    return parser


def main(argv=None) -> int:
    args = make_parser().parse_args(argv)
    try:
        cfg = load_config(args.config, args.set)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG

    outdir = args.output_dir or os.environ.get(OUTPUT_DIR_ENV) or "."
    os.makedirs(outdir, exist_ok=True)

    try:
        COMMANDS[args.command](cfg, outdir, not args.no_plots)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except DimensionCapError as exc:
        print(f"resource cap: {exc}", file=sys.stderr)
        return EXIT_RESOURCE
    except (EigensolverError, AssertionError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except ValueError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
