"""Command-line front end: every computation writes CSV data plus a run manifest.

Exit codes: 0 success, 2 argument or domain error, 3 numeric failure.
Parameters come from flags, a JSON ``--config`` file (a manifest written by a
previous run is accepted) and built-in defaults, in that order of priority.
The default output directory is taken from ``TWDP_OUTPUT_DIR``.
"""

from __future__ import annotations

import argparse
import csv
import json
import logging
import math
import os
import sys
from dataclasses import asdict, dataclass
from pathlib import Path

import numpy as np

from . import __version__
from .closed_form import phase_pdf_closed
from .errors import ConfigError, NumericError, ParameterDomainError
from .params import ChannelParams, from_normalized
from .perf import pe_curve, pe_rician_oracle, PeCurve
from .phase_pdf import (
    PhasePdfSpec,
    bin_average_pdf,
    default_grid,
    phase_pdf_oracle,
    truncation_bounds,
)
from .simulate import GeoSimConfig, McConfig, geo_phase_histogram, geo_realization, mc_phase_samples

log = logging.getLogger("twdp_phase")

OUTPUT_ENV = "TWDP_OUTPUT_DIR"
LOOSE_MC_SAMPLES = 100_000

EXIT_OK, EXIT_DOMAIN, EXIT_NUMERIC = 0, 2, 3

PARAM_DEFAULTS = {"K": 10.0, "Gamma": 0.7, "Omega": 1.0, "Phi1": 0.0, "physical": False,
                  "v1": None, "v2": 0.0, "sigma2": None, "phi1": 0.0}

DEFAULTS = {
    "pdf": {**PARAM_DEFAULTS, "alpha_pct": 99.9, "grid_points": 2001, "method": "series", "out": "pdf.csv"},
    "bounds": {"Gamma": 1.0, "alpha_pct": 99.9, "K_range": [0.0, 60.0, 61], "nu_range": None,
               "out": "bounds.csv"},
    "pe": {"Gamma": 0.4, "Omega": 1.0, "M": [2, 4, 8, 16], "K_grid": None, "K_range": [0.0, 20.0, 21],
           "alpha_pct": 99.9, "rician_oracle": False},
    "mc": {**PARAM_DEFAULTS, "n_samples": 10_000_000, "seed": 0, "n_bins": 256, "alpha_pct": 99.9,
           "out": "mc_histogram.csv"},
    "geosim": {**PARAM_DEFAULTS, "tx_position": [0.0, 5.0], "reflector_position": [3.6633, -4.0613],
               "reflector_angle_deg": 25.0244, "rx_velocity": 10.0, "doppler_max_hz": 1000.0,
               "sample_time_s": 1e-5, "duration_s": 7.5e-3, "n_realizations": 200,
               "n_scatter_sinusoids": 64, "seed": 0, "n_bins": 256, "derotate_los": True,
               "export": "both", "alpha_pct": 99.9},
}
STOCHASTIC = {"mc", "geosim"}


@dataclass
class RunManifest:
    command: str
    params_json: str
    seed: int | None
    tool_version: str = __version__

    def write(self, path: Path) -> None:
        path.write_text(json.dumps(asdict(self), indent=2, sort_keys=True) + "\n")


def _fmt(v) -> str:
    return f"{v:.17g}" if isinstance(v, float) else str(v)


def _write_rows(path: Path, header, rows) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(header)
        for row in rows:
            w.writerow([_fmt(v) for v in row])


def _add_param_flags(p: argparse.ArgumentParser) -> None:
    g = p.add_argument_group("channel parameters")
    g.add_argument("--K", type=float)
    g.add_argument("--Gamma", type=float)
    g.add_argument("--Omega", type=float)
    g.add_argument("--Phi1", type=float)
    g.add_argument("--physical", action="store_true", default=None,
                   help="take --v1/--v2/--sigma2/--phi1 instead of K, Gamma, Omega")
    g.add_argument("--v1", type=float)
    g.add_argument("--v2", type=float)
    g.add_argument("--sigma2", type=float)
    g.add_argument("--phi1", type=float)


def _add_common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", type=Path, help="JSON file of parameters (flags win)")
    p.add_argument("--out-dir", type=Path, default=None)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="twdp-phase", description="TWDP conditional phase statistics")
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("pdf", help="phase density on a grid")
    _add_common(p)
    _add_param_flags(p)
    p.add_argument("--alpha-pct", dest="alpha_pct", type=float)
    p.add_argument("--grid-points", dest="grid_points", type=int)
    p.add_argument("--method", choices=["series", "closed", "oracle"])
    p.add_argument("--out")

    p = sub.add_parser("bounds", help="truncation bounds over a K or nu range")
    _add_common(p)
    p.add_argument("--Gamma", type=float)
    p.add_argument("--alpha-pct", dest="alpha_pct", type=float)
    rng = p.add_mutually_exclusive_group()
    rng.add_argument("--K-range", dest="K_range", nargs=3, type=float, metavar=("START", "STOP", "NUM"))
    rng.add_argument("--nu-range", dest="nu_range", nargs=3, type=float, metavar=("START", "STOP", "NUM"))
    p.add_argument("--out")

    p = sub.add_parser("pe", help="M-PSK synchronization error probability versus K")
    _add_common(p)
    p.add_argument("--Gamma", type=float)
    p.add_argument("--Omega", type=float)
    p.add_argument("--M", nargs="+", type=int)
    kg = p.add_mutually_exclusive_group()
    kg.add_argument("--K-grid", dest="K_grid", nargs="+", type=float)
    kg.add_argument("--K-range", dest="K_range", nargs=3, type=float, metavar=("START", "STOP", "NUM"))
    p.add_argument("--alpha-pct", dest="alpha_pct", type=float)
    p.add_argument("--rician-oracle", dest="rician_oracle", action="store_true", default=None,
                   help=argparse.SUPPRESS)

    p = sub.add_parser("mc", help="Monte Carlo phase histogram")
    _add_common(p)
    _add_param_flags(p)
    p.add_argument("--n-samples", dest="n_samples", type=int)
    p.add_argument("--seed", type=int)
    p.add_argument("--n-bins", dest="n_bins", type=int)
    p.add_argument("--alpha-pct", dest="alpha_pct", type=float)
    p.add_argument("--out")

    p = sub.add_parser("geosim", help="geometry-based Doppler simulator")
    _add_common(p)
    _add_param_flags(p)
    p.add_argument("--tx-position", dest="tx_position", nargs=2, type=float)
    p.add_argument("--reflector-position", dest="reflector_position", nargs=2, type=float)
    p.add_argument("--reflector-angle-deg", dest="reflector_angle_deg", type=float)
    p.add_argument("--rx-velocity", dest="rx_velocity", type=float)
    p.add_argument("--doppler-max-hz", dest="doppler_max_hz", type=float)
    p.add_argument("--sample-time-s", dest="sample_time_s", type=float)
    p.add_argument("--duration-s", dest="duration_s", type=float)
    p.add_argument("--n-realizations", dest="n_realizations", type=int)
    p.add_argument("--n-scatter-sinusoids", dest="n_scatter_sinusoids", type=int)
    p.add_argument("--seed", type=int)
    p.add_argument("--n-bins", dest="n_bins", type=int)
    p.add_argument("--no-derotate", dest="derotate_los", action="store_false", default=None)
    p.add_argument("--export", choices=["realizations", "histogram", "both"])
    p.add_argument("--alpha-pct", dest="alpha_pct", type=float)
    return parser


def _load_config(path: Path | None, command: str) -> dict:
    if path is None:
        return {}
    data = json.loads(Path(path).read_text())
    if "params_json" in data:
        if data.get("command") not in (None, command):
            raise ConfigError(f"manifest is for '{data['command']}', not '{command}'")
        data = json.loads(data["params_json"])
    return data


def resolve(args: argparse.Namespace) -> dict:
    """Merge defaults, config file and explicit flags (flags win)."""
    defaults = DEFAULTS[args.command]
    merged = dict(defaults)
    cfg = _load_config(args.config, args.command)
    unknown = set(cfg) - set(defaults)
    if unknown:
        raise ConfigError(f"unknown config keys: {sorted(unknown)}")
    merged.update(cfg)
    for key in defaults:
        val = getattr(args, key, None)
        if val is not None:
            merged[key] = val
    return merged


def _params(opts: dict, allow_zero_diffuse: bool = False) -> ChannelParams:
    if opts.get("physical"):
        if opts.get("v1") is None or opts.get("sigma2") is None:
            raise ConfigError("--physical needs --v1 and --sigma2")
        return ChannelParams(opts["v1"], opts.get("v2") or 0.0, opts["sigma2"], opts.get("phi1") or 0.0,
                             allow_zero_diffuse=allow_zero_diffuse)
    return from_normalized(opts["K"], opts["Gamma"], opts["Omega"], opts["Phi1"])


def _out_dir(args) -> Path:
    d = args.out_dir or Path(os.environ.get(OUTPUT_ENV, "."))
    d.mkdir(parents=True, exist_ok=True)
    return d


def _range(spec) -> np.ndarray:
    start, stop, num = spec
    if int(num) != num or num < 1:
        raise ConfigError("range NUM must be a positive integer")
    return np.linspace(start, stop, int(num))


def _emit(path: Path, command: str, opts: dict, seed=None) -> Path:
    RunManifest(command, json.dumps(opts, sort_keys=True), seed).write(path.with_name(path.name + ".manifest.json"))
    return path


def cmd_pdf(opts: dict, out_dir: Path) -> list[Path]:
    params = _params(opts)
    phi = default_grid(int(opts["grid_points"]))
    method = opts["method"]
    if method == "series":
        dens = PhasePdfSpec.build(params, opts["alpha_pct"])(phi)
    elif method == "closed":
        dens = np.array([phase_pdf_closed(params, x).total for x in phi])
    elif method == "oracle":
        dens = np.array([phase_pdf_oracle(params, x) for x in phi])
    else:
        raise ConfigError(f"unknown method {method}")
    path = out_dir / opts["out"]
    _write_rows(path, ["phi_rad", "density"], zip(phi.tolist(), np.asarray(dens).tolist()))
    return [_emit(path, "pdf", opts)]


def cmd_bounds(opts: dict, out_dir: Path) -> list[Path]:
    gamma = float(opts["Gamma"])
    g2 = gamma * gamma
    rows = []
    if opts.get("nu_range") is not None:
        if gamma == 0:
            raise ConfigError("a nu range needs Gamma > 0 (Gamma = 0 forces nu = 0)")
        for nu in _range(opts["nu_range"]):
            b = truncation_bounds(float(nu), opts["alpha_pct"])
            rows.append((float(nu), float(nu * (1 + g2) / g2), gamma, b.m_min, b.m_max, b.n_terms))
    else:
        for k in _range(opts["K_range"]):
            nu = float(k * g2 / (1 + g2))
            b = truncation_bounds(nu, opts["alpha_pct"])
            rows.append((nu, float(k), gamma, b.m_min, b.m_max, b.n_terms))
    path = out_dir / opts["out"]
    _write_rows(path, ["nu", "K", "Gamma", "m_min", "m_max", "n_terms"], rows)
    return [_emit(path, "bounds", opts)]


def cmd_pe(opts: dict, out_dir: Path) -> list[Path]:
    k_grid = np.asarray(opts["K_grid"], dtype=float) if opts.get("K_grid") else _range(opts["K_range"])
    outputs = []
    for m in opts["M"]:
        curve = pe_curve(opts["Gamma"], opts["Omega"], int(m), k_grid, opts["alpha_pct"])
        path = out_dir / f"pe_M{int(m)}.csv"
        curve.to_csv(path)
        outputs.append(_emit(path, "pe", opts))
        if opts.get("rician_oracle"):
            ref = np.array([pe_rician_oracle(float(k), int(m)) for k in k_grid])
            ref_curve = PeCurve(0.0, int(m), k_grid, ref, opts["Omega"], opts["alpha_pct"])
            rpath = out_dir / f"pe_rician_M{int(m)}.csv"
            ref_curve.to_csv(rpath)
            outputs.append(_emit(rpath, "pe", opts))
    return outputs


def mc_statistical_bound(density: np.ndarray, n: int, width: float, n_sigma: float = 3.0) -> float:
    """``n_sigma`` binomial standard deviations of the densest bin."""
    return n_sigma * math.sqrt(float(np.max(density)) / (n * width))


def cmd_mc(opts: dict, out_dir: Path) -> list[Path]:
    params = _params(opts, allow_zero_diffuse=True)
    cfg = McConfig(params, int(opts["n_samples"]), int(opts["seed"]), int(opts["n_bins"]))
    if cfg.n_samples < LOOSE_MC_SAMPLES:
        log.warning("only %d samples: the statistical tolerance of the histogram is loose", cfg.n_samples)
    hist = mc_phase_samples(cfg)
    analytic = None
    if params.sigma2 > 0:
        analytic = bin_average_pdf(PhasePdfSpec.build(params, opts["alpha_pct"]), hist.edges)
        dev = float(np.max(np.abs(hist.density - analytic)))
        bound = mc_statistical_bound(analytic, cfg.n_samples, float(hist.width[0]))
        print(json.dumps({"max_abs_deviation": dev, "statistical_bound": bound}))
    path = out_dir / opts["out"]
    hist.to_csv(path, analytic)
    return [_emit(path, "mc", opts, cfg.seed)]


def cmd_geosim(opts: dict, out_dir: Path) -> list[Path]:
    params = _params(opts, allow_zero_diffuse=True)
    cfg = GeoSimConfig(
        tx_position=tuple(opts["tx_position"]),
        reflector_position=tuple(opts["reflector_position"]),
        reflector_angle_deg=opts["reflector_angle_deg"],
        rx_velocity=opts["rx_velocity"],
        doppler_max_hz=opts["doppler_max_hz"],
        sample_time_s=opts["sample_time_s"],
        duration_s=opts["duration_s"],
        n_realizations=int(opts["n_realizations"]),
        n_scatter_sinusoids=int(opts["n_scatter_sinusoids"]),
        params=params,
        seed=int(opts["seed"]),
        derotate_los=bool(opts["derotate_los"]),
        n_bins=int(opts["n_bins"]),
    )
    outputs = []
    if opts["export"] in ("realizations", "both"):
        for i in range(cfg.n_realizations):
            path = out_dir / f"realization_{i:03d}.csv"
            geo_realization(cfg, i).to_csv(path, cfg.derotate_los)
            outputs.append(_emit(path, "geosim", opts, cfg.seed))
    if opts["export"] in ("histogram", "both"):
        hist = geo_phase_histogram(cfg)
        analytic = None
        if params.sigma2 > 0:
            analytic = bin_average_pdf(PhasePdfSpec.build(params, opts["alpha_pct"]), hist.edges)
        path = out_dir / "geo_histogram.csv"
        hist.to_csv(path, analytic)
        outputs.append(_emit(path, "geosim", opts, cfg.seed))
    return outputs


COMMANDS = {"pdf": cmd_pdf, "bounds": cmd_bounds, "pe": cmd_pe, "mc": cmd_mc, "geosim": cmd_geosim}


def main(argv=None) -> int:
    logging.basicConfig(level=logging.INFO, format="%(levelname)s: %(message)s")
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        opts = resolve(args)
        outputs = COMMANDS[args.command](opts, _out_dir(args))
    except (ParameterDomainError, ConfigError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DOMAIN
    except NumericError as exc:
        print(f"numeric failure ({exc.where}): {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    for path in outputs:
        log.info("wrote %s", path)
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
