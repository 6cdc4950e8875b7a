"""Command-line front end.

    qbeats simulate --preset octalin --field zero --out s.csv
    qbeats trmfe    --preset dmb --out ratio.csv
    qbeats validate --suite tables

Exit codes: 0 success, 1 configuration error, 2 numerical-validation failure.
Output is deterministic for a given configuration; CSV files carry a
'#'-prefixed metadata header including the resolved-config hash.
"""

from __future__ import annotations

import argparse
import sys

import numpy as np

from . import __version__
from .config import (
    ConfigError,
    ExperimentConfig,
    load_config_file,
    load_preset,
)
from .dynamics import TimeSeries, clip_probabilities, one_group_weights, time_grid
from .hamiltonians import build_partitioned, build_reduced_one_group, distinct_spins
from .noisemethods import (
    echo_synthetic_encoded_values,
    echo_synthetic_sector_values,
    kraus_singlet_values,
    per_gate_singlet_values,
)
from .pipeline import (
    one_group_sector_trajectories,
    two_group_pair_trace,
)
from .postprocess import observed_intensity, observed_ratio
from .spinalg import HalfInt
from .validate import run_suite


def write_csv(path: str, columns: dict[str, np.ndarray], meta: dict) -> None:
    keys = list(columns)
    n = len(next(iter(columns.values())))
    with open(path, "w") as fh:
        fh.write(f"# qbeats {__version__}\n")
        for k, v in meta.items():
            fh.write(f"# {k}: {v}\n")
        fh.write(",".join(keys) + "\n")
        for i in range(n):
            fh.write(",".join(f"{columns[k][i]:.17g}" for k in keys) + "\n")


def rms_against_reference(times: np.ndarray, values: np.ndarray,
                          reference_csv: str) -> float:
    """RMS deviation from a user-supplied (time_ns, value) CSV.

    The reference curve is linearly interpolated onto the simulated grid,
    restricted to the overlapping time window.  Purely informational: nothing
    is asserted about external data.
    """
    rows = []
    with open(reference_csv) as fh:
        for raw in fh:
            line = raw.split("#", 1)[0].strip()
            if not line or line[0].isalpha():
                continue
            parts = line.replace(";", ",").split(",")
            rows.append((float(parts[0]), float(parts[1])))
    if len(rows) < 2:
        raise ConfigError(f"{reference_csv}: need at least two (time, value) rows")
    rows.sort()
    ref_t = np.array([r[0] for r in rows])
    ref_v = np.array([r[1] for r in rows])
    mask = (times >= ref_t[0]) & (times <= ref_t[-1])
    if not mask.any():
        raise ConfigError(f"{reference_csv}: no overlap with the simulated grid")
    interp = np.interp(times[mask], ref_t, ref_v)
    return float(np.sqrt(np.mean((values[mask] - interp) ** 2)))


def _sector_label(key) -> str:
    return f"I={key}" if key.is_integer else f"I={key.twice_value}/2"


def simulate_trace(config: ExperimentConfig, regime: str, threads: int = 1,
                   collect_sectors: bool = False) -> tuple[TimeSeries, dict]:
    """Run the configured pipeline for one field regime.

    Returns the main singlet trace, plus per-sector traces when
    ``collect_sectors`` is set (the --sectors CSV columns).
    """
    spec = config.spin_spec(regime)
    times = time_grid(*config.time_grid)
    sectors: dict[str, np.ndarray] = {}

    if len(config.groups) == 1:
        n = config.groups[0].count
        trajs = one_group_sector_trajectories(spec, times)
        if config.initial_state != "mixed":
            try:
                tI, tm = (int(round(2 * float(x))) for x in config.initial_state.split(","))
                I, m = HalfInt(tI), HalfInt(tm)
            except ValueError:
                raise ConfigError(
                    f"initial_state {config.initial_state!r}: expected 'mixed' or 'I,m'"
                ) from None
            if config.noise_method == "echo-synthetic" and m != I:
                raise ConfigError(
                    "echo-synthetic supports the mixed state or |I, m=I> sectors")
            from .dynamics import pair_trajectory_pure, sector_statevector
            from .hamiltonians import one_group_reduced_index

            H = build_reduced_one_group(spec)
            psi = sector_statevector(one_group_reduced_index(n, I, m), H.dims[1])
            traj = pair_trajectory_pure(H, psi, times)
            vals = _apply_noise_one(
                config, spec, traj, times,
                I if config.noise_method == "echo-synthetic" else None)
            return TimeSeries(times, clip_probabilities(vals, f"S_{regime}"),
                              f"S_{regime}"), sectors

        weights = one_group_weights(n, regime)
        total = sum(weights.values())
        if config.noise_method == "echo-synthetic":
            # this method runs per sector by construction
            per_sector = {
                I: clip_probabilities(
                    _apply_noise_one(config, spec, trajs[I].trajectory, times, I),
                    _sector_label(I))
                for I in distinct_spins(n)
            }
            vals = sum((w / total) * per_sector[HalfInt(abs(k.twice_value))]
                       for k, w in weights.items())
            if collect_sectors:
                sectors = {_sector_label(I): v for I, v in per_sector.items()}
        else:
            avg = sum((w / total) * trajs[HalfInt(abs(k.twice_value))].trajectory
                      for k, w in weights.items())
            vals = _apply_noise_one(config, spec, avg, times, None)
            if collect_sectors:
                for I in distinct_spins(n):
                    svals = _apply_noise_one(config, spec, trajs[I].trajectory, times, I)
                    sectors[_sector_label(I)] = clip_probabilities(svals, _sector_label(I))
        return TimeSeries(times, clip_probabilities(vals, f"S_{regime}"), f"S_{regime}"), sectors

    # two-group system
    if config.initial_state != "mixed":
        raise ConfigError("two-group systems support only the mixed initial state")
    if collect_sectors:
        from qbeats.pipeline import two_group_sector_trace
        from qbeats.hamiltonians import build_two_group_block
        from qbeats.spinalg import spin_addition_counts

        for I2 in sorted(spin_addition_counts(config.groups[1].count), reverse=True):
            sector = build_two_group_block(I2, spec)
            tr = two_group_sector_trace(sector, times)
            # padded-register run convention: frozen padding slots count as 1
            vals = tr.singlet().values + sector.pad_register / sector.register_size
            sectors[f"I2={I2}"] = clip_probabilities(vals, f"I2={I2}")
    trace = two_group_pair_trace(spec, times, threads=threads)
    if config.noise_method == "none":
        out = trace.singlet(f"S_{regime}")
    elif config.noise_method == "kraus":
        out = trace.relaxed(spec.T1, spec.T2).singlet(f"S_{regime}")
    elif config.noise_method == "per-gate":
        vals = per_gate_singlet_values(trace.trajectory, times, spec.T1, spec.T2)
        out = TimeSeries(times, clip_probabilities(vals, f"S_{regime}"), f"S_{regime}")
    else:  # echo-synthetic: singlet trace encoded in an Rz rotation
        coherent = trace.singlet("S_coherent")
        vals = echo_synthetic_encoded_values(coherent, spec.T1, spec.T2, config.hardware)
        out = TimeSeries(times, clip_probabilities(vals, f"S_{regime}"), f"S_{regime}")
    return out, sectors


def _apply_noise_one(config: ExperimentConfig, spec, traj, times, sector_I):
    """Noise dispatch for one-group trajectories (averaged or per sector)."""
    method = config.noise_method
    if method == "none":
        from .dynamics import SINGLET

        return np.real(np.einsum("a,tab,b->t", SINGLET.conj(), traj, SINGLET))
    if method == "kraus":
        return kraus_singlet_values(traj, times, spec.T1, spec.T2)
    if method == "per-gate":
        return per_gate_singlet_values(traj, times, spec.T1, spec.T2)
    if method == "echo-synthetic":
        if sector_I is None:
            raise ConfigError("echo-synthetic runs per sector; use sector trajectories")
        H = build_partitioned(sector_I, spec)
        return echo_synthetic_sector_values(H, times, spec.T1, spec.T2, config.hardware)
    raise ConfigError(f"unknown noise method {method!r}")


def _load(args) -> ExperimentConfig:
    if args.config:
        return load_config_file(args.config)
    return load_preset(args.preset or "octalin")


def cmd_simulate(args) -> int:
    config = _load(args)
    regime = args.field or config.field_regime
    trace, sectors = simulate_trace(config, regime, threads=args.threads,
                                    collect_sectors=args.sectors)
    columns = {"time_ns": trace.times, "singlet_probability": trace.values}
    if args.sectors:
        for label, vals in sectors.items():
            columns[label] = vals
    meta = {
        "command": "simulate",
        "name": config.name,
        "config_sha256": config.digest(),
        "field_regime": regime,
        "noise_method": config.noise_method,
        "initial_state": config.initial_state,
        "units": "time_ns, probability",
    }
    if args.compare:
        rms = rms_against_reference(trace.times, trace.values, args.compare)
        meta["rms_vs_reference"] = f"{rms:.6g} ({args.compare})"
        print(f"RMS deviation vs {args.compare}: {rms:.6g}")
    write_csv(args.out, columns, meta)
    print(f"wrote {args.out} ({len(trace.times)} rows)")
    return 0


def cmd_trmfe(args) -> int:
    config = _load(args)
    if config.postprocess is None:
        raise ConfigError("trmfe requires a postprocess block in the configuration")
    s_high, _ = simulate_trace(config, "high", threads=args.threads)
    s_zero, _ = simulate_trace(config, "zero", threads=args.threads)
    ratio = observed_ratio(s_high, s_zero, config.postprocess)
    i_b = observed_intensity(s_high, config.postprocess)
    i_0 = observed_intensity(s_zero, config.postprocess)
    mask = np.isin(s_high.times, ratio.times)
    columns = {
        "time_ns": ratio.times,
        "ratio": ratio.values,
        "I_B": i_b.values[mask],
        "I_0": i_0.values[mask],
        "S_B": s_high.values[mask],
        "S_0": s_zero.values[mask],
    }
    meta = {
        "command": "trmfe",
        "name": config.name,
        "config_sha256": config.digest(),
        "noise_method": config.noise_method,
        "postprocess": f"theta={config.postprocess.theta}, tau_f={config.postprocess.tau_f}, "
                       f"t0={config.postprocess.t0}, t_g={config.postprocess.t_g}",
        "edge_unreliable_before_ns": ratio.meta.get("edge_unreliable_before_ns"),
        "units": "time_ns, dimensionless",
    }
    if args.compare:
        rms = rms_against_reference(ratio.times, ratio.values, args.compare)
        meta["rms_vs_reference"] = f"{rms:.6g} ({args.compare})"
        print(f"RMS deviation vs {args.compare}: {rms:.6g}")
    write_csv(args.out, columns, meta)
    print(f"wrote {args.out} ({len(ratio.times)} rows)")
    return 0


def cmd_validate(args) -> int:
    try:
        results = run_suite(args.suite)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    for r in results:
        print(r.line())
    failed = [r for r in results if not r.ok]
    print(f"{len(results) - len(failed)}/{len(results)} checks passed")
    return 2 if failed else 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="qbeats",
        description="Quantum-beat simulator for spin-correlated radical pairs",
    )
    parser.add_argument("--version", action="version", version=f"qbeats {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--config", help="path to a YAML experiment configuration")
        p.add_argument("--preset", choices=("octalin", "dmb"),
                       help="built-in experiment preset (default: octalin)")
        p.add_argument("--out", default="qbeats_out.csv", help="output CSV path")
        p.add_argument("--threads", type=int, default=1,
                       help="worker threads for independent sector simulations")
        p.add_argument("--compare", metavar="CSV",
                       help="report the RMS deviation from a (time_ns, value) "
                            "reference curve (informational only)")

    p_sim = sub.add_parser("simulate", help="singlet-probability trace S(t)")
    common(p_sim)
    p_sim.add_argument("--field", choices=("zero", "high"),
                       help="override the configured field regime")
    p_sim.add_argument("--sectors", action="store_true",
                       help="include per-sector trace columns")
    p_sim.set_defaults(func=cmd_simulate)

    p_ratio = sub.add_parser("trmfe", help="TR-MFE ratio curve I_B/I_0")
    common(p_ratio)
    p_ratio.set_defaults(func=cmd_trmfe)

    p_val = sub.add_parser("validate", help="run built-in validation suites")
    p_val.add_argument("--suite", default="all",
                       help="tables | oracle | channel-circuit | kak | correction | all")
    p_val.set_defaults(func=cmd_validate)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
