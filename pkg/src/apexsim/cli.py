"""Command-line front end.

Commands: train, simulate, replay, compare, recover. Machine-readable output
goes to files named <command>-<seed>-<timestamp>.json/.csv in the output
directory; stdout gets a one-line summary. Exit codes: 0 success, 2 input or
config validation failure, 1 internal invariant violation.
"""

import argparse
import csv
import hashlib
import json
import os
import sys
from datetime import datetime, timezone

from .compare import CompareSettings, compare_report, run_compare
from .config import load_config
from .disk import new_disk
from .errors import ConfigError, TraceError
from .policies import make_policy
from .recovery import recovery_table, weighted_rr
from .tuner import train
from .vfs import FileSystem
from .workload import read_trace, replay_trace, run_simulation, write_trace


def _stamp() -> str:
    # microsecond resolution so back-to-back runs never collide on a name
    return datetime.now(timezone.utc).strftime("%Y%m%dT%H%M%S%fZ")


def _config_sha256(path: str) -> str:
    with open(path, "rb") as fh:
        return hashlib.sha256(fh.read()).hexdigest()


def _out_path(out_dir: str, command: str, seed, stamp: str, ext: str) -> str:
    os.makedirs(out_dir, exist_ok=True)
    return os.path.join(out_dir, f"{command}-{seed}-{stamp}.{ext}")


def _write_json(path: str, payload: dict) -> None:
    with open(path, "w") as fh:
        json.dump(payload, fh, sort_keys=True, separators=(",", ":"))
        fh.write("\n")


def _fresh_fs(cfg):
    disk = new_disk(cfg.geometry, cfg.coefficients)
    policy = make_policy(cfg.policy_kind, seed=cfg.workload.rng_seed)
    return FileSystem(disk, policy=policy, invert_link_rule=cfg.invert_link_rule)


def cmd_simulate(args) -> int:
    cfg = load_config(args.config, seed_override=args.seed, policy_override=args.policy)
    fs = _fresh_fs(cfg)
    report, trace = run_simulation(cfg.workload, fs, cfg.weights)
    stamp = _stamp()
    seed = cfg.workload.rng_seed
    payload = report.to_dict()
    payload["config_sha256"] = _config_sha256(args.config)
    report_path = _out_path(args.out, "simulate", seed, stamp, "json")
    _write_json(report_path, payload)
    trace_path = args.trace or _out_path(args.out, "simulate", seed, stamp, "trace.jsonl")
    write_trace(trace, trace_path)
    print(
        f"simulate seed={seed} ops={report.executed_ops} "
        f"wrr={report.weighted_rr:.4f} perf={report.performance:.4f} "
        f"report={report_path} trace={trace_path}"
    )
    return 0


def cmd_replay(args) -> int:
    if not args.trace:
        raise ConfigError("replay requires --trace PATH")
    cfg = load_config(args.config, seed_override=args.seed, policy_override=args.policy)
    ops = read_trace(args.trace)
    fs = _fresh_fs(cfg)
    report = replay_trace(ops, fs, cfg.weights)
    stamp = _stamp()
    seed = cfg.workload.rng_seed
    payload = report.to_dict()
    payload["config_sha256"] = _config_sha256(args.config)
    payload["trace_path"] = os.path.basename(args.trace)
    report_path = _out_path(args.out, "replay", seed, stamp, "json")
    _write_json(report_path, payload)
    print(
        f"replay ops={report.executed_ops} wrr={report.weighted_rr:.4f} "
        f"snapshot={report.snapshot_sha256[:12]} report={report_path}"
    )
    return 0


def cmd_train(args) -> int:
    cfg = load_config(args.config, seed_override=args.seed, policy_override=args.policy)
    tc = cfg.train_config()
    report = train(tc)
    stamp = _stamp()
    seed = cfg.workload.rng_seed
    payload = report.to_dict()
    payload["config_sha256"] = _config_sha256(args.config)
    report_path = _out_path(args.out, "train", seed, stamp, "json")
    _write_json(report_path, payload)
    csv_path = _out_path(args.out, "train", seed, stamp, "csv")
    with open(csv_path, "w", newline="") as fh:
        writer = csv.writer(fh)
        for row in report.csv_rows():
            writer.writerow(row)
    first = report.first_min_p
    ratio = report.final_greedy_p / first if first > 0 else float("inf")
    print(
        f"train seed={seed} final={report.best_state} "
        f"p_first={first:.4f} p_final={report.final_greedy_p:.4f} "
        f"gain={ratio:.2f}x report={report_path} table={csv_path}"
    )
    return 0


def cmd_compare(args) -> int:
    cfg = load_config(args.config, seed_override=None, policy_override=None)
    settings = cfg.compare_settings
    if args.seed is not None:
        settings = CompareSettings(
            primary_count=settings.primary_count,
            primary_data_blocks=settings.primary_data_blocks,
            primary_type=settings.primary_type,
            secondary_targets=settings.secondary_targets,
            secondary_min_blocks=settings.secondary_min_blocks,
            secondary_max_blocks=settings.secondary_max_blocks,
            seeds=(args.seed,),
            policies=settings.policies,
        )
    if args.policy is not None:
        settings = CompareSettings(
            primary_count=settings.primary_count,
            primary_data_blocks=settings.primary_data_blocks,
            primary_type=settings.primary_type,
            secondary_targets=settings.secondary_targets,
            secondary_min_blocks=settings.secondary_min_blocks,
            secondary_max_blocks=settings.secondary_max_blocks,
            seeds=settings.seeds,
            policies=(args.policy,),
        )
    rows = run_compare(cfg.geometry, cfg.coefficients, settings, cfg.invert_link_rule)
    stamp = _stamp()
    seed = settings.seeds[0]
    payload = compare_report(settings, rows, cfg.geometry, cfg.coefficients)
    payload["config_sha256"] = _config_sha256(args.config)
    report_path = _out_path(args.out, "compare", seed, stamp, "json")
    _write_json(report_path, payload)
    csv_path = _out_path(args.out, "compare", seed, stamp, "csv")
    with open(csv_path, "w", newline="") as fh:
        writer = csv.writer(fh)
        header = ["policy", "secondary_blocks", "seed", "weighted_rr"]
        header += [f"rr_file_{i}" for i in range(settings.primary_count)]
        writer.writerow(header)
        for row in rows:
            writer.writerow(
                [row.policy, row.secondary_blocks, row.seed, repr(row.weighted_rr)]
                + [repr(v) for v in row.per_file_rr]
            )
    print(
        f"compare cells={len(rows)} policies={','.join(settings.policies)} "
        f"targets={','.join(str(t) for t in settings.secondary_targets)} "
        f"report={report_path} table={csv_path}"
    )
    return 0


def cmd_recover(args) -> int:
    cfg = load_config(args.config, seed_override=args.seed, policy_override=args.policy)
    fs = _fresh_fs(cfg)
    if args.trace:
        ops = read_trace(args.trace)
        replay_trace(ops, fs, cfg.weights)
    else:
        run_simulation(cfg.workload, fs, cfg.weights)
    fs.mark_obsolete_sweep()
    table = recovery_table(fs.disk, fs)
    wrr = weighted_rr(fs.disk, fs.deleted_files())
    stamp = _stamp()
    seed = cfg.workload.rng_seed
    payload = {
        "config_sha256": _config_sha256(args.config),
        "seed": seed,
        "weighted_rr": wrr,
        "rows": table,
    }
    report_path = _out_path(args.out, "recover", seed, stamp, "json")
    _write_json(report_path, payload)
    print(f"recover files={len(table)} wrr={wrr:.4f} report={report_path}")
    return 0


_COMMANDS = {
    "train": cmd_train,
    "simulate": cmd_simulate,
    "replay": cmd_replay,
    "compare": cmd_compare,
    "recover": cmd_recover,
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="apexsim",
        description="Recoverability-aware block allocation sandbox.",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name, fn in _COMMANDS.items():
        p = sub.add_parser(name, help=fn.__doc__)
        p.add_argument("--config", required=True, help="INI run configuration")
        p.add_argument("--seed", type=int, default=None, help="override the workload seed")
        p.add_argument("--out", default=".", help="output directory (default: .)")
        p.add_argument(
            "--policy",
            choices=["apex", "first-fit", "random"],
            default=None,
            help="override the allocation policy",
        )
        p.add_argument("--trace", default=None, help="trace file to write (simulate) or read")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    handler = _COMMANDS[args.command]
    try:
        return handler(args)
    except (ConfigError, TraceError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 2
    except OSError as e:
        print(f"error: {e}", file=sys.stderr)
        return 2
    except Exception as e:  # noqa: BLE001  invariant breakage, not bad input
        print(f"internal error: {type(e).__name__}: {e}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
