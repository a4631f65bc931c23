"""Command-line entry point: infer, bench, curves, gradcheck, fetch.

Exit codes: 0 success, 1 self-check failure, 2 input error,
3 degenerate data. Every output artifact embeds the run configuration
and seed; all randomness flows from the single --seed via per-cell
seed derivation in the bench module.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import urllib.error
import urllib.request
from dataclasses import asdict, dataclass
from pathlib import Path

from . import __version__
from .bench import (
    RecordCsvWriter,
    auc_vs_nmax_table,
    read_records_csv,
    run_benchmark,
    summarize,
    write_curve_csvs,
    write_summary_json,
)
from .causal import infer_direction
from .dataset import (
    CEP_URL,
    GEOSCIENCE_PAIR_IDS,
    GeneratorSpec,
    PairedDataset,
    load_cep_directory,
    parse_generator_config,
    read_numeric_table,
    synthetic_suite,
)
from .errors import (
    DegenerateData,
    DegeneratePair,
    HsicsensError,
    ParseError,
)
from .regression import KERNEL_RIDGE, RANDOM_FOREST, RegressorSpec
from .sensitivity import gradient_selfcheck

DATA_DIR_ENV = "HSICSENS_DATA_DIR"

EXIT_OK = 0
EXIT_SELFCHECK = 1
EXIT_INPUT = 2
EXIT_DEGENERATE = 3


@dataclass(frozen=True)
class RunConfig:
    data_dir: str | None
    output_dir: str
    selection: str
    regressor: RegressorSpec
    n_max_list: tuple[int, ...]
    realizations: int
    seed: int
    threads: int
    generator: GeneratorSpec | None = None
    synthetic_pairs: int = 0

    def to_dict(self) -> dict:
        out = asdict(self)
        out["n_max_list"] = list(self.n_max_list)
        return out


def _regressor_from_args(args) -> RegressorSpec:
    return RegressorSpec(
        kind=args.regressor,
        tree_count=args.trees,
        min_leaf_size=args.min_leaf,
        ridge_lambda=args.ridge_lambda,
        seed=args.seed,
    )


def _add_regressor_flags(parser):
    parser.add_argument(
        "--regressor",
        choices=[RANDOM_FOREST, KERNEL_RIDGE],
        default=RANDOM_FOREST,
    )
    parser.add_argument("--trees", type=int, default=100)
    parser.add_argument("--min-leaf", type=int, default=5)
    parser.add_argument("--ridge-lambda", type=float, default=0.1)
    parser.add_argument("--seed", type=int, default=0)


def _load_infer_pair(args) -> PairedDataset:
    if args.pair_file is not None:
        table = read_numeric_table(args.pair_file)
        if table.shape[1] < 2:
            raise ParseError(f"{args.pair_file}: need at least two columns")
        x, y = table[:, 0:1], table[:, 1:2]
        pair_id = Path(args.pair_file).stem
    else:
        x = read_numeric_table(args.x_file)[:, 0:1]
        y = read_numeric_table(args.y_file)[:, 0:1]
        pair_id = f"{Path(args.x_file).stem}-vs-{Path(args.y_file).stem}"
    return PairedDataset(id=pair_id, x=x, y=y)


def _verdict_payload(pair_id, verdict, args) -> dict:
    return {
        "pair_id": pair_id,
        "n": verdict.hsic_forward.n,
        "seed": args.seed,
        "regressor": args.regressor,
        "score_c": verdict.score_c,
        "score_cs": verdict.score_cs,
        "direction_c": verdict.direction_c,
        "direction_cs": verdict.direction_cs,
        "hsic_forward": verdict.hsic_forward.statistic,
        "hsic_backward": verdict.hsic_backward.statistic,
        "sens_forward_x": verdict.sens_forward_x,
        "sens_forward_r": verdict.sens_forward_r,
        "sens_backward_y": verdict.sens_backward_y,
        "sens_backward_r": verdict.sens_backward_r,
    }


def _infer_via_server(url: str, pair: PairedDataset, args) -> dict:
    body = json.dumps(
        {
            "x": pair.x[:, 0].tolist(),
            "y": pair.y[:, 0].tolist(),
            "regressor": args.regressor,
            "seed": args.seed,
        }
    ).encode("utf-8")
    request = urllib.request.Request(
        url.rstrip("/") + "/infer",
        data=body,
        headers={"Content-Type": "application/json"},
    )
    try:
        with urllib.request.urlopen(request) as resp:
            payload = json.loads(resp.read().decode("utf-8"))
            # flatten to the same shape the in-process path produces
            for key in ("hsic_forward", "hsic_backward"):
                if isinstance(payload.get(key), dict):
                    payload[key] = payload[key]["statistic"]
            return payload
    except urllib.error.HTTPError as exc:
        detail = exc.read().decode("utf-8", errors="replace")
        if exc.code == 400 and "degenerate" in detail.lower():
            raise DegeneratePair(detail) from None
        raise ParseError(f"server rejected request ({exc.code}): {detail}") from None
    except urllib.error.URLError as exc:
        raise ParseError(f"cannot reach server {url}: {exc.reason}") from None


def cmd_infer(args) -> int:
    pair = _load_infer_pair(args)
    if args.server:
        payload = _infer_via_server(args.server, pair, args)
        payload["pair_id"] = pair.id
    else:
        verdict = infer_direction(
            pair, _regressor_from_args(args), min_samples=args.min_samples
        )
        payload = _verdict_payload(pair.id, verdict, args)
    print(f"pair:           {payload['pair_id']}  (n={payload['n']})")
    print(f"direction_c:    {payload['direction_c']}  (score_c={payload['score_c']:+.6g})")
    print(f"direction_cs:   {payload['direction_cs']}  (score_cs={payload['score_cs']:+.6g})")
    print(f"hsic forward:   {payload['hsic_forward']:.6g}")
    print(f"hsic backward:  {payload['hsic_backward']:.6g}")
    print(
        "sensitivities:  "
        f"fwd x={payload['sens_forward_x']:.6g} r={payload['sens_forward_r']:.6g}  "
        f"bwd y={payload['sens_backward_y']:.6g} r={payload['sens_backward_r']:.6g}"
    )
    if args.json:
        with Path(args.json).open("w", encoding="utf-8") as fh:
            json.dump(payload, fh, indent=2, sort_keys=True)
            fh.write("\n")
    return EXIT_OK


_BENCH_CONFIG_TYPES = {
    "data_dir": str,
    "output_dir": str,
    "selection": str,
    "n_max": str,
    "realizations": int,
    "threads": int,
    "synthetic_pairs": int,
    "synthetic_n": int,
    "noise": float,
    "mechanism": str,
    "generator_config": str,
    "regressor": str,
    "trees": int,
    "min_leaf": int,
    "ridge_lambda": float,
    "seed": int,
}


def _read_bench_config(path) -> dict:
    """Parse a key = value bench config into typed argparse defaults."""
    overrides = {}
    for lineno, line in enumerate(
        Path(path).read_text(encoding="utf-8").splitlines(), start=1
    ):
        stripped = line.strip()
        if not stripped or stripped.startswith("#"):
            continue
        if "=" not in stripped:
            raise ParseError("expected `key = value`", line=lineno)
        key, _, value = stripped.partition("=")
        key = key.strip().replace("-", "_")
        if key not in _BENCH_CONFIG_TYPES:
            raise ParseError(f"unknown config key {key!r}", line=lineno)
        try:
            overrides[key] = _BENCH_CONFIG_TYPES[key](value.strip())
        except ValueError:
            raise ParseError(f"bad value for {key!r}", line=lineno) from None
    return overrides


def _bench_config(args) -> RunConfig:
    n_max_list = tuple(int(tok) for tok in str(args.n_max).split(",") if tok)
    generator = None
    synthetic_pairs = 0
    if args.selection == "synthetic":
        if args.generator_config:
            generator = parse_generator_config(
                Path(args.generator_config).read_text(encoding="utf-8")
            )
        else:
            generator = GeneratorSpec(
                mechanism=args.mechanism, noise=args.noise, n=args.synthetic_n
            )
        synthetic_pairs = args.synthetic_pairs
    return RunConfig(
        data_dir=args.data_dir,
        output_dir=args.output_dir,
        selection=args.selection,
        regressor=_regressor_from_args(args),
        n_max_list=n_max_list,
        realizations=args.realizations,
        seed=args.seed,
        threads=args.threads,
        generator=generator,
        synthetic_pairs=synthetic_pairs,
    )


def _resolve_pairs(config: RunConfig) -> list[PairedDataset]:
    if config.selection == "synthetic":
        return synthetic_suite(config.synthetic_pairs, config.generator, config.seed)
    if config.selection == "cep28":
        ids = GEOSCIENCE_PAIR_IDS
    else:
        ids = tuple(int(tok) for tok in config.selection.split(",") if tok)
    if not config.data_dir:
        raise ParseError(
            f"selection {config.selection!r} needs --data-dir or ${DATA_DIR_ENV}"
        )
    return load_cep_directory(config.data_dir, ids)


def cmd_bench(args) -> int:
    if not args.output_dir:
        raise ParseError("--output-dir is required (flag or config file)")
    config = _bench_config(args)
    pairs = _resolve_pairs(config)
    out_dir = Path(config.output_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    run_header = "config: " + json.dumps(config.to_dict(), sort_keys=True)

    records_path = out_dir / "records.csv"
    with RecordCsvWriter(records_path, run_header) as writer:
        records = run_benchmark(
            pairs,
            config.n_max_list,
            config.realizations,
            config.regressor,
            config.seed,
            workers=config.threads,
            on_record=writer.write,
        )
    table = auc_vs_nmax_table(records)
    write_curve_csvs(out_dir, records, run_header)
    summary = summarize(records, table, config.to_dict(), __version__)
    write_summary_json(out_dir / "summary.json", summary)

    for row in table:
        print(
            f"n_max={row.n_max:<6d} criterion={row.criterion:<3s} "
            f"auc={row.mean_auc:.4f} +/- {row.std_auc:.4f} "
            f"({row.realizations} realizations)"
        )
    failed = summary["failed_records"]
    print(f"records: {len(records)} ({failed} failed) -> {records_path}")
    return EXIT_OK


def cmd_curves(args) -> int:
    records = read_records_csv(args.records)
    written = write_curve_csvs(args.output_dir, records)
    for path in written:
        print(path)
    return EXIT_OK


def cmd_gradcheck(args) -> int:
    sizes = tuple(int(tok) for tok in args.sizes.split(",") if tok)
    dims = tuple(int(tok) for tok in args.dims.split(",") if tok)
    report = gradient_selfcheck(
        sizes=sizes,
        dims=dims,
        instances_per_case=args.instances,
        seed=args.seed,
        tolerance=args.tolerance,
    )
    status = "PASS" if report.passed else "FAIL"
    print(
        f"{status}: worst relative error {report.worst_rel_error:.3e} "
        f"over {report.instances} instances (tolerance {report.tolerance:g})"
    )
    return EXIT_OK if report.passed else EXIT_SELFCHECK


def cmd_fetch(args) -> int:
    print("Cause-effect pair collection (download manually):")
    print(f"  {CEP_URL}")
    print(f"Place pairmeta.txt and pairNNNN.txt files in a directory and")
    print(f"point --data-dir or ${DATA_DIR_ENV} at it.")
    if not args.data_dir:
        return EXIT_OK
    data_dir = Path(args.data_dir)
    missing = []
    if not (data_dir / "pairmeta.txt").exists():
        missing.append("pairmeta.txt")
    missing += [
        f"pair{pid:04d}.txt"
        for pid in GEOSCIENCE_PAIR_IDS
        if not (data_dir / f"pair{pid:04d}.txt").exists()
    ]
    if missing:
        print(f"missing from {data_dir}: {', '.join(missing)}", file=sys.stderr)
        return EXIT_INPUT
    print(f"all {len(GEOSCIENCE_PAIR_IDS)} default pairs present in {data_dir}")
    return EXIT_OK


def build_parser() -> tuple[argparse.ArgumentParser, dict]:
    parser = argparse.ArgumentParser(
        prog="hsicsens",
        description="Bivariate causal-direction inference and benchmarking.",
    )
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    p_infer = sub.add_parser("infer", help="score one pair of variables")
    p_infer.add_argument("pair_file", nargs="?", help="two-column sample file")
    p_infer.add_argument("--x-file", help="single-column samples of x")
    p_infer.add_argument("--y-file", help="single-column samples of y")
    p_infer.add_argument("--json", help="also write the verdict as JSON here")
    p_infer.add_argument("--min-samples", type=int, default=10)
    p_infer.add_argument("--server", help="delegate to a running service URL")
    _add_regressor_flags(p_infer)

    p_bench = sub.add_parser("bench", help="run the evaluation protocol")
    p_bench.add_argument("--config", help="key = value file; flags win")
    p_bench.add_argument(
        "--data-dir", default=os.environ.get(DATA_DIR_ENV) or None
    )
    p_bench.add_argument("--output-dir", default=None)
    p_bench.add_argument(
        "--selection",
        default="cep28",
        help="cep28, synthetic, or comma-separated pair ids",
    )
    p_bench.add_argument("--n-max", default="50,100,200,500,2000")
    p_bench.add_argument("--realizations", type=int, default=10)
    p_bench.add_argument("--threads", type=int, default=os.cpu_count() or 1)
    p_bench.add_argument("--synthetic-pairs", type=int, default=50)
    p_bench.add_argument("--synthetic-n", type=int, default=500)
    p_bench.add_argument("--noise", type=float, default=0.1)
    p_bench.add_argument(
        "--mechanism", default="cubic", choices=["linear", "cubic", "exp_decay"]
    )
    p_bench.add_argument("--generator-config", help="key = value generator file")
    _add_regressor_flags(p_bench)

    p_curves = sub.add_parser("curves", help="recompute curve CSVs from records")
    p_curves.add_argument("--records", required=True)
    p_curves.add_argument("--output-dir", required=True)

    p_grad = sub.add_parser("gradcheck", help="finite-difference gradient self-check")
    p_grad.add_argument("--sizes", default="2,4,8,16")
    p_grad.add_argument("--dims", default="1,2")
    p_grad.add_argument("--instances", type=int, default=3)
    p_grad.add_argument("--seed", type=int, default=0)
    p_grad.add_argument("--tolerance", type=float, default=1e-4)

    p_fetch = sub.add_parser("fetch", help="print dataset URL, verify local files")
    p_fetch.add_argument(
        "--data-dir", default=os.environ.get(DATA_DIR_ENV) or None
    )
    return parser, {"bench": p_bench}


def main(argv=None) -> int:
    parser, subparsers = build_parser()
    try:
        args = parser.parse_args(argv)
        if args.command == "bench" and args.config:
            # Config values become defaults, so explicit flags still win.
            subparsers["bench"].set_defaults(**_read_bench_config(args.config))
            args = parser.parse_args(argv)
        if args.command == "infer":
            return cmd_infer(args)
        if args.command == "bench":
            return cmd_bench(args)
        if args.command == "curves":
            return cmd_curves(args)
        if args.command == "gradcheck":
            return cmd_gradcheck(args)
        return cmd_fetch(args)
    except (DegenerateData, DegeneratePair) as exc:
        print(f"error: degenerate data: {exc}", file=sys.stderr)
        return EXIT_DEGENERATE
    except HsicsensError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


def entrypoint() -> None:  # pragma: no cover - console script shim
    sys.exit(main())


if __name__ == "__main__":  # pragma: no cover
    entrypoint()
