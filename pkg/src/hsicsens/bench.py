"""Benchmark harness: n_max sweep, weighted ranked-decision curves, persistence.

Every (pair, n_max, realization) cell is an independent, seeded unit of
work: subsample, infer the direction, record. Evaluation treats each
record as a ranked decision — correct records are positives, wrong ones
negatives, ranked by score magnitude — with each pair's metadata weight
scaling its contribution to every count.
"""

from __future__ import annotations

import csv
import json
import math
import zlib
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from pathlib import Path
from time import perf_counter

import numpy as np

from .causal import CS_ORIENTATION, UNKNOWN, DirectionVerdict, infer_direction
from .dataset import PairedDataset, subsample
from .errors import EmptyInput, HsicsensError
from .hsic import HsicValue
from .regression import RegressorSpec, with_seed

CRITERIA = ("c", "cs")


@dataclass
class BenchmarkRecord:
    pair_id: str
    realization_index: int
    n_used: int
    n_max: int
    verdict: DirectionVerdict | None
    correct_c: bool | None
    correct_cs: bool | None
    weight: float
    wall_time_ms: float
    error: str | None = None


@dataclass(frozen=True)
class CurvePoint:
    threshold: float
    tpr: float
    fpr: float
    precision: float
    recall: float


@dataclass(frozen=True)
class RankedCurve:
    points: tuple[CurvePoint, ...]
    auc: float
    weighting: str


def _pair_entropy(pair_id: str) -> int:
    digits = "".join(ch for ch in pair_id if ch.isdigit())
    if digits:
        return int(digits)
    return zlib.crc32(pair_id.encode("utf-8"))


def _cell_seeds(run_seed: int, pair_id: str, n_max: int, realization: int):
    ss = np.random.SeedSequence(
        [int(run_seed), _pair_entropy(pair_id), int(n_max), int(realization)]
    )
    sub, reg = ss.spawn(2)
    return sub, int(reg.generate_state(1, np.uint64)[0])


def run_cell(
    pair: PairedDataset,
    n_max: int,
    realization: int,
    spec: RegressorSpec,
    run_seed: int,
) -> BenchmarkRecord:
    """One benchmark cell; failures become error records, not exceptions."""
    sub_seed, reg_seed = _cell_seeds(run_seed, pair.id, n_max, realization)
    start = perf_counter()
    try:
        sub = subsample(pair, n_max, sub_seed)
        verdict = infer_direction(sub, with_seed(spec, reg_seed))
    except HsicsensError as exc:
        return BenchmarkRecord(
            pair_id=pair.id,
            realization_index=realization,
            n_used=0,
            n_max=n_max,
            verdict=None,
            correct_c=None,
            correct_cs=None,
            weight=pair.weight,
            wall_time_ms=(perf_counter() - start) * 1e3,
            error=f"{type(exc).__name__}: {exc}",
        )
    known = pair.ground_truth != UNKNOWN
    return BenchmarkRecord(
        pair_id=pair.id,
        realization_index=realization,
        n_used=sub.n,
        n_max=n_max,
        verdict=verdict,
        correct_c=(verdict.direction_c == pair.ground_truth) if known else None,
        correct_cs=(verdict.direction_cs == pair.ground_truth) if known else None,
        weight=pair.weight,
        wall_time_ms=(perf_counter() - start) * 1e3,
    )


def run_benchmark(
    pairs,
    n_max_list,
    realizations: int,
    spec: RegressorSpec,
    seed: int,
    workers: int = 1,
    on_record=None,
) -> list[BenchmarkRecord]:
    """Sweep pairs x n_max x realizations, deterministically under seed.

    Cells are independent; with workers > 1 they run in a process pool,
    and records still come back in sweep order so persisted output does
    not depend on scheduling.
    """
    cells = [
        (pair, n_max, realization, spec, seed)
        for n_max in n_max_list
        for pair in pairs
        for realization in range(realizations)
    ]
    records: list[BenchmarkRecord] = []
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            produced = pool.map(_run_cell_args, cells, chunksize=1)
            for record in produced:
                records.append(record)
                if on_record is not None:
                    on_record(record)
    else:
        for args in cells:
            record = run_cell(*args)
            records.append(record)
            if on_record is not None:
                on_record(record)
    return records


def _run_cell_args(args) -> BenchmarkRecord:
    return run_cell(*args)


def _decision_rows(records, criterion: str):
    """(confidence, correct, weight) rows for one criterion's usable records."""
    if criterion not in CRITERIA:
        raise EmptyInput(f"unknown criterion {criterion!r}")
    rows = []
    for rec in records:
        if rec.error is not None or rec.verdict is None:
            continue
        correct = rec.correct_c if criterion == "c" else rec.correct_cs
        score = rec.verdict.score_c if criterion == "c" else rec.verdict.score_cs
        if correct is None or not math.isfinite(score):
            continue
        rows.append((abs(score), bool(correct), rec.weight))
    return rows


def weighted_roc(records, criterion: str) -> RankedCurve:
    """Weighted ROC/PRC sweep over decisions ranked by score magnitude.

    Positives are correct decisions, negatives wrong ones; a record's
    weight scales its contribution to every count. Tied confidences
    collapse into a single threshold step; AUC is the trapezoidal
    integral of the ROC.
    """
    rows = _decision_rows(records, criterion)
    if not rows:
        raise EmptyInput("no usable records with finite scores")
    pos_total = sum(w for _, correct, w in rows if correct)
    neg_total = sum(w for _, correct, w in rows if not correct)
    rows.sort(key=lambda r: -r[0])

    points = [CurvePoint(math.inf, 0.0, 0.0, 1.0, 0.0)]
    tp = fp = 0.0
    i = 0
    while i < len(rows):
        threshold = rows[i][0]
        while i < len(rows) and rows[i][0] == threshold:
            _, correct, w = rows[i]
            if correct:
                tp += w
            else:
                fp += w
            i += 1
        tpr = tp / pos_total if pos_total > 0 else 0.0
        fpr = fp / neg_total if neg_total > 0 else 0.0
        precision = tp / (tp + fp) if tp + fp > 0 else 1.0
        points.append(CurvePoint(threshold, tpr, fpr, precision, tpr))

    if neg_total == 0.0:
        auc = 1.0
    elif pos_total == 0.0:
        auc = 0.0
    else:
        auc = 0.0
        for prev, cur in zip(points, points[1:]):
            auc += (cur.fpr - prev.fpr) * (cur.tpr + prev.tpr) / 2.0
    return RankedCurve(points=tuple(points), auc=auc, weighting="pair_weights")


@dataclass(frozen=True)
class AucTableRow:
    n_max: int
    criterion: str
    mean_auc: float
    std_auc: float
    realizations: int


def auc_vs_nmax_table(records) -> list[AucTableRow]:
    """Per n_max and criterion: AUC per realization, then mean/std across them."""
    n_max_levels = sorted({rec.n_max for rec in records})
    rows = []
    for n_max in n_max_levels:
        level = [rec for rec in records if rec.n_max == n_max]
        realization_ids = sorted({rec.realization_index for rec in level})
        for criterion in CRITERIA:
            aucs = []
            for rid in realization_ids:
                chunk = [rec for rec in level if rec.realization_index == rid]
                try:
                    aucs.append(weighted_roc(chunk, criterion).auc)
                except EmptyInput:
                    continue
            if not aucs:
                continue
            rows.append(
                AucTableRow(
                    n_max=n_max,
                    criterion=criterion,
                    mean_auc=float(np.mean(aucs)),
                    std_auc=float(np.std(aucs)),
                    realizations=len(aucs),
                )
            )
    return rows


RECORD_FIELDS = (
    "pair_id",
    "realization",
    "n_max",
    "n_used",
    "weight",
    "score_c",
    "score_cs",
    "direction_c",
    "direction_cs",
    "correct_c",
    "correct_cs",
    "hsic_forward",
    "hsic_backward",
    "sens_forward_x",
    "sens_forward_r",
    "sens_backward_y",
    "sens_backward_r",
    "error",
)


def _fmt(value) -> str:
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return repr(value)
    return str(value)


def record_to_row(rec: BenchmarkRecord) -> list[str]:
    v = rec.verdict
    values = [
        rec.pair_id,
        rec.realization_index,
        rec.n_max,
        rec.n_used,
        float(rec.weight),
        None if v is None else v.score_c,
        None if v is None else v.score_cs,
        None if v is None else v.direction_c,
        None if v is None else v.direction_cs,
        rec.correct_c,
        rec.correct_cs,
        None if v is None else v.hsic_forward.statistic,
        None if v is None else v.hsic_backward.statistic,
        None if v is None else v.sens_forward_x,
        None if v is None else v.sens_forward_r,
        None if v is None else v.sens_backward_y,
        None if v is None else v.sens_backward_r,
        rec.error,
    ]
    return [_fmt(v) for v in values]


class RecordCsvWriter:
    """Streams benchmark records to CSV as they are produced.

    Wall-clock time is deliberately not a column: the file must be
    byte-identical across reruns of the same configuration.
    """

    def __init__(self, path, run_header: str | None = None):
        self._fh = Path(path).open("w", encoding="utf-8", newline="")
        if run_header is not None:
            self._fh.write(f"# {run_header}\n")
        self._writer = csv.writer(self._fh)
        self._writer.writerow(RECORD_FIELDS)

    def write(self, rec: BenchmarkRecord) -> None:
        self._writer.writerow(record_to_row(rec))

    def close(self) -> None:
        self._fh.close()

    def __enter__(self):
        return self

    def __exit__(self, *exc):
        self.close()


def _parse_optional(text: str, kind):
    if text == "":
        return None
    if kind is bool:
        return text == "true"
    return kind(text)


def read_records_csv(path) -> list[BenchmarkRecord]:
    """Rebuild records from a CSV written by RecordCsvWriter.

    Bandwidth diagnostics are not persisted, so reread verdicts carry
    NaN sigmas; scores, directions, and correctness round-trip exactly.
    """
    records = []
    with Path(path).open("r", encoding="utf-8", newline="") as fh:
        data_lines = (line for line in fh if not line.startswith("#"))
        reader = csv.DictReader(data_lines)
        for row in reader:
            error = row["error"] or None
            verdict = None
            if error is None and row["score_c"] != "":
                n_used = int(row["n_used"])
                verdict = DirectionVerdict(
                    score_c=float(row["score_c"]),
                    score_cs=float(row["score_cs"]),
                    direction_c=row["direction_c"],
                    direction_cs=row["direction_cs"],
                    hsic_forward=HsicValue(
                        float(row["hsic_forward"]), n_used, math.nan, math.nan
                    ),
                    hsic_backward=HsicValue(
                        float(row["hsic_backward"]), n_used, math.nan, math.nan
                    ),
                    sens_forward_x=float(row["sens_forward_x"]),
                    sens_forward_r=float(row["sens_forward_r"]),
                    sens_backward_y=float(row["sens_backward_y"]),
                    sens_backward_r=float(row["sens_backward_r"]),
                )
            records.append(
                BenchmarkRecord(
                    pair_id=row["pair_id"],
                    realization_index=int(row["realization"]),
                    n_used=int(row["n_used"]),
                    n_max=int(row["n_max"]),
                    verdict=verdict,
                    correct_c=_parse_optional(row["correct_c"], bool),
                    correct_cs=_parse_optional(row["correct_cs"], bool),
                    weight=float(row["weight"]),
                    wall_time_ms=0.0,
                    error=error,
                )
            )
    return records


def write_curve_csvs(out_dir, records, run_header: str | None = None) -> list[Path]:
    """One CSV of (threshold, fpr, tpr, precision, recall) per criterion per n_max."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    written = []
    for n_max in sorted({rec.n_max for rec in records}):
        level = [rec for rec in records if rec.n_max == n_max]
        for criterion in CRITERIA:
            try:
                curve = weighted_roc(level, criterion)
            except EmptyInput:
                continue
            path = out_dir / f"curve_{criterion}_nmax{n_max}.csv"
            with path.open("w", encoding="utf-8", newline="") as fh:
                if run_header is not None:
                    fh.write(f"# {run_header}\n")
                writer = csv.writer(fh)
                writer.writerow(
                    ["threshold", "fpr", "tpr", "precision", "recall"]
                )
                for p in curve.points:
                    writer.writerow(
                        [_fmt(float(p.threshold)), _fmt(p.fpr), _fmt(p.tpr),
                         _fmt(p.precision), _fmt(p.recall)]
                    )
            written.append(path)
    return written


def summarize(records, table, config: dict, version: str) -> dict:
    """Assemble the JSON-ready run summary."""
    errors = [rec for rec in records if rec.error is not None]
    return {
        "config": config,
        "code_version": version,
        "cs_orientation": CS_ORIENTATION,
        "pairs": sorted({rec.pair_id for rec in records}),
        "records": len(records),
        "failed_records": len(errors),
        "failures": [
            {"pair_id": rec.pair_id, "n_max": rec.n_max,
             "realization": rec.realization_index, "error": rec.error}
            for rec in errors
        ],
        "auc_table": [
            {
                "n_max": row.n_max,
                "criterion": row.criterion,
                "mean_auc": row.mean_auc,
                "std_auc": row.std_auc,
                "realizations": row.realizations,
            }
            for row in table
        ],
        "total_wall_time_ms": sum(rec.wall_time_ms for rec in records),
    }


def write_summary_json(path, summary: dict) -> None:
    with Path(path).open("w", encoding="utf-8") as fh:
        json.dump(summary, fh, indent=2, sort_keys=True)
        fh.write("\n")
