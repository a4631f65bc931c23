"""Cause-effect pair ingestion, subsampling, and synthetic generation.

Pair files are plain text: one sample per row, whitespace-separated
numeric columns, no header. A metadata line per pair names the cause
and effect column ranges plus the benchmark weight (related problems
share fractional weights that sum to 1 per group).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from pathlib import Path

import numpy as np

from .causal import UNKNOWN, X_CAUSES_Y, Y_CAUSES_X
from .errors import DimensionError, InvalidData, ParseError

CEP_URL = "https://webdav.tuebingen.mpg.de/cause-effect/"

# The 28 pairs of the collection covering geoscience and remote-sensing
# variables (carbon/energy fluxes, vegetation indices, temperature, ...);
# every one is a pair of scalar variables.
GEOSCIENCE_PAIR_IDS = (
    1, 2, 3, 4, 20, 21, 42, 43, 44, 45, 46, 49, 50, 51,
    72, 73, 78, 79, 80, 81, 82, 83, 87, 89, 90, 91, 92, 93,
)


@dataclass(frozen=True)
class PairMeta:
    """One metadata line: column ranges are 1-based and inclusive."""

    pair_id: int
    cause_start: int
    cause_end: int
    effect_start: int
    effect_end: int
    weight: float


@dataclass(frozen=True)
class PairedDataset:
    id: str
    x: np.ndarray  # (n, 1)
    y: np.ndarray  # (n, 1)
    ground_truth: str = UNKNOWN
    weight: float = 1.0

    def __post_init__(self):
        if self.x.shape[0] != self.y.shape[0]:
            raise InvalidData(f"pair {self.id}: x and y sample counts differ")
        if self.x.shape[0] < 2:
            raise InvalidData(f"pair {self.id}: need at least 2 samples")
        if not 0.0 < self.weight <= 1.0:
            raise InvalidData(f"pair {self.id}: weight must be in (0, 1]")

    @property
    def n(self) -> int:
        return self.x.shape[0]


def read_numeric_table(path) -> np.ndarray:
    """Parse a whitespace-separated numeric file into an (n, k) array.

    Blank lines are skipped; any non-numeric token or ragged row raises
    ParseError with its 1-based line number.
    """
    path = Path(path)
    rows = []
    width = None
    with path.open("r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            tokens = line.split()
            if not tokens:
                continue
            try:
                values = [float(t) for t in tokens]
            except ValueError:
                raise ParseError(
                    f"non-numeric token in {path.name}", line=lineno
                ) from None
            if any(not math.isfinite(v) for v in values):
                raise ParseError(f"non-finite value in {path.name}", line=lineno)
            if width is None:
                width = len(values)
            elif len(values) != width:
                raise ParseError(
                    f"expected {width} columns, got {len(values)} in {path.name}",
                    line=lineno,
                )
            rows.append(values)
    if not rows:
        raise ParseError(f"{path.name} contains no data rows")
    return np.asarray(rows, dtype=float)


def parse_pairmeta_line(line: str, lineno: int | None = None) -> PairMeta:
    """One line: pair id, cause col range, effect col range, weight."""
    tokens = line.split()
    if len(tokens) != 6:
        raise ParseError(
            f"expected 6 metadata fields, got {len(tokens)}", line=lineno
        )
    try:
        pair_id = int(tokens[0])
        cs, ce, es, ee = (int(t) for t in tokens[1:5])
        weight = float(tokens[5])
    except ValueError:
        raise ParseError("malformed metadata fields", line=lineno) from None
    return PairMeta(pair_id, cs, ce, es, ee, weight)


def load_pairmeta(path) -> dict[int, PairMeta]:
    """Read a pairmeta file into {pair_id: PairMeta}."""
    metas = {}
    with Path(path).open("r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            if not line.split():
                continue
            meta = parse_pairmeta_line(line, lineno)
            metas[meta.pair_id] = meta
    return metas


def load_pair(data_file, meta: PairMeta) -> PairedDataset:
    """Load one pair file using its metadata record.

    x is the variable occupying the lower column block in the file, y
    the higher one; the ground truth tag records which block the
    metadata designates as the cause.
    """
    table = read_numeric_table(data_file)
    if meta.cause_end != meta.cause_start or meta.effect_end != meta.effect_start:
        raise DimensionError(
            f"pair {meta.pair_id}: cause/effect spans more than one column; "
            "only scalar pairs are supported"
        )
    cause_col, effect_col = meta.cause_start, meta.effect_start
    if cause_col == effect_col:
        raise DimensionError(
            f"pair {meta.pair_id}: cause and effect designate the same column"
        )
    for col in (cause_col, effect_col):
        if not 1 <= col <= table.shape[1]:
            raise DimensionError(
                f"pair {meta.pair_id}: column {col} outside the {table.shape[1]}-column file"
            )
    lo, hi = sorted((cause_col, effect_col))
    truth = X_CAUSES_Y if cause_col == lo else Y_CAUSES_X
    return PairedDataset(
        id=f"pair{meta.pair_id:04d}",
        x=table[:, lo - 1 : lo],
        y=table[:, hi - 1 : hi],
        ground_truth=truth,
        weight=meta.weight,
    )


def save_pair(pair: PairedDataset, path) -> PairMeta:
    """Write a pair back to the two-column text format.

    Values are written with 17 significant digits so a reload
    reproduces them exactly. Returns the metadata record describing
    the written file.
    """
    path = Path(path)
    table = np.hstack([pair.x, pair.y])
    with path.open("w", encoding="utf-8") as fh:
        for row in table:
            fh.write(" ".join(f"{v:.17g}" for v in row) + "\n")
    if pair.ground_truth == Y_CAUSES_X:
        cause_col, effect_col = 2, 1
    else:
        cause_col, effect_col = 1, 2
    digits = "".join(ch for ch in pair.id if ch.isdigit())
    return PairMeta(
        pair_id=int(digits) if digits else 0,
        cause_start=cause_col,
        cause_end=cause_col,
        effect_start=effect_col,
        effect_end=effect_col,
        weight=pair.weight,
    )


def load_cep_directory(data_dir, pair_ids=GEOSCIENCE_PAIR_IDS) -> list[PairedDataset]:
    """Load the selected pairs from a downloaded collection directory."""
    data_dir = Path(data_dir)
    metas = load_pairmeta(data_dir / "pairmeta.txt")
    pairs = []
    for pid in pair_ids:
        if pid not in metas:
            raise ParseError(f"pairmeta.txt has no entry for pair {pid}")
        pairs.append(load_pair(data_dir / f"pair{pid:04d}.txt", metas[pid]))
    return pairs


def subsample(pair: PairedDataset, n_max: int, seed) -> PairedDataset:
    """Uniform row subset without replacement, keeping (x_i, y_i) together.

    Returns the pair unchanged when it already fits; deterministic for
    a given seed.
    """
    if n_max < 2:
        raise InvalidData(f"n_max must be >= 2, got {n_max}")
    if pair.n <= n_max:
        return pair
    rng = np.random.default_rng(seed)
    idx = np.sort(rng.choice(pair.n, size=n_max, replace=False))
    return replace(pair, x=pair.x[idx], y=pair.y[idx])


MECHANISMS = {
    "linear": lambda x: 2.0 * x,
    "cubic": lambda x: x**3,
    "exp_decay": lambda x: np.exp(-x),
}


@dataclass(frozen=True)
class GeneratorSpec:
    """Synthetic additive-noise pair: y = mechanism(x) + noise * N(0, 1)."""

    mechanism: str = "cubic"
    noise: float = 0.1
    n: int = 500
    x_low: float = -1.0
    x_high: float = 1.0

    def __post_init__(self):
        if self.mechanism not in MECHANISMS:
            raise InvalidData(
                f"unknown mechanism {self.mechanism!r}; "
                f"choose from {sorted(MECHANISMS)}"
            )
        if self.n < 2:
            raise InvalidData("generator needs n >= 2")
        if self.noise < 0:
            raise InvalidData("noise level must be >= 0")


def synth_anm_pair(spec: GeneratorSpec, seed) -> PairedDataset:
    """Draw one additive-noise pair with known direction x -> y."""
    rng = np.random.default_rng(seed)
    x = rng.uniform(spec.x_low, spec.x_high, size=(spec.n, 1))
    noise = spec.noise * rng.standard_normal((spec.n, 1))
    y = MECHANISMS[spec.mechanism](x) + noise
    return PairedDataset(
        id=f"synth-{spec.mechanism}-{seed}",
        x=x,
        y=y,
        ground_truth=X_CAUSES_Y,
        weight=1.0,
    )


def synthetic_suite(count: int, spec: GeneratorSpec, seed: int) -> list[PairedDataset]:
    """A reproducible battery of independent synthetic pairs."""
    pairs = []
    for i in range(count):
        pair = synth_anm_pair(spec, np.random.SeedSequence([seed, i]))
        pairs.append(replace(pair, id=f"synth{i:04d}"))
    return pairs


def parse_generator_config(text: str) -> GeneratorSpec:
    """Parse `key = value` lines into a GeneratorSpec."""
    fields = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        stripped = line.strip()
        if not stripped or stripped.startswith("#"):
            continue
        if "=" not in stripped:
            raise ParseError("expected `key = value`", line=lineno)
        key, _, value = stripped.partition("=")
        fields[key.strip()] = value.strip()
    kwargs = {}
    for key, value in fields.items():
        if key == "mechanism":
            kwargs[key] = value
        elif key == "n":
            kwargs[key] = int(value)
        elif key in ("noise", "x_low", "x_high"):
            kwargs[key] = float(value)
        else:
            raise ParseError(f"unknown generator key {key!r}")
    return GeneratorSpec(**kwargs)
