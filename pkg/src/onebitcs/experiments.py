"""Monte-Carlo sweep harness: per-cell trials, dB aggregation, decay-slope
fitting, CSV emission.

Each sweep cell is (scheme, matrix kind, N, s, log2(m/N) ratio); every trial
in a cell draws a fresh operator, signal, and dither streams from seeds mixed
deterministically out of the base seed, so results are bit-reproducible and
independent of the thread count.

Aggregation is in the dB domain: mean_db is the arithmetic mean of per-trial
10*log10 errors.  (l2-domain averaging would shift the curves.)
"""

from __future__ import annotations

import concurrent.futures
import io
from dataclasses import dataclass, field

import numpy as np

from . import operators, recon
from .recon import SchemeKind

MATRIX_KINDS = ("fourier", "gaussian", "butterfly")

CSV_HEADER = "scheme,matrix,n,s,log2_ratio,m,trials,mean_db,std_db"


class ConfigError(ValueError):
    """Invalid experiment configuration; message names the offending key."""


@dataclass(frozen=True)
class ExperimentConfig:
    dim_n: int
    sparsities: tuple[int, ...]
    log2_ratios: tuple[float, ...]
    schemes: tuple[SchemeKind, ...]
    matrix: str = "fourier"
    trials: int = 100
    base_seed: int = 0
    threads: int | None = None  # None = auto

    def __post_init__(self):
        if self.dim_n < 1:
            raise ConfigError("dim_n must be >= 1")
        if self.trials < 1:
            raise ConfigError("trials must be >= 1")
        if not self.sparsities:
            raise ConfigError("sparsities must be non-empty")
        for s in self.sparsities:
            if not 1 <= s <= self.dim_n:
                raise ConfigError(
                    f"sparsities entry {s} out of range [1, {self.dim_n}]")
        if not self.log2_ratios:
            raise ConfigError("log2_ratios must be non-empty")
        for r in self.log2_ratios:
            if measurements(self.dim_n, r) < 1:
                raise ConfigError(f"log2_ratios entry {r} yields m < 1")
        if not self.schemes:
            raise ConfigError("schemes must be non-empty")
        if self.matrix not in MATRIX_KINDS:
            raise ConfigError(f"matrix must be one of {MATRIX_KINDS}, "
                              f"got {self.matrix!r}")
        if self.matrix == "butterfly" and (self.dim_n < 2
                                           or self.dim_n & (self.dim_n - 1)):
            raise ConfigError("matrix 'butterfly' requires dim_n a power of two")


@dataclass(frozen=True)
class SummaryRow:
    scheme: SchemeKind
    matrix: str
    n: int
    s: int
    log2_ratio: float
    m: int
    trials: int
    mean_db: float
    std_db: float


@dataclass(frozen=True)
class Cell:
    scheme: SchemeKind
    matrix: str
    n: int
    s: int
    log2_ratio: float

    @property
    def m(self) -> int:
        return measurements(self.n, self.log2_ratio)


def measurements(n: int, log2_ratio: float) -> int:
    """m = round(N * 2^r); supports the non-integer abscissa values."""
    return int(round(n * 2.0 ** log2_ratio))


_SCHEME_ID = {k: i for i, k in enumerate(SchemeKind)}
_MATRIX_ID = {k: i for i, k in enumerate(MATRIX_KINDS)}


def _trial_seeds(base_seed: int, cell: Cell, trial_index: int):
    """Four independent integer seeds (operator, signal, measurement dither,
    matrix dither) from a splittable counter construction over the cell id.

    The ratio enters via its IEEE-754 bit pattern, so a cell's seeds do not
    depend on its position in the config (cell independence).
    """
    ratio_bits = int(np.float64(cell.log2_ratio).view(np.uint64))
    ss = np.random.SeedSequence([base_seed, _SCHEME_ID[cell.scheme],
                                 _MATRIX_ID[cell.matrix], cell.n, cell.s,
                                 ratio_bits, trial_index])
    return [int(v) for v in ss.generate_state(4)]


def _make_operator(matrix: str, n: int, m: int, seed: int):
    if matrix == "fourier":
        return operators.partial_fourier_operator(n, m, seed)
    if matrix == "gaussian":
        return operators.gaussian_operator(m, n, seed)
    return operators.butterfly_operator(n, m, seed)


def run_trial(base_seed: int, cell: Cell, trial_index: int) -> float:
    """One reconstruction trial; returns its dB error.  Deterministic in
    (base_seed, cell, trial_index)."""
    op_seed, sig_seed, meas_seed, mat_seed = _trial_seeds(
        base_seed, cell, trial_index)
    op = _make_operator(cell.matrix, cell.n, cell.m, op_seed)
    x = recon.gen_sparse_signal(cell.n, cell.s, sig_seed)
    result = recon.reconstruct(cell.scheme, op, x, cell.s, meas_seed, mat_seed)
    return result.error_db


def _cells(cfg: ExperimentConfig) -> list[Cell]:
    return [Cell(scheme=scheme, matrix=cfg.matrix, n=cfg.dim_n, s=s,
                 log2_ratio=r)
            for scheme in cfg.schemes
            for s in cfg.sparsities
            for r in cfg.log2_ratios]


def run_experiment(cfg: ExperimentConfig) -> list[SummaryRow]:
    """Run all trials for every cell; rows come back in config order and are
    independent of the thread count."""
    cells = _cells(cfg)  # config validated on construction
    jobs = [(cell, t) for cell in cells for t in range(cfg.trials)]

    if cfg.threads == 1:
        errors = [run_trial(cfg.base_seed, cell, t) for cell, t in jobs]
    else:
        with concurrent.futures.ThreadPoolExecutor(cfg.threads) as pool:
            errors = list(pool.map(
                lambda job: run_trial(cfg.base_seed, *job), jobs))

    rows = []
    for i, cell in enumerate(cells):
        vals = np.array(errors[i * cfg.trials:(i + 1) * cfg.trials])
        rows.append(SummaryRow(
            scheme=cell.scheme, matrix=cell.matrix, n=cell.n, s=cell.s,
            log2_ratio=cell.log2_ratio, m=cell.m, trials=cfg.trials,
            mean_db=float(vals.mean()), std_db=float(vals.std())))
    return rows


def fit_decay_slope(rows: list[SummaryRow], min_ratio: float) -> float:
    """Least-squares slope of mean_db against log2_ratio (dB per octave)
    over rows with log2_ratio >= min_ratio."""
    pts = [(r.log2_ratio, r.mean_db) for r in rows if r.log2_ratio >= min_ratio]
    if len(pts) < 2:
        raise ValueError(f"need >= 2 rows with log2_ratio >= {min_ratio}, "
                         f"got {len(pts)}")
    xs, ys = zip(*pts)
    return float(np.polyfit(xs, ys, 1)[0])


def _fmt(v: float) -> str:
    return f"{v:.6g}"


def rows_to_csv(rows: list[SummaryRow]) -> str:
    buf = io.StringIO()
    buf.write(CSV_HEADER + "\n")
    for r in rows:
        buf.write(",".join([r.scheme.value, r.matrix, str(r.n), str(r.s),
                            _fmt(r.log2_ratio), str(r.m), str(r.trials),
                            _fmt(r.mean_db), _fmt(r.std_db)]) + "\n")
    return buf.getvalue()


def write_csv(rows: list[SummaryRow], path) -> None:
    """Deterministic CSV: fixed header, 6 significant digits, LF endings."""
    try:
        with open(path, "w", newline="\n") as fh:
            fh.write(rows_to_csv(rows))
    except OSError as exc:
        raise OSError(f"failed to write CSV to {path}: {exc}") from exc


def read_csv(path) -> list[SummaryRow]:
    """Parse a CSV produced by write_csv back into summary rows."""
    rows = []
    with open(path) as fh:
        header = fh.readline().strip()
        if header != CSV_HEADER:
            raise ValueError(f"unexpected CSV header in {path}: {header!r}")
        for line in fh:
            sch, mat, n, s, ratio, m, trials, mean_db, std_db = \
                line.strip().split(",")
            rows.append(SummaryRow(
                scheme=SchemeKind(sch), matrix=mat, n=int(n), s=int(s),
                log2_ratio=float(ratio), m=int(m), trials=int(trials),
                mean_db=float(mean_db), std_db=float(std_db)))
    return rows
