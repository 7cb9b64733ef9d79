"""
Result tables written by the experiment driver

Three space-separated formats, one header line each:
    test<id>-n<n>.txt   k residual damping      (one row per Newton iterate)
    test<id>.txt        N Linfty L2 L1          (one row per n of a sweep)
    grid<id>-n<n>.txt   x y weight              (support points and masses)
Writes go to a temporary file in the target directory that is renamed into
place, so an aborted run never leaves a partial table behind.
"""
from dataclasses import asdict, dataclass
from pathlib import Path
from typing import List, Sequence
import logging
import os
import re
import tempfile

import numpy as np
import pandas as pd

from src.exceptions import TableFormatError
from src.measure.discrete_measure import DiscreteMeasure
from src.solver.damped_newton import SolveTrace

logger = logging.getLogger(__name__)

ITERATION_COLUMNS = ["k", "residual", "damping"]
ERROR_COLUMNS = ["N", "Linfty", "L2", "L1"]
GRID_COLUMNS = ["x", "y", "weight"]


@dataclass(frozen=True)
class IterationRecord:
    k: int
    residual: float
    damping: int  # 1 iff tau_k != 1


@dataclass(frozen=True)
class RunRecord:
    test: int
    n: int
    N: int
    l_inf: float
    l2_nu: float
    l1_nu: float
    iterations: int
    wall_time: float
    damped_iterations: int = 0
    min_weight: float = 0.0

    def to_dict(self) -> dict:
        return asdict(self)

    def error_row(self) -> dict:
        return {"N": self.N, "Linfty": self.l_inf, "L2": self.l2_nu, "L1": self.l1_nu}


def iteration_records(trace: SolveTrace) -> List[IterationRecord]:
    return [
        IterationRecord(k=entry.k, residual=entry.residual, damping=int(entry.damped))
        for entry in trace.entries
    ]


def iteration_file(out_dir, test: int, n: int) -> Path:
    return Path(out_dir) / f"test{test}-n{n}.txt"


def error_file(out_dir, test: int) -> Path:
    return Path(out_dir) / f"test{test}.txt"


def grid_file(out_dir, test: int, n: int) -> Path:
    return Path(out_dir) / f"grid{test}-n{n}.txt"


def _write_atomic(df: pd.DataFrame, path) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", newline="") as handle:
            df.to_csv(handle, sep=" ", index=False, lineterminator="\n")
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise
    logger.debug(f"Wrote {len(df)} rows to {path}")
    return path


def write_iterations(path, records: Sequence[IterationRecord]) -> Path:
    df = pd.DataFrame(
        {
            "k": [r.k for r in records],
            "residual": [float(r.residual) for r in records],
            "damping": [int(r.damping) for r in records],
        },
        columns=ITERATION_COLUMNS,
    )
    return _write_atomic(df, path)


def write_errors(path, records: Sequence[RunRecord]) -> Path:
    rows = sorted((r.error_row() for r in records), key=lambda row: row["N"])
    df = pd.DataFrame(rows, columns=ERROR_COLUMNS)
    df["N"] = df["N"].astype(int)
    return _write_atomic(df, path)


def write_grid(path, nu: DiscreteMeasure) -> Path:
    df = pd.DataFrame(
        {"x": nu.points[:, 0], "y": nu.points[:, 1], "weight": nu.weights},
        columns=GRID_COLUMNS,
    )
    return _write_atomic(df, path)


def _read_table(path, columns: List[str]) -> pd.DataFrame:
    """Read a space-separated table, checking the header and that every cell is numeric"""
    try:
        raw = pd.read_csv(path, sep=" ", dtype=str, keep_default_na=False)
    except pd.errors.EmptyDataError:
        raise TableFormatError("empty file, expected a header line", line=1)
    except pd.errors.ParserError as e:
        match = re.search(r"line (\d+)", str(e))
        raise TableFormatError(f"wrong number of fields ({e})", line=int(match.group(1)) if match else None) from e

    if list(raw.columns) != columns:
        raise TableFormatError(f"expected header '{' '.join(columns)}', got '{' '.join(map(str, raw.columns))}'", line=1)

    parsed = raw.apply(pd.to_numeric, errors="coerce")
    bad = parsed.isna().any(axis=1).to_numpy()
    if bad.any():
        row = int(np.argmax(bad))
        # header is line 1
        raise TableFormatError(
            f"non-numeric or missing value in '{' '.join(raw.iloc[row].astype(str))}'", line=row + 2
        )
    return parsed


def read_iterations(path) -> List[IterationRecord]:
    df = _read_table(path, ITERATION_COLUMNS)
    return [
        IterationRecord(k=int(row.k), residual=float(row.residual), damping=int(row.damping))
        for row in df.itertuples(index=False)
    ]


def read_errors(path) -> pd.DataFrame:
    """N Linfty L2 L1 table sorted by N"""
    df = _read_table(path, ERROR_COLUMNS)
    df["N"] = df["N"].astype(int)
    return df.sort_values("N", kind="stable").reset_index(drop=True)
