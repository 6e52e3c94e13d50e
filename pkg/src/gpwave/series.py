from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Mapping

import numpy as np


@dataclass(frozen=True, eq=False)
class TimeSeries:
    """Columnar time-indexed table. Column ``t`` is always present."""

    columns: Mapping[str, np.ndarray]

    def __post_init__(self):
        cols = {k: np.asarray(v, dtype=float) for k, v in self.columns.items()}
        if "t" not in cols:
            raise ValueError("time series needs a 't' column")
        lengths = {len(v) for v in cols.values()}
        if len(lengths) != 1:
            raise ValueError(f"ragged columns: {sorted(lengths)}")
        object.__setattr__(self, "columns", cols)

    @classmethod
    def from_rows(cls, names: Iterable[str], rows) -> "TimeSeries":
        names = list(names)
        data = np.asarray(rows, dtype=float).reshape(-1, len(names))
        return cls({n: data[:, i] for i, n in enumerate(names)})

    @property
    def names(self) -> list[str]:
        return list(self.columns)

    @property
    def t(self) -> np.ndarray:
        return self.columns["t"]

    def __getitem__(self, name: str) -> np.ndarray:
        return self.columns[name]

    def __len__(self) -> int:
        return len(self.t)

    def row(self, i: int) -> dict[str, float]:
        return {k: float(v[i]) for k, v in self.columns.items()}
