"""
CSV ingestion of external data sets and plain sample dumps.

Input files have the header x,y,z, one location per row, decimal-point reals.
Coordinates are rescaled to the unit square; the affine map is kept so
surfaces can be reported in the original coordinates.
"""
import re
from dataclasses import dataclass
from pathlib import Path
from typing import Union

import numpy as np
import pandas as pd

from prefsample.sampling_management.sample_set import SampleSet
from prefsample.spatial_core.geometry import PointsLike, as_points
from prefsample.utils.enums import Response_transforms, Scenario_tags
from prefsample.utils.errors import DataFormatError
from prefsample.utils.logger import get_logger

CSV_COLUMNS = ["x", "y", "z"]
MIN_ROWS = 10
SAMPLE_FLOAT_FORMAT = "%.17g"


@dataclass(frozen=True)
class AffineRescale:
    """Per-axis map u = (x - offset) / scale from original to unit-square coordinates"""
    offset1: float
    scale1: float
    offset2: float
    scale2: float

    def __post_init__(self):
        if not (self.scale1 > 0 and self.scale2 > 0):
            raise ValueError(f"AffineRescale scales must be > 0, got ({self.scale1}, {self.scale2})")

    @classmethod
    def identity(cls) -> "AffineRescale":
        return cls(0.0, 1.0, 0.0, 1.0)

    @classmethod
    def fit(cls, points: PointsLike) -> "AffineRescale":
        """Maps the per-axis minimum to 0 and maximum to 1"""
        pts = as_points(points)
        lo, hi = pts.min(axis=0), pts.max(axis=0)
        if np.any(hi <= lo):
            raise DataFormatError(f"Coordinates have zero range on an axis: min {lo}, max {hi}")
        return cls(float(lo[0]), float(hi[0] - lo[0]), float(lo[1]), float(hi[1] - lo[1]))

    def forward(self, points: PointsLike) -> np.ndarray:
        pts = as_points(points)
        return np.column_stack([(pts[:, 0] - self.offset1) / self.scale1, (pts[:, 1] - self.offset2) / self.scale2])

    def inverse(self, points: PointsLike) -> np.ndarray:
        pts = as_points(points)
        return np.column_stack([pts[:, 0] * self.scale1 + self.offset1, pts[:, 1] * self.scale2 + self.offset2])


@dataclass
class ExternalDataset:
    """
    :param locations: (n, 2) coordinates as read
    :param z: responses as read
    :param rescale: map from the read coordinates to the unit square
    :param transform: response transform applied by to_sample_set
    """
    locations: np.ndarray
    z: np.ndarray
    rescale: AffineRescale
    transform: Response_transforms = Response_transforms.NONE

    @property
    def n(self) -> int:
        return self.locations.shape[0]

    def to_sample_set(self) -> SampleSet:
        """Unit-square locations and (optionally log-transformed) responses; p_true is unknown"""
        z = self.z
        if self.transform == Response_transforms.LOG:
            if np.any(z <= 0):
                raise DataFormatError("Log transform needs strictly positive responses")
            z = np.log(z)
        return SampleSet(locations=self.rescale.forward(self.locations), z=z, scenario_tag=Scenario_tags.EXTERNAL)


def _line_of(parser_message: str) -> Union[int, None]:
    match = re.search(r"line (\d+)", parser_message)
    return int(match.group(1)) if match else None


def _parse_column(cells: pd.Series, name: str, path: Path) -> np.ndarray:
    """Correctly rounded reals, or DataFormatError naming the first bad row's file line"""
    text = cells.str.strip().tolist()
    try:
        parsed = np.asarray(text, dtype=float)
    except ValueError:
        parsed = np.full(len(text), np.nan)
        for row, cell in enumerate(text):
            try:
                parsed[row] = float(cell)
            except ValueError:
                break
    bad = np.flatnonzero(~np.isfinite(parsed))
    if bad.size:
        row = int(bad[0])
        line = row + 2  # header is line 1, blank lines are kept as rows
        raise DataFormatError(f"{path}: line {line}: invalid {name} value '{cells.iloc[row]}'", line_number=line)
    return parsed


def ingest_csv(path: Union[str, Path], transform: Response_transforms = Response_transforms.NONE,
               min_rows: int = MIN_ROWS) -> ExternalDataset:
    """
    Parse an x,y,z CSV file.

    :raises DataFormatError: wrong header, blank, malformed or non-finite row (with
                             its 1-based file line number), or fewer than min_rows rows
    """
    logger = get_logger()
    path = Path(path)
    try:
        frame = pd.read_csv(path, dtype=str, keep_default_na=False, encoding="utf-8", skipinitialspace=True,
                            skip_blank_lines=False)
    except pd.errors.ParserError as e:
        raise DataFormatError(f"{path}: {e}", line_number=_line_of(str(e))) from e
    except (FileNotFoundError, pd.errors.EmptyDataError, UnicodeDecodeError) as e:
        raise DataFormatError(f"{path}: {e}") from e

    header = [str(c).strip() for c in frame.columns]
    if header != CSV_COLUMNS:
        raise DataFormatError(f"{path}: header must be {','.join(CSV_COLUMNS)}, got {','.join(header)}", line_number=1)

    frame = frame.fillna("")
    blank = (frame.apply(lambda c: c.str.strip()) == "").all(axis=1).to_numpy()
    # trailing blank lines end the data
    filled = np.flatnonzero(~blank)
    frame = frame.iloc[:filled[-1] + 1] if filled.size else frame.iloc[:0]
    gaps = np.flatnonzero(blank[:len(frame)])
    if gaps.size:
        line = int(gaps[0]) + 2
        raise DataFormatError(f"{path}: line {line}: blank line inside the data", line_number=line)

    values = np.empty((len(frame), 3))
    for j, column in enumerate(frame.columns):
        values[:, j] = _parse_column(frame[column], header[j], path)

    if values.shape[0] < min_rows:
        raise DataFormatError(f"{path}: {values.shape[0]} data rows, at least {min_rows} are needed")
    locations = values[:, :2]
    dataset = ExternalDataset(locations=locations, z=values[:, 2], rescale=AffineRescale.fit(locations),
                              transform=transform)
    logger.info(f"ingest_csv: {path} -> {dataset.n} rows, rescale {dataset.rescale}")
    return dataset


def emit_samples(samples: SampleSet, path: Union[str, Path]) -> Path:
    """Write locations and responses as x,y,z with round-trip precision"""
    path = Path(path)
    frame = pd.DataFrame({"x": samples.locations[:, 0], "y": samples.locations[:, 1], "z": samples.z})
    frame.to_csv(path, index=False, float_format=SAMPLE_FLOAT_FORMAT, lineterminator="\n")
    return path
