"""Point clouds, seeded generators and CSV / PLY export."""
from __future__ import annotations

import csv
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import DomainError, UsageError

FRAMES = ("S3", "R3_STEREO", "R3_BCH")
_COLUMNS = {"S3": ("w", "x", "y", "z"), "R3_STEREO": ("x", "y", "z"), "R3_BCH": ("x", "y", "z")}


def make_rng(seed: int, *keys: int) -> np.random.Generator:
    """Philox (counter-based) generator keyed by ``seed`` and optional sub-stream ids.

    The same ``(seed, keys)`` always yields the same stream on every platform
    numpy supports.
    """
    if not isinstance(seed, (int, np.integer)):
        raise UsageError(f"seed must be an integer, got {seed!r}")
    entropy = [int(seed) & 0xFFFFFFFFFFFFFFFF, *(int(k) for k in keys)]
    return np.random.Generator(np.random.Philox(np.random.SeedSequence(entropy)))


@dataclass
class PointCloud:
    points: np.ndarray
    tags: dict = field(default_factory=dict)
    frame: str = "S3"
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.frame not in FRAMES:
            raise UsageError(f"unknown frame {self.frame!r}")
        width = len(_COLUMNS[self.frame])
        self.points = np.asarray(self.points, dtype=float).reshape(-1, width)
        self.tags = {k: np.asarray(v, dtype=float).reshape(-1) for k, v in self.tags.items()}
        for k, v in self.tags.items():
            if v.shape[0] != self.points.shape[0]:
                raise UsageError(f"tag {k!r} has {v.shape[0]} entries for {len(self)} points")
        if self.frame == "S3" and len(self):
            dev = np.max(np.abs(np.linalg.norm(self.points, axis=1) - 1.0))
            if dev > 1e-9:
                raise DomainError(f"S3 cloud point off the unit sphere by {dev:.3g}")

    def __len__(self):
        return self.points.shape[0]

    @property
    def columns(self) -> tuple:
        return _COLUMNS[self.frame] + tuple(self.tags)

    def table(self) -> np.ndarray:
        cols = [self.points] + [v[:, None] for v in self.tags.values()]
        return np.hstack(cols) if cols else self.points

    def to_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(self.columns)
            for row in self.table():
                writer.writerow([repr(float(x)) for x in row])

    def to_ply(self, path) -> None:
        header = [
            "ply",
            "format binary_little_endian 1.0",
            f"comment frame {self.frame}",
            f"element vertex {len(self)}",
            *(f"property double {name}" for name in self.columns),
            "end_header",
        ]
        with open(path, "wb") as fh:
            fh.write(("\n".join(header) + "\n").encode("ascii"))
            fh.write(np.ascontiguousarray(self.table(), dtype="<f8").tobytes())

    def write(self, path, fmt: str | None = None) -> None:
        fmt = fmt or Path(path).suffix.lstrip(".").lower()
        if fmt == "csv":
            self.to_csv(path)
        elif fmt == "ply":
            self.to_ply(path)
        else:
            raise UsageError(f"unsupported cloud format {fmt!r}")

    @classmethod
    def from_csv(cls, path, frame: str | None = None) -> "PointCloud":
        with open(path, newline="") as fh:
            rows = list(csv.reader(fh))
        if not rows:
            raise UsageError(f"{path}: empty CSV")
        header, body = rows[0], rows[1:]
        if frame is None:
            frame = "S3" if header[:4] == ["w", "x", "y", "z"] else "R3_STEREO"
        width = len(_COLUMNS[frame])
        if tuple(header[:width]) != _COLUMNS[frame]:
            raise UsageError(f"{path}: header {header[:width]} does not match frame {frame}")
        try:
            data = np.array([[float(x) for x in r] for r in body], dtype=float).reshape(-1, len(header))
        except ValueError as exc:
            raise UsageError(f"{path}: malformed CSV rows") from exc
        tags = {name: data[:, width + i] for i, name in enumerate(header[width:])}
        return cls(data[:, :width], tags, frame)


def read_ply(path) -> PointCloud:
    """Read back a cloud written by :meth:`PointCloud.to_ply`."""
    with open(path, "rb") as fh:
        raw = fh.read()
    try:
        end = raw.index(b"end_header\n") + len(b"end_header\n")
        lines = raw[:end].decode("ascii").splitlines()
        frame = next(l.split()[2] for l in lines if l.startswith("comment frame"))
        n = next(int(l.split()[2]) for l in lines if l.startswith("element vertex"))
        names = [l.split()[2] for l in lines if l.startswith("property")]
        data = np.frombuffer(raw[end:], dtype="<f8").reshape(n, len(names))
    except (ValueError, StopIteration, IndexError, UnicodeDecodeError) as exc:
        raise UsageError(f"{path}: not a point cloud written by qmink") from exc
    if frame not in _COLUMNS:
        raise UsageError(f"{path}: unknown frame {frame!r}")
    width = len(_COLUMNS[frame])
    tags = {name: data[:, width + i].copy() for i, name in enumerate(names[width:])}
    return PointCloud(data[:, :width].copy(), tags, frame)
