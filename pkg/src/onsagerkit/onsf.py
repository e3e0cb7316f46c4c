"""Snapshot container format and trajectory directories.

A snapshot file starts with the ASCII magic "ONSF1\n", then one JSON
header line {"n": int, "time": float, "nu": float-or-null, "layout":
"full-c128-le"} terminated by a newline, then the raw coefficient block:
for each lattice point k of the full cube, in row-major order with the
three axes in standard FFT frequency order (0, 1, ..., n/2-1, -n/2, ...,
-1), the 3 complex components as little-endian float64 (re, im) pairs.

A trajectory is a directory with "manifest.json" listing the snapshot
files (relative paths) with their times, plus the viscosity.  All writes
go through a temp file and an atomic rename.
"""

from __future__ import annotations

import json
import os
import tempfile
from pathlib import Path

import numpy as np

from .spectral import Grid, Trajectory, VelocityField, make_grid

MAGIC = b"ONSF1\n"
LAYOUT = "full-c128-le"
MANIFEST_NAME = "manifest.json"

__all__ = [
    "MAGIC",
    "LAYOUT",
    "write_snapshot",
    "read_snapshot",
    "TrajectoryWriter",
    "TrajectoryDir",
    "write_trajectory",
    "atomic_write_bytes",
]


def atomic_write_bytes(path, payload: bytes) -> None:
    path = Path(path)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=path.name, suffix=".tmp")
    try:
        with os.fdopen(fd, "wb") as fh:
            fh.write(payload)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def write_snapshot(fld: VelocityField, path, nu: float | None = None) -> None:
    """Serialize one field; coefficients land as an (n, n, n, 3) complex block."""
    header = {
        "n": fld.grid.n,
        "time": 0.0 if fld.time is None else float(fld.time),
        "nu": None if nu is None else float(nu),
        "layout": LAYOUT,
    }
    block = np.ascontiguousarray(np.moveaxis(fld.coeffs, 0, -1)).astype("<c16")
    payload = MAGIC + json.dumps(header).encode() + b"\n" + block.tobytes()
    atomic_write_bytes(path, payload)


def read_snapshot(path) -> tuple[VelocityField, float | None]:
    """Read one snapshot; returns (field, nu-or-None)."""
    with open(path, "rb") as fh:
        magic = fh.read(len(MAGIC))
        if magic != MAGIC:
            raise ValueError(f"{path}: not a snapshot container (bad magic {magic!r})")
        header_line = fh.readline()
        try:
            header = json.loads(header_line)
        except json.JSONDecodeError as exc:
            raise ValueError(f"{path}: malformed header: {exc}") from exc
        if header.get("layout") != LAYOUT:
            raise ValueError(f"{path}: unsupported layout {header.get('layout')!r}")
        n = int(header["n"])
        grid = make_grid(n)
        expected = n * n * n * 3 * 16
        raw = fh.read(expected)
        if len(raw) != expected:
            raise ValueError(f"{path}: truncated coefficient block")
        block = np.frombuffer(raw, dtype="<c16").reshape(n, n, n, 3)
        coeffs = np.moveaxis(block, -1, 0).astype(np.complex128)
        fld = VelocityField(grid, coeffs, time=float(header["time"]))
        nu = header.get("nu")
        return fld, (None if nu is None else float(nu))


class TrajectoryWriter:
    """Streams snapshots into a trajectory directory as they are produced."""

    def __init__(self, directory, nu: float):
        self.directory = Path(directory)
        self.directory.mkdir(parents=True, exist_ok=True)
        self.nu = float(nu)
        self.entries: list[dict] = []
        self._counter = 0

    def __call__(self, time: float, fld: VelocityField) -> None:
        name = f"snapshot-{self._counter:06d}.onsf"
        write_snapshot(fld.with_coeffs(fld.coeffs, time=time), self.directory / name, nu=self.nu)
        self.entries.append({"file": name, "time": float(time)})
        self._counter += 1

    def finalize(self) -> None:
        manifest = {
            "format": "ONSF1-trajectory",
            "nu": self.nu,
            "snapshots": self.entries,
        }
        atomic_write_bytes(
            self.directory / MANIFEST_NAME,
            json.dumps(manifest, indent=2).encode() + b"\n",
        )


class TrajectoryDir:
    """Disk-backed trajectory: snapshots load lazily, one at a time."""

    def __init__(self, directory):
        self.directory = Path(directory)
        manifest_path = self.directory / MANIFEST_NAME
        with open(manifest_path) as fh:
            manifest = json.load(fh)
        if manifest.get("format") != "ONSF1-trajectory":
            raise ValueError(f"{manifest_path}: not a trajectory manifest")
        self.nu = float(manifest["nu"])
        self.entries = manifest["snapshots"]
        times = [e["time"] for e in self.entries]
        if any(t1 <= t0 for t0, t1 in zip(times, times[1:])):
            raise ValueError(f"{manifest_path}: snapshot times not strictly increasing")

    def __len__(self) -> int:
        return len(self.entries)

    @property
    def times(self) -> np.ndarray:
        return np.array([e["time"] for e in self.entries])

    def iter_snapshots(self):
        for entry in self.entries:
            fld, _ = read_snapshot(self.directory / entry["file"])
            yield entry["time"], fld

    def load(self) -> Trajectory:
        return Trajectory(nu=self.nu, snapshots=list(self.iter_snapshots()))


def write_trajectory(traj: Trajectory, directory) -> TrajectoryDir:
    writer = TrajectoryWriter(directory, traj.nu)
    for t, fld in traj.iter_snapshots():
        writer(t, fld)
    writer.finalize()
    return TrajectoryDir(directory)
