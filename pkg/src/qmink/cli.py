"""``qmink`` command line: product | verify | export | project.

Exit codes: 0 success / PASS, 1 verification FAIL, 2 usage, 3 domain, 4 I/O.
"""
from __future__ import annotations

import argparse
import json
import math
import sys
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np

from . import kernels
from .cloud import PointCloud, read_ply
from .errors import DomainError, UsageError
from .minkowski import product
from .oracle import PROPERTIES, _jsonable, product_cloud, project_cloud, verify
from .rotation_sets import from_descriptor

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_DOMAIN, EXIT_IO = 0, 1, 2, 3, 4

_Q = math.pi / 8
PRESETS = {
    "example1": (
        {"type": "arc", "axis": [0, 1, 0], "phi": 0.0, "delta": math.pi},
        {"type": "arc", "axis": [0, 0, 1], "phi": 0.0, "delta": math.pi},
        {"t": ("a_s", 2.0), "s": ("b_s", 2.0)},
    ),
    "example3": (
        {"type": "arc", "axis": [0, 1, 0], "phi": 0.0, "delta": math.pi / 4},
        {"type": "axis_cap", "axis": [0, 0, 1], "phi": _Q, "xi": _Q},
        {"t": ("a_s", 2.0), "u": ("b_azimuth", 1.0), "v": ("b_polar", 1.0)},
    ),
    "example5": (
        {"type": "axis_cap", "axis": [0, 1, 0], "phi": _Q, "xi": _Q},
        {"type": "axis_cap", "axis": [0, 0, 1], "phi": _Q, "xi": _Q},
        {"s": ("a_azimuth", 1.0), "t": ("a_polar", 1.0), "u": ("b_azimuth", 1.0), "v": ("b_polar", 1.0)},
    ),
}


@dataclass
class JobConfig:
    command: str
    a: dict | None = None
    b: dict | None = None
    file: str | None = None
    preset: str | None = None
    property: str | None = None
    params: dict = field(default_factory=dict)
    n: int = 10_000
    seed: int = 42
    tol: float = 1e-9
    method: str | None = None
    input: str | None = None
    out: str | None = None
    format: str | None = None
    report: str | None = None
    backend: str = kernels.BACKEND
    threads: int = 1

    def validate(self) -> "JobConfig":
        if self.n < 1:
            raise UsageError("--n must be at least 1")
        if not self.tol > 0:
            raise UsageError("--tol must be positive")
        if self.format not in (None, "csv", "ply"):
            raise UsageError(f"unknown format {self.format!r}")
        return self


def _parse_json(text: str, what: str):
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise UsageError(f"{what} is not valid JSON: {exc.msg}") from exc


def _read_file(path: str) -> dict:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise OSError(f"cannot read {path}: {exc.strerror}") from exc
    data = _parse_json(text, path)
    if not isinstance(data, dict):
        raise UsageError(f"{path} must hold a JSON object")
    return data


def _param_value(text: str):
    try:
        return json.loads(text)
    except json.JSONDecodeError:
        return text


def _config(args) -> JobConfig:
    cfg = JobConfig(command=args.command, n=args.n, seed=args.seed, tol=args.tol,
                    report=args.report, threads=kernels._threads())
    if getattr(args, "file", None):
        cfg.file = args.file
        data = _read_file(args.file)
        cfg.a, cfg.b = data.get("a"), data.get("b")
        cfg.property = data.get("property")
        cfg.params = dict(data.get("params", {}))
    if getattr(args, "a", None):
        cfg.a = _parse_json(args.a, "--a")
    if getattr(args, "b", None):
        cfg.b = _parse_json(args.b, "--b")
    if getattr(args, "preset", None):
        cfg.preset = args.preset
        cfg.a, cfg.b, _ = PRESETS[args.preset]
    if getattr(args, "property", None):
        cfg.property = args.property
    for key in ("s", "t", "xi"):
        val = getattr(args, key, None)
        if val is not None:
            cfg.params[key] = val
    for item in getattr(args, "param", None) or []:
        if "=" not in item:
            raise UsageError(f"--param expects key=value, got {item!r}")
        key, val = item.split("=", 1)
        cfg.params[key] = _param_value(val)
    cfg.method = getattr(args, "method", None)
    cfg.input = getattr(args, "input", None)
    cfg.out = getattr(args, "out", None)
    cfg.format = getattr(args, "format", None)
    return cfg.validate()


def _operands(cfg: JobConfig):
    if cfg.a is None or cfg.b is None:
        raise UsageError("two set descriptors are required (--a/--b, --file or --preset)")
    return from_descriptor(cfg.a), from_descriptor(cfg.b)


def _cloud_format(cfg: JobConfig) -> str:
    if cfg.format:
        return cfg.format
    suffix = Path(cfg.out).suffix.lower().lstrip(".")
    if suffix not in ("csv", "ply"):
        raise UsageError("cannot infer format from --out; pass --format csv|ply")
    return suffix


def _preset_tags(cloud: PointCloud, preset: str | None) -> PointCloud:
    if preset is None:
        return cloud
    tags = {name: scale * cloud.tags[src] for name, (src, scale) in PRESETS[preset][2].items()}
    return PointCloud(cloud.points, tags, cloud.frame, cloud.meta)


def cmd_product(cfg: JobConfig) -> tuple[dict, int]:
    a, b = _operands(cfg)
    return {"result": product(a, b).to_dict()}, EXIT_OK


def cmd_verify(cfg: JobConfig) -> tuple[dict, int]:
    if not cfg.property:
        raise UsageError("verify needs a property name")
    report = verify(cfg.property, cfg.params, cfg.n, cfg.seed)
    return {"report": report.to_dict()}, EXIT_OK if report.passed else EXIT_FAIL


def cmd_export(cfg: JobConfig) -> tuple[dict, int]:
    if not cfg.out:
        raise UsageError("export needs --out")
    fmt = _cloud_format(cfg)
    a, b = _operands(cfg)
    cloud = product_cloud(a, b, cfg.n, cfg.seed)
    cloud = _preset_tags(cloud, cfg.preset)
    if cfg.method:
        cloud = project_cloud(cloud, cfg.method)
    cloud.write(cfg.out, fmt)
    return {"cloud": _summary(cloud, cfg.out)}, EXIT_OK


def cmd_project(cfg: JobConfig) -> tuple[dict, int]:
    if not cfg.input or not cfg.out:
        raise UsageError("project needs --input and --out")
    fmt = _cloud_format(cfg)
    src = Path(cfg.input)
    if not src.exists():
        raise OSError(f"cannot read {src}: no such file")
    cloud = read_ply(src) if src.suffix.lower() == ".ply" else PointCloud.from_csv(src)
    cloud = project_cloud(cloud, cfg.method)
    cloud.write(cfg.out, fmt)
    return {"cloud": _summary(cloud, cfg.out)}, EXIT_OK


def _summary(cloud: PointCloud, path) -> dict:
    radii = np.linalg.norm(cloud.points, axis=1) if len(cloud) else np.zeros(0)
    return {
        "path": str(path),
        "frame": cloud.frame,
        "points": len(cloud),
        "columns": list(cloud.columns),
        "dropped": int(cloud.meta.get("dropped", 0)),
        "max_radius": float(radii.max()) if radii.size else 0.0,
    }


COMMANDS = {"product": cmd_product, "verify": cmd_verify, "export": cmd_export, "project": cmd_project}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--n", type=int, default=10_000, help="sample count (default 10000)")
    common.add_argument("--seed", type=int, default=42, help="64-bit seed (default 42)")
    common.add_argument("--tol", type=float, default=1e-9, help="tolerance (default 1e-9)")
    common.add_argument("--report", help="also write the JSON report to this path")

    operands = argparse.ArgumentParser(add_help=False)
    operands.add_argument("--a", help="first set descriptor, inline JSON")
    operands.add_argument("--b", help="second set descriptor, inline JSON")
    operands.add_argument("--file", help='JSON file with {"a": ..., "b": ...}')

    p = argparse.ArgumentParser(prog="qmink", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    sub.add_parser("product", parents=[common, operands], help="closed-form product of two sets")

    v = sub.add_parser("verify", parents=[common], help="Monte-Carlo check of one property")
    v.add_argument("property", nargs="?", help=", ".join(PROPERTIES))
    v.add_argument("--file", help='JSON file with {"property": ..., "params": {...}}')
    v.add_argument("--s", type=float)
    v.add_argument("--t", type=float)
    v.add_argument("--xi", type=float)
    v.add_argument("--param", action="append", metavar="KEY=VALUE", help="extra parameter (JSON value)")

    e = sub.add_parser("export", parents=[common, operands], help="write a sampled product cloud")
    e.add_argument("--preset", choices=sorted(PRESETS))
    e.add_argument("--method", choices=["stereo", "bch"], help="project into R^3 before writing")
    e.add_argument("--out")
    e.add_argument("--format", choices=["csv", "ply"])

    j = sub.add_parser("project", parents=[common], help="chart an S3 cloud file into R^3")
    j.add_argument("--input")
    j.add_argument("--method", choices=["stereo", "bch"], default="stereo")
    j.add_argument("--out")
    j.add_argument("--format", choices=["csv", "ply"])
    return p


def run(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = _config(args)
        payload, code = COMMANDS[cfg.command](cfg)
        payload = _jsonable({"job": asdict(cfg), **payload, "exit_code": code})
        text = json.dumps(payload, indent=2)
        if cfg.report:
            Path(cfg.report).write_text(text + "\n")
        print(text)
        return code
    except UsageError as exc:
        print(f"qmink: usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except DomainError as exc:
        print(f"qmink: domain error: {exc}", file=sys.stderr)
        return EXIT_DOMAIN
    except OSError as exc:
        print(f"qmink: I/O error: {exc}", file=sys.stderr)
        return EXIT_IO


def main(argv=None) -> None:
    sys.exit(run(argv))
