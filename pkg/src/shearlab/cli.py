"""Command-line front end: ``shearlab <command> [--config PATH] [--out PATH] ...``.

Exit codes: 0 success, 2 configuration error, 3 numeric failure.  Outputs
are computed in full before anything is written, and each file is written
atomically, so a failed run leaves no partial output.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys
import tempfile
from concurrent.futures import ProcessPoolExecutor
from typing import Any, Callable, Dict, List, Optional, Sequence, Tuple

from . import config as cfgmod
from .boundary import DISK, from_descriptor
from .douady_earle import (
    COUNTEREXAMPLE_COLUMNS,
    counterexample_acceptance,
    counterexample_csv_rows,
    counterexample_row,
    beltrami_at,
    disk_grid,
    extend,
    lemma3_check,
)
from .errors import (
    DegenerateDenominator,
    DegenerateImage,
    DepthLimit,
    EmptyWindow,
    GeometryError,
    ModelMismatch,
    NoConvergence,
    NotHomeomorphic,
    NotNormalized,
    OutOfRange,
    ShearOverflow,
    WindowExceedsDepth,
)
from .farey import MAX_DEPTH, enumerate_tesselation
from .geom import is_inf
from .metrics import Degenerating, UnitCr, d_AC_estimate, d_AM_estimate, d_C_estimate, d_M_estimate
from .shear import characteristic_map, d_AS, das_csv, halfplane_normalized, read_shear_csv, shear_csv, shear_function, shear_norm

EXIT_OK, EXIT_CONFIG, EXIT_NUMERIC = 0, 2, 3

CONFIG_ERRORS = (cfgmod.ConfigError, DepthLimit, WindowExceedsDepth, OutOfRange, ModelMismatch, GeometryError)
NUMERIC_ERRORS = (NoConvergence, DegenerateImage, ShearOverflow, NotHomeomorphic, DegenerateDenominator,
                  NotNormalized, EmptyWindow, ArithmeticError)


class Outputs:
    """Files to write once the computation has finished."""

    def __init__(self, out: Optional[str]):
        self.out = out
        self.files: List[Tuple[str, str]] = []
        self.stdout: List[str] = []

    def main(self, text: str):
        if self.out is None:
            self.stdout.append(text)
        else:
            self.files.append((self.out, text))

    def sidecar(self, obj: Dict[str, Any]):
        text = json.dumps(obj, sort_keys=True, indent=2) + "\n"
        if self.out is None:
            self.stdout.append(text)
        else:
            self.files.append((self.out + ".json", text))

    def commit(self):
        for path, text in self.files:
            _atomic_write(path, text)
        for text in self.stdout:
            sys.stdout.write(text)


def _atomic_write(path: str, text: str):
    d = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=d, prefix=".tmp-", suffix=os.path.basename(path))
    try:
        with os.fdopen(fd, "w", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _csv(header: str, columns: Sequence[str], rows) -> str:
    buf = io.StringIO()
    buf.write(header)
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(columns)
    for r in rows:
        w.writerow([_fmt(v) for v in r])
    return buf.getvalue()


def _fmt(v):
    if isinstance(v, float):
        return "inf" if is_inf(v) else repr(v)
    return v


def _depth(cfg) -> int:
    d = cfg["depth"]
    if not 0 <= d <= MAX_DEPTH:
        raise DepthLimit(f"depth must be in [0, {MAX_DEPTH}], got {d}")
    return d


def _map(desc):
    return from_descriptor(desc)


def _disk_map(desc):
    h = from_descriptor(desc)
    if h.model != DISK:
        raise ModelMismatch("this command needs a disk-model map")
    return h


def _grid(g) -> List[complex]:
    if "points" in g:
        return [complex(x, y) for x, y in g["points"]]
    return disk_grid(g.get("radius", 0.5), g.get("rings", 3), g.get("per_ring", 8))


def _pmap(fn: Callable, items: Sequence, workers: int) -> list:
    if workers <= 1 or len(items) <= 1:
        return [fn(x) for x in items]
    with ProcessPoolExecutor(max_workers=workers) as ex:
        return list(ex.map(fn, items))


# --- commands -----------------------------------------------------------------

def cmd_farey(cfg, out: Outputs):
    t = enumerate_tesselation(_depth(cfg))
    out.main(t.serialize())


def cmd_shear(cfg, out: Outputs):
    depth = _depth(cfg)
    h = halfplane_normalized(_map(cfg["map"]))
    s = shear_function(h, depth)
    norm = shear_norm(s, k_max=cfg.get("k_max"))
    out.main(cfgmod.header(cfg) + shear_csv(s))
    out.sidecar({"shear_norm": norm, "depth": depth, "k_max": cfg.get("k_max"), "edges": len(s.table)})


def cmd_reconstruct(cfg, out: Outputs):
    if "input" not in cfg:
        raise cfgmod.ConfigError("reconstruct needs 'input', a shear table CSV")
    try:
        with open(cfg["input"]) as fh:
            text = fh.read()
    except OSError as exc:
        raise cfgmod.ConfigError(f"cannot read {cfg['input']}: {exc}") from None
    try:
        s = read_shear_csv(text)
    except (ValueError, KeyError) as exc:
        raise cfgmod.ConfigError(f"bad shear table: {exc}") from None
    img = characteristic_map(s)
    rows = [(str(v), float(img[v])) for v in s.tess.vertices]
    out.main(_csv(cfgmod.header(cfg), ["vertex", "image"], rows))


def _extend_point(args):
    desc, z, n, tol = args
    w = extend(_disk_map(desc), z, tol=tol, nodes_per_arc=n)
    return (z.real, z.imag, w.real, w.imag)


def cmd_extend(cfg, out: Outputs):
    _disk_map(cfg["map"])
    q = cfg["quadrature"]
    items = [(cfg["map"], complex(x, y), q.get("nodes_per_arc", 64), q.get("tol", 1e-11)) for x, y in cfg["points"]]
    rows = _pmap(_extend_point, items, cfg.get("parallel", 1))
    out.main(_csv(cfgmod.header(cfg), ["x", "y", "u", "v"], rows))


def _beltrami_point(args):
    desc, z = args
    return beltrami_at(_disk_map(desc), z).abs


def cmd_beltrami(cfg, out: Outputs):
    _disk_map(cfg["map"])
    grid = _grid(cfg["grid"])
    mus = _pmap(_beltrami_point, [(cfg["map"], z) for z in grid], cfg.get("parallel", 1))
    if any(not m < 1 for m in mus):
        raise NotHomeomorphic("|mu| >= 1 on the grid")
    out.main(_csv(cfgmod.header(cfg), ["x", "y", "mu_abs"], [(z.real, z.imag, m) for z, m in zip(grid, mus)]))
    K = max((1 + m) / (1 - m) for m in mus)
    out.sidecar({"max_dilatation_estimate": K, "points": len(grid)})


def cmd_counterexample(cfg, out: Outputs):
    rows = _pmap(counterexample_row, list(cfg["n_values"]), cfg.get("parallel", 1))
    out.main(_csv(cfgmod.header(cfg), COUNTEREXAMPLE_COLUMNS, counterexample_csv_rows(rows)))
    checks = counterexample_acceptance(rows)
    out.sidecar({"checks": {name: ok for name, ok in checks}})
    for name, ok in checks:
        out.stdout.append(f"{'PASS' if ok else 'FAIL'} {name}\n")


def cmd_metrics(cfg, out: Outputs):
    h1, h2 = _map(cfg["map1"]), _map(cfg["map2"])
    if h1.model != h2.model:
        raise ModelMismatch("map1 and map2 must share their model")
    u = cfg["unit_cr"]
    g = cfg["degenerating"]
    unit = UnitCr(u["count"], u["seed"])
    deg = Degenerating(g["scales"], g["count"], g["seed"])
    groups = deg.by_scale()
    ac = d_AC_estimate(h1, h2, groups)
    am = d_AM_estimate(h1, h2, groups)
    out.main(_csv(cfgmod.header(cfg), ["scale", "estimate"], ac))
    out.sidecar({
        "label": "estimate (lower bound)",
        "d_C": d_C_estimate(h1, h2, unit),
        "d_M": d_M_estimate(h1, h2, unit),
        "d_AM": [[s, v] for s, v in am],
        "unit_cr": {"seed": u["seed"], "count": u["count"]},
        "degenerating": {"seed": g["seed"], "count": g["count"], "scales": g["scales"]},
    })


def cmd_das(cfg, out: Outputs):
    depth = _depth(cfg)
    t = enumerate_tesselation(depth)
    s1 = shear_function(halfplane_normalized(_map(cfg["map1"])), depth, t)
    s2 = shear_function(halfplane_normalized(_map(cfg["map2"])), depth, t)
    curve = d_AS(s1, s2, cfg["thresholds"])
    out.main(cfgmod.header(cfg) + das_csv(curve))


def cmd_lemma3(cfg, out: Outputs):
    h = _disk_map(cfg["map"])
    rep = lemma3_check(h, cfg["M"], _grid(cfg["grid"]))
    out.main(_csv(cfgmod.header(cfg), ["j", "distortion"], list(enumerate(rep["distortions"]))))
    out.sidecar({"M": rep["M"], "below_M": rep["below_M"], "K_on_U": rep["K_on_U"]})


COMMANDS = {
    "farey": cmd_farey,
    "shear": cmd_shear,
    "reconstruct": cmd_reconstruct,
    "extend": cmd_extend,
    "beltrami": cmd_beltrami,
    "counterexample": cmd_counterexample,
    "metrics": cmd_metrics,
    "das": cmd_das,
    "lemma3": cmd_lemma3,
}


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="shearlab", description="Shear coordinates, Douady-Earle extensions and distortion metrics.")
    sub = p.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        sp = sub.add_parser(name)
        sp.add_argument("--config", help="JSON run configuration")
        sp.add_argument("--out", help="output path (default: stdout)")
        sp.add_argument("--depth", type=int)
        sp.add_argument("--kmax", type=int, dest="k_max")
        sp.add_argument("--seed", type=int)
        sp.add_argument("--parallel", type=int, help="worker processes (default 1, serial)")
    return p


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_CONFIG if exc.code else EXIT_OK
    overrides = {k: getattr(args, k) for k in ("depth", "k_max", "seed", "parallel")}
    try:
        cfg = cfgmod.resolve(args.command, cfgmod.load(args.config), overrides)
        out = Outputs(args.out)
        COMMANDS[args.command](cfg, out)
    except NUMERIC_ERRORS as exc:
        print(f"numeric failure: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except CONFIG_ERRORS as exc:
        print(f"config error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    out.commit()
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
