"""Command-line driver.

    quasirep run --genus 1 --family clock-shift --dim 5 --p 1
    quasirep sweep --genus 1 --family clock-shift --dim 3:12 --p 1
    quasirep complex --genus 2

``run`` is the default subcommand, so the flags may also be given directly.
Reports are JSON with floats at 17 significant digits; the exit status is 0
exactly when every verdict passes.  ``QUASIREP_THREADS`` sets the number of
worker threads used by ``sweep``.
"""
import argparse
import csv
import json
import math
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .errors import DimensionMismatch, ParseError, QuasiRepError
from .groups import (
    UnitaryTuple,
    clock_shift_tuple,
    perturbed_commuting_tuple,
    twisted_genus_tuple,
)
from .ktheory import VerifyOptions, surface_data, verify
from .matcore import as_matrix
from .surface import export_text

SCHEMA_VERSION = 1
FAMILIES = ("clock-shift", "twisted", "perturbed", "from-file")
THREADS_ENV = "QUASIREP_THREADS"


# ---------------------------------------------------------------------------
# number formatting and JSON

def fmt(x):
    """17 significant digits, enough to reproduce any double exactly."""
    if x is None:
        return "null"
    x = float(x)
    if math.isnan(x) or math.isinf(x):
        raise ValueError("non-finite value in report")
    return "%.17g" % x


def dumps(obj, indent=0):
    """JSON text with every float written by :func:`fmt`."""
    pad = "  " * (indent + 1)
    end = "  " * indent
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f"{pad}{json.dumps(str(k))}: {dumps(v, indent + 1)}" for k, v in obj.items()]
        return "{\n" + ",\n".join(items) + "\n" + end + "}"
    if isinstance(obj, (list, tuple)):
        if not obj:
            return "[]"
        if all(isinstance(v, (int, float, np.floating, np.integer)) and not isinstance(v, bool)
               for v in obj):
            return "[" + ", ".join(dumps(v) for v in obj) + "]"
        return "[\n" + ",\n".join(pad + dumps(v, indent + 1) for v in obj) + "\n" + end + "]"
    if isinstance(obj, (bool, np.bool_)):
        return "true" if obj else "false"
    if obj is None:
        return "null"
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        return fmt(obj)
    return json.dumps(str(obj))


# ---------------------------------------------------------------------------
# matrix files

def write_matrix(path, m):
    m = as_matrix(m)
    n = m.shape[0]
    rows = [f"    [{fmt(z.real)}, {fmt(z.imag)}]" for z in m.ravel()]
    text = '{\n  "dim": %d,\n  "entries": [\n%s\n  ]\n}\n' % (n, ",\n".join(rows))
    with open(path, "w") as fh:
        fh.write(text)


def read_matrix(path, expected_dim=None):
    with open(path) as fh:
        text = fh.read()
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"{path}:{exc.lineno}:{exc.colno}: {exc.msg}") from None
    if not isinstance(doc, dict):
        raise ParseError(f"{path}: expected an object with fields 'dim' and 'entries'")
    for key in ("dim", "entries"):
        if key not in doc:
            raise ParseError(f"{path}: missing field '{key}'")
    n = doc["dim"]
    if not isinstance(n, int) or isinstance(n, bool) or n < 1:
        raise ParseError(f"{path}: field 'dim' must be a positive integer, got {n!r}")
    ent = doc["entries"]
    if not isinstance(ent, list) or len(ent) != n * n:
        got = len(ent) if isinstance(ent, list) else type(ent).__name__
        raise ParseError(f"{path}: field 'entries' must have dim^2 = {n * n} pairs, got {got}")
    vals = np.empty(n * n, dtype=complex)
    for i, pair in enumerate(ent):
        ok = (isinstance(pair, list) and len(pair) == 2
              and all(isinstance(x, (int, float)) and not isinstance(x, bool) for x in pair))
        if not ok:
            raise ParseError(f"{path}: entries[{i}] must be a [re, im] number pair, got {pair!r}")
        vals[i] = complex(pair[0], pair[1])
    if not np.all(np.isfinite(vals)):
        raise ParseError(f"{path}: entries contain non-finite values")
    if expected_dim is not None and n != expected_dim:
        raise DimensionMismatch(f"{path}: dim {n}, expected {expected_dim}")
    return vals.reshape(n, n)


def matrix_io(path, direction, matrix=None):
    """``direction`` is "read" or "write"."""
    if direction == "read":
        return read_matrix(path)
    if direction == "write":
        return write_matrix(path, matrix)
    raise ValueError("direction must be 'read' or 'write'")


# ---------------------------------------------------------------------------
# configuration

@dataclass
class ExperimentConfig:
    genus: int = 1
    family: str = "clock-shift"
    dim: int = None
    p: int = 1
    magnitude: float = 0.05
    seed: int = 0
    tol_sw: float = 1e-8
    tol_kw: float = 1e-6
    quadrature_tol: float = 1e-10
    samples: int = 20
    matrices: list = field(default_factory=list)
    output: str = None

    def validate(self):
        if self.genus < 1:
            raise ValueError("genus must be a positive integer")
        if self.family not in FAMILIES:
            raise ValueError(f"family must be one of {', '.join(FAMILIES)}")
        if self.family == "from-file":
            if len(self.matrices) != 2 * self.genus:
                raise ValueError(f"from-file needs {2 * self.genus} matrix paths, "
                                 f"got {len(self.matrices)}")
        elif self.dim is None:
            raise ValueError(f"family {self.family} needs --dim")
        if self.family in ("clock-shift",) and self.genus != 1:
            raise ValueError("clock-shift is a genus-one family; use twisted")
        return self

    def options(self):
        return VerifyOptions(tol_sw=self.tol_sw, tol_kw=self.tol_kw,
                             quadrature_tol=self.quadrature_tol,
                             bundle_samples=self.samples, seed=self.seed)


def build_tuple(cfg):
    if cfg.family == "clock-shift":
        return clock_shift_tuple(cfg.dim, cfg.p)
    if cfg.family == "twisted":
        return twisted_genus_tuple(cfg.genus, cfg.dim, cfg.p)
    if cfg.family == "perturbed":
        return perturbed_commuting_tuple(cfg.genus, cfg.dim, cfg.magnitude, cfg.seed)
    first = read_matrix(cfg.matrices[0], cfg.dim)
    mats = [first] + [read_matrix(p, first.shape[0]) for p in cfg.matrices[1:]]
    return UnitaryTuple(cfg.genus, tuple(mats), "from-file")


def error_object(exc):
    d = {"type": type(exc).__name__, "message": str(exc)}
    for attr in ("stage", "simplex", "gap", "distance"):
        if getattr(exc, attr, None) is not None:
            d[attr] = getattr(exc, attr)
    cause = getattr(exc, "cause", None)
    if cause is not None:
        d["cause"] = error_object(cause)
    return d


def config_dict(cfg):
    d = {"genus": cfg.genus, "family": cfg.family, "dim": cfg.dim, "p": cfg.p,
         "magnitude": cfg.magnitude, "seed": cfg.seed, "tol_sw": cfg.tol_sw,
         "tol_kw": cfg.tol_kw, "quadrature_tol": cfg.quadrature_tol, "samples": cfg.samples}
    if cfg.family == "from-file":
        d["matrices"] = list(cfg.matrices)
    return d


def run(cfg):
    """Returns ``(document, exit status)``."""
    doc = {"schema_version": SCHEMA_VERSION, "config": config_dict(cfg)}
    try:
        cfg.validate()
        rep = verify(build_tuple(cfg), cfg.options())
    except (QuasiRepError, ValueError, OSError) as exc:
        doc["error"] = error_object(exc)
        return doc, 1
    doc["report"] = rep.to_dict()
    return doc, 0 if rep.passed else 1


# ---------------------------------------------------------------------------
# sweeps

SWEEP_COLUMNS = ("genus", "family", "dim", "p", "magnitude", "seed", "defect", "W", "S",
                 "kappa", "kappa_int", "bundle_residual", "pushforward_residual",
                 "boundary_residual", "S_equals_W", "quantization", "kappa_equals_dimW",
                 "passed", "error")


def parse_range(text, kind=int):
    """``"3:12"`` (inclusive), ``"0:0.2:0.02"``, ``"1,3,5"`` or a single value."""
    text = text.strip()
    if not text:
        return []
    if ":" in text:
        parts = [kind(x) for x in text.split(":")]
        if len(parts) == 2:
            parts.append(kind(1))
        lo, hi, step = parts
        if step <= 0:
            raise ValueError("range step must be positive")
        count = int(math.floor((hi - lo) / step + 1e-9)) + 1
        return [kind(round(lo + i * step, 12)) if kind is float else lo + i * step
                for i in range(max(count, 0))]
    return [kind(x) for x in text.split(",") if x.strip()]


def sweep_grid(base, genera, dims, ps, magnitudes, seeds):
    """Configurations in deterministic grid order."""
    out = []
    for g in genera:
        for n in dims:
            for p in ps:
                for m in magnitudes:
                    for s in seeds:
                        cfg = ExperimentConfig(**{**base.__dict__, "genus": g, "dim": n,
                                                  "p": p, "magnitude": m, "seed": s})
                        out.append(cfg)
    return out


def sweep_row(cfg):
    row = dict.fromkeys(SWEEP_COLUMNS, "")
    row.update(genus=cfg.genus, family=cfg.family, dim=cfg.dim, p=cfg.p,
               magnitude=fmt(cfg.magnitude), seed=cfg.seed)
    doc, _ = run(cfg)
    if "error" in doc:
        row["passed"] = "false"
        row["error"] = f"{doc['error']['type']}: {doc['error']['message']}"
        return row
    r = doc["report"]
    row.update(defect=fmt(r["defect"]), W=fmt(r["winding"]), S=fmt(r["simplicial"]),
               kappa=fmt(r["kappa"]) if r["kappa"] is not None else "",
               kappa_int="" if r["kappa_int"] is None else r["kappa_int"],
               bundle_residual=fmt(r["bundle_residual"]),
               pushforward_residual=fmt(r["pushforward_residual"]),
               boundary_residual=fmt(r["boundary_residual"]),
               passed="true" if r["passed"] else "false")
    for k, v in r["verdicts"].items():
        row[k] = "true" if v["passed"] else "false"
    return row


def thread_count():
    raw = os.environ.get(THREADS_ENV, "1")
    try:
        return max(1, int(raw))
    except ValueError:
        raise ValueError(f"{THREADS_ENV} must be a positive integer, got {raw!r}") from None


def sweep(configs, stream):
    """Write one CSV row per configuration; returns the number of failures."""
    writer = csv.DictWriter(stream, fieldnames=SWEEP_COLUMNS, lineterminator="\n")
    writer.writeheader()
    stream.flush()
    failures = 0
    with ThreadPoolExecutor(max_workers=thread_count()) as pool:
        # map yields in submission order, so rows come out in grid order
        for row in pool.map(sweep_row, configs):
            writer.writerow(row)
            stream.flush()
            failures += row["passed"] != "true"
    return failures


# ---------------------------------------------------------------------------
# argument parsing

def _common(ap, ranged):
    num = str if ranged else int
    ap.add_argument("--genus", type=num, default="1" if ranged else 1)
    ap.add_argument("--family", choices=FAMILIES, default="clock-shift")
    ap.add_argument("--dim", type=num, default=None)
    ap.add_argument("--p", type=num, default="1" if ranged else 1)
    ap.add_argument("--magnitude", type=str if ranged else float, default="0.05" if ranged else 0.05)
    ap.add_argument("--seed", type=num, default="0" if ranged else 0)
    ap.add_argument("--tol-sw", type=float, default=1e-8)
    ap.add_argument("--tol-kw", type=float, default=1e-6)
    ap.add_argument("--quadrature-tol", type=float, default=1e-10)
    ap.add_argument("--samples", type=int, default=20, help="bundle-check sample points")
    ap.add_argument("--output", "-o", default=None, help="write here instead of stdout")


def make_parser():
    ap = argparse.ArgumentParser(prog="quasirep", description=(
        "Compare the winding, simplicial and Bott invariants of unitary tuples."))
    sub = ap.add_subparsers(dest="command")
    r = sub.add_parser("run", help="verify one tuple and print a JSON report")
    _common(r, ranged=False)
    r.add_argument("--matrices", nargs="*", default=[],
                   help="2*genus matrix files u1 v1 u2 v2 ... for --family from-file")
    s = sub.add_parser("sweep", help="verify a grid of tuples and print CSV")
    _common(s, ranged=True)
    c = sub.add_parser("complex", help="print the triangulation and its edge labels")
    c.add_argument("--genus", type=int, default=1)
    c.add_argument("--output", "-o", default=None)
    return ap


def _emit(text, path):
    if path:
        with open(path, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def main(argv=None):
    argv = list(sys.argv[1:] if argv is None else argv)
    if not argv or argv[0].startswith("-") and argv[0] not in ("-h", "--help"):
        argv = ["run"] + argv
    args = make_parser().parse_args(argv)

    if args.command == "complex":
        c, labels = surface_data(args.genus)
        _emit(export_text(c, labels), args.output)
        return 0

    if args.command == "run":
        cfg = ExperimentConfig(genus=args.genus, family=args.family, dim=args.dim, p=args.p,
                               magnitude=args.magnitude, seed=args.seed, tol_sw=args.tol_sw,
                               tol_kw=args.tol_kw, quadrature_tol=args.quadrature_tol,
                               samples=args.samples, matrices=args.matrices,
                               output=args.output)
        doc, status = run(cfg)
        _emit(dumps(doc) + "\n", cfg.output)
        return status

    try:
        base = ExperimentConfig(family=args.family, tol_sw=args.tol_sw, tol_kw=args.tol_kw,
                                quadrature_tol=args.quadrature_tol, samples=args.samples)
        grid = sweep_grid(base, parse_range(args.genus), parse_range(args.dim or ""),
                          parse_range(args.p), parse_range(args.magnitude, float),
                          parse_range(args.seed))
        thread_count()
    except ValueError as exc:
        sys.stderr.write(dumps({"schema_version": SCHEMA_VERSION,
                                "error": error_object(exc)}) + "\n")
        return 1
    if args.output:
        with open(args.output, "w", newline="") as fh:
            failures = sweep(grid, fh)
    else:
        failures = sweep(grid, sys.stdout)
    return 0 if failures == 0 else 1


if __name__ == "__main__":
    sys.exit(main())
