"""Command-line front end: ``aetrans {zeros,eig,localize,field,bie scan}``.

Exit status is 1 for invalid input and 2 when some modes failed numerically
(the remaining modes are still computed and written).
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import math
import sys
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field
from importlib import resources

import jsonschema
import numpy as np

from . import __version__
from .eigfun import Field, build_eigenpair, eval_fields, localization_ratio
from .params import NondimParams, ParameterError, PhysicalMedium, nondimensionalize
from .radial import BracketFailure, ModeIndex, PreconditionFailure, find_eigenvalue
from .specfun import bessel_zero

log = logging.getLogger("aetrans")

COMMANDS = ("zeros", "eig", "localize", "field", "bie_scan")


class ConfigError(ValueError):
    pass


def load_schema() -> dict:
    return json.loads(resources.files("aetrans").joinpath("schema/output.schema.json").read_text())


def _config_schema() -> dict:
    s = load_schema()
    return {"$defs": s["$defs"], "$ref": "#/$defs/RunConfig"}


# ---------------------------------------------------------------------------
# parsing helpers
# ---------------------------------------------------------------------------

def parse_range(text: str, cast=int) -> list:
    """``a:b:step`` (inclusive of b), ``a:b`` (step 1) or a comma list."""
    text = text.strip()
    if ":" in text:
        parts = text.split(":")
        if len(parts) not in (2, 3):
            raise ConfigError(f"bad range {text!r}")
        try:
            a, b = cast(parts[0]), cast(parts[1])
            step = cast(parts[2]) if len(parts) == 3 else cast(1)
        except ValueError as exc:
            raise ConfigError(f"bad range {text!r}") from exc
        if step <= 0 or b < a:
            raise ConfigError(f"range {text!r} must have a <= b and step > 0")
        count = int(math.floor((b - a) / step + 1e-9)) + 1
        return [cast(a + i * step) for i in range(count)]
    try:
        return [cast(v) for v in text.split(",") if v.strip()]
    except ValueError as exc:
        raise ConfigError(f"bad list {text!r}") from exc


@dataclass
class RunConfig:
    command: str
    format: str = "csv"
    params: dict | None = None
    medium: dict | None = None
    dim: int = 2
    m: list[int] = field(default_factory=list)
    nu: list[float] = field(default_factory=list)
    kind: str = "j"
    count: int = 5
    eps: list[float] = field(default_factory=list)
    field: str = "both"
    grid: int = 41
    curve: str | None = None
    n: int = 256
    k: float | None = None
    k_min: float | None = None
    k_max: float | None = None
    steps: int = 101
    refine: bool = True
    threads: int = 1
    out: str | None = None

    def to_dict(self) -> dict:
        return {k: v for k, v in asdict(self).items() if v is not None}

    def validate(self) -> None:
        try:
            jsonschema.validate(self.to_dict(), _config_schema())
        except jsonschema.ValidationError as exc:
            raise ConfigError(f"invalid config: {exc.message}") from exc
        needs_params = self.command != "zeros"
        if needs_params and (self.params is None) == (self.medium is None):
            raise ConfigError("supply exactly one of nondimensional params or a physical medium")
        if self.command in ("eig", "localize", "field") and not self.m:
            raise ConfigError("mode orders m are required")
        if self.command in ("eig", "localize", "field") and any(m < 1 for m in self.m):
            raise ConfigError("mode orders must be >= 1")
        if self.command == "localize" and not self.eps:
            raise ConfigError("localize needs at least one eps in (0, 1)")
        if self.command == "zeros" and not self.nu:
            raise ConfigError("zeros needs at least one order nu")
        if self.command == "field":
            if self.curve is None and self.dim != 2:
                raise ConfigError("field grids are two-dimensional")
            if self.curve is not None and self.k is None:
                raise ConfigError("field on a curve needs --k")
        if self.command == "bie_scan":
            if self.curve is None or self.k_min is None or self.k_max is None:
                raise ConfigError("bie scan needs --curve, --k-min and --k-max")
            if not self.k_min < self.k_max:
                raise ConfigError("need k_min < k_max")

    def nondim(self) -> NondimParams:
        if self.medium is not None:
            return nondimensionalize(PhysicalMedium(**self.medium))
        p = dict(self.params)
        if "lam" not in p:
            p["lam"] = 1.0 - 2.0 * p["mu"]
        return NondimParams(**p)


# ---------------------------------------------------------------------------
# commands
# ---------------------------------------------------------------------------

@dataclass
class Outcome:
    rows: list[dict]
    failures: dict[str, str] = field(default_factory=dict)
    params: NondimParams | None = None


def _pmap(fn, items, threads):
    if threads > 1:
        with ThreadPoolExecutor(threads) as ex:
            return list(ex.map(fn, items))
    return [fn(i) for i in items]


def _run_zeros(cfg: RunConfig) -> Outcome:
    rows = []
    for nu in cfg.nu:
        for s in range(1, cfg.count + 1):
            rows.append({"nu": nu, "kind": cfg.kind, "s": s, "zero": bessel_zero(nu, cfg.kind, s)})
    return Outcome(rows)


def _solve_modes(cfg: RunConfig, p: NondimParams):
    def one(m):
        try:
            return m, find_eigenvalue(ModeIndex(cfg.dim, m), p), None
        except (BracketFailure, PreconditionFailure) as exc:
            return m, None, f"{type(exc).__name__}: {exc}"

    return _pmap(one, sorted(set(cfg.m)), cfg.threads)


def _run_eig(cfg: RunConfig, p: NondimParams) -> Outcome:
    out = Outcome([], params=p)
    for m, rec, err in _solve_modes(cfg, p):
        if err:
            out.failures[str(m)] = err
            continue
        out.rows.append({
            "dim": cfg.dim, "m": m, "s": 1, "k": rec.k, "j_lo": rec.bracket[0], "j_hi": rec.bracket[1],
            "f_residual": rec.f_residual, "rela1_residual": rec.rela1_residual, "crossings": rec.crossings,
        })
    return out


def _run_localize(cfg: RunConfig, p: NondimParams) -> Outcome:
    out = Outcome([], params=p)
    fields = ["acoustic", "elastic"] if cfg.field == "both" else [cfg.field]
    for m, rec, err in _solve_modes(cfg, p):
        if err:
            out.failures[str(m)] = err
            continue
        pair = build_eigenpair(rec)
        for eps in cfg.eps:
            for f in fields:
                out.rows.append(localization_ratio(pair, eps, f).to_row(rec.k))
    return out


def _disk_grid(n: int) -> np.ndarray:
    xs = np.linspace(-1, 1, n)
    X, Y = np.meshgrid(xs, xs, indexing="xy")
    pts = np.column_stack([X.ravel(), Y.ravel()])
    return pts[np.hypot(pts[:, 0], pts[:, 1]) < 1 - 1e-12]


def _inside(pts: np.ndarray, poly: np.ndarray) -> np.ndarray:
    """Even-odd ray casting."""
    x, y = pts[:, 0:1], pts[:, 1:2]
    x0, y0 = poly[:, 0], poly[:, 1]
    x1, y1 = np.roll(x0, -1), np.roll(y0, -1)
    cond = (y0 > y) != (y1 > y)
    with np.errstate(divide="ignore", invalid="ignore"):
        xc = x0 + (y - y0) * (x1 - x0) / (y1 - y0)
    return (np.sum(cond & (x < xc), axis=1) % 2) == 1


def _run_field(cfg: RunConfig, p: NondimParams) -> Outcome:
    out = Outcome([], params=p)
    if cfg.curve is not None:
        from .bie import BoundaryCurve, assemble_block, null_vector, reconstruct_fields

        curve = BoundaryCurve.parse(cfg.curve)
        nodes = curve.nodes(cfg.n)
        _, vec, _ = null_vector(assemble_block(nodes, cfg.k, p).matrix)
        # fix the arbitrary phase so output is reproducible
        j = int(np.argmax(np.abs(vec)))
        vec = vec * abs(vec[j]) / vec[j]
        fine = curve.nodes(1024, check=False).x
        lo, hi = fine.min(0), fine.max(0)
        xs, ys = np.linspace(lo[0], hi[0], cfg.grid), np.linspace(lo[1], hi[1], cfg.grid)
        X, Y = np.meshgrid(xs, ys, indexing="xy")
        pts = np.column_stack([X.ravel(), Y.ravel()])
        pts = pts[_inside(pts, fine)]
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")
            fs = reconstruct_fields(curve, cfg.k, p, vec, pts)
        for x, v, u in zip(pts, fs.v, fs.u):
            out.rows.append({"x": x[0], "y": x[1], "re_v": v.real, "im_v": v.imag, "abs_u": float(np.linalg.norm(u))})
        return out
    for m, rec, err in _solve_modes(cfg, p):
        if err:
            out.failures[str(m)] = err
            continue
        pair = build_eigenpair(rec)
        for x in _disk_grid(cfg.grid):
            u, v = eval_fields(pair, x)
            out.rows.append({"m": m, "x": x[0], "y": x[1], "re_v": v.real, "im_v": v.imag,
                             "abs_u": float(np.linalg.norm(u))})
    return out


def _run_bie_scan(cfg: RunConfig, p: NondimParams) -> Outcome:
    from .bie import BoundaryCurve, sigma_min_scan

    curve = BoundaryCurve.parse(cfg.curve)
    res = sigma_min_scan(curve, p, (cfg.k_min, cfg.k_max), cfg.steps, n=cfg.n, refine=cfg.refine, workers=cfg.threads)
    return Outcome(res.rows(), params=p)


def run(cfg: RunConfig) -> tuple[int, str]:
    """Execute a validated config; returns ``(exit status, rendered output)``."""
    cfg.validate()
    if cfg.command == "zeros":
        outcome = _run_zeros(cfg)
    else:
        p = cfg.nondim()
        outcome = {"eig": _run_eig, "localize": _run_localize, "field": _run_field, "bie_scan": _run_bie_scan}[
            cfg.command](cfg, p)
    text = render(cfg, outcome)
    if outcome.failures:
        for m, msg in outcome.failures.items():
            print(f"aetrans: m={m}: {msg}", file=sys.stderr)
        print(f"aetrans: {len(outcome.failures)} mode(s) failed", file=sys.stderr)
    return (2 if outcome.failures else 0), text


def _clean(v):
    if isinstance(v, (np.floating, np.integer)):
        return v.item()
    return v


def render(cfg: RunConfig, outcome: Outcome) -> str:
    rows = [{k: _clean(v) for k, v in r.items()} for r in outcome.rows]
    if cfg.format == "json":
        doc = {"tool": "aetrans", "version": __version__, "config": cfg.to_dict(), "results": rows,
               "failures": outcome.failures}
        if outcome.params is not None:
            doc["params"] = outcome.params.to_dict()
        return json.dumps(doc, indent=2, sort_keys=True) + "\n"
    buf = io.StringIO()
    pdesc = json.dumps(outcome.params.to_dict(), sort_keys=True) if outcome.params is not None else "{}"
    buf.write(f"# aetrans {__version__} command={cfg.command} params={pdesc}\n")
    if rows:
        w = csv.DictWriter(buf, fieldnames=list(rows[0].keys()), lineterminator="\n")
        w.writeheader()
        for r in rows:
            w.writerow({k: repr(v) if isinstance(v, float) else v for k, v in r.items()})
    return buf.getvalue()


# ---------------------------------------------------------------------------
# argparse
# ---------------------------------------------------------------------------

class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


def _common(sp: argparse.ArgumentParser, params: bool = True) -> None:
    sp.add_argument("--config", help="JSON RunConfig; its keys override flags")
    sp.add_argument("--threads", type=int, default=1)
    sp.add_argument("--out", help="output file (default: stdout)")
    fmt = sp.add_mutually_exclusive_group()
    fmt.add_argument("--json", dest="format", action="store_const", const="json")
    fmt.add_argument("--csv", dest="format", action="store_const", const="csv")
    if params:
        sp.add_argument("--tau", type=float)
        sp.add_argument("--mu", type=float)
        sp.add_argument("--delta", type=float)
        sp.add_argument("--medium", help="JSON file with rho_b, rho_e, kappa, lambda_t, mu_t")


def build_parser() -> argparse.ArgumentParser:
    ap = _Parser(prog="aetrans", description=__doc__.splitlines()[0])
    ap.add_argument("--version", action="version", version=f"aetrans {__version__}")
    ap.add_argument("-v", "--verbose", action="store_true")
    sub = ap.add_subparsers(dest="command", required=True, parser_class=_Parser)

    z = sub.add_parser("zeros", help="zeros of J_nu or J_nu'")
    _common(z, params=False)
    z.add_argument("--nu", default="0", help="orders, a:b:step or a comma list")
    z.add_argument("--kind", choices=("j", "jp"), default="j")
    z.add_argument("--count", type=int, default=5)

    e = sub.add_parser("eig", help="radial eigenvalues in (j_nu1, j_nu2)")
    _common(e)
    e.add_argument("--dim", type=int, choices=(2, 3), default=2)
    e.add_argument("--m", default="20:200:10")

    lo = sub.add_parser("localize", help="localization ratios of radial eigenfunctions")
    _common(lo)
    lo.add_argument("--dim", type=int, choices=(2, 3), default=2)
    lo.add_argument("--m", default="20:100:10")
    lo.add_argument("--eps", default="0.5")
    lo.add_argument("--field", choices=("acoustic", "elastic", "both"), default="both")

    f = sub.add_parser("field", help="field values on a grid (x, y, Re v, Im v, |u|)")
    _common(f)
    f.add_argument("--dim", type=int, choices=(2,), default=2)
    f.add_argument("--m", default="20")
    f.add_argument("--grid", type=int, default=41)
    f.add_argument("--curve", help="reconstruct from the BIE null vector on this curve instead")
    f.add_argument("--k", type=float)
    f.add_argument("--n", type=int, default=256)

    b = sub.add_parser("bie", help="boundary integral tools")
    bsub = b.add_subparsers(dest="bie_command", required=True, parser_class=_Parser)
    s = bsub.add_parser("scan", help="sigma_min scan of the block operator")
    _common(s)
    s.add_argument("--curve", required=False, help="circle | ellipse:a,b | kite | file:PATH")
    s.add_argument("--n", type=int, default=256)
    s.add_argument("--k-min", type=float)
    s.add_argument("--k-max", type=float)
    s.add_argument("--steps", type=int, default=101)
    s.add_argument("--no-refine", dest="refine", action="store_false")
    return ap


def config_from_args(ns: argparse.Namespace) -> RunConfig:
    cmd = "bie_scan" if ns.command == "bie" else ns.command
    cfg = RunConfig(command=cmd, format=ns.format or "csv", threads=ns.threads, out=ns.out)
    if cmd != "zeros":
        short = {k: getattr(ns, k) for k in ("tau", "mu", "delta")}
        if any(v is not None for v in short.values()):
            if any(v is None for v in short.values()):
                raise ConfigError("--tau, --mu and --delta must be given together")
            cfg.params = short
        if ns.medium:
            with open(ns.medium) as fh:
                cfg.medium = json.load(fh)
    if cmd == "zeros":
        cfg.nu, cfg.kind, cfg.count = parse_range(ns.nu, float), ns.kind, ns.count
    if cmd in ("eig", "localize", "field"):
        cfg.dim, cfg.m = ns.dim, parse_range(ns.m, int)
    if cmd == "localize":
        cfg.eps, cfg.field = parse_range(ns.eps, float), ns.field
    if cmd == "field":
        cfg.grid, cfg.curve, cfg.k, cfg.n = ns.grid, ns.curve, ns.k, ns.n
    if cmd == "bie_scan":
        cfg.curve, cfg.n, cfg.k_min, cfg.k_max = ns.curve, ns.n, ns.k_min, ns.k_max
        cfg.steps, cfg.refine = ns.steps, ns.refine
    if ns.config:
        with open(ns.config) as fh:
            over = json.load(fh)
        if not isinstance(over, dict):
            raise ConfigError("config file must hold a JSON object")
        over.pop("command", None)
        for key, val in over.items():
            if not hasattr(cfg, key):
                raise ConfigError(f"unknown config key {key!r}")
            setattr(cfg, key, val)
        if "params" in over:
            cfg.medium = over.get("medium")
        elif "medium" in over:
            cfg.params = None
    return cfg


def main(argv: list[str] | None = None) -> int:
    ap = build_parser()
    ns = ap.parse_args(argv)
    logging.basicConfig(level=logging.INFO if ns.verbose else logging.WARNING, format="%(name)s: %(message)s")
    try:
        cfg = config_from_args(ns)
        status, text = run(cfg)
    except (ConfigError, ParameterError, FileNotFoundError, json.JSONDecodeError) as exc:
        print(f"aetrans: error: {exc}", file=sys.stderr)
        return 1
    except ValueError as exc:
        print(f"aetrans: error: {exc}", file=sys.stderr)
        return 1
    if cfg.out:
        with open(cfg.out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return status


if __name__ == "__main__":
    sys.exit(main())
