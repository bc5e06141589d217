"""Command-line front end: ``orbitgauge <command> [options]``.

Settings come from built-in defaults, then an optional ``--config`` file of
``key = value`` lines, then command-line flags (flags win).  Every output
starts with the hash of the resolved settings.  Exit codes: 0 success,
1 failed acceptance check, 2 singular orbit or chart point, 3 optimizer
non-convergence, 64 usage error, 65 unreadable input.
"""
from __future__ import annotations

import argparse
import csv
import dataclasses
import hashlib
import io
import json
import logging
import os
import sys
from contextlib import nullcontext

import numpy as np

from . import acceptance
from .gaugefix import reconstruct_orbit_representative
from .geometry import (
    ChartSingularityError,
    StabilizerDegeneracyError,
    chart_point,
    consistency_check,
    gauss_substitution,
    geodesic_path,
    inverse_metric,
    laplacian_direct,
    lb_apply,
    metric_pair,
)
from .lattice import (
    FieldFormatError,
    GaugeField,
    Lattice,
    atomic_write,
    field_io_read,
    format_field,
    plaquette_trace,
)
from .metric import orbit_distance

logger = logging.getLogger("orbitgauge")

EXIT_OK = 0
EXIT_CHECK_FAILED = 1
EXIT_SINGULAR = 2
EXIT_NOT_CONVERGED = 3
EXIT_USAGE = 64
EXIT_DATA = 65

THREADS_ENV = "ORBITGAUGE_THREADS"


class UsageError(Exception):
    pass


@dataclasses.dataclass
class RunConfig:
    n1: int = 3
    n2: int = 3
    seed: int = 0
    tol: float = 1e-13
    max_sweeps: int = 5000
    restarts: int = 8
    omega: float = 1.7
    fd_step: float = 1e-3
    steps: int = 100
    t_max: float = 1.0
    tau_scale: float = 1.0
    function: str = "plaquette-sum"
    criteria: str = "all"

    def validate(self):
        if self.n1 < 2 or self.n2 < 2:
            raise UsageError(f"n1 and n2 must be >= 2, got {self.n1}x{self.n2}")
        for name in ("tol", "fd_step", "t_max", "tau_scale"):
            if not getattr(self, name) > 0:
                raise UsageError(f"{name} must be positive")
        if self.max_sweeps < 1 or self.restarts < 0 or self.steps < 1:
            raise UsageError("max_sweeps and steps must be >= 1, restarts >= 0")
        if not 1.0 <= self.omega < 2.0:
            raise UsageError("omega must lie in [1, 2)")
        return self

    def digest(self):
        payload = json.dumps(dataclasses.asdict(self), sort_keys=True)
        return hashlib.sha256(payload.encode("utf-8")).hexdigest()[:16]


_FIELDS = {f.name: f.type for f in dataclasses.fields(RunConfig)}
_CASTS = {"int": int, "float": float, "str": str}


def read_config_file(path):
    values = {}
    with open(path, encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise UsageError(f"{path}:{lineno}: expected key = value")
            key, value = (part.strip() for part in line.split("=", 1))
            key = key.replace("-", "_")
            if key not in _FIELDS:
                raise UsageError(f"{path}:{lineno}: unknown key {key!r}")
            try:
                values[key] = _CASTS[_FIELDS[key]](value)
            except ValueError as exc:
                raise UsageError(f"{path}:{lineno}: bad value for {key}: {value!r}") from exc
    return values


def resolve_config(args):
    values = {}
    if getattr(args, "config", None):
        values.update(read_config_file(args.config))
    for key in _FIELDS:
        flag = getattr(args, key, None)
        if flag is not None:
            values[key] = flag
    return RunConfig(**values).validate()


def _threads():
    raw = os.environ.get(THREADS_ENV)
    if raw is None or raw == "":
        return None
    try:
        n = int(raw)
    except ValueError as exc:
        raise UsageError(f"{THREADS_ENV} must be a positive integer, got {raw!r}") from exc
    if n < 1:
        raise UsageError(f"{THREADS_ENV} must be a positive integer, got {raw!r}")
    return n


# ------------------------------------------------------------------ writers


def _header(cfg, command):
    return f"orbitgauge {command} config-hash: {cfg.digest()}"


def write_jsonl(path, cfg, command, records):
    lines = [json.dumps({"config_hash": cfg.digest(), "command": command}, sort_keys=True)]
    lines.extend(json.dumps(r, sort_keys=True) for r in records)
    text = "\n".join(lines) + "\n"
    if path is None:
        sys.stdout.write(text)
    else:
        atomic_write(path, text)


def write_csv(path, cfg, command, header, rows):
    buf = io.StringIO()
    buf.write(f"# {_header(cfg, command)}\n")
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([f"{v:.17g}" if isinstance(v, float) else v for v in row])
    atomic_write(path, buf.getvalue())


def write_matrix(path, cfg, command, names, matrix):
    labels = [f"{e}:{a}" for e, a in names]
    rows = [[label, *map(float, row)] for label, row in zip(labels, matrix)]
    write_csv(path, cfg, command, ["coordinate", *labels], rows)


def _read(path):
    try:
        return field_io_read(path)
    except OSError as exc:
        raise FieldFormatError(f"{path}: {exc.strerror}") from exc


# ----------------------------------------------------------------- commands


def cmd_sample(args, cfg):
    U = GaugeField.random(Lattice(cfg.n1, cfg.n2), cfg.seed)
    atomic_write(args.output, format_field(U, f"{_header(cfg, 'sample')}\nseed: {cfg.seed}"))
    return EXIT_OK


def cmd_gauge_fix(args, cfg):
    U = _read(args.input)
    fixed = reconstruct_orbit_representative(U)
    atomic_write(args.output, format_field(fixed.field, _header(cfg, "gauge-fix")))
    write_jsonl(args.report, cfg, "gauge-fix", [fixed.report()])
    return EXIT_SINGULAR if fixed.singular else EXIT_OK


def cmd_dist(args, cfg):
    fields = [_read(p) for p in args.inputs]
    pairs = [(0, 0)] if len(fields) == 1 else [(i, j) for i in range(len(fields)) for j in range(i + 1, len(fields))]
    rows, converged = [], True
    for k, (i, j) in enumerate(pairs):
        r = orbit_distance(fields[i], fields[j], tol=cfg.tol, max_sweeps=cfg.max_sweeps,
                           restarts=cfg.restarts, omega=cfg.omega, seed=cfg.seed)
        rows.append([k, i, j, r.rho, r.iterations, int(r.converged)])
        converged &= r.converged
    write_csv(args.output, cfg, "dist", ["pair", "i", "j", "rho", "iterations", "converged"], rows)
    return EXIT_OK if converged else EXIT_NOT_CONVERGED


def _chart(args):
    U = _read(args.input)
    cfg = reconstruct_orbit_representative(U)
    if cfg.singular:
        raise StabilizerDegeneracyError("input lies on a conically-singular orbit")
    return U, cfg, chart_point(cfg)


def cmd_invmetric(args, cfg):
    _, fixed, p = _chart(args)
    E = gauss_substitution(fixed, p)
    pair = inverse_metric(E)
    write_matrix(args.output, cfg, "invmetric", p.names, pair.g_inv)
    if args.report is not None:
        evals = np.linalg.eigvalsh(pair.g_inv)
        write_jsonl(args.report, cfg, "invmetric", [{
            "dimension": p.dim,
            "rank": int(np.sum(evals > 1e-9 * max(evals.max(), 1.0))),
            "min_eigenvalue": float(evals.min()),
            "rows": len(E.rows),
        }])
    return EXIT_OK


def cmd_metric(args, cfg):
    _, fixed, p = _chart(args)
    pair = metric_pair(fixed, p)
    write_matrix(args.output, cfg, "metric", p.names, pair.g)
    if args.report is not None:
        write_jsonl(args.report, cfg, "metric", [consistency_check(pair)])
    return EXIT_OK


def _test_function(name, lattice):
    if name == "plaquette-sum":
        corners = lattice.plaquette_corners()
        return lambda V: sum(plaquette_trace(V, c) for c in corners)
    if name.startswith("plaquette:"):
        try:
            x1, x2 = (int(v) for v in name.split(":", 1)[1].split(","))
        except ValueError as exc:
            raise UsageError(f"bad plaquette function {name!r}; use plaquette:X1,X2") from exc
        if (x1, x2) not in lattice.plaquette_corners():
            raise UsageError(f"no plaquette at ({x1},{x2})")
        return lambda V: plaquette_trace(V, (x1, x2))
    raise UsageError(f"unknown function {name!r}; use plaquette-sum or plaquette:X1,X2")


def cmd_lb_apply(args, cfg):
    U, fixed, p = _chart(args)
    f = _test_function(cfg.function, U.lattice)
    chart_value = lb_apply(fixed, p, f, h=cfg.fd_step)
    direct = laplacian_direct(U, f, h=cfg.fd_step)
    write_jsonl(args.output, cfg, "lb-apply", [{
        "function": cfg.function, "value": float(f(U)), "chart": float(chart_value),
        "direct": float(direct), "gap": float(abs(chart_value - direct)),
    }])
    return EXIT_OK


def cmd_geodesic(args, cfg):
    lat = Lattice(cfg.n1, cfg.n2)
    rng = np.random.default_rng(cfg.seed)
    tau = {e: cfg.tau_scale * rng.normal(size=3) for e in lat.edges}
    path = geodesic_path(lat, tau, cfg.steps, cfg.t_max)
    header = ["t", "flag_next", *(f"{e}:{a}" for e, a in path.names)]
    flags = list(path.flags) + [False]
    rows = [[float(t), int(fl), *map(float, x)] for t, fl, x in zip(path.times, flags, path.coords)]
    write_csv(args.output, cfg, "geodesic", header, rows)
    return EXIT_OK


def _criteria(text):
    if text == "all":
        return sorted(acceptance.CRITERIA)
    try:
        chosen = sorted({int(v) for v in text.split(",")})
    except ValueError as exc:
        raise UsageError(f"bad criteria list {text!r}") from exc
    if not chosen or any(n not in acceptance.CRITERIA for n in chosen):
        raise UsageError(f"criteria must be drawn from 1..{len(acceptance.CRITERIA)}")
    return chosen


def cmd_check(args, cfg):
    results = acceptance.run(_criteria(cfg.criteria), inject_fault=args.inject_fault)
    for r in results:
        logger.info(r.line())
    write_jsonl(args.output, cfg, "check", [r.record() for r in results])
    return EXIT_OK if all(r.passed for r in results) else EXIT_CHECK_FAILED


COMMANDS = {
    "sample": cmd_sample,
    "gauge-fix": cmd_gauge_fix,
    "dist": cmd_dist,
    "invmetric": cmd_invmetric,
    "metric": cmd_metric,
    "lb-apply": cmd_lb_apply,
    "geodesic": cmd_geodesic,
    "check": cmd_check,
}


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def build_parser():
    parser = _Parser(prog="orbitgauge", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def common(p):
        p.add_argument("--config", help="key = value settings file")
        p.add_argument("--seed", type=int)
        return p

    def lattice_opts(p):
        p.add_argument("--n1", type=int)
        p.add_argument("--n2", type=int)

    p = common(sub.add_parser("sample", help="Haar-random field"))
    lattice_opts(p)
    p.add_argument("-o", "--output", required=True)

    p = common(sub.add_parser("gauge-fix", help="orbit representative"))
    p.add_argument("--input", required=True)
    p.add_argument("-o", "--output", required=True)
    p.add_argument("--report")

    p = common(sub.add_parser("dist", help="orbit distances between field files"))
    p.add_argument("inputs", nargs="+")
    p.add_argument("-o", "--output", required=True)
    p.add_argument("--tol", type=float)
    p.add_argument("--max-sweeps", dest="max_sweeps", type=int)
    p.add_argument("--restarts", type=int)
    p.add_argument("--omega", type=float)

    for name, text in (("invmetric", "inverse metric tensor"), ("metric", "projection metric tensor")):
        p = common(sub.add_parser(name, help=text))
        p.add_argument("--input", required=True)
        p.add_argument("-o", "--output", required=True)
        p.add_argument("--report")

    p = common(sub.add_parser("lb-apply", help="-Delta of a test function, chart vs direct"))
    p.add_argument("--input", required=True)
    p.add_argument("-o", "--output")
    p.add_argument("--function")
    p.add_argument("--fd-step", dest="fd_step", type=float)

    p = common(sub.add_parser("geodesic", help="gauge-fixed straight line exp(i tau t)"))
    lattice_opts(p)
    p.add_argument("--steps", type=int)
    p.add_argument("--t-max", dest="t_max", type=float)
    p.add_argument("--tau-scale", dest="tau_scale", type=float)
    p.add_argument("-o", "--output", required=True)

    p = common(sub.add_parser("check", help="run the acceptance suite"))
    p.add_argument("--criteria", help="comma-separated criterion numbers or 'all'")
    p.add_argument("--inject-fault", dest="inject_fault", choices=["tree"])
    p.add_argument("-o", "--output")
    return parser


def main(argv=None):
    try:
        args = build_parser().parse_args(argv)
        logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(message)s")
        cfg = resolve_config(args)
        threads = _threads()
        if threads is not None:
            from threadpoolctl import threadpool_limits

            limiter = threadpool_limits(limits=threads)
        else:
            limiter = nullcontext()
        with limiter:
            return COMMANDS[args.command](args, cfg)
    except UsageError as exc:
        print(f"orbitgauge: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (FieldFormatError, OSError) as exc:
        print(f"orbitgauge: {exc}", file=sys.stderr)
        return EXIT_DATA
    except (StabilizerDegeneracyError, ChartSingularityError) as exc:
        print(f"orbitgauge: singular: {exc}", file=sys.stderr)
        return EXIT_SINGULAR


if __name__ == "__main__":
    sys.exit(main())
