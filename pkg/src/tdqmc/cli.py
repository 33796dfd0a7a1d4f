"""Command-line driver: runs, alpha scans, exact references and figure data.

Every output file carries the hash of the configuration that produced it.
JSON outputs hold it as ``config_hash`` / ``physics_hash`` fields; CSV
outputs start with a ``# config_hash=... physics_hash=...`` comment line
followed by the header row.
"""

from __future__ import annotations

import argparse
import csv
import hashlib
import io
import json
import logging
import math
import os
import sys
import time
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Any

import numpy as np

from . import __version__, _kernels
from .ensemble import ConfigurationError, NoiseSchedule
from .grid import CollapsedWaveError, Grid
from .model import PhysicalParams, pair_potential_of_distance
from .observables import linear_entropy
from .oracle import MemoryBudgetError, exact_energy, exact_ground_state, exact_one_body_rdm, lanczos_ground_state
from .solver import NumericalError, RunConfig, ScanResult, alpha_scan, refined_alpha_scan, relax_ground_state

log = logging.getLogger("tdqmc")

SCHEMA = "tdqmc-config/1"
RESULT_SCHEMA = "tdqmc-result/1"

EXIT_OK, EXIT_CONFIG, EXIT_NUMERICAL = 0, 2, 3

DEFAULT_ALPHAS = [round(0.4 + 0.1 * i, 1) for i in range(17)]  # 0.4 .. 2.0


class ConfigError(Exception):
    """Malformed configuration; message names the offending field."""


# -- configuration --------------------------------------------------------------

_SECTIONS = {
    "schema": None,
    "name": None,
    "physics": {"n_particles", "dimension", "screening", "softening", "interacting"},
    "grid": {"half_extent", "points"},
    "run": {"walkers", "dtau", "steps", "alpha", "mode", "drift", "seed", "energy_window",
            "coupling_precision", "max_clamp_fraction"},
    "noise": {"base_amplitude", "decay_exponent", "reference_time", "floor"},
    "scan": {"alphas", "refine_step", "refine_span"},
    "oracle": {"points", "half_extent", "dtau", "tol", "lanczos"},
    "sweep": {"particles", "screenings", "oracle_max_particles"},
}


@dataclass
class OracleSpec:
    points: int | None = None
    half_extent: float | None = None
    dtau: float = 0.02
    tol: float = 1e-8
    lanczos: bool = False


@dataclass
class Experiment:
    name: str
    config: RunConfig
    alphas: list[float] = field(default_factory=lambda: list(DEFAULT_ALPHAS))
    refine_step: float | None = None
    refine_span: float = 0.3
    oracle: OracleSpec = field(default_factory=OracleSpec)
    particles: list[int] = field(default_factory=lambda: [1, 2, 3, 4, 5, 6])
    screenings: list[float] = field(default_factory=lambda: [0.0, 3.0])
    oracle_max_particles: int = 4


def _get(section: dict, name: str, key: str, kind, default=...):
    if key not in section:
        if default is ...:
            raise ConfigError(f"{name}.{key}: required field missing")
        return default
    value = section[key]
    if value is None and default is None:
        return None
    if kind is bool:
        if not isinstance(value, bool):
            raise ConfigError(f"{name}.{key}: expected true/false, got {value!r}")
        return value
    if kind is int:
        if isinstance(value, bool) or not isinstance(value, int):
            raise ConfigError(f"{name}.{key}: expected an integer, got {value!r}")
        return value
    if kind is float:
        if isinstance(value, bool) or not isinstance(value, (int, float)) or not math.isfinite(value):
            raise ConfigError(f"{name}.{key}: expected a finite number, got {value!r}")
        return float(value)
    if kind is str:
        if not isinstance(value, str):
            raise ConfigError(f"{name}.{key}: expected a string, got {value!r}")
        return value
    if kind == "floats":
        if not isinstance(value, list) or not value or not all(
            isinstance(v, (int, float)) and not isinstance(v, bool) for v in value
        ):
            raise ConfigError(f"{name}.{key}: expected a non-empty list of numbers")
        return [float(v) for v in value]
    if kind == "ints":
        if not isinstance(value, list) or not value or not all(
            isinstance(v, int) and not isinstance(v, bool) for v in value
        ):
            raise ConfigError(f"{name}.{key}: expected a non-empty list of integers")
        return list(value)
    raise AssertionError(kind)


def parse_experiment(raw: Any, seed: int | None = None) -> Experiment:
    """Validate a decoded JSON config and build the experiment it describes."""
    if not isinstance(raw, dict):
        raise ConfigError("top level: expected a JSON object")
    if raw.get("schema") != SCHEMA:
        raise ConfigError(f"schema: expected {SCHEMA!r}, got {raw.get('schema')!r}")
    for key, value in raw.items():
        if key not in _SECTIONS:
            raise ConfigError(f"{key}: unknown field")
        allowed = _SECTIONS[key]
        if allowed is not None:
            if not isinstance(value, dict):
                raise ConfigError(f"{key}: expected an object")
            for sub in value:
                if sub not in allowed:
                    raise ConfigError(f"{key}.{sub}: unknown field")
    name = _get(raw, "", "name", str, "experiment")
    ph = raw.get("physics")
    if ph is None:
        raise ConfigError("physics: required section missing")
    try:
        params = PhysicalParams(
            n_particles=_get(ph, "physics", "n_particles", int),
            dimension=_get(ph, "physics", "dimension", int, 1),
            screening=_get(ph, "physics", "screening", float, 0.0),
            softening=_get(ph, "physics", "softening", float, 1.0),
            interacting=_get(ph, "physics", "interacting", bool, True),
        )
    except ValueError as exc:
        raise ConfigError(f"physics: {exc}") from exc

    d = params.dimension
    default_grid = Grid.default(d)
    gr = raw.get("grid", {})
    try:
        grid = Grid(
            _get(gr, "grid", "half_extent", float, default_grid.half_extent),
            _get(gr, "grid", "points", int, default_grid.points),
            d,
        )
    except ValueError as exc:
        raise ConfigError(f"grid: {exc}") from exc

    nz = raw.get("noise", {})
    base = NoiseSchedule()
    try:
        schedule = NoiseSchedule(
            _get(nz, "noise", "base_amplitude", float, base.base_amplitude),
            _get(nz, "noise", "decay_exponent", float, base.decay_exponent),
            _get(nz, "noise", "reference_time", float, base.reference_time),
            _get(nz, "noise", "floor", float, base.floor),
        )
    except ValueError as exc:
        raise ConfigError(f"noise: {exc}") from exc

    rn = raw.get("run", {})
    run_seed = _get(rn, "run", "seed", int, 0)
    if seed is not None:
        run_seed = seed
    if not 0 <= run_seed < 2**64:
        raise ConfigError(f"run.seed: must be an unsigned 64-bit integer, got {run_seed}")
    defaults = RunConfig.default(params)
    try:
        config = RunConfig(
            params=params,
            grid=grid,
            walkers=_get(rn, "run", "walkers", int, defaults.walkers),
            dtau=_get(rn, "run", "dtau", float, defaults.dtau),
            steps=_get(rn, "run", "steps", int, defaults.steps),
            alpha=_get(rn, "run", "alpha", float, defaults.alpha),
            mode=_get(rn, "run", "mode", str, defaults.mode),
            schedule=schedule,
            drift_enabled=_get(rn, "run", "drift", bool, True),
            seed=run_seed,
            energy_window=_get(rn, "run", "energy_window", int, None),
            max_clamp_fraction=_get(rn, "run", "max_clamp_fraction", float, defaults.max_clamp_fraction),
            coupling_precision=_get(rn, "run", "coupling_precision", str, defaults.coupling_precision),
        )
    except ConfigurationError as exc:
        raise ConfigError(f"run: {exc}") from exc

    exp = Experiment(name, config)
    sc = raw.get("scan", {})
    exp.alphas = _get(sc, "scan", "alphas", "floats", list(DEFAULT_ALPHAS))
    if any(not a > 0 for a in exp.alphas):
        raise ConfigError("scan.alphas: all values must be positive")
    exp.refine_step = _get(sc, "scan", "refine_step", float, None)
    exp.refine_span = _get(sc, "scan", "refine_span", float, 0.3)
    if exp.refine_step is not None and not exp.refine_step > 0:
        raise ConfigError("scan.refine_step: must be positive")

    oc = raw.get("oracle", {})
    exp.oracle = OracleSpec(
        points=_get(oc, "oracle", "points", int, None),
        half_extent=_get(oc, "oracle", "half_extent", float, None),
        dtau=_get(oc, "oracle", "dtau", float, 0.02),
        tol=_get(oc, "oracle", "tol", float, 1e-8),
        lanczos=_get(oc, "oracle", "lanczos", bool, False),
    )
    if exp.oracle.points is not None and exp.oracle.points < 16:
        raise ConfigError("oracle.points: must be at least 16")

    sw = raw.get("sweep", {})
    exp.particles = _get(sw, "sweep", "particles", "ints", [1, 2, 3, 4, 5, 6])
    if any(n < 1 for n in exp.particles):
        raise ConfigError("sweep.particles: must be positive")
    exp.screenings = _get(sw, "sweep", "screenings", "floats", [0.0, 3.0])
    if any(a < 0 for a in exp.screenings):
        raise ConfigError("sweep.screenings: must be non-negative")
    exp.oracle_max_particles = _get(sw, "sweep", "oracle_max_particles", int, 4)
    return exp


def experiment_to_dict(exp: Experiment) -> dict:
    """Fully resolved config; parsing it again gives the same experiment."""
    c = exp.config
    p, g, s = c.params, c.grid, c.schedule
    out = {
        "schema": SCHEMA,
        "name": exp.name,
        "physics": {"n_particles": p.n_particles, "dimension": p.dimension, "screening": p.screening,
                    "softening": p.softening, "interacting": p.interacting},
        "grid": {"half_extent": g.half_extent, "points": g.points},
        "run": {"walkers": c.walkers, "dtau": c.dtau, "steps": c.steps, "alpha": c.alpha, "mode": c.mode,
                "drift": c.drift_enabled, "seed": c.seed, "energy_window": c.energy_window,
                "coupling_precision": c.coupling_precision, "max_clamp_fraction": c.max_clamp_fraction},
        "noise": {"base_amplitude": s.base_amplitude, "decay_exponent": s.decay_exponent,
                  "reference_time": s.reference_time, "floor": s.floor},
        "scan": {"alphas": list(exp.alphas), "refine_span": exp.refine_span},
        "oracle": {"points": exp.oracle.points, "half_extent": exp.oracle.half_extent,
                   "dtau": exp.oracle.dtau, "tol": exp.oracle.tol, "lanczos": exp.oracle.lanczos},
        "sweep": {"particles": list(exp.particles), "screenings": list(exp.screenings),
                  "oracle_max_particles": exp.oracle_max_particles},
    }
    if exp.refine_step is not None:
        out["scan"]["refine_step"] = exp.refine_step
    return out


def _digest(obj) -> str:
    blob = json.dumps(obj, sort_keys=True, separators=(",", ":")).encode()
    return hashlib.sha256(blob).hexdigest()[:16]


def config_hash(exp: Experiment) -> str:
    d = experiment_to_dict(exp)
    d.pop("name")
    return _digest(d)


def physics_hash(exp: Experiment) -> str:
    return _digest(experiment_to_dict(exp)["physics"])


def load_experiment(path: str | os.PathLike, seed: int | None = None) -> Experiment:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc.strerror}") from exc
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}: invalid JSON ({exc.msg} at line {exc.lineno})") from exc
    return parse_experiment(raw, seed)


# -- output helpers ---------------------------------------------------------------

def _fmt(v) -> str:
    if isinstance(v, (bool, np.bool_)):
        return "1" if v else "0"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if v is None:
        return ""
    v = float(v)
    return repr(v) if math.isfinite(v) else ("nan" if math.isnan(v) else ("inf" if v > 0 else "-inf"))


def write_csv(path: Path, header: list[str], rows, hashes: tuple[str, str]) -> None:
    buf = io.StringIO()
    buf.write(f"# config_hash={hashes[0]} physics_hash={hashes[1]}\n")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([_fmt(v) for v in row])
    path.write_text(buf.getvalue())


def read_csv(path: Path) -> tuple[dict, list[dict]]:
    lines = Path(path).read_text().splitlines()
    meta = dict(item.split("=", 1) for item in lines[0].lstrip("# ").split())
    return meta, list(csv.DictReader(lines[1:]))


def _clean(obj):
    if isinstance(obj, dict):
        return {k: _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (np.floating, float)):
        v = float(obj)
        return v if math.isfinite(v) else None
    if isinstance(obj, np.bool_):
        return bool(obj)
    return obj


def write_json(path: Path, payload: dict) -> None:
    path.write_text(json.dumps(_clean(payload), indent=2, sort_keys=True) + "\n")


def _envelope(command: str, exp: Experiment) -> dict:
    return {
        "schema": RESULT_SCHEMA,
        "command": command,
        "name": exp.name,
        "config_hash": config_hash(exp),
        "physics_hash": physics_hash(exp),
        "config": experiment_to_dict(exp),
        "seed": exp.config.seed,
        "version": __version__,
    }


TRACE_COLUMNS = ["step", "tau", "energy", "stderr", "s", "sigma", "clamped"]
SCAN_COLUMNS = ["alpha", "energy", "stderr", "entropy", "s", "sigma"]


# -- commands ----------------------------------------------------------------------

def _hashes(exp):
    return config_hash(exp), physics_hash(exp)


def _scan(exp: Experiment) -> ScanResult:
    if exp.refine_step is None:
        return alpha_scan(exp.config, exp.alphas)
    return refined_alpha_scan(exp.config, exp.alphas, exp.refine_step, exp.refine_span)


def _scan_payload(sc: ScanResult) -> dict:
    return {
        "alpha_opt": sc.alpha_opt,
        "flat": sc.flat,
        "local_minima": sc.local_minima,
        "non_convex": sc.non_convex,
        "optimum": sc.at_optimum(),
    }


def cmd_run(exp: Experiment, out: Path) -> dict:
    t0 = time.perf_counter()
    res = relax_ground_state(exp.config)
    summary = res.summary()
    summary.pop("wall_time")
    payload = _envelope("run", exp)
    payload["result"] = summary
    write_json(out / "result.json", payload)
    write_csv(out / "energy_trace.csv", TRACE_COLUMNS,
              (tuple(row[c] for c in TRACE_COLUMNS) for row in res.trace), _hashes(exp))
    _timing(out, "run", time.perf_counter() - t0)
    return payload


def cmd_scan(exp: Experiment, out: Path) -> dict:
    t0 = time.perf_counter()
    sc = _scan(exp)
    payload = _envelope("scan", exp)
    payload["result"] = _scan_payload(sc)
    write_json(out / "result.json", payload)
    write_csv(out / "alpha_scan.csv", SCAN_COLUMNS,
              ([r[c] for c in SCAN_COLUMNS] for r in sc.rows), _hashes(exp))
    _timing(out, "scan", time.perf_counter() - t0)
    return payload


def oracle_grid(exp: Experiment) -> Grid:
    """Oracle grid: explicit settings, else the largest affordable refinement.

    The automatic choice keeps the cost of one propagation step (points
    times the axis length times the number of axes) under about 1e9.
    """
    p, g, o = exp.config.params, exp.config.grid, exp.oracle
    L = o.half_extent if o.half_extent is not None else g.half_extent
    if o.points is not None:
        return Grid(L, o.points, p.dimension)
    axes = p.n_particles * p.dimension
    for n in (256, 192, 128, 96, 64, 48, 32, 24, 16):
        if n <= max(g.points, 64) and float(n) ** (axes + 1) * axes <= 1.2e9:
            return Grid(L, n, p.dimension)
    return Grid(L, 16, p.dimension)


def compute_oracle(exp: Experiment) -> dict:
    params = exp.config.params
    grid = oracle_grid(exp)
    psi = exact_ground_state(params, grid, dtau=exp.oracle.dtau, tol=exp.oracle.tol)
    out = {
        "energy": exact_energy(psi, params),
        "linear_entropy": linear_entropy(exact_one_body_rdm(psi)),
        "exchange_asymmetry": psi.exchange_asymmetry(),
        "grid": {"half_extent": grid.half_extent, "points": grid.points},
    }
    if exp.oracle.lanczos:
        E_l, _ = lanczos_ground_state(params, grid)
        out["lanczos_energy"] = E_l
    return out


def cmd_oracle(exp: Experiment, out: Path) -> dict:
    t0 = time.perf_counter()
    payload = _envelope("oracle", exp)
    payload["result"] = compute_oracle(exp)
    write_json(out / "oracle.json", payload)
    _timing(out, "oracle", time.perf_counter() - t0)
    return payload


def _load_existing(path: Path, exp: Experiment, command: str) -> dict | None:
    if not path.exists():
        return None
    try:
        data = json.loads(path.read_text())
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}: unreadable ({exc.msg})") from exc
    if data.get("physics_hash") != physics_hash(exp):
        raise ConfigError(
            f"{path}: physics_hash {data.get('physics_hash')} does not match the config "
            f"({physics_hash(exp)}); refusing to join results for different physics"
        )
    if data.get("command") != command:
        return None
    if data.get("config_hash") != config_hash(exp):
        log.warning("%s was produced with different numerical settings", path)
    return data


COMPARE_COLUMNS = [
    "n_particles", "dimension", "screening", "alpha_opt", "tdqmc_energy", "tdqmc_stderr",
    "tdqmc_entropy", "oracle_energy", "oracle_entropy", "energy_rel_error", "entropy_abs_error",
]


def cmd_compare(exp: Experiment, out: Path) -> dict:
    """Join an alpha scan with the exact reference, reusing results already in `out`."""
    scan = _load_existing(out / "result.json", exp, "scan") or cmd_scan(exp, out)
    orc = _load_existing(out / "oracle.json", exp, "oracle") or cmd_oracle(exp, out)
    p = exp.config.params
    opt = scan["result"]["optimum"]
    E, S = orc["result"]["energy"], orc["result"]["linear_entropy"]
    row = [p.n_particles, p.dimension, p.screening, scan["result"]["alpha_opt"], opt["energy"],
           opt["stderr"], opt["entropy"], E, S, (opt["energy"] - E) / abs(E), opt["entropy"] - S]
    write_csv(out / "compare.csv", COMPARE_COLUMNS, [row], _hashes(exp))
    return dict(zip(COMPARE_COLUMNS, row))


def cmd_fig1(out: Path) -> None:
    r = np.linspace(0.0, 6.0, 121)
    curves = [pair_potential_of_distance(r, PhysicalParams(2, screening=a)) for a in (0.0, 3.0)]
    hashes = (_digest({"fig1": {"screenings": [0.0, 3.0], "softening": 1.0, "r": [0.0, 6.0, 121]}}),) * 2
    write_csv(out / "fig1.csv", ["r", "v_a0", "v_a3"], zip(r, *curves), hashes)


def cmd_fig2(exp: Experiment, out: Path) -> None:
    p = exp.config.params
    if p.n_particles < 2:
        raise ConfigError("physics.n_particles: the configuration-space scatter needs at least 2 particles")
    res = relax_ground_state(exp.config)
    axes = "xy"[: p.dimension]
    header = ["k"] + [f"{a}{i + 1}" for i in range(p.n_particles) for a in axes]
    header += [f"sigma{i + 1}" for i in range(p.n_particles)]
    pos = np.stack([c.positions for c in res.clouds], axis=1).reshape(exp.config.walkers, -1)
    sig = [c.nonlocal_length for c in res.clouds]
    rows = ([k, *pos[k], *sig] for k in range(exp.config.walkers))
    write_csv(out / "scatter.csv", header, rows, _hashes(exp))


FIG3_COLUMNS = [
    "dimension", "n_particles", "screening", "alpha_opt", "flat", "energy", "stderr", "entropy", "s",
    "oracle_energy", "oracle_entropy",
]


def cmd_fig3(exp: Experiment, out: Path) -> None:
    rows = []
    for a in exp.screenings:
        for n in exp.particles:
            params = replace(exp.config.params, n_particles=n, screening=a)
            sub = replace(exp, config=replace(exp.config, params=params))
            log.info("fig3: N=%d a=%g", n, a)
            sc = _scan(sub)
            opt = sc.at_optimum()
            oE = oS = None
            if n <= exp.oracle_max_particles:
                try:
                    ref = compute_oracle(sub)
                    oE, oS = ref["energy"], ref["linear_entropy"]
                except MemoryBudgetError as exc:
                    log.warning("no exact reference for N=%d: %s", n, exc)
            rows.append([params.dimension, n, a, sc.alpha_opt, sc.flat, opt["energy"], opt["stderr"],
                         opt["entropy"], opt["s"], oE, oS])
    write_csv(out / "fig3.csv", FIG3_COLUMNS, rows, _hashes(exp))


def _timing(out: Path, command: str, seconds: float) -> None:
    # wall-clock time is the one non-reproducible quantity; kept out of result files
    write_json(out / f"timing_{command}.json", {"command": command, "wall_time": seconds})


# -- entry point -----------------------------------------------------------------

def _resolve_threads(value: int | None) -> int:
    if value is None:
        env = os.environ.get("TDQMC_THREADS", "0").strip() or "0"
        try:
            value = int(env)
        except ValueError:
            raise ConfigError(f"TDQMC_THREADS: expected an integer, got {env!r}") from None
    if value < 0:
        raise ConfigError(f"--threads: must be >= 0, got {value}")
    return value


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="tdqmc", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)
    needs_config = {
        "run": "single relaxation: result.json and energy_trace.csv",
        "scan": "alpha scan: alpha_scan.csv and result.json",
        "oracle": "exact many-body reference: oracle.json",
        "compare": "scan versus exact reference: compare.csv",
        "fig2-scatter": "paired walker coordinates: scatter.csv",
        "fig3": "per-N sweep over both screenings: fig3.csv",
    }
    for name, help_text in [*needs_config.items(), ("fig1", "pair potential curves: fig1.csv")]:
        p = sub.add_parser(name, help=help_text)
        p.add_argument("--config", required=name in needs_config, metavar="PATH")
        p.add_argument("--out", default=".", metavar="DIR")
        p.add_argument("--seed", type=int, default=None, metavar="U64")
        p.add_argument("--threads", type=int, default=None, metavar="INT", help="0 = auto")
        p.add_argument("-v", "--verbose", action="store_true")
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    out = Path(args.out)
    try:
        threads = _resolve_threads(args.threads)
        if threads:
            _kernels.set_threads(threads)
        if args.seed is not None and not 0 <= args.seed < 2**64:
            raise ConfigError(f"--seed: must be an unsigned 64-bit integer, got {args.seed}")
        out.mkdir(parents=True, exist_ok=True)
        if args.command == "fig1":
            cmd_fig1(out)
            return EXIT_OK
        exp = load_experiment(args.config, args.seed)
        commands = {"run": cmd_run, "scan": cmd_scan, "oracle": cmd_oracle, "compare": cmd_compare,
                    "fig2-scatter": cmd_fig2, "fig3": cmd_fig3}
        commands[args.command](exp, out)
    except (ConfigError, MemoryBudgetError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (NumericalError, CollapsedWaveError, ArithmeticError) as exc:
        path = out / "diagnostic_trace.csv"
        trace = getattr(exc, "trace", None)
        if trace is not None and len(trace):
            write_csv(path, TRACE_COLUMNS, (tuple(r[c] for c in TRACE_COLUMNS) for r in trace), ("n/a", "n/a"))
            print(f"numerical failure: {exc}\ndiagnostic trace: {path}", file=sys.stderr)
        else:
            print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    return EXIT_OK


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
