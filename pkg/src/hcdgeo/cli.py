"""Command-line front end: phase grids, trajectories, critical points and oracle runs.

Every subcommand reads a JSON config (``--config``) and writes CSV or JSON
into the output directory. Exit codes: 0 success, 2 bad config, 3 solver
failure (grid commands mark the failing cells ``ERROR`` and keep going).
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import math
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Callable, Sequence

import numpy as np

from . import dynamics, land, spatial
from .demand import (ComposedHCD, DemandConfig, ShareSchedule, WeightSchedule,
                     schedule_from_dict, validate_assumptions)
from .errors import BracketFailure, HCDError, NoConvergenceWithinHorizon, NotDefined
from .short_run import CSV_HEADER, EconomyParams, adding_up_gap, solve_short_run

log = logging.getLogger("hcdgeo")

EXIT_OK, EXIT_CONFIG, EXIT_SOLVER = 0, 2, 3
OUT_ENV = "HCDGEO_OUT_DIR"
BEYOND_CAP = "beyond_cap"
NOT_DEFINED = "not_defined"
PHASE_HEADER = ("alpha", "sigma", "tau", "class", "black_hole", "tau0", "tau1",
                "omega_B", "omega_C", "m_B", "m_C")


class ConfigError(Exception):
    pass


# --- config -----------------------------------------------------------------

def _as_float(v: Any, name: str) -> float:
    if isinstance(v, str) and v.strip().lower() in ("inf", "infinity"):
        return math.inf
    if isinstance(v, bool) or not isinstance(v, (int, float)):
        raise ConfigError(f"{name}: expected a number, got {v!r}")
    return float(v)


def parse_axis(v: Any, name: str) -> list[float]:
    """Scalar, explicit list, or ``{"start", "stop", "num", "spacing"}`` range."""
    if isinstance(v, dict):
        try:
            start, stop, num = (_as_float(v["start"], name), _as_float(v["stop"], name),
                                int(v["num"]))
        except KeyError as exc:
            raise ConfigError(f"{name}: range needs start, stop and num") from exc
        spacing = v.get("spacing", "linear")
        if num < 1:
            raise ConfigError(f"{name}: num must be positive")
        if spacing == "linear":
            vals = np.linspace(start, stop, num)
        elif spacing == "log":
            if start <= 0:
                raise ConfigError(f"{name}: log spacing needs a positive start")
            vals = np.geomspace(start, stop, num)
        else:
            raise ConfigError(f"{name}: unknown spacing {spacing!r}")
        out = [float(x) for x in vals]
    elif isinstance(v, list):
        out = [_as_float(x, name) for x in v]
    else:
        out = [_as_float(v, name)]
    if not out:
        raise ConfigError(f"{name}: empty range")
    if any(b <= a for a, b in zip(out, out[1:])):
        raise ConfigError(f"{name}: values must be strictly ascending")
    return out


@dataclass
class RunConfig:
    schedule: ShareSchedule
    alpha: list[float]
    sigma: list[float]
    tau: list[float]
    eta: list[float] = field(default_factory=lambda: [0.0])
    lam: float = 0.5
    lambda0: float = 0.55
    rule: str = "hysteresis"
    step: float = dynamics.DEFAULT_STEP
    horizon: int = dynamics.DEFAULT_HORIZON
    damping: float = 0.5
    tol: float = 1e-13
    tau_cap: float = spatial.TAU_CAP_WIDE
    coefficient: float = 1.0
    out: str | None = None
    raw: dict = field(default_factory=dict, repr=False)

    @classmethod
    def from_dict(cls, d: dict) -> "RunConfig":
        if not isinstance(d, dict):
            raise ConfigError("config must be a JSON object")
        known = {"schedule", "alpha", "sigma", "tau", "eta", "lambda", "lambda0", "rule",
                 "solver", "coefficient", "out"}
        extra = set(d) - known
        if extra:
            raise ConfigError(f"unknown config keys: {sorted(extra)}")
        try:
            ss = schedule_from_dict(d.get("schedule", {"kind": "DirectLogistic"}))
        except (HCDError, TypeError) as exc:
            raise ConfigError(f"schedule: {exc}") from exc
        solver = d.get("solver", {})
        if not isinstance(solver, dict):
            raise ConfigError("solver must be an object")
        unknown = set(solver) - {"step", "horizon", "damping", "tol", "tau_cap"}
        if unknown:
            raise ConfigError(f"unknown solver keys: {sorted(unknown)}")
        cfg = cls(
            schedule=ss,
            alpha=parse_axis(d.get("alpha", 2.0), "alpha"),
            sigma=parse_axis(d.get("sigma", 1.7), "sigma"),
            tau=parse_axis(d.get("tau", 2.0), "tau"),
            eta=parse_axis(d.get("eta", 0.0), "eta"),
            lam=_as_float(d.get("lambda", 0.5), "lambda"),
            lambda0=_as_float(d.get("lambda0", 0.55), "lambda0"),
            rule=d.get("rule", "hysteresis"),
            step=_as_float(solver.get("step", dynamics.DEFAULT_STEP), "solver.step"),
            horizon=int(solver.get("horizon", dynamics.DEFAULT_HORIZON)),
            damping=_as_float(solver.get("damping", 0.5), "solver.damping"),
            tol=_as_float(solver.get("tol", 1e-13), "solver.tol"),
            tau_cap=_as_float(solver.get("tau_cap", spatial.TAU_CAP_WIDE), "solver.tau_cap"),
            coefficient=_as_float(d.get("coefficient", 1.0), "coefficient"),
            out=d.get("out"),
            raw=d,
        )
        cfg.validate()
        return cfg

    def validate(self) -> None:
        if self.rule not in dynamics.RULES:
            raise ConfigError(f"rule must be one of {dynamics.RULES}")
        for name in ("step", "damping", "tol", "tau_cap"):
            if not getattr(self, name) > 0:
                raise ConfigError(f"solver.{name} must be positive")
        if self.horizon < 1:
            raise ConfigError("solver.horizon must be positive")
        if min(self.alpha) <= 0:
            raise ConfigError("alpha must be positive")
        if min(self.sigma) <= 1:
            raise ConfigError("sigma must exceed 1")
        if min(self.tau) < 1:
            raise ConfigError("tau must be at least 1")
        if not (0 <= min(self.eta) and max(self.eta) <= 1):
            raise ConfigError("eta must lie in [0, 1]")
        if not 0 <= self.lam <= 1:
            raise ConfigError("lambda must lie in [0, 1]")
        if not 0 < self.lambda0 < 1:
            raise ConfigError("lambda0 must lie in (0, 1)")

    def scalar(self, name: str) -> float:
        vals = getattr(self, name)
        if len(vals) != 1:
            raise ConfigError(f"{name} must be a single value for this command")
        return vals[0]


def load_config(path: str | None) -> RunConfig:
    if path is None:
        return RunConfig.from_dict({})
    try:
        with open(path) as fh:
            d = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    try:
        return RunConfig.from_dict(d)
    except (TypeError, ValueError) as exc:
        raise ConfigError(str(exc)) from exc


# --- formatting -------------------------------------------------------------

def fmt(v: Any) -> str:
    """CSV cell text; floats carry 17 significant digits."""
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, spatial.Everywhere):
        return v.value
    if isinstance(v, (float, np.floating)):
        if math.isinf(v):
            return "inf" if v > 0 else "-inf"
        return format(float(v), ".17g")
    return str(v)


def jsonable(v: Any) -> Any:
    if isinstance(v, spatial.Everywhere):
        return v.value
    if isinstance(v, (float, np.floating)):
        v = float(v)
        return ("inf" if v > 0 else "-inf") if math.isinf(v) else v
    if isinstance(v, dict):
        return {k: jsonable(x) for k, x in v.items()}
    if isinstance(v, (list, tuple)):
        return [jsonable(x) for x in v]
    return v


def write_csv(path: Path, header: Sequence[str], rows: Sequence[Sequence[Any]]) -> None:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for r in rows:
        w.writerow([fmt(x) for x in r])
    path.write_text(buf.getvalue())


def write_json(path: Path, obj: Any) -> None:
    path.write_text(json.dumps(jsonable(obj), indent=2) + "\n")


def _ordered_map(fn: Callable, items: list, threads: int) -> list:
    """``[fn(x) for x in items]``, evaluated on a thread pool; order preserved."""
    if threads <= 1 or len(items) <= 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(fn, items))


# --- commands ---------------------------------------------------------------

def _root_or_marker(fn, *args, **kw):
    try:
        return fn(*args, **kw)
    except BracketFailure:
        return BEYOND_CAP


def _threshold_or_marker(fn, *args):
    try:
        return fn(*args)
    except NotDefined:
        return NOT_DEFINED


def phase_rows(cfg: RunConfig, threads: int = 1) -> tuple[list[tuple], int]:
    """Rows of the phase grid (row-major in sigma, alpha, tau) and the error count."""
    ss = cfg.schedule
    pairs = [(s, a) for s in cfg.sigma for a in cfg.alpha]

    def per_pair(sa):
        s, a = sa
        try:
            om_C, m_C = spatial.solve_core_real_income(a, s, ss)
            t0 = _root_or_marker(spatial.break_point, a, s, ss, cap=cfg.tau_cap)
            t1 = _root_or_marker(spatial.sustain_point, a, s, ss, cap=cfg.tau_cap)
        except HCDError as exc:
            return exc
        out = []
        for t in cfg.tau:
            try:
                cls = spatial.classify(a, s, t, ss)
                om_B, m_B = spatial.solve_symmetric_real_income(a, s, t, ss)
                out.append((a, s, t, cls.regime.value, cls.black_hole, t0, t1,
                            om_B, om_C, m_B, m_C))
            except HCDError as exc:
                log.error("cell alpha=%g sigma=%g tau=%g failed: %s", a, s, t, exc)
                out.append((a, s, t, "ERROR", "", "", "", "", "", "", ""))
        return out

    rows, errors = [], 0
    for sa, res in zip(pairs, _ordered_map(per_pair, pairs, threads)):
        if isinstance(res, Exception):
            log.error("alpha=%g sigma=%g failed: %s", sa[1], sa[0], res)
            res = [(sa[1], sa[0], t, "ERROR", "", "", "", "", "", "", "") for t in cfg.tau]
        errors += sum(r[3] == "ERROR" for r in res)
        rows.extend(res)
    return rows, errors


def cmd_phase(cfg: RunConfig, out: Path, threads: int) -> int:
    rows, errors = phase_rows(cfg, threads)
    write_csv(out / "phase.csv", PHASE_HEADER, rows)
    return EXIT_SOLVER if errors else EXIT_OK


def cmd_trajectory(cfg: RunConfig, out: Path, threads: int) -> int:
    sigma, tau = cfg.scalar("sigma"), cfg.scalar("tau")
    recs = dynamics.growth_trajectory(cfg.alpha, sigma, tau, cfg.schedule, cfg.rule)
    write_csv(out / "trajectory.csv", dynamics.TRAJECTORY_HEADER,
              [r.csv_row() for r in recs])
    summary = {
        "sigma": sigma, "tau": tau, "rule": cfg.rule,
        "transitions": [{"alpha_before": a, "alpha_after": b, "from": f.value, "to": t.value}
                        for a, b, f, t in dynamics.regime_transitions(recs)],
        "alpha1": _threshold_or_marker(spatial.alpha_threshold_sustain, sigma, cfg.schedule),
        "alpha_inf": _threshold_or_marker(spatial.alpha_threshold_break, sigma, cfg.schedule),
    }
    write_json(out / "trajectory_summary.json", summary)
    return EXIT_OK


def critical_payload(cfg: RunConfig) -> dict:
    a, s = cfg.scalar("alpha"), cfg.scalar("sigma")
    ss = cfg.schedule
    return {
        "alpha": a, "sigma": s, "schedule": ss.to_dict(),
        "tau0": _root_or_marker(spatial.break_point, a, s, ss, cap=cfg.tau_cap),
        "tau1": _root_or_marker(spatial.sustain_point, a, s, ss, cap=cfg.tau_cap),
        "alpha1": _threshold_or_marker(spatial.alpha_threshold_sustain, s, ss),
        "alpha_inf": _threshold_or_marker(spatial.alpha_threshold_break, s, ss),
    }


def cmd_critical(cfg: RunConfig, out: Path, threads: int) -> int:
    write_json(out / "critical.json", critical_payload(cfg))
    return EXIT_OK


def cmd_shortrun(cfg: RunConfig, out: Path, threads: int) -> int:
    params = EconomyParams(cfg.scalar("alpha"), cfg.scalar("sigma"), cfg.scalar("tau"))
    sol = solve_short_run(cfg.lam, params, cfg.schedule, damping=cfg.damping, tol=cfg.tol)
    payload = {"alpha": params.alpha, "sigma": params.sigma, "tau": params.tau,
               **sol.to_dict(), "adding_up_gap": adding_up_gap(sol, params)}
    write_json(out / "shortrun.json", payload)
    write_csv(out / "shortrun.csv", CSV_HEADER, [sol.csv_row()])
    return EXIT_OK


def cmd_tatonnement(cfg: RunConfig, out: Path, threads: int) -> int:
    params = EconomyParams(cfg.scalar("alpha"), cfg.scalar("sigma"), cfg.scalar("tau"))
    try:
        res = dynamics.tatonnement(cfg.lambda0, params, cfg.schedule,
                                   step=cfg.step, horizon=cfg.horizon)
    except NoConvergenceWithinHorizon as exc:
        write_csv(out / "tatonnement.csv", dynamics.PATH_HEADER, exc.path.tolist())
        log.error("%s", exc)
        return EXIT_SOLVER
    write_csv(out / "tatonnement.csv", dynamics.PATH_HEADER, res.path.tolist())
    write_json(out / "tatonnement_summary.json",
               {"lambda0": cfg.lambda0, "limit": res.limit, "steps": res.steps,
                "converged_to": res.converged_to})
    return EXIT_OK


def cmd_helpman(cfg: RunConfig, out: Path, threads: int) -> int:
    a, s = cfg.scalar("alpha"), cfg.scalar("sigma")
    cells = [(e, t) for e in cfg.eta for t in cfg.tau]

    def one(cell):
        e, t = cell
        try:
            rep = land.stability_report(a, s, t, e, cfg.schedule, coefficient=cfg.coefficient)
            return (rep.m, s, e, t, rep.Z, rep.elasticity, rep.stable)
        except HCDError as exc:
            log.error("eta=%g tau=%g failed: %s", e, t, exc)
            return ("ERROR", s, e, t, "", "", "")

    rows = _ordered_map(one, cells, threads)
    write_csv(out / "helpman.csv", land.SCAN_HEADER, rows)
    return EXIT_SOLVER if any(r[0] == "ERROR" for r in rows) else EXIT_OK


def cmd_validate(cfg: RunConfig, out: Path, threads: int) -> int:
    s = cfg.scalar("sigma")
    finite = [x for x in cfg.tau if math.isfinite(x)]
    t = max(finite) if finite else 1.0
    ws = cfg.schedule.weights if isinstance(cfg.schedule, ComposedHCD) else WeightSchedule()
    gamma = cfg.schedule.gamma if isinstance(cfg.schedule, ComposedHCD) else 1e-6
    rep = validate_assumptions(ws, cfg.schedule, DemandConfig(gamma=gamma), s, t)
    write_json(out / "validation.json", rep.to_list())
    return EXIT_OK


COMMANDS = {
    "phase": (cmd_phase, "classify every (alpha, tau) cell of a grid"),
    "trajectory": (cmd_trajectory, "equilibrium path as productivity rises"),
    "critical": (cmd_critical, "break and sustain points, productivity thresholds"),
    "shortrun": (cmd_shortrun, "short-run equilibrium at a given allocation"),
    "tatonnement": (cmd_tatonnement, "migration-dynamics path from lambda0"),
    "helpman": (cmd_helpman, "symmetric stability scan with structures"),
    "validate": (cmd_validate, "regularity checks on the share schedule"),
}


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="hcdgeo", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)
    for name, (_, help_) in COMMANDS.items():
        sp = sub.add_parser(name, help=help_)
        sp.add_argument("--config", help="JSON run configuration")
        sp.add_argument("--out", help=f"output directory (else ${OUT_ENV}, config 'out', or .)")
        sp.add_argument("--threads", type=int, default=1, help="worker threads for grids")
        sp.add_argument("-v", "--verbose", action="store_true")
    return p


def resolve_out(arg: str | None, cfg: RunConfig) -> Path:
    path = Path(arg or os.environ.get(OUT_ENV) or cfg.out or ".")
    path.mkdir(parents=True, exist_ok=True)
    return path


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_CONFIG if exc.code else EXIT_OK
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    if args.threads < 1:
        print("error: --threads must be at least 1", file=sys.stderr)
        return EXIT_CONFIG
    try:
        cfg = load_config(args.config)
        out = resolve_out(args.out, cfg)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    fn = COMMANDS[args.command][0]
    try:
        return fn(cfg, out, args.threads)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except HCDError as exc:
        print(f"solver error: {exc}", file=sys.stderr)
        return EXIT_SOLVER


if __name__ == "__main__":
    sys.exit(main())
