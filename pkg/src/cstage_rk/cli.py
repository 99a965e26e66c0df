"""Command-line interface.

Exit codes: 0 success, 1 numerical property failure, 2 configuration error.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from dataclasses import dataclass, fields, replace
from typing import Optional, Sequence

from . import cstage, tableau
from .errors import CstageError, NoConvergence
from .integrator import StageSolveConfig, convergence_study, integrate
from .problems import PROBLEMS, make_problem
from .quadrature import MAX_POINTS, gauss_rule

EXIT_OK, EXIT_FAIL, EXIT_CONFIG = 0, 1, 2
RESIDUAL_TOL = 1e-10

# mu values used for the long-run experiments
DEFAULT_MU = {"hermite4_sym_s3": math.sqrt(2 * math.pi) / 14}
DEFAULT_H_LIST = (0.1, 0.05, 0.025, 0.0125)


class ConfigError(Exception):
    pass


@dataclass(frozen=True)
class RunConfig:
    method: Optional[str] = None
    mu: Optional[float] = None
    quad_points: Optional[int] = None
    problem: str = "kepler"
    h: Optional[tuple] = None
    steps: int = 10_000
    t_end: float = 1.0
    solver: str = "fixed_point"
    tol: float = 1e-14
    max_iter: int = 100
    out: Optional[str] = None

    def validate(self) -> "RunConfig":
        if self.method is not None and self.method not in tableau.BUILTINS:
            raise ConfigError(f"unknown method {self.method!r}; choose from {sorted(tableau.BUILTINS)}")
        if self.mu is not None and not math.isfinite(self.mu):
            raise ConfigError("mu must be finite")
        if self.quad_points is not None and not 1 <= self.quad_points <= MAX_POINTS:
            raise ConfigError(f"quad-points must be in 1..{MAX_POINTS}")
        if self.problem not in PROBLEMS:
            raise ConfigError(f"unknown problem {self.problem!r}; choose from {sorted(PROBLEMS)}")
        if self.h is not None and any(not (v > 0 and math.isfinite(v)) for v in self.h):
            raise ConfigError("step sizes must be positive")
        if self.steps < 1:
            raise ConfigError("steps must be at least 1")
        if not self.t_end > 0:
            raise ConfigError("t-end must be positive")
        if self.solver not in ("fixed_point", "newton"):
            raise ConfigError("solver must be fixed_point or newton")
        if not self.tol > 0 or self.max_iter < 1:
            raise ConfigError("tol must be positive and max-iter at least 1")
        return self

    @property
    def stage_config(self) -> StageSolveConfig:
        return StageSolveConfig(self.solver, self.tol, self.max_iter)


_CONFIG_KEYS = {f.name for f in fields(RunConfig)}


def _load_config(path: Optional[str]) -> dict:
    if path is None:
        return {}
    try:
        with open(path) as fh:
            data = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from None
    if not isinstance(data, dict):
        raise ConfigError("config must be a JSON object")
    unknown = set(data) - _CONFIG_KEYS
    if unknown:
        raise ConfigError(f"unknown config keys {sorted(unknown)}")
    if "h" in data and data["h"] is not None:
        h = data["h"]
        data["h"] = tuple(h) if isinstance(h, list) else (h,)
    return data


def _build_config(args: argparse.Namespace) -> RunConfig:
    values = _load_config(args.config)
    for name in _CONFIG_KEYS:
        flag = getattr(args, name, None)
        if flag is not None:
            values[name] = tuple(flag) if name == "h" else flag
    try:
        return RunConfig(**values).validate()
    except TypeError as exc:
        raise ConfigError(str(exc)) from None


def _resolve_tableau(cfg: RunConfig, require_mu: bool = False) -> tableau.ButcherTableau:
    name = cfg.method
    spec = tableau.BUILTINS[name]
    mu = cfg.mu
    if mu is None:
        if require_mu and spec.has_param:
            raise ConfigError(f"{name} has a free parameter; pass --mu")
        mu = DEFAULT_MU.get(name, 0.0)
    if cfg.quad_points is None or cfg.quad_points == spec.quad_points:
        return tableau.builtin(name, mu)
    method, _ = tableau.builtin_method(name, mu)
    tab = tableau.discretize(method, gauss_rule(method.family, cfg.quad_points))
    return tableau.ButcherTableau(tab.c, tab.A, tab.b, {**tab.meta, "name": name, "mu": mu})


def _single_h(cfg: RunConfig, default: float = 0.1) -> float:
    if cfg.h is None:
        return default
    if len(cfg.h) != 1:
        raise ConfigError("exactly one step size is needed")
    return cfg.h[0]


def _emit(text: str, out: Optional[str]) -> None:
    if out is None:
        sys.stdout.write(text)
    else:
        with open(out, "w", newline="") as fh:
            fh.write(text)


def _fmt(x: float) -> str:
    return format(float(x), ".17g")


def cmd_tableau(cfg: RunConfig) -> int:
    if cfg.method is None:
        raise ConfigError("--method is required")
    tab = _resolve_tableau(cfg, require_mu=True)
    flat = tableau.to_flat(tab)
    sys.stdout.write(tableau.to_block(tab))
    if cfg.out is None:
        sys.stdout.write("\n" + flat)
    else:
        _emit(flat, cfg.out)
    return EXIT_OK


def cmd_verify(cfg: RunConfig) -> int:
    if cfg.method is None:
        raise ConfigError("--method is required")
    spec = tableau.BUILTINS[cfg.method]
    tab = _resolve_tableau(cfg)
    method, _ = tableau.builtin_method(cfg.method, tab.meta["mu"])

    sym_rk = tableau.check_symplectic_rk(tab)
    sym_cs = cstage.check_symplectic_cs(method)
    symm_rk = tableau.check_symmetric_rk(tab)
    symm_cs = cstage.check_symmetric_cs(method) if method.family.symmetry_axis == 0.5 else None
    report = tableau.check_order_conditions(tab, 4)
    orders = method.orders
    bound_cs = cstage.predicted_cs_order(orders)
    bound_rk = tableau.predicted_rk_order(
        orders, 2 * tab.s, tab.meta["deg_B"], tab.meta["deg_A_tau"], tab.meta["deg_A_sigma"]
    )
    residuals = {
        "B": cstage.check_B(method, orders.xi),
        "C": cstage.check_C(method, orders.eta),
        "D": cstage.check_D(method, orders.zeta),
    }

    def mark(ok: bool) -> str:
        return "yes" if ok else "no"

    failures = []
    if max(sym_rk, sym_cs) > RESIDUAL_TOL:
        failures.append("symplectic")
    if spec.symmetric and (symm_rk > RESIDUAL_TOL or (symm_cs or 0.0) > RESIDUAL_TOL):
        failures.append("symmetric")
    if any(v > RESIDUAL_TOL for v in residuals.values()):
        failures.append("simplifying assumptions")
    claimed = spec.claimed_order if cfg.quad_points in (None, spec.quad_points) else None
    if claimed is not None and report.satisfied < claimed:
        failures.append("order")

    lines = [
        f"method          {cfg.method} (mu={_fmt(tab.meta['mu'])}, s={tab.s})",
        f"symplectic_rk   {sym_rk:.3e}  {mark(sym_rk <= RESIDUAL_TOL)}",
        f"symplectic_cs   {sym_cs:.3e}  {mark(sym_cs <= RESIDUAL_TOL)}",
        f"symmetric_rk    {symm_rk:.3e}  {mark(symm_rk <= RESIDUAL_TOL)}",
        "symmetric_cs    "
        + ("n/a" if symm_cs is None else f"{symm_cs:.3e}  {mark(symm_cs <= RESIDUAL_TOL)}"),
        *(f"assumption_{k}    {v:.3e}" for k, v in residuals.items()),
        f"order           {report.satisfied}"
        + ("" if claimed is None else f" (claimed {claimed})"),
        f"bound_csrk      {bound_cs} (lower bound)",
        f"bound_rk        {bound_rk} (lower bound)",
        "status          " + ("ok" if not failures else "FAIL: " + ", ".join(failures)),
    ]
    _emit("\n".join(lines) + "\n", cfg.out)
    return EXIT_FAIL if failures else EXIT_OK


def _trajectory_csv(traj, names) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    header = ["t", *names]
    if traj.energy_error is not None:
        header.append("energy_err")
    if traj.solution_error is not None:
        header.append("sol_err")
    writer.writerow(header)
    for n in range(len(traj)):
        row = [traj.times[n], *traj.states[n]]
        if traj.energy_error is not None:
            row.append(traj.energy_error[n])
        if traj.solution_error is not None:
            row.append(traj.solution_error[n])
        writer.writerow([_fmt(v) for v in row])
    return buf.getvalue()


_STATE_NAMES = {"kepler": ("p1", "p2", "q1", "q2"), "exponential": ("z",), "pendulum": ("p", "q")}


def _run_integration(cfg: RunConfig, problem_name: str) -> int:
    tab = _resolve_tableau(cfg)
    problem = make_problem(problem_name)
    h = _single_h(cfg)
    try:
        traj = integrate(tab, problem, h, cfg.steps, cfg.stage_config)
    except NoConvergence as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_FAIL
    _emit(_trajectory_csv(traj, _STATE_NAMES[problem_name]), cfg.out)
    return EXIT_OK


def cmd_integrate(cfg: RunConfig) -> int:
    if cfg.method is None:
        raise ConfigError("--method is required")
    return _run_integration(cfg, cfg.problem)


def cmd_kepler(cfg: RunConfig) -> int:
    if cfg.method is None:
        cfg = replace(cfg, method="laguerre2_s2")
    return _run_integration(cfg, "kepler")


def cmd_convergence(cfg: RunConfig) -> int:
    if cfg.method is None:
        raise ConfigError("--method is required")
    h_list = cfg.h if cfg.h is not None else DEFAULT_H_LIST
    if len(h_list) < 4:
        raise ConfigError("convergence needs at least 4 step sizes")
    tab = _resolve_tableau(cfg)
    problem = make_problem(cfg.problem)
    try:
        errors, slope = convergence_study(tab, problem, cfg.t_end, h_list, cfg.stage_config)
    except NoConvergence as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_FAIL
    except ValueError as exc:
        raise ConfigError(str(exc)) from None
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["h", "final_error"])
    for h, e in zip(h_list, errors):
        writer.writerow([_fmt(h), _fmt(e)])
    _emit(buf.getvalue(), cfg.out)
    print(f"slope={slope:.6f}", file=sys.stderr)
    return EXIT_OK


COMMANDS = {
    "tableau": cmd_tableau,
    "verify": cmd_verify,
    "integrate": cmd_integrate,
    "convergence": cmd_convergence,
    "kepler": cmd_kepler,
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="cstage-rk",
        description="Symplectic RK methods from weighted continuous-stage constructions.",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--method", choices=sorted(tableau.BUILTINS), default=None)
    common.add_argument("--mu", type=float, default=None, help="free parameter of the family")
    common.add_argument("--quad-points", dest="quad_points", type=int, default=None)
    common.add_argument("--problem", choices=sorted(PROBLEMS), default=None)
    common.add_argument("--h", type=float, nargs="+", default=None, help="step size(s)")
    common.add_argument("--steps", type=int, default=None)
    common.add_argument("--t-end", dest="t_end", type=float, default=None)
    common.add_argument("--solver", choices=["fixed_point", "newton"], default=None)
    common.add_argument("--tol", type=float, default=None)
    common.add_argument("--max-iter", dest="max_iter", type=int, default=None)
    common.add_argument("--config", default=None, help="JSON file of RunConfig fields")
    common.add_argument("--out", default=None, help="output path (default stdout)")
    helps = {
        "tableau": "print a builtin tableau (block and flat formats)",
        "verify": "check symplecticity, symmetry and order of a builtin",
        "integrate": "integrate a test problem and write a CSV trajectory",
        "convergence": "step-halving study; CSV of h,final_error",
        "kepler": "reproduce the Kepler experiment as CSV",
    }
    for name, text in helps.items():
        sub.add_parser(name, parents=[common], help=text)
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = _build_config(args)
        return COMMANDS[args.command](cfg)
    except NoConvergence as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_FAIL
    except (ConfigError, CstageError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
