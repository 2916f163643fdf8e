"""Run configuration: a single strict JSON document.

Unknown keys are rejected everywhere, every numeric field is validated by
name, and the canonical hash of the parsed document is embedded in every
output artifact so results are replayable.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass
from pathlib import Path

from bouslp.gamma import GAMMA_CATALOG, GammaSpec, get_gamma
from bouslp.initdata import make_field
from bouslp.lp import LPFamily, build_lp_family
from bouslp.snapshots import read_snapshot
from bouslp.solver import INTEGRATORS, SolverConfig
from bouslp.spectral import Grid, SpectralField


class ConfigError(ValueError):
    pass


COMMANDS = ("simulate", "verify", "sweep", "report")

DEFAULTS = {
    "grid": {"n": 128},
    "solver": {
        "kappa": 0.1,
        "nu": 0.0,
        "dt": 1e-3,
        "t_end": 1.0,
        "integrator": "imex-rk2",
        "cfl_limit": 0.5,
        "buoyancy": True,
    },
    "lp": {"r_pass": 0.5, "r_stop": 1.0},
    "gamma": "log",
    "exponents": {"p0": 1.5, "p1": 4.0},
    "stride": 10,
    "output": "out",
}

TOP_KEYS = {
    "command", "seed", "grid", "solver", "lp", "gamma", "exponents",
    "initial", "stride", "checks", "sweep", "output",
}


def _reject_unknown(section: dict, allowed, where: str):
    unknown = set(section) - set(allowed)
    if unknown:
        raise ConfigError(f"unknown key(s) in {where}: {sorted(unknown)}")


def _merged(defaults: dict, given: dict, where: str) -> dict:
    _reject_unknown(given, defaults, where)
    out = dict(defaults)
    out.update(given)
    return out


@dataclass
class RunConfig:
    command: str
    seed: int
    grid_n: int
    solver: dict
    lp: dict
    gamma_name: str
    p0: float
    p1: float
    initial: dict | None
    stride: int
    checks: list[str] | None
    sweep: dict | None
    output: str

    # --- construction helpers -------------------------------------------
    def grid(self) -> Grid:
        return Grid(self.grid_n)

    def solver_config(self) -> SolverConfig:
        return SolverConfig(**self.solver)

    def family(self) -> LPFamily:
        return build_lp_family(self.grid(), **self.lp)

    def gamma_spec(self) -> GammaSpec:
        return get_gamma(self.gamma_name)

    def initial_fields(self) -> tuple[SpectralField, SpectralField]:
        grid = self.grid()
        fields = {}
        for name in ("omega", "rho"):
            spec = dict(self.initial[name])
            if spec.get("kind") == "snapshot":
                _reject_unknown(spec, {"kind", "path"}, f"initial.{name}")
                field, meta = read_snapshot(spec["path"])
                if meta["n"] != grid.n:
                    raise ConfigError(
                        f"initial.{name}: snapshot n={meta['n']} does not match "
                        f"grid.n={grid.n}"
                    )
                fields[name] = field
            else:
                if spec.get("kind") == "random" and "seed" not in spec:
                    # derive a per-field stream from the run seed
                    spec["seed"] = self.seed * 1000 + (7 if name == "omega" else 13)
                try:
                    fields[name] = make_field(grid, spec)
                except (TypeError, ValueError) as err:
                    raise ConfigError(f"initial.{name}: {err}") from err
        return fields["omega"], fields["rho"]

    # --- canonical form ----------------------------------------------------
    def to_dict(self) -> dict:
        out = {
            "command": self.command,
            "seed": self.seed,
            "grid": {"n": self.grid_n},
            "solver": dict(self.solver),
            "lp": dict(self.lp),
            "gamma": self.gamma_name,
            "exponents": {"p0": self.p0, "p1": self.p1},
            "stride": self.stride,
            "output": self.output,
        }
        if self.initial is not None:
            out["initial"] = self.initial
        if self.checks is not None:
            out["checks"] = self.checks
        if self.sweep is not None:
            out["sweep"] = self.sweep
        return out

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, separators=(",", ":"))

    def config_hash(self) -> str:
        return hashlib.sha256(self.to_json().encode()).hexdigest()[:16]

    def with_override(self, dotted: str, value) -> "RunConfig":
        """New config with one dotted parameter replaced (e.g. solver.kappa)."""
        doc = json.loads(json.dumps(self.to_dict()))
        node = doc
        parts = dotted.split(".")
        for key in parts[:-1]:
            if key not in node:
                raise ConfigError(f"sweep parameter {dotted!r} not found")
            node = node[key]
        if parts[-1] not in node:
            raise ConfigError(f"sweep parameter {dotted!r} not found")
        node[parts[-1]] = value
        return parse_config(json.dumps(doc))


def parse_config(document: str | dict) -> RunConfig:
    """Parse and validate a configuration document (JSON text or dict)."""
    if isinstance(document, (str, bytes)):
        try:
            doc = json.loads(document)
        except json.JSONDecodeError as err:
            raise ConfigError(f"invalid JSON: {err}") from err
    else:
        doc = json.loads(json.dumps(document))
    if not isinstance(doc, dict):
        raise ConfigError("config must be a JSON object")
    _reject_unknown(doc, TOP_KEYS, "config")

    command = doc.get("command")
    if command not in COMMANDS:
        raise ConfigError(f"command must be one of {COMMANDS}, got {command!r}")

    if command != "report" and "seed" not in doc:
        raise ConfigError("seed is required (outputs must be replayable)")
    seed = doc.get("seed", 0)
    if not isinstance(seed, int):
        raise ConfigError(f"seed must be an integer, got {seed!r}")

    grid = _merged(DEFAULTS["grid"], doc.get("grid", {}), "grid")
    n = grid["n"]
    if not isinstance(n, int) or n < 16 or (n & (n - 1)) != 0:
        raise ConfigError(f"grid.n must be a power of two >= 16, got {n!r}")

    solver = _merged(DEFAULTS["solver"], doc.get("solver", {}), "solver")
    try:
        SolverConfig(**solver)
    except (TypeError, ValueError) as err:
        raise ConfigError(f"solver: {err}") from err
    if solver["integrator"] not in INTEGRATORS:
        raise ConfigError(f"solver.integrator must be one of {INTEGRATORS}")

    lp = _merged(DEFAULTS["lp"], doc.get("lp", {}), "lp")

    gamma_name = doc.get("gamma", DEFAULTS["gamma"])
    if gamma_name not in GAMMA_CATALOG:
        raise ConfigError(
            f"gamma must be one of {sorted(GAMMA_CATALOG)}, got {gamma_name!r}"
        )

    exponents = _merged(DEFAULTS["exponents"], doc.get("exponents", {}), "exponents")
    p0, p1 = exponents["p0"], exponents["p1"]
    if not (1.0 < p0 < 2.0 < p1):
        raise ConfigError(f"exponents must satisfy 1 < p0 < 2 < p1, got {p0}, {p1}")

    initial = doc.get("initial")
    if command in ("simulate", "verify", "sweep"):
        if initial is None:
            raise ConfigError(f"initial data is required for {command!r}")
        _reject_unknown(initial, {"omega", "rho"}, "initial")
        for name in ("omega", "rho"):
            if name not in initial:
                raise ConfigError(f"initial.{name} is missing")

    stride = doc.get("stride", DEFAULTS["stride"])
    if not isinstance(stride, int) or stride < 1:
        raise ConfigError(f"stride must be a positive integer, got {stride!r}")

    checks = doc.get("checks")
    if checks is not None:
        from bouslp.harness.checks import CHECKS

        if not isinstance(checks, list) or not all(isinstance(c, str) for c in checks):
            raise ConfigError("checks must be a list of check ids")
        unknown = set(checks) - set(CHECKS)
        if unknown:
            raise ConfigError(f"unknown check id(s): {sorted(unknown)}")

    sweep = doc.get("sweep")
    if command == "sweep":
        if not sweep:
            raise ConfigError("sweep command needs a 'sweep' section")
        _reject_unknown(sweep, {"parameter", "values"}, "sweep")
        if not sweep.get("values"):
            raise ConfigError("sweep.values must be non-empty")
        if not isinstance(sweep.get("parameter"), str):
            raise ConfigError("sweep.parameter must be a dotted key string")

    output = doc.get("output", DEFAULTS["output"])
    if not isinstance(output, str) or not output:
        raise ConfigError("output must be a non-empty path string")

    return RunConfig(
        command=command, seed=seed, grid_n=n, solver=solver, lp=lp,
        gamma_name=gamma_name, p0=float(p0), p1=float(p1), initial=initial,
        stride=stride, checks=checks, sweep=sweep, output=output,
    )


def load_config(path) -> RunConfig:
    return parse_config(Path(path).read_text())
