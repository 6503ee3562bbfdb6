"""Command-line front end.

Subcommands::

    superrad single     one random realization plus reference curves
    superrad ensemble   averaged I(t), C(t) with standard errors
    superrad sweep      pulse statistics versus k0R
    superrad darkcheck  darkness residual of the subradiant state
    superrad reference  closed-form curves

Options come from an optional ``--config`` file of ``key = value`` lines
(``#`` starts a comment) and from flags; flags win. Exit status is 0 on
success, 1 for usage or configuration errors and 2 for runtime failures.
"""

from __future__ import annotations

import argparse
import logging
import os
import sys
from dataclasses import asdict, dataclass, fields, replace

import numpy as np

from . import __version__
from .couplings import REGIMES, build_couplings
from .ensemble import EnsembleSpec, geometric_k0r_grid, run_ensemble, sweep
from .geometry import XI_MIN_DEFAULT, SamplingError, realization_seed, sample_configuration
from .io import write_csv, write_series, write_sweep
from .liouvillian import LiouvillianMatrix, darkness_residual
from .observables import trajectory
from .propagator import PropagationError, TimeGrid, evolve_vectors
from .reference import SUPPORTED_N, independent_emission, pure_superradiance
from .state import INITIAL_STATES, initial_state, subradiant_state

log = logging.getLogger("superrad")

COMMANDS = ("single", "ensemble", "sweep", "darkcheck", "reference")


class UsageError(Exception):
    pass


@dataclass
class RunConfig:
    atoms: int = 3
    k0r: tuple = (0.466,)
    samples: int | None = None
    seed: int = 0
    regime: str = "exact"
    initial: str = "fully_excited"
    tmax: float | None = None
    grid: str | None = None
    points: int | None = None
    t1: float | None = None
    per_decade: int | None = None
    workers: int = 1
    out: str | None = None
    approx_out: str | None = None
    xi_min: float = XI_MIN_DEFAULT
    f0: float = 0.0

    def validate(self, command: str):
        if self.atoms < 1:
            raise UsageError("atoms must be positive")
        if command in ("single", "ensemble", "sweep") and self.atoms < 2:
            raise UsageError("simulations need at least two atoms")
        if not self.k0r:
            raise UsageError("empty k0R list")
        if any(not k > 0 for k in self.k0r):
            raise UsageError("k0R values must be positive")
        if self.regime not in REGIMES:
            raise UsageError(f"unknown regime {self.regime!r}; choose from {', '.join(REGIMES)}")
        if self.initial not in INITIAL_STATES:
            raise UsageError(f"unknown initial state {self.initial!r}")
        if self.initial == "subradiant" and self.atoms != 3:
            raise UsageError("the subradiant initial state needs atoms = 3")
        if self.grid not in (None, "uniform", "log"):
            raise UsageError("grid must be 'uniform' or 'log'")
        for name in ("samples", "tmax", "points", "t1", "per_decade", "workers", "xi_min"):
            value = getattr(self, name)
            if value is not None and not value > 0:
                raise UsageError(f"{name} must be positive")
        if self.seed < 0:
            raise UsageError("seed must be non-negative")
        if command != "darkcheck" and not self.out:
            raise UsageError("an output path (--out) is required")
        if command in ("single", "ensemble", "darkcheck") and len(self.k0r) > 1 and "{k0r}" not in (self.out or "{k0r}"):
            raise UsageError("several k0R values need an output pattern containing '{k0r}'")

    def make_grid(self, command: str) -> TimeGrid:
        kind = self.grid
        if kind is None:
            kind = "log" if command == "sweep" or self.initial == "subradiant" else "uniform"
        if kind == "uniform":
            return TimeGrid.uniform(self.tmax or 10.0, self.points or 2000)
        if command != "sweep" and self.initial == "subradiant":
            t1, n_lin, tmax, per = 1.0, 200, 1e5, 40
        else:
            t1, n_lin, tmax, per = 1e-6, 4, 10.0, 60
        tmax = self.tmax or tmax
        t1 = self.t1 or min(t1, tmax / 10)
        return TimeGrid.log_after(t1, self.points or n_lin, tmax, self.per_decade or per)

    def spec(self, command: str, k0R: float) -> EnsembleSpec:
        default_n = 10000 if self.initial == "subradiant" else 5000
        return EnsembleSpec(
            n_atoms=self.atoms,
            k0R=k0R,
            n_samples=self.samples or default_n,
            base_seed=self.seed,
            regime=self.regime,
            initial=self.initial,
            grid=self.make_grid(command),
            xi_min=self.xi_min,
            f0=self.f0,
        )


def _float_list(text: str) -> tuple:
    try:
        return tuple(float(v) for v in str(text).split(",") if v.strip())
    except ValueError:
        raise UsageError(f"bad k0R list {text!r}") from None


_CONVERT = {f.name: f.type for f in fields(RunConfig)}


def _convert(key: str, raw: str):
    kind = _CONVERT[key]
    try:
        if key == "k0r":
            return _float_list(raw)
        if "int" in kind:
            return int(raw)
        if "float" in kind:
            return float(raw)
    except ValueError:
        raise UsageError(f"bad value for {key}: {raw!r}") from None
    return raw


def read_config_file(path) -> dict:
    """Parse ``key = value`` lines; unknown keys are errors."""
    out = {}
    try:
        with open(path) as fh:
            lines = fh.readlines()
    except OSError as exc:
        raise UsageError(f"cannot read config file: {exc}") from None
    for lineno, line in enumerate(lines, 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, value = line.partition("=")
        key = key.strip().lower().replace("-", "_")
        if not sep:
            raise UsageError(f"{path}:{lineno}: expected 'key = value'")
        if key not in _CONVERT:
            raise UsageError(f"{path}:{lineno}: unknown key {key!r}")
        out[key] = _convert(key, value.strip())
    return out


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="superrad", description="Exact master-equation simulations of small atomic ensembles.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    sub = parser.add_subparsers(dest="command", metavar="COMMAND", parser_class=_Parser)
    helps = {
        "single": "one realization with reference curves",
        "ensemble": "average over random configurations",
        "sweep": "pulse statistics versus k0R",
        "darkcheck": "darkness residual of the subradiant state",
        "reference": "closed-form reference curves",
    }
    for name in COMMANDS:
        p = sub.add_parser(name, help=helps[name])
        p.add_argument("--config", help="key = value configuration file")
        p.add_argument("--atoms", type=int)
        p.add_argument("--k0r", help="k0R value (comma separated list for sweeps)")
        p.add_argument("--samples", type=int)
        p.add_argument("--seed", type=int)
        p.add_argument("--regime", choices=REGIMES)
        p.add_argument("--initial", choices=sorted(INITIAL_STATES))
        p.add_argument("--tmax", type=float)
        p.add_argument("--grid", choices=("uniform", "log"))
        p.add_argument("--points", type=int, help="uniform points (or linear points before t1 on a log grid)")
        p.add_argument("--t1", type=float, help="end of the linear part of a log grid")
        p.add_argument("--per-decade", type=int, dest="per_decade")
        p.add_argument("--workers", type=int)
        p.add_argument("--xi-min", type=float, dest="xi_min")
        p.add_argument("--f0", type=float)
        p.add_argument("--out")
        if name == "sweep":
            p.add_argument("--approx-out", dest="approx_out", help="also sweep with the short-distance couplings")
    return parser


def load_config(args) -> RunConfig:
    values = read_config_file(args.config) if args.config else {}
    for f in fields(RunConfig):
        flag = getattr(args, f.name, None)
        if flag is not None:
            values[f.name] = _convert(f.name, flag) if f.name == "k0r" else flag
    if args.command == "sweep" and "k0r" not in values:
        values["k0r"] = tuple(float(k) for k in geometric_k0r_grid(4, 3))
    cfg = RunConfig(**values)
    cfg.validate(args.command)
    return cfg


def _meta(command: str, cfg: RunConfig, **extra) -> dict:
    meta = {"superrad_version": __version__, "command": command}
    for key, value in asdict(cfg).items():
        if key == "k0r":
            value = ",".join(repr(float(v)) for v in value)
        meta[key] = value
    meta.update(extra)
    return meta


def _out_path(cfg: RunConfig, k0R: float) -> str:
    return cfg.out.replace("{k0r}", f"{k0R:g}")


def cmd_single(cfg: RunConfig) -> int:
    grid = cfg.make_grid("single")
    t = grid.points
    for k0R in cfg.k0r:
        spec = cfg.spec("single", k0R)
        config = sample_configuration(cfg.atoms, k0R, cfg.xi_min, realization_seed(cfg.seed, 0))
        gen = LiouvillianMatrix(build_couplings(config, cfg.regime, cfg.f0))
        states, top = evolve_vectors(gen, initial_state(cfg.initial, cfg.atoms), grid)
        i_t, c_t = trajectory(states, gen, top)
        if cfg.initial == "fully_excited" and cfg.atoms in SUPPORTED_N:
            i_pure, c_pure = pure_superradiance(cfg.atoms, t)
        else:
            i_pure = c_pure = np.full(t.size, np.nan)
        i_ind, c_ind = independent_emission(cfg.atoms, t)
        cols = {"t": t, "I": i_t, "C": c_t, "I_pure": i_pure, "C_pure": c_pure, "I_indep": i_ind, "C_indep": c_ind}
        write_csv(_out_path(cfg, k0R), cols, _meta("single", cfg, k0R=k0R, spacing_mode=spec.grid.spacing_mode))
        log.info("single realization at k0R=%g written", k0R)
    return 0


def cmd_ensemble(cfg: RunConfig) -> int:
    for k0R in cfg.k0r:
        spec = cfg.spec("ensemble", k0R)
        series = run_ensemble(spec, workers=cfg.workers)
        write_series(_out_path(cfg, k0R), series, _meta("ensemble", cfg, k0R=k0R, n_samples=series.n_samples))
        log.info("ensemble at k0R=%g (%d samples) written", k0R, series.n_samples)
    return 0


def cmd_sweep(cfg: RunConfig) -> int:
    spec = cfg.spec("sweep", cfg.k0r[0])
    result = sweep(spec, cfg.k0r, workers=cfg.workers)
    write_sweep(cfg.out, result, _meta("sweep", cfg))
    if cfg.approx_out:
        approx = sweep(replace(spec, regime="close"), cfg.k0r, workers=cfg.workers)
        write_sweep(cfg.approx_out, approx, _meta("sweep", replace(cfg, regime="close")))
    return 0


def cmd_darkcheck(cfg: RunConfig) -> int:
    if cfg.atoms != 3:
        raise UsageError("darkcheck uses the three-atom subradiant state (atoms = 3)")
    rho = subradiant_state(3)
    for k0R in cfg.k0r:
        config = sample_configuration(3, k0R, cfg.xi_min, realization_seed(cfg.seed, 0))
        residual = darkness_residual(rho, build_couplings(config, cfg.regime, cfg.f0))
        print(f"k0R={k0R:g} regime={cfg.regime} seed={cfg.seed} darkness_residual={residual:.6e}")
    return 0


def cmd_reference(cfg: RunConfig) -> int:
    if cfg.atoms not in SUPPORTED_N:
        raise UsageError(f"closed forms exist for atoms in {SUPPORTED_N}")
    grid = cfg.make_grid("reference")
    t = grid.points
    i_pure, c_pure = pure_superradiance(cfg.atoms, t)
    i_ind, c_ind = independent_emission(cfg.atoms, t)
    cols = {"t": t, "I_pure": i_pure, "C_pure": c_pure, "I_indep": i_ind, "C_indep": c_ind}
    write_csv(cfg.out, cols, _meta("reference", cfg))
    return 0


_HANDLERS = {
    "single": cmd_single,
    "ensemble": cmd_ensemble,
    "sweep": cmd_sweep,
    "darkcheck": cmd_darkcheck,
    "reference": cmd_reference,
}


def _check_outputs(cfg: RunConfig):
    # fail before a long computation, not after it
    for path in (cfg.out, cfg.approx_out):
        if path:
            parent = os.path.dirname(path) or "."
            if not os.path.isdir(parent):
                raise FileNotFoundError(f"output directory {parent!r} does not exist")


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        if args.command is None:
            raise UsageError("a command is required: " + ", ".join(COMMANDS))
        logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
        cfg = load_config(args)
    except UsageError as exc:
        print(f"superrad: error: {exc}", file=sys.stderr)
        return 1
    try:
        _check_outputs(cfg)
        return _HANDLERS[args.command](cfg)
    except UsageError as exc:
        print(f"superrad: error: {exc}", file=sys.stderr)
        return 1
    except (OSError, SamplingError, PropagationError, ValueError, FloatingPointError) as exc:
        print(f"superrad: failed: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
