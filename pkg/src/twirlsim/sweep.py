"""Parameter sweeps of the failure probability: exact vs twirled error models."""

from __future__ import annotations

import logging
import math
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, fields, replace

import numpy as np
from scipy.optimize import brentq

from twirlsim.channels import DecoherenceParams, markovian_tphi, split_gate_error
from twirlsim.protocol import (
    ProtocolConfig,
    SimMode,
    run_enumeration,
    run_montecarlo_pta,
    worker_count,
)
from twirlsim.twirl import pta_decoherence

log = logging.getLogger(__name__)

T_STEP = 25e-9
PSTEP_TOL = 1e-12


def decoherence_for(T1: float, t2_ratio: float, alpha: float, t_step: float) -> DecoherenceParams:
    """Decoherence with T2 = t2_ratio * T1, Tphi from the Markovian relation."""
    return DecoherenceParams(T1=T1, t_step=t_step, Tphi=markovian_tphi(T1, t2_ratio * T1), alpha=alpha)


def p_step(T1: float, t2_ratio: float = 1.0, alpha: float = 0.0, t_step: float = T_STEP) -> float:
    """Total twirled error probability p_X + p_Y + p_Z per step."""
    return pta_decoherence(decoherence_for(T1, t2_ratio, alpha, t_step)).error_probability()


def invert_pstep(target: float, t2_ratio: float = 1.0, alpha: float = 0.0,
                 t_step: float = T_STEP) -> float:
    """T1 giving a per-step error probability ``target`` at fixed T2/T1.

    p_step falls monotonically with T1, so a bracketing root search in
    log T1 around the small-error guess 3 t_step / (4 target) converges.
    """
    if not target > 0:
        raise ValueError(f"p_step target must be positive, got {target}")
    guess = 3 * t_step / (4 * target)

    def f(log_t1):
        return p_step(math.exp(log_t1), t2_ratio, alpha, t_step) - target

    lo, hi = math.log(guess) - 2, math.log(guess) + 2
    while f(lo) < 0:
        lo -= 4
        if lo < math.log(t_step) - 60:
            raise ValueError(f"p_step = {target} is not reachable at T2/T1 = {t2_ratio}")
    while f(hi) > 0:
        hi += 4
    log_t1 = brentq(f, lo, hi, xtol=1e-15, rtol=4 * np.finfo(float).eps, maxiter=500)
    T1 = math.exp(log_t1)
    if abs(p_step(T1, t2_ratio, alpha, t_step) - target) > PSTEP_TOL:
        raise ValueError(f"could not invert p_step = {target} to 1e-12")
    return T1


def default_pstep_grid() -> list[float]:
    return [float(x) for x in np.logspace(-4, -1, 13)]


@dataclass
class SweepConfig:
    t_step: float = T_STEP
    t2_ratio: float = 1.0
    alpha: float = 0.0
    p_steps: list[float] = field(default_factory=default_pstep_grid)
    gate_errors: list[float] = field(default_factory=lambda: [0.0, 1e-4, 1e-3, 1e-2, 0.1])
    phi: float = 0.0
    modes: list[SimMode] = field(default_factory=lambda: [SimMode.EXACT, SimMode.PTA])
    trials: int = 10_000
    max_cycles: int = 100
    prune: float = 1e-12
    budget: float = 1e-6
    seed: int = 0
    record_wall_time: bool = True

    def points(self):
        """Grid points (E, p_step) in emission order."""
        return [(E, p) for E in self.gate_errors for p in self.p_steps]


@dataclass(frozen=True)
class SweepRow:
    p_step: float
    E: float
    phi: float
    T2_over_T1: float
    mode: str
    P: float
    err: float
    cycles_mean: float
    wall_s: float


@dataclass
class SweepResult:
    rows: list[SweepRow] = field(default_factory=list)

    def __len__(self):
        return len(self.rows)

    def select(self, **where) -> list[SweepRow]:
        return [r for r in self.rows if all(getattr(r, k) == v for k, v in where.items())]


class SweepPointError(RuntimeError):
    pass


def point_seed(master: int, index: int) -> int:
    return int(np.random.SeedSequence(master, spawn_key=(index,)).generate_state(1)[0])


def _run_point(cfg: SweepConfig, index: int, E: float, pstep: float) -> list[SweepRow]:
    try:
        if pstep == 0:
            dec = None
        else:
            T1 = invert_pstep(pstep, cfg.t2_ratio, cfg.alpha, cfg.t_step)
            dec = decoherence_for(T1, cfg.t2_ratio, cfg.alpha, cfg.t_step)
        base = ProtocolConfig(
            dec=dec,
            cz=split_gate_error(E, cfg.phi),
            max_cycles=cfg.max_cycles,
            prune=cfg.prune,
            budget=cfg.budget,
        )
        rows = []
        for mode in cfg.modes:
            start = time.perf_counter()
            if mode is SimMode.MONTE_CARLO:
                est = run_montecarlo_pta(replace(base, mode=mode), point_seed(cfg.seed, index),
                                         cfg.trials, threads=1)
                err = est.std_error
            else:
                est = run_enumeration(replace(base, mode=mode))
                err = est.pruned_mass
            wall = time.perf_counter() - start if cfg.record_wall_time else 0.0
            rows.append(SweepRow(pstep, E, cfg.phi, cfg.t2_ratio, mode.value,
                                 est.P, err, est.cycles_mean, wall))
        log.info("p_step=%g E=%g done", pstep, E)
        return rows
    except Exception as exc:
        raise SweepPointError(f"sweep point p_step={pstep}, E={E}, phi={cfg.phi}, "
                              f"T2/T1={cfg.t2_ratio}: {exc}") from exc


def run_sweep(cfg: SweepConfig, threads: int | None = None) -> SweepResult:
    """Failure probability at every grid point and mode, rows in grid order."""
    points = cfg.points()
    threads = threads or worker_count()
    jobs = [(cfg, i, E, p) for i, (E, p) in enumerate(points)]
    if threads > 1 and len(jobs) > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            parts = list(pool.map(lambda job: _run_point(*job), jobs))
    else:
        parts = [_run_point(*job) for job in jobs]
    return SweepResult([row for part in parts for row in part])


def _parse_list(text: str, cast):
    return [cast(v.strip()) for v in text.split(",") if v.strip()]


def _parse_bool(text: str) -> bool:
    if text.strip().lower() in {"1", "true", "yes", "on"}:
        return True
    if text.strip().lower() in {"0", "false", "no", "off"}:
        return False
    raise ValueError(f"not a boolean: {text!r}")


_PARSERS = {
    "p_steps": lambda s: _parse_list(s, float),
    "gate_errors": lambda s: _parse_list(s, float),
    "modes": lambda s: _parse_list(s, SimMode),
    "trials": int,
    "max_cycles": int,
    "seed": int,
    "record_wall_time": _parse_bool,
}


def parse_value(key: str, text: str):
    names = {f.name for f in fields(SweepConfig)}
    if key not in names:
        raise KeyError(f"unknown sweep setting {key!r}")
    return _PARSERS.get(key, float)(text)


def load_config(path, base: SweepConfig | None = None) -> SweepConfig:
    """Read ``key = value`` lines (``#`` comments) on top of ``base``."""
    cfg = replace(base) if base is not None else SweepConfig()
    with open(path) as fh:
        for lineno, line in enumerate(fh, 1):
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ValueError(f"{path}:{lineno}: expected key = value")
            key, value = (s.strip() for s in line.split("=", 1))
            try:
                setattr(cfg, key, parse_value(key, value))
            except (KeyError, ValueError) as exc:
                raise ValueError(f"{path}:{lineno}: {exc}") from exc
    return cfg
