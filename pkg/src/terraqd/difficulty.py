"""Terrain difficulty: traversability gate and the proxy lane walker.

The physics-based evaluator is abstracted behind ``Evaluator``; the default
binding is a greedy walker that advances along a row while each step's
metric rise stays within its capability. An external evaluator can plug in
over a line-delimited subprocess protocol.
"""

from __future__ import annotations

import subprocess
import tempfile
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import kernels
from .heightmap import DimensionError, Heightmap, write_pgm

DEFAULT_ROBOT_HEIGHT = 1.75


@dataclass(frozen=True)
class TraversabilityConfig:
    k: int = 26  # approximate step length in cells
    robot_height: float = DEFAULT_ROBOT_HEIGHT

    @property
    def threshold(self) -> float:
        return self.robot_height / 3.0


@dataclass(frozen=True)
class EvaluatorConfig:
    attempts: int = 20
    best_of: int = 5
    robot_height: float = DEFAULT_ROBOT_HEIGHT
    capability: float = 0.3  # max climbable step rise in metres

    def __post_init__(self):
        if self.best_of > self.attempts:
            raise ValueError("best_of cannot exceed attempts")
        if self.robot_height <= 0 or self.capability < 0:
            raise ValueError("robot_height must be positive and capability non-negative")


def check_terrain(hm: Heightmap, cfg: TraversabilityConfig = TraversabilityConfig()) -> bool:
    """True iff no k-by-k window's metric height range exceeds the incline
    threshold (robot_height / 3)."""
    if cfg.k > min(hm.width, hm.height):
        raise DimensionError(f"window {cfg.k} exceeds raster size {hm.height}x{hm.width}")
    worst = kernels.max_window_range(hm.values, cfg.k) * hm.vertical_scale
    return worst <= cfg.threshold


def walk_row(metres_row: np.ndarray, capability: float) -> float:
    """Fraction of the row span covered before a step rise exceeds capability."""
    rises = np.diff(metres_row)
    blocked = np.nonzero(rises > capability)[0]
    reached = blocked[0] if blocked.size else len(metres_row) - 1
    return reached / (len(metres_row) - 1)


def proxy_difficulty(hm: Heightmap, cfg: EvaluatorConfig, rng) -> float:
    """1 - mean covered distance over the best `best_of` of `attempts` trials."""
    metres = hm.metres()
    distances = np.empty(cfg.attempts)
    for t in range(cfg.attempts):
        row = int(rng.integers(0, hm.height))
        distances[t] = walk_row(metres[row], cfg.capability)
    best = np.sort(distances)[::-1][: cfg.best_of]
    return float(np.clip(1.0 - best.mean(), 0.0, 1.0))


def fitness(difficulty: float) -> float:
    if not 0.0 <= difficulty <= 1.0:
        raise ValueError(f"difficulty {difficulty} outside [0, 1]")
    return 1.0 - difficulty


class Evaluator:
    """Contract: evaluate(heightmap, capability) -> difficulty in [0, 1]."""

    def evaluate(self, hm: Heightmap, capability: float) -> float:
        raise NotImplementedError


class ProxyWalkerEvaluator(Evaluator):
    """Default evaluator; seeded per call so evaluation is reproducible."""

    def __init__(self, config: EvaluatorConfig = EvaluatorConfig(), seed: int = 0):
        self.config = config
        self.seed = seed

    def evaluate(self, hm: Heightmap, capability: float) -> float:
        cfg = EvaluatorConfig(attempts=self.config.attempts, best_of=self.config.best_of,
                              robot_height=self.config.robot_height, capability=capability)
        rng = np.random.default_rng(self.seed)
        return proxy_difficulty(hm, cfg, rng)


class SubprocessEvaluator(Evaluator):
    """Drives an external evaluator over stdin/stdout.

    Request: one line "<pgm-path> <capability>". Response: one line with a
    single decimal difficulty in [0, 1].
    """

    def __init__(self, argv, workdir=None):
        self._proc = subprocess.Popen(
            argv, stdin=subprocess.PIPE, stdout=subprocess.PIPE, text=True, cwd=workdir
        )
        self._tmp = tempfile.TemporaryDirectory(prefix="terraqd-eval-")
        self._counter = 0

    def evaluate(self, hm: Heightmap, capability: float) -> float:
        path = Path(self._tmp.name) / f"terrain-{self._counter}.pgm"
        self._counter += 1
        write_pgm(hm, path)
        self._proc.stdin.write(f"{path} {capability}\n")
        self._proc.stdin.flush()
        line = self._proc.stdout.readline()
        if not line:
            raise RuntimeError("external evaluator closed its output stream")
        value = float(line.strip())
        if not 0.0 <= value <= 1.0:
            raise RuntimeError(f"external evaluator returned {value}, outside [0, 1]")
        return value

    def close(self):
        if self._proc.stdin:
            self._proc.stdin.close()
        self._proc.wait(timeout=10)
        self._tmp.cleanup()

    def __enter__(self):
        return self

    def __exit__(self, *exc):
        self.close()
