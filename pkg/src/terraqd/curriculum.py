"""Gaussian-process archive traversal and the single-feature baseline.

The GP uses the archive's fitness map as its prior mean and learns from
per-terrain outcomes; after each terrain it discards everything the model
now estimates to be easier, so difficulty only ratchets upward.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import solve_triangular

from . import generators
from .archive import BINS, Archive
from .difficulty import EvaluatorConfig, proxy_difficulty
from .features import FeatureDescriptor, describe


class NumericalError(RuntimeError):
    pass


class ExhaustedCurriculum(RuntimeError):
    pass


@dataclass(frozen=True)
class GpConfig:
    rho: float = 0.4
    alpha: float = 0.9
    kappa: float = 0.05
    noise_var: float = 0.001

    def __post_init__(self):
        if self.rho <= 0 or not 0 < self.alpha <= 1 or self.kappa < 0 or self.noise_var <= 0:
            raise ValueError("invalid GP configuration")


def matern52(dist, rho):
    """Matern covariance, smoothness 5/2, unit signal variance."""
    s = math.sqrt(5.0) * np.asarray(dist) / rho
    return (1.0 + s + s * s / 3.0) * np.exp(-s)


class GaussianProcess:
    """Exact GP regression with a fixed prior mean function.

    Coordinates are arbitrary (n, d) arrays; the archive front end feeds
    bin coordinates normalized to [0, 1]^2.
    """

    def __init__(self, rho: float, noise_var: float, prior_fn=None):
        self.rho = rho
        self.noise_var = noise_var
        self.prior_fn = prior_fn or (lambda x: np.zeros(len(x)))
        self._x = None
        self._y = None
        self._chol = None
        self._alpha = None

    def _refresh_alpha(self):
        resid = self._y - self.prior_fn(self._x)
        tmp = solve_triangular(self._chol, resid, lower=True)
        self._alpha = solve_triangular(self._chol.T, tmp, lower=False)

    def fit(self, x, y):
        x = np.atleast_2d(np.asarray(x, dtype=np.float64))
        y = np.asarray(y, dtype=np.float64)
        d = np.linalg.norm(x[:, None, :] - x[None, :, :], axis=-1)
        k = matern52(d, self.rho) + self.noise_var * np.eye(len(x))
        try:
            chol = np.linalg.cholesky(k)
        except np.linalg.LinAlgError as exc:
            raise NumericalError(f"kernel matrix not positive definite: {exc}") from None
        self._x = x
        self._y = y
        self._chol = chol
        self._refresh_alpha()
        return self

    def add_point(self, x, y):
        """Append one observation, extending the Cholesky factor in O(n^2)."""
        x = np.atleast_2d(np.asarray(x, dtype=np.float64))
        if self._x is None:
            return self.fit(x, [y])
        b = matern52(np.linalg.norm(self._x - x, axis=-1), self.rho)
        l = solve_triangular(self._chol, b, lower=True)
        d2 = 1.0 + self.noise_var - l @ l
        if d2 <= 0.0:
            raise NumericalError("kernel matrix update lost positive definiteness")
        n = len(self._x)
        chol = np.zeros((n + 1, n + 1))
        chol[:n, :n] = self._chol
        chol[n, :n] = l
        chol[n, n] = math.sqrt(d2)
        self._x = np.vstack([self._x, x])
        self._y = np.append(self._y, y)
        self._chol = chol
        self._refresh_alpha()
        return self

    def posterior(self, x):
        """Returns (mean, variance) arrays at the query coordinates."""
        x = np.atleast_2d(np.asarray(x, dtype=np.float64))
        prior = np.asarray(self.prior_fn(x), dtype=np.float64)
        if self._x is None or len(self._x) == 0:
            return prior, np.ones(len(x))
        d = np.linalg.norm(x[:, None, :] - self._x[None, :, :], axis=-1)
        ks = matern52(d, self.rho)
        mean = prior + ks @ self._alpha
        v = solve_triangular(self._chol, ks.T, lower=True)
        var = 1.0 - np.einsum("ij,ij->j", v, v)
        return mean, np.maximum(var, 0.0)


def bin_coords(bins):
    """Archive bins normalized to [0, 1]^2."""
    return np.array([(i / (BINS - 1), j / (BINS - 1)) for i, j in bins], dtype=np.float64)


class GpModel:
    """GP over archive bins with the archive fitness map as prior mean."""

    def __init__(self, archive: Archive, config: GpConfig = GpConfig()):
        self.config = config
        self._prior = {b: 1.0 - c.difficulty for b, c in archive.bins.items()}
        self._coord_prior = {tuple(np.round(c, 12)): p
                             for c, p in zip(bin_coords(self._prior), self._prior.values())}
        self.observations = []
        self._gp = GaussianProcess(config.rho, config.noise_var, prior_fn=self._prior_at)
        self._fitted = False

    def _prior_at(self, coords):
        return np.array([self._coord_prior.get(tuple(np.round(c, 12)), 0.0) for c in coords])

    def add_observation(self, b, fitness_value: float):
        self.observations.append((b, float(fitness_value)))
        self._gp.add_point(bin_coords([b])[0], float(fitness_value))
        self._fitted = True

    def posterior(self, bins):
        if not bins:
            return np.empty(0), np.empty(0)
        coords = bin_coords(bins)
        if not self._fitted:
            return self._prior_at(coords), np.ones(len(coords))
        return self._gp.posterior(coords)


def select_next(model: GpModel, remaining):
    """Bin maximizing posterior mean + kappa * posterior stddev; ties go to
    the lexicographically lowest bin."""
    if not remaining:
        raise ExhaustedCurriculum("no terrains remain")
    bins = sorted(remaining)
    mean, var = model.posterior(bins)
    acq = mean + model.config.kappa * np.sqrt(var)
    return bins[int(np.argmax(acq))]


def prune_easier(model: GpModel, remaining, just_trained):
    """Drop the trained bin plus everything the model now rates easier."""
    bins = sorted(remaining)
    mean, _ = model.posterior(bins)
    ref, _ = model.posterior([just_trained])
    keep = {b for b, m in zip(bins, mean) if m <= ref[0]}
    keep.discard(just_trained)
    return keep


@dataclass(frozen=True)
class TraceEntry:
    epochs: int
    hardest_distance: float
    bin: tuple
    observed_fitness: float


@dataclass
class CurriculumTrace:
    entries: list = field(default_factory=list)

    def append(self, entry: TraceEntry):
        if self.entries and self.entries[-1].epochs == entry.epochs:
            self.entries[-1] = entry
        else:
            self.entries.append(entry)

    def final_hardest(self) -> float:
        return self.entries[-1].hardest_distance if self.entries else 0.0

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["epoch", "hardest_distance", "bin_i", "bin_j", "observed_fitness"])
        for e in self.entries:
            w.writerow([e.epochs, repr(e.hardest_distance), e.bin[0], e.bin[1],
                        repr(e.observed_fitness)])
        return buf.getvalue()


class Learner:
    """Contract: train(terrain, epochs) mutates skill; evaluate(terrain) is
    a pure fitness probe in [0, 1]."""

    def train(self, hm, epochs: int):
        raise NotImplementedError

    def evaluate(self, hm) -> float:
        raise NotImplementedError


class CapabilityLearner(Learner):
    """Desk-scale stand-in for an RL policy: every epoch of training raises
    the step rise the walker can climb."""

    def __init__(self, eval_config: EvaluatorConfig = EvaluatorConfig(),
                 gain: float = 1e-4, capability: float = 0.0, seed: int = 0):
        self.eval_config = eval_config
        self.gain = gain
        self.capability = capability
        self.seed = seed

    def train(self, hm, epochs: int):
        self.capability += self.gain * epochs

    def evaluate(self, hm) -> float:
        cfg = EvaluatorConfig(attempts=self.eval_config.attempts,
                              best_of=self.eval_config.best_of,
                              robot_height=self.eval_config.robot_height,
                              capability=self.capability)
        return 1.0 - proxy_difficulty(hm, cfg, np.random.default_rng(self.seed))


def _feature_distance(cell) -> float:
    return math.hypot(cell.features[0], cell.features[1])


def _train_on_terrain(learner, hm, gp_cfg, epochs_per_round, max_epochs, eval_cap, epochs_used):
    """Alternate evaluate/train until the success threshold or the
    evaluation cap; returns (final fitness, epochs_used, success)."""
    fit = learner.evaluate(hm)
    evals = 1
    while fit < gp_cfg.alpha and evals < eval_cap and epochs_used < max_epochs:
        learner.train(hm, epochs_per_round)
        epochs_used += epochs_per_round
        fit = learner.evaluate(hm)
        evals += 1
    return fit, epochs_used, fit >= gp_cfg.alpha


def run_curriculum(archive: Archive, learner: Learner, cfg: GpConfig = GpConfig(),
                   epochs_per_round: int = 40, max_epochs: int = 30000,
                   eval_cap: int = 100) -> CurriculumTrace:
    """GP-guided traversal from easy to hard terrain."""
    if not archive.bins:
        raise ExhaustedCurriculum("archive is empty")
    model = GpModel(archive, cfg)
    remaining = set(archive.bins)
    trace = CurriculumTrace()
    epochs_used = 0
    hardest = 0.0
    while remaining and epochs_used < max_epochs:
        b = select_next(model, remaining)
        cell = archive.bins[b]
        hm = generators.generate(cell.genome, archive.resolution, archive.vertical_scale)
        fit, epochs_used, success = _train_on_terrain(
            learner, hm, cfg, epochs_per_round, max_epochs, eval_cap, epochs_used)
        model.add_observation(b, fit)
        if success:
            hardest = max(hardest, _feature_distance(cell))
        trace.append(TraceEntry(epochs_used, hardest, b, fit))
        remaining = prune_easier(model, remaining, b)
    return trace


def classic_cl(archive: Archive, learner: Learner, cfg: GpConfig = GpConfig(),
               feature_kind: str = "Roughness", stride: int = 5,
               epochs_per_round: int = 40, max_epochs: int = 30000,
               eval_cap: int = 100) -> CurriculumTrace:
    """Baseline: sort the archive by one feature, train on every
    `stride`-th terrain in ascending order. No GP, no pruning."""
    if not archive.bins:
        raise ExhaustedCurriculum("archive is empty")

    def sort_value(cell):
        if archive.pair.f1.kind == feature_kind:
            return cell.features[0]
        if archive.pair.f2.kind == feature_kind:
            return cell.features[1]
        d = FeatureDescriptor(feature_kind, archive.pair.f1.kernel, archive.pair.f1.stride)
        return describe(generators.generate(cell.genome, archive.resolution,
                                            archive.vertical_scale), d)

    ordered = sorted(archive.bins, key=lambda b: (sort_value(archive.bins[b]), b))
    trace = CurriculumTrace()
    epochs_used = 0
    hardest = 0.0
    for b in ordered[::stride]:
        if epochs_used >= max_epochs:
            break
        cell = archive.bins[b]
        hm = generators.generate(cell.genome, archive.resolution, archive.vertical_scale)
        fit, epochs_used, success = _train_on_terrain(
            learner, hm, cfg, epochs_per_round, max_epochs, eval_cap, epochs_used)
        if success:
            hardest = max(hardest, _feature_distance(cell))
        trace.append(TraceEntry(epochs_used, hardest, b, fit))
    return trace
