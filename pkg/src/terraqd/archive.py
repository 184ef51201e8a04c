"""MAP-Elites archive over two feature descriptors, with evolution loop."""

from __future__ import annotations

import json
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import generators
from .difficulty import EvaluatorConfig, TraversabilityConfig, check_terrain, proxy_difficulty
from .features import FeatureDescriptor, FeaturePair, describe
from .heightmap import DEFAULT_VERTICAL_SCALE

BINS = 50


class ConfigurationError(ValueError):
    pass


@dataclass(frozen=True)
class ArchiveCell:
    genome: object
    features: tuple
    difficulty: float
    bin: tuple


@dataclass
class Archive:
    pair: FeaturePair
    generator_kind: str
    resolution: int = generators.DEFAULT_RESOLUTION
    vertical_scale: float = DEFAULT_VERTICAL_SCALE
    bins: dict = field(default_factory=dict)

    def cells(self):
        return [self.bins[b] for b in sorted(self.bins)]

    def __len__(self):
        return len(self.bins)


@dataclass(frozen=True)
class EvolutionConfig:
    generations: int = 5000
    init_pop: int = 100
    batch: int = 20
    master_seed: int = 0

    def __post_init__(self):
        if self.init_pop < 1 or self.batch < 1 or self.generations < 0:
            raise ValueError("population and batch sizes must be >= 1")


def bin_index(features, ranges, bins: int = BINS):
    out = []
    for f, (lo, hi) in zip(features, ranges):
        i = math.floor((f - lo) / (hi - lo) * bins)
        out.append(min(max(i, 0), bins - 1))
    return tuple(out)


def insert(archive: Archive, cell: ArchiveCell) -> str:
    """Lowest-difficulty-wins replacement; ties keep the incumbent."""
    incumbent = archive.bins.get(cell.bin)
    if incumbent is None:
        archive.bins[cell.bin] = cell
        return "placed"
    if cell.difficulty < incumbent.difficulty:
        archive.bins[cell.bin] = cell
        return "replaced"
    return "rejected"


def coverage(archive: Archive) -> float:
    return len(archive.bins) * 100.0 / (BINS * BINS)


class ProxyDifficultyFn:
    """Picklable difficulty evaluator: proxy walker seeded per terrain."""

    def __init__(self, config: EvaluatorConfig = EvaluatorConfig()):
        self.config = config

    def __call__(self, hm, seed):
        return proxy_difficulty(hm, self.config, np.random.default_rng(seed))


def _expand_and_score(args):
    genome, pair, resolution, vertical_scale, difficulty_fn, eval_seed = args
    hm = generators.generate(genome, resolution, vertical_scale)
    f1 = describe(hm, pair.f1)
    f2 = describe(hm, pair.f2)
    return f1, f2, difficulty_fn(hm, eval_seed)


def _score_batch(tasks, jobs, pool):
    if pool is None:
        return [_expand_and_score(t) for t in tasks]
    return list(pool.map(_expand_and_score, tasks, chunksize=max(1, len(tasks) // jobs)))


def evolve(kind: str, pair: FeaturePair, cfg: EvolutionConfig, difficulty_fn,
           resolution: int = generators.DEFAULT_RESOLUTION,
           vertical_scale: float = DEFAULT_VERTICAL_SCALE, jobs: int = 1) -> Archive:
    """Seed with random genomes, then mutate archive members for `generations`
    rounds of `batch` offspring. Deterministic given master_seed, for any jobs.

    RNG streams are keyed by (master_seed, stage, generation, index) so the
    result does not depend on evaluation order.
    """
    archive = Archive(pair=pair, generator_kind=kind,
                      resolution=resolution, vertical_scale=vertical_scale)
    seed = cfg.master_seed
    pool = ProcessPoolExecutor(max_workers=jobs) if jobs > 1 else None
    try:
        genomes = [generators.random_genome(kind, np.random.default_rng([seed, 0, i]))
                   for i in range(cfg.init_pop)]
        tasks = [(g, pair, resolution, vertical_scale, difficulty_fn, (seed, 2, 0, i))
                 for i, g in enumerate(genomes)]
        for g, (f1, f2, diff) in zip(genomes, _score_batch(tasks, jobs, pool)):
            b = bin_index((f1, f2), pair.ranges)
            insert(archive, ArchiveCell(genome=g, features=(f1, f2), difficulty=diff, bin=b))

        select_rng = np.random.default_rng([seed, 3])
        for gen in range(1, cfg.generations + 1):
            occupied = sorted(archive.bins)
            parents = [archive.bins[occupied[select_rng.integers(len(occupied))]].genome
                       for _ in range(cfg.batch)]
            offspring = [generators.mutate(p, np.random.default_rng([seed, 1, gen, i]))
                         for i, p in enumerate(parents)]
            tasks = [(g, pair, resolution, vertical_scale, difficulty_fn, (seed, 2, gen, i))
                     for i, g in enumerate(offspring)]
            for g, (f1, f2, diff) in zip(offspring, _score_batch(tasks, jobs, pool)):
                b = bin_index((f1, f2), pair.ranges)
                insert(archive, ArchiveCell(genome=g, features=(f1, f2), difficulty=diff, bin=b))
    finally:
        if pool is not None:
            pool.shutdown()
    return archive


def prune_impossible(archive: Archive, tc: TraversabilityConfig) -> Archive:
    """Drop every cell whose regenerated terrain fails the incline check."""
    kept = {}
    for b, cell in archive.bins.items():
        hm = generators.generate(cell.genome, archive.resolution, archive.vertical_scale)
        if check_terrain(hm, tc):
            kept[b] = cell
    return Archive(pair=archive.pair, generator_kind=archive.generator_kind,
                   resolution=archive.resolution, vertical_scale=archive.vertical_scale,
                   bins=kept)


def combine(archives) -> Archive:
    """Union of archives, keeping the lowest-difficulty cell per bin."""
    if not archives:
        raise ConfigurationError("need at least one archive to combine")
    first = archives[0]
    for a in archives[1:]:
        if a.pair != first.pair or a.resolution != first.resolution \
                or a.vertical_scale != first.vertical_scale:
            raise ConfigurationError("archives must share feature pair, ranges and resolution")
    out = Archive(pair=first.pair, generator_kind="combined",
                  resolution=first.resolution, vertical_scale=first.vertical_scale)
    for a in archives:
        for cell in a.cells():
            insert(out, cell)
    return out


def calibrate_ranges(kinds, f1: FeatureDescriptor, f2: FeatureDescriptor,
                     n_genomes: int = 1000, seed: int = 0,
                     resolution: int = generators.DEFAULT_RESOLUTION,
                     percentile: float = 99.0):
    """Shared archive ranges: [0, p99] of each feature over a random corpus
    pooled across all requested generator kinds."""
    vals1, vals2 = [], []
    for i in range(n_genomes):
        kind = kinds[i % len(kinds)]
        g = generators.random_genome(kind, np.random.default_rng([seed, 4, i]))
        hm = generators.generate(g, resolution)
        vals1.append(describe(hm, f1))
        vals2.append(describe(hm, f2))
    return ((0.0, float(np.percentile(vals1, percentile))),
            (0.0, float(np.percentile(vals2, percentile))))


def to_json(archive: Archive) -> str:
    doc = {
        "generator_kind": archive.generator_kind,
        "resolution": archive.resolution,
        "vertical_scale": archive.vertical_scale,
        "pair": {
            "f1": {"kind": archive.pair.f1.kind, "kernel": archive.pair.f1.kernel,
                   "stride": archive.pair.f1.stride},
            "f2": {"kind": archive.pair.f2.kind, "kernel": archive.pair.f2.kernel,
                   "stride": archive.pair.f2.stride},
            "ranges": [list(r) for r in archive.pair.ranges],
        },
        "cells": [
            {"bin": list(c.bin), "features": list(c.features), "difficulty": c.difficulty,
             "genome": generators.genome_to_dict(c.genome)}
            for c in archive.cells()
        ],
    }
    return json.dumps(doc, sort_keys=True, separators=(",", ":")) + "\n"


def from_json(text: str) -> Archive:
    doc = json.loads(text)
    pair = FeaturePair(
        f1=FeatureDescriptor(**doc["pair"]["f1"]),
        f2=FeatureDescriptor(**doc["pair"]["f2"]),
        ranges=tuple(tuple(r) for r in doc["pair"]["ranges"]),
    )
    archive = Archive(pair=pair, generator_kind=doc["generator_kind"],
                      resolution=doc["resolution"], vertical_scale=doc["vertical_scale"])
    for c in doc["cells"]:
        cell = ArchiveCell(genome=generators.genome_from_dict(c["genome"]),
                           features=tuple(c["features"]), difficulty=c["difficulty"],
                           bin=tuple(c["bin"]))
        archive.bins[cell.bin] = cell
    return archive


def heatmap_ppm(archive: Archive) -> bytes:
    """50x50 P6 image: unoccupied bins black, occupied shaded dark-to-light
    with increasing difficulty (dark = fit)."""
    img = np.zeros((BINS, BINS, 3), dtype=np.uint8)
    for (i, j), cell in archive.bins.items():
        shade = 40 + int(round(cell.difficulty * 215))
        img[i, j] = shade
    return b"P6\n%d %d\n255\n" % (BINS, BINS) + img.tobytes()
