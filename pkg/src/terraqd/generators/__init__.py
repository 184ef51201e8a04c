"""Genome representations and their deterministic expansion to heightmaps."""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from ..heightmap import Heightmap, DEFAULT_VERTICAL_SCALE, normalize
from . import cppn as _cppn
from . import diamond_square as _ds
from . import perlin as _perlin
from . import worley as _worley
from .cppn import ConnGene, CppnGenome, CppnMutationConfig, NodeGene

DEFAULT_RESOLUTION = 256

MUTATION_PROB = 0.35
SIGMA_FRACTION = 0.1  # mutation sigma as a fraction of a gene's range
SEED_MAX = 2**31 - 1

KINDS = ("perlin", "diamond-square", "worley", "cppn")


class GenomeError(ValueError):
    pass


@dataclass(frozen=True)
class PerlinGenome:
    scale: float
    octaves: int
    persistence: float
    lacunarity: float
    seed: int


@dataclass(frozen=True)
class DiamondSquareGenome:
    seed: int
    corners: tuple
    z: float
    d: int


@dataclass(frozen=True)
class WorleyGenome:
    seed: int
    n: int
    d_idx: int


PERLIN_RANGES = {
    "scale": (1.0, 100.0),
    "octaves": (1, 9),
    "persistence": (0.1, 0.9),
    "lacunarity": (1.0, 3.0),
    "seed": (0, 100),
}
DS_RANGES = {"corner": (-1.0, 1.0), "z": (0.0, 50.0), "d": (1, 10)}
WORLEY_RANGES = {"n": (2, 400)}


def kind_of(genome) -> str:
    return {
        PerlinGenome: "perlin",
        DiamondSquareGenome: "diamond-square",
        WorleyGenome: "worley",
        CppnGenome: "cppn",
    }[type(genome)]


def validate(genome) -> None:
    if isinstance(genome, PerlinGenome):
        checks = [
            ("scale", genome.scale), ("octaves", genome.octaves),
            ("persistence", genome.persistence), ("lacunarity", genome.lacunarity),
            ("seed", genome.seed),
        ]
        for name, value in checks:
            lo, hi = PERLIN_RANGES[name]
            if not lo <= value <= hi:
                raise GenomeError(f"perlin {name}={value} outside [{lo}, {hi}]")
    elif isinstance(genome, DiamondSquareGenome):
        if len(genome.corners) != 4 or any(not -1 <= c <= 1 for c in genome.corners):
            raise GenomeError("diamond-square needs 4 corners in [-1, 1]")
        if not 0 <= genome.z <= 50:
            raise GenomeError(f"percentile bound z={genome.z} outside [0, 50]")
        if not 1 <= genome.d <= 10:
            raise GenomeError(f"level d={genome.d} outside [1, 10]")
    elif isinstance(genome, WorleyGenome):
        if not 2 <= genome.n <= 400:
            raise GenomeError(f"feature-point count n={genome.n} outside [2, 400]")
        if not 0 <= genome.d_idx <= genome.n // 4:
            raise GenomeError(f"d_idx={genome.d_idx} outside [0, {genome.n // 4}]")
    elif isinstance(genome, CppnGenome):
        try:
            genome.validate()
        except _cppn.CppnError as exc:
            raise GenomeError(str(exc)) from None
    else:
        raise GenomeError(f"unknown genome type {type(genome).__name__}")


def raw_grid(genome, resolution: int = DEFAULT_RESOLUTION) -> np.ndarray:
    """Expand a genome to its raw (pre-normalization) grid."""
    validate(genome)
    shape = (resolution, resolution)
    if isinstance(genome, PerlinGenome):
        return _perlin.fbm_grid(shape, genome.scale, genome.octaves,
                                genome.persistence, genome.lacunarity, genome.seed)
    if isinstance(genome, DiamondSquareGenome):
        return _ds.diamond_square_grid(genome.seed, genome.corners, genome.z,
                                       genome.d, resolution)
    if isinstance(genome, WorleyGenome):
        return _worley.worley_grid(genome.seed, genome.n, genome.d_idx, shape)
    rows = np.linspace(-1.0, 1.0, resolution)[:, None]
    cols = np.linspace(-1.0, 1.0, resolution)[None, :]
    return _cppn.eval_grid(genome, rows, cols)


def generate(genome, resolution: int = DEFAULT_RESOLUTION,
             vertical_scale: float = DEFAULT_VERTICAL_SCALE) -> Heightmap:
    """Deterministic genome -> normalized heightmap."""
    return normalize(raw_grid(genome, resolution), vertical_scale=vertical_scale)


def random_genome(kind: str, rng):
    if kind == "perlin":
        return PerlinGenome(
            scale=float(rng.uniform(*PERLIN_RANGES["scale"])),
            octaves=int(rng.integers(1, 10)),
            persistence=float(rng.uniform(*PERLIN_RANGES["persistence"])),
            lacunarity=float(rng.uniform(*PERLIN_RANGES["lacunarity"])),
            seed=int(rng.integers(0, 101)),
        )
    if kind == "diamond-square":
        return DiamondSquareGenome(
            seed=int(rng.integers(0, SEED_MAX + 1)),
            corners=tuple(float(c) for c in rng.uniform(-1, 1, 4)),
            z=float(rng.uniform(0, 50)),
            d=int(rng.integers(1, 11)),
        )
    if kind == "worley":
        n = int(rng.integers(2, 401))
        return WorleyGenome(
            seed=int(rng.integers(0, SEED_MAX + 1)),
            n=n,
            d_idx=int(rng.integers(0, n // 4 + 1)),
        )
    if kind == "cppn":
        return _cppn.minimal_cppn(rng)
    raise GenomeError(f"unknown generator kind {kind!r}")


def _perturb(value, lo, hi, rng, integer=False):
    """Gene-wise mutation: gaussian step sized to the gene's range, clamped."""
    if rng.random() >= MUTATION_PROB:
        return value
    new = value + rng.normal(0.0, SIGMA_FRACTION * (hi - lo))
    new = min(max(new, lo), hi)
    return int(round(new)) if integer else float(new)


def _maybe_reseed(seed, rng, hi=SEED_MAX):
    if rng.random() >= MUTATION_PROB:
        return seed
    return int(rng.integers(0, hi + 1))


def mutate(genome, rng, cppn_config: CppnMutationConfig = CppnMutationConfig()):
    validate(genome)
    if isinstance(genome, PerlinGenome):
        return PerlinGenome(
            scale=_perturb(genome.scale, *PERLIN_RANGES["scale"], rng),
            octaves=_perturb(genome.octaves, *PERLIN_RANGES["octaves"], rng, integer=True),
            persistence=_perturb(genome.persistence, *PERLIN_RANGES["persistence"], rng),
            lacunarity=_perturb(genome.lacunarity, *PERLIN_RANGES["lacunarity"], rng),
            seed=_maybe_reseed(genome.seed, rng, hi=PERLIN_RANGES["seed"][1]),
        )
    if isinstance(genome, DiamondSquareGenome):
        lo, hi = DS_RANGES["corner"]
        return DiamondSquareGenome(
            seed=_maybe_reseed(genome.seed, rng),
            corners=tuple(_perturb(c, lo, hi, rng) for c in genome.corners),
            z=_perturb(genome.z, *DS_RANGES["z"], rng),
            d=_perturb(genome.d, *DS_RANGES["d"], rng, integer=True),
        )
    if isinstance(genome, WorleyGenome):
        n = _perturb(genome.n, *WORLEY_RANGES["n"], rng, integer=True)
        d_idx = _perturb(genome.d_idx, 0, n // 4, rng, integer=True)
        return WorleyGenome(
            seed=_maybe_reseed(genome.seed, rng),
            n=n,
            d_idx=min(d_idx, n // 4),
        )
    return _cppn.mutate_cppn(genome, rng, cppn_config)


def genome_to_dict(genome) -> dict:
    kind = kind_of(genome)
    if isinstance(genome, PerlinGenome):
        body = {"scale": genome.scale, "octaves": genome.octaves,
                "persistence": genome.persistence, "lacunarity": genome.lacunarity,
                "seed": genome.seed}
    elif isinstance(genome, DiamondSquareGenome):
        body = {"seed": genome.seed, "corners": list(genome.corners),
                "z": genome.z, "d": genome.d}
    elif isinstance(genome, WorleyGenome):
        body = {"seed": genome.seed, "n": genome.n, "d_idx": genome.d_idx}
    else:
        body = {
            "nodes": [[n.id, n.activation] for n in genome.nodes],
            "connections": [[c.src, c.dst, c.weight, c.enabled] for c in genome.connections],
            "innovation": genome.innovation,
        }
    return {"kind": kind, **body}


def genome_from_dict(doc: dict):
    kind = doc.get("kind")
    if kind == "perlin":
        g = PerlinGenome(scale=doc["scale"], octaves=doc["octaves"],
                         persistence=doc["persistence"], lacunarity=doc["lacunarity"],
                         seed=doc["seed"])
    elif kind == "diamond-square":
        g = DiamondSquareGenome(seed=doc["seed"], corners=tuple(doc["corners"]),
                                z=doc["z"], d=doc["d"])
    elif kind == "worley":
        g = WorleyGenome(seed=doc["seed"], n=doc["n"], d_idx=doc["d_idx"])
    elif kind == "cppn":
        g = CppnGenome(
            nodes=tuple(NodeGene(i, a) for i, a in doc["nodes"]),
            connections=tuple(ConnGene(s, d, w, e) for s, d, w, e in doc["connections"]),
            innovation=doc["innovation"],
        )
    else:
        raise GenomeError(f"unknown genome kind {kind!r}")
    validate(g)
    return g
