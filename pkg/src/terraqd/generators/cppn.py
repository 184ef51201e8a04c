"""Minimal feed-forward coordinate network evolved NEAT-style.

Inputs are node ids 0 (row), 1 (col) and 2 (bias, fixed at 1.0); node 3 is
the single height output. Hidden nodes get allocated ids from the genome's
innovation counter.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

import numpy as np

ROW_ID, COL_ID, BIAS_ID, OUTPUT_ID = 0, 1, 2, 3
INPUT_IDS = (ROW_ID, COL_ID, BIAS_ID)

ACTIVATIONS = {
    # input clamp keeps exp() finite for arbitrarily large weighted sums
    "sigmoid": lambda x: 1.0 / (1.0 + np.exp(-np.clip(x, -60.0, 60.0))),
    "gaussian": lambda x: np.exp(-np.square(x)),
    "sine": np.sin,
    "identity": lambda x: x,
}


class CppnError(ValueError):
    pass


@dataclass(frozen=True)
class NodeGene:
    id: int
    activation: str


@dataclass(frozen=True)
class ConnGene:
    src: int
    dst: int
    weight: float
    enabled: bool = True


@dataclass(frozen=True)
class CppnGenome:
    nodes: tuple = field(default_factory=tuple)
    connections: tuple = field(default_factory=tuple)
    innovation: int = 4

    def validate(self):
        ids = {n.id for n in self.nodes}
        if not set(INPUT_IDS) | {OUTPUT_ID} <= ids:
            raise CppnError("genome must contain the 3 input nodes and the output node")
        for c in self.connections:
            if c.src not in ids or c.dst not in ids:
                raise CppnError(f"connection {c.src}->{c.dst} references a missing node")
            if c.dst in INPUT_IDS:
                raise CppnError("input nodes cannot receive connections")
        topo_order(self)


def topo_order(genome: CppnGenome):
    """Kahn ordering over every connection; raises on cycles."""
    ids = [n.id for n in genome.nodes]
    indeg = {i: 0 for i in ids}
    out_edges = {i: [] for i in ids}
    for c in genome.connections:
        indeg[c.dst] += 1
        out_edges[c.src].append(c.dst)
    ready = sorted(i for i in ids if indeg[i] == 0)
    order = []
    while ready:
        node = ready.pop(0)
        order.append(node)
        for dst in sorted(out_edges[node]):
            indeg[dst] -= 1
            if indeg[dst] == 0:
                ready.append(dst)
        ready.sort()
    if len(order) != len(ids):
        raise CppnError("connection graph contains a cycle")
    return order


def _would_cycle(genome: CppnGenome, src: int, dst: int) -> bool:
    try:
        topo_order(replace(genome, connections=genome.connections + (ConnGene(src, dst, 0.0),)))
    except CppnError:
        return True
    return False


def eval_grid(genome: CppnGenome, row_norm, col_norm):
    """Feed-forward evaluation; row_norm/col_norm broadcast to the output shape."""
    row_norm = np.asarray(row_norm, dtype=np.float64)
    col_norm = np.asarray(col_norm, dtype=np.float64)
    shape = np.broadcast(row_norm, col_norm).shape
    acts = {n.id: n.activation for n in genome.nodes}
    incoming = {}
    for c in genome.connections:
        if c.enabled:
            incoming.setdefault(c.dst, []).append(c)
    values = {
        ROW_ID: np.broadcast_to(row_norm, shape),
        COL_ID: np.broadcast_to(col_norm, shape),
        BIAS_ID: np.ones(shape),
    }
    for node in topo_order(genome):
        if node in INPUT_IDS:
            continue
        total = np.zeros(shape)
        for c in incoming.get(node, ()):
            total = total + c.weight * values[c.src]
        values[node] = ACTIVATIONS[acts[node]](total)
    return values[OUTPUT_ID]


def eval_point(genome: CppnGenome, row_norm: float, col_norm: float) -> float:
    return float(eval_grid(genome, row_norm, col_norm))


@dataclass(frozen=True)
class CppnMutationConfig:
    weight_prob: float = 0.8
    weight_sigma: float = 0.5
    reset_prob: float = 0.1
    add_conn_prob: float = 0.1
    add_node_prob: float = 0.05


def minimal_cppn(rng) -> CppnGenome:
    activation = sorted(ACTIVATIONS)[rng.integers(len(ACTIVATIONS))]
    nodes = tuple(NodeGene(i, "identity") for i in INPUT_IDS) + (NodeGene(OUTPUT_ID, activation),)
    conns = tuple(ConnGene(i, OUTPUT_ID, float(rng.uniform(-1, 1))) for i in INPUT_IDS)
    return CppnGenome(nodes=nodes, connections=conns, innovation=4)


def mutate_cppn(genome: CppnGenome, rng, cfg: CppnMutationConfig = CppnMutationConfig()) -> CppnGenome:
    conns = []
    for c in genome.connections:
        w = c.weight
        if rng.random() < cfg.weight_prob:
            if rng.random() < cfg.reset_prob:
                w = float(rng.uniform(-1, 1))
            else:
                w = float(w + rng.normal(0.0, cfg.weight_sigma))
        conns.append(replace(c, weight=w))
    nodes = list(genome.nodes)
    innovation = genome.innovation

    mutant = replace(genome, nodes=tuple(nodes), connections=tuple(conns))
    if rng.random() < cfg.add_conn_prob:
        existing = {(c.src, c.dst) for c in conns}
        for _ in range(10):
            src = nodes[rng.integers(len(nodes))].id
            dst_choices = [n.id for n in nodes if n.id not in INPUT_IDS]
            dst = dst_choices[rng.integers(len(dst_choices))]
            if src == dst or (src, dst) in existing:
                continue
            if _would_cycle(mutant, src, dst):
                continue
            conns.append(ConnGene(src, dst, float(rng.uniform(-1, 1))))
            innovation += 1
            break
        mutant = replace(mutant, connections=tuple(conns), innovation=innovation)
    if rng.random() < cfg.add_node_prob:
        enabled_idx = [i for i, c in enumerate(conns) if c.enabled]
        if enabled_idx:
            i = enabled_idx[rng.integers(len(enabled_idx))]
            split = conns[i]
            new_id = innovation
            innovation += 1
            activation = sorted(ACTIVATIONS)[rng.integers(len(ACTIVATIONS))]
            nodes.append(NodeGene(new_id, activation))
            conns[i] = replace(split, enabled=False)
            conns.append(ConnGene(split.src, new_id, 1.0))
            conns.append(ConnGene(new_id, split.dst, split.weight))
        mutant = replace(mutant, nodes=tuple(nodes), connections=tuple(conns), innovation=innovation)
    return mutant
