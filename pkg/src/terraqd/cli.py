"""Command-line front end: generate / evolve / analyze / combine /
curriculum / heatmap. Exit codes: 0 success, 1 runtime failure, 2 usage."""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from . import archive as archive_mod
from . import curriculum as curriculum_mod
from . import generators
from .difficulty import EvaluatorConfig, TraversabilityConfig
from .features import (CorrelationError, FeatureDescriptor, FeaturePair,
                       correlation_csv, correlation_matrix)
from .heightmap import DEFAULT_VERTICAL_SCALE, read_pgm, write_pgm


class UsageError(Exception):
    pass


def _descriptor_from(doc: dict) -> FeatureDescriptor:
    return FeatureDescriptor(kind=doc["kind"], kernel=doc.get("kernel", 30),
                             stride=doc.get("stride", 2))


def cmd_generate(args) -> int:
    rng = np.random.default_rng(args.seed)
    genome = generators.random_genome(args.kind, rng)
    hm = generators.generate(genome, args.resolution, args.vertical_scale)
    out = Path(args.out)
    write_pgm(hm, out)
    sidecar = out.with_suffix(".json")
    sidecar.write_text(json.dumps(generators.genome_to_dict(genome),
                                  sort_keys=True, separators=(",", ":")) + "\n")
    print(f"wrote {out} and {sidecar}")
    return 0


def _load_evolve_config(path):
    doc = json.loads(Path(path).read_text())
    kind = doc["kind"]
    if kind not in generators.KINDS:
        raise UsageError(f"unknown generator kind {kind!r}; expected one of {generators.KINDS}")
    pdoc = doc["pair"]
    f1 = _descriptor_from(pdoc["f1"])
    f2 = _descriptor_from(pdoc["f2"])
    resolution = doc.get("resolution", generators.DEFAULT_RESOLUTION)
    vertical_scale = doc.get("vertical_scale", DEFAULT_VERTICAL_SCALE)
    edoc = doc.get("evolution", {})
    cfg = archive_mod.EvolutionConfig(
        generations=edoc.get("generations", 5000),
        init_pop=edoc.get("init_pop", 100),
        batch=edoc.get("batch", 20),
        master_seed=doc["seed"],
    )
    if "ranges" in pdoc:
        ranges = tuple(tuple(r) for r in pdoc["ranges"])
    else:
        cal = doc.get("calibration", {})
        ranges = archive_mod.calibrate_ranges(
            cal.get("kinds", [kind]), f1, f2,
            n_genomes=cal.get("n_genomes", 1000),
            seed=doc["seed"], resolution=resolution,
        )
    pair = FeaturePair(f1=f1, f2=f2, ranges=ranges)
    evdoc = doc.get("evaluator", {})
    eval_cfg = EvaluatorConfig(
        attempts=evdoc.get("attempts", 20), best_of=evdoc.get("best_of", 5),
        robot_height=evdoc.get("robot_height", 1.75),
        capability=evdoc.get("capability", 0.3),
    )
    tdoc = doc.get("traversability", {})
    trav = TraversabilityConfig(k=tdoc.get("k", 26),
                                robot_height=tdoc.get("robot_height", eval_cfg.robot_height))
    out_dir = Path(doc.get("out_dir", "."))
    return kind, pair, cfg, eval_cfg, trav, resolution, vertical_scale, out_dir


def cmd_evolve(args) -> int:
    kind, pair, cfg, eval_cfg, trav, resolution, vscale, out_dir = _load_evolve_config(args.config)
    diff_fn = archive_mod.ProxyDifficultyFn(eval_cfg)
    result = archive_mod.evolve(kind, pair, cfg, diff_fn, resolution=resolution,
                                vertical_scale=vscale, jobs=args.jobs)
    result = archive_mod.prune_impossible(result, trav)
    out_dir.mkdir(parents=True, exist_ok=True)
    (out_dir / "archive.json").write_text(archive_mod.to_json(result))
    (out_dir / "heatmap.ppm").write_bytes(archive_mod.heatmap_ppm(result))
    cov = archive_mod.coverage(result)
    (out_dir / "coverage.txt").write_text(f"coverage_percent={cov}\n")
    print(f"coverage_percent={cov}")
    return 0


def cmd_analyze(args) -> int:
    corpus = sorted(Path(args.corpus).glob("*.pgm"))
    heightmaps, difficulties = [], []
    for pgm in corpus:
        sidecar = pgm.with_suffix(".difficulty.json")
        if not sidecar.exists():
            continue
        heightmaps.append(read_pgm(pgm))
        difficulties.append(json.loads(sidecar.read_text())["difficulty"])
    if len(heightmaps) < 2:
        print("corpus must contain at least 2 PGM terrains with difficulty "
              "sidecars (*.difficulty.json)", file=sys.stderr)
        return 1
    descriptors = [FeatureDescriptor(kind=k, kernel=kernel, stride=args.stride)
                   for k in args.descriptors.split(",")
                   for kernel in (int(s) for s in args.kernels.split(","))]
    names, mat = correlation_matrix(heightmaps, difficulties, descriptors)
    Path(args.out).write_text(correlation_csv(names, mat))
    print(f"wrote {args.out}")
    return 0


def cmd_combine(args) -> int:
    archives = [archive_mod.from_json(Path(p).read_text()) for p in args.archives]
    combined = archive_mod.combine(archives)
    out = Path(args.out)
    out.write_text(archive_mod.to_json(combined))
    out.with_suffix(".ppm").write_bytes(archive_mod.heatmap_ppm(combined))
    print(f"coverage_percent={archive_mod.coverage(combined)}")
    return 0


def cmd_curriculum(args) -> int:
    arch = archive_mod.from_json(Path(args.archive).read_text())
    if not arch.bins:
        print("archive is empty", file=sys.stderr)
        return 1
    doc = json.loads(Path(args.config).read_text()) if args.config else {}
    gp_cfg = curriculum_mod.GpConfig(
        rho=doc.get("rho", 0.4), alpha=doc.get("alpha", 0.9),
        kappa=doc.get("kappa", 0.05), noise_var=doc.get("noise_var", 0.001),
    )
    ldoc = doc.get("learner", {})
    learner = curriculum_mod.CapabilityLearner(
        eval_config=EvaluatorConfig(
            attempts=ldoc.get("attempts", 20), best_of=ldoc.get("best_of", 5),
            robot_height=ldoc.get("robot_height", 1.75),
            capability=0.0,
        ),
        gain=ldoc.get("gain", 1e-4),
        capability=ldoc.get("capability", 0.0),
        seed=args.seed if args.seed is not None else ldoc.get("seed", 0),
    )
    run_kwargs = dict(
        epochs_per_round=doc.get("epochs_per_round", 40),
        max_epochs=doc.get("max_epochs", 30000),
        eval_cap=doc.get("eval_cap", 100),
    )
    if args.baseline:
        trace = curriculum_mod.classic_cl(arch, learner, gp_cfg, **run_kwargs)
    else:
        trace = curriculum_mod.run_curriculum(arch, learner, gp_cfg, **run_kwargs)
    Path(args.out).write_text(trace.to_csv())
    print(f"final_hardest_distance={trace.final_hardest()}")
    return 0


def cmd_heatmap(args) -> int:
    arch = archive_mod.from_json(Path(args.archive).read_text())
    Path(args.out).write_bytes(archive_mod.heatmap_ppm(arch))
    print(f"wrote {args.out}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="terraqd",
                                description="Procedural terrain curriculum engine")
    sub = p.add_subparsers(dest="command", required=True)

    g = sub.add_parser("generate", help="expand a random genome to a PGM heightmap")
    g.add_argument("--kind", required=True, choices=generators.KINDS)
    g.add_argument("--seed", type=int, required=True)
    g.add_argument("--resolution", type=int, default=generators.DEFAULT_RESOLUTION)
    g.add_argument("--vertical-scale", type=float, default=DEFAULT_VERTICAL_SCALE)
    g.add_argument("--out", required=True)
    g.set_defaults(fn=cmd_generate)

    e = sub.add_parser("evolve", help="run MAP-Elites evolution from a JSON config")
    e.add_argument("--config", required=True)
    e.add_argument("--jobs", type=int, default=1)
    e.set_defaults(fn=cmd_evolve)

    a = sub.add_parser("analyze", help="descriptor/difficulty correlation matrix")
    a.add_argument("--corpus", required=True)
    a.add_argument("--descriptors", default="TRI,TPI,Roughness")
    a.add_argument("--kernels", default="30")
    a.add_argument("--stride", type=int, default=2)
    a.add_argument("--out", required=True)
    a.set_defaults(fn=cmd_analyze)

    c = sub.add_parser("combine", help="merge archives, keeping the fittest per bin")
    c.add_argument("archives", nargs="+")
    c.add_argument("--out", required=True)
    c.set_defaults(fn=cmd_combine)

    r = sub.add_parser("curriculum", help="run the GP curriculum (or --baseline)")
    r.add_argument("--archive", required=True)
    r.add_argument("--config")
    r.add_argument("--seed", type=int)
    r.add_argument("--baseline", action="store_true")
    r.add_argument("--out", required=True)
    r.set_defaults(fn=cmd_curriculum)

    h = sub.add_parser("heatmap", help="render an archive to a PPM fitness map")
    h.add_argument("--archive", required=True)
    h.add_argument("--out", required=True)
    h.set_defaults(fn=cmd_heatmap)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.fn(args)
    except (OSError, CorrelationError, RuntimeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except (UsageError, json.JSONDecodeError, KeyError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
