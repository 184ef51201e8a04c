import numpy as np
import pytest

from terraqd import archive as am
from terraqd import generators
from terraqd.archive import (Archive, ArchiveCell, ConfigurationError,
                             EvolutionConfig, ProxyDifficultyFn, bin_index,
                             combine, coverage, evolve, from_json, heatmap_ppm,
                             insert, prune_impossible, to_json)
from terraqd.difficulty import EvaluatorConfig, TraversabilityConfig
from terraqd.features import FeatureDescriptor, FeaturePair, describe


def small_pair(ranges=((0.0, 1.0), (0.0, 1.0))):
    return FeaturePair(FeatureDescriptor("Roughness", kernel=8, stride=2),
                       FeatureDescriptor("TPI", kernel=8, stride=2), ranges)


def cell_at(b, difficulty=0.5, pair=None):
    pair = pair or small_pair()
    f = tuple((lo + (i + 0.5) / 50 * (hi - lo))
              for i, (lo, hi) in zip(b, pair.ranges))
    genome = generators.PerlinGenome(scale=50.0, octaves=1, persistence=0.5,
                                     lacunarity=2.0, seed=1)
    return ArchiveCell(genome=genome, features=f, difficulty=difficulty, bin=b)


class TestBinIndex:
    def test_minimum_maps_to_zero(self):
        assert bin_index((0.0, 0.0), ((0, 1), (0, 1))) == (0, 0)

    def test_maximum_clamps_to_last_bin(self):
        assert bin_index((1.0, 2.5), ((0, 1), (0, 1))) == (49, 49)

    def test_midpoint(self):
        assert bin_index((0.5, 0.5), ((0, 1), (0, 1))) == (25, 25)


class TestInsert:
    def test_empty_bin_placed(self):
        a = Archive(pair=small_pair(), generator_kind="perlin")
        assert insert(a, cell_at((3, 4))) == "placed"

    def test_lower_difficulty_replaces(self):
        a = Archive(pair=small_pair(), generator_kind="perlin")
        insert(a, cell_at((3, 4), difficulty=0.4))
        assert insert(a, cell_at((3, 4), difficulty=0.3)) == "replaced"
        assert a.bins[(3, 4)].difficulty == 0.3

    def test_tie_keeps_incumbent(self):
        a = Archive(pair=small_pair(), generator_kind="perlin")
        first = cell_at((3, 4), difficulty=0.3)
        insert(a, first)
        assert insert(a, cell_at((3, 4), difficulty=0.3)) == "rejected"
        assert a.bins[(3, 4)] is first

    def test_replacement_law_random_sequence(self):
        rng = np.random.default_rng(0)
        a = Archive(pair=small_pair(), generator_kind="perlin")
        best = {}
        for _ in range(10_000):
            b = (int(rng.integers(50)), int(rng.integers(50)))
            d = float(rng.random())
            insert(a, cell_at(b, difficulty=d))
            best[b] = min(best.get(b, 1.1), d)
        for b, cell in a.bins.items():
            assert cell.difficulty == best[b]


class TestCoverage:
    def test_empty(self):
        assert coverage(Archive(pair=small_pair(), generator_kind="perlin")) == 0.0

    @pytest.mark.parametrize("n,expected", [(62, 2.48), (98, 3.92)])
    def test_reported_percentages(self, n, expected):
        a = Archive(pair=small_pair(), generator_kind="perlin")
        for i in range(n):
            insert(a, cell_at((i // 50, i % 50)))
        assert coverage(a) == expected

    def test_full(self):
        a = Archive(pair=small_pair(), generator_kind="perlin")
        for i in range(50):
            for j in range(50):
                insert(a, cell_at((i, j)))
        assert coverage(a) == 100.0


class TestCombine:
    def test_identity_with_empty(self):
        a = Archive(pair=small_pair(), generator_kind="perlin")
        insert(a, cell_at((1, 1), 0.2))
        empty = Archive(pair=small_pair(), generator_kind="worley")
        merged = combine([a, empty])
        assert set(merged.bins) == {(1, 1)}

    def test_overlap_keeps_lower_difficulty(self):
        a = Archive(pair=small_pair(), generator_kind="perlin")
        b = Archive(pair=small_pair(), generator_kind="worley")
        insert(a, cell_at((2, 2), 0.6))
        insert(b, cell_at((2, 2), 0.2))
        merged = combine([a, b])
        assert merged.bins[(2, 2)].difficulty == 0.2

    def test_coverage_dominates_inputs(self):
        rng = np.random.default_rng(1)
        archives = []
        for _ in range(3):
            a = Archive(pair=small_pair(), generator_kind="perlin")
            for _ in range(40):
                insert(a, cell_at((int(rng.integers(50)), int(rng.integers(50))),
                                  float(rng.random())))
            archives.append(a)
        merged = combine(archives)
        assert coverage(merged) >= max(coverage(a) for a in archives)
        for a in archives:
            for b, cell in a.bins.items():
                assert merged.bins[b].difficulty <= cell.difficulty

    def test_mismatched_pairs_rejected(self):
        a = Archive(pair=small_pair(), generator_kind="perlin")
        b = Archive(pair=small_pair(((0.0, 2.0), (0.0, 1.0))), generator_kind="worley")
        with pytest.raises(ConfigurationError):
            combine([a, b])


def desk_evolve(kind="perlin", generations=10, seed=1, jobs=1):
    pair = small_pair(((0.0, 0.6), (0.0, 0.1)))
    cfg = EvolutionConfig(generations=generations, init_pop=15, batch=8,
                          master_seed=seed)
    fn = ProxyDifficultyFn(EvaluatorConfig(capability=0.15))
    return evolve(kind, pair, cfg, fn, resolution=64, jobs=jobs)


class TestEvolve:
    def test_zero_generations_keeps_initial_elites(self):
        a = desk_evolve(generations=0)
        assert 0 < len(a) <= 15

    def test_coverage_grows_with_generations(self):
        initial = desk_evolve(generations=0, seed=3)
        evolved = desk_evolve(generations=60, seed=3)
        assert coverage(evolved) > coverage(initial)

    def test_reproducible(self):
        a = desk_evolve(generations=5, seed=7)
        b = desk_evolve(generations=5, seed=7)
        assert to_json(a) == to_json(b)

    def test_jobs_do_not_change_result(self):
        a = desk_evolve(generations=4, seed=9, jobs=1)
        b = desk_evolve(generations=4, seed=9, jobs=4)
        assert to_json(a) == to_json(b)

    def test_bin_consistency(self):
        a = desk_evolve(generations=5, seed=5)
        for b, cell in a.bins.items():
            hm = generators.generate(cell.genome, a.resolution, a.vertical_scale)
            f1 = describe(hm, a.pair.f1)
            f2 = describe(hm, a.pair.f2)
            assert am.bin_index((f1, f2), a.pair.ranges) == b


class TestPrune:
    def test_flat_archive_unchanged(self):
        pair = small_pair()
        a = Archive(pair=pair, generator_kind="perlin", resolution=64,
                    vertical_scale=0.05)  # gentle terrain: 5 cm relief
        g = generators.PerlinGenome(scale=80.0, octaves=1, persistence=0.5,
                                    lacunarity=2.0, seed=3)
        hm = generators.generate(g, 64, 0.05)
        f = (describe(hm, pair.f1), describe(hm, pair.f2))
        insert(a, ArchiveCell(genome=g, features=f, difficulty=0.1,
                              bin=am.bin_index(f, pair.ranges)))
        pruned = prune_impossible(a, TraversabilityConfig(k=13))
        assert set(pruned.bins) == set(a.bins)

    def test_cliff_removed(self):
        a = desk_evolve(generations=0, seed=2)  # vscale 3 m: far too steep
        pruned = prune_impossible(a, TraversabilityConfig(k=13))
        tc = TraversabilityConfig(k=13)
        from terraqd.difficulty import check_terrain
        for b, cell in pruned.bins.items():
            hm = generators.generate(cell.genome, a.resolution, a.vertical_scale)
            assert check_terrain(hm, tc)
        assert len(pruned) <= len(a)


class TestSerialization:
    def test_json_roundtrip(self):
        a = desk_evolve(generations=3, seed=4)
        back = from_json(to_json(a))
        assert to_json(back) == to_json(a)
        assert back.pair == a.pair

    def test_heatmap_ppm_format(self):
        a = desk_evolve(generations=0, seed=6)
        data = heatmap_ppm(a)
        assert data.startswith(b"P6\n50 50\n255\n")
        assert len(data) == len(b"P6\n50 50\n255\n") + 50 * 50 * 3


class TestCalibration:
    def test_ranges_nonneg_and_ordered(self):
        pair = small_pair()
        ranges = am.calibrate_ranges(["perlin", "worley"], pair.f1, pair.f2,
                                     n_genomes=20, seed=0, resolution=32)
        for lo, hi in ranges:
            assert lo == 0.0 and hi > lo
