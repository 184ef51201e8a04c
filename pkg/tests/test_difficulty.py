import sys
import textwrap

import numpy as np
import pytest

from terraqd.difficulty import (EvaluatorConfig, ProxyWalkerEvaluator,
                                SubprocessEvaluator, TraversabilityConfig,
                                check_terrain, fitness, proxy_difficulty,
                                walk_row)
from terraqd.heightmap import DimensionError, Heightmap


def flat(n=32, vscale=3.0):
    return Heightmap(values=np.zeros((n, n)), vertical_scale=vscale)


def wall_map(col, n=33, height=1.0, vscale=3.0):
    v = np.zeros((n, n))
    v[:, col:] = height
    return Heightmap(values=v, vertical_scale=vscale)


class TestCheckTerrain:
    def test_flat_traversable(self):
        assert check_terrain(flat(), TraversabilityConfig(k=5))

    def test_cliff_of_robot_height_fails(self):
        hm = wall_map(16, height=1.75 / 3.0)  # 1.75 m cliff at vscale 3
        assert not check_terrain(hm, TraversabilityConfig(k=5))

    def test_gentle_ramp_passes(self):
        # linear ramp whose rise across any window span stays under threshold
        cfg = TraversabilityConfig(k=8)
        n = 32
        per_cell = 0.9 * cfg.threshold / (cfg.k - 1)  # metres per cell
        v = np.tile(np.arange(n) / (n - 1), (n, 1))
        hm = Heightmap(values=v, vertical_scale=per_cell * (n - 1))
        assert check_terrain(hm, cfg)

    def test_monotone_in_threshold(self):
        rng = np.random.default_rng(0)
        hm = Heightmap(values=rng.random((32, 32)), vertical_scale=0.5)
        results = [check_terrain(hm, TraversabilityConfig(k=6, robot_height=h))
                   for h in (0.5, 1.0, 2.0, 4.0)]
        # once traversable, stays traversable as the threshold grows
        assert results == sorted(results)

    def test_window_too_large(self):
        with pytest.raises(DimensionError):
            check_terrain(flat(8), TraversabilityConfig(k=16))


class TestProxyWalker:
    def test_flat_is_difficulty_zero(self):
        cfg = EvaluatorConfig(capability=0.0)
        assert proxy_difficulty(flat(), cfg, np.random.default_rng(0)) == 0.0

    def test_wall_at_start_is_difficulty_one(self):
        hm = wall_map(1, height=1.0)  # 3 m rise on the first step
        cfg = EvaluatorConfig(capability=0.5)
        assert proxy_difficulty(hm, cfg, np.random.default_rng(0)) == 1.0

    def test_wall_at_midpoint_is_half(self):
        hm = wall_map(17, n=33, height=1.0)  # blocks at the middle of each row
        cfg = EvaluatorConfig(capability=0.5)
        assert proxy_difficulty(hm, cfg, np.random.default_rng(0)) == pytest.approx(0.5)

    def test_walk_row_descents_always_passable(self):
        row = np.array([3.0, 2.0, 1.0, 0.0])
        assert walk_row(row, 0.0) == 1.0

    def test_capability_monotone(self):
        rng = np.random.default_rng(1)
        for _ in range(20):
            hm = Heightmap(values=rng.random((16, 16)))
            prev = 1.1
            for cap in (0.1, 0.5, 1.0, 3.0):
                d = proxy_difficulty(hm, EvaluatorConfig(capability=cap),
                                     np.random.default_rng(7))
                assert d <= prev + 1e-12
                prev = d

    def test_best_of_filter_not_worse_than_mean(self):
        rng = np.random.default_rng(2)
        hm = Heightmap(values=rng.random((24, 24)))
        best5 = proxy_difficulty(hm, EvaluatorConfig(attempts=20, best_of=5,
                                                     capability=0.5),
                                 np.random.default_rng(3))
        all20 = proxy_difficulty(hm, EvaluatorConfig(attempts=20, best_of=20,
                                                     capability=0.5),
                                 np.random.default_rng(3))
        assert best5 <= all20 + 1e-12

    def test_deterministic_given_seed(self):
        rng = np.random.default_rng(4)
        hm = Heightmap(values=rng.random((16, 16)))
        cfg = EvaluatorConfig(capability=0.4)
        a = proxy_difficulty(hm, cfg, np.random.default_rng(5))
        b = proxy_difficulty(hm, cfg, np.random.default_rng(5))
        assert a == b

    def test_invalid_config(self):
        with pytest.raises(ValueError):
            EvaluatorConfig(attempts=4, best_of=5)


class TestFitness:
    @pytest.mark.parametrize("d,f", [(0.0, 1.0), (1.0, 0.0), (0.3, 0.7)])
    def test_complement(self, d, f):
        assert fitness(d) == pytest.approx(f)

    def test_out_of_range(self):
        with pytest.raises(ValueError):
            fitness(1.5)


class TestEvaluatorContract:
    def test_proxy_walker_evaluator(self):
        ev = ProxyWalkerEvaluator(seed=9)
        d = ev.evaluate(flat(), capability=0.1)
        assert d == 0.0

    def test_subprocess_protocol(self):
        # echo evaluator: parses the request line, replies with a fixed value
        script = textwrap.dedent("""\
            import sys
            for line in sys.stdin:
                path, capability = line.split()
                assert path.endswith(".pgm") and float(capability) >= 0
                print("0.25", flush=True)
        """)
        with SubprocessEvaluator([sys.executable, "-c", script]) as ev:
            assert ev.evaluate(flat(), capability=0.5) == 0.25
            assert ev.evaluate(flat(), capability=1.0) == 0.25
