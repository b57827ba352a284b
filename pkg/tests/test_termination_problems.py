import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from pswarm.problems import (
    SearchBounds,
    builtin_suite,
    evaluate,
    get_problem,
    make_constrained_sphere,
    make_rastrigin,
    make_rosenbrock,
    make_sphere,
    problem_names,
    register_problem,
    unregister_problem,
)
from pswarm.termination import (
    StopReason,
    SwarmStatistics,
    TerminationConfig,
    should_stop,
    swarm_diversity,
)

coords = st.floats(-1e3, 1e3)


class TestDiversity:
    def test_collapsed(self):
        assert swarm_diversity(np.ones((4, 3))) == 0.0

    def test_pair(self):
        assert swarm_diversity([[0, 0], [2, 0]]) == 1.0

    def test_unit_square(self):
        corners = [[0, 0], [1, 0], [0, 1], [1, 1]]
        brute = np.mean([math.dist(c, (0.5, 0.5)) for c in corners])
        assert swarm_diversity(corners) == pytest.approx(brute, rel=1e-15)
        assert swarm_diversity(corners) == pytest.approx(math.sqrt(2) / 2, rel=1e-12)

    @given(st.lists(st.tuples(coords, coords), min_size=1, max_size=10), coords, coords, st.floats(0.01, 100))
    def test_translation_and_scaling(self, pts, dx, dy, k):
        x = np.array(pts)
        base = swarm_diversity(x)
        assert swarm_diversity(x + [dx, dy]) == pytest.approx(base, rel=1e-9, abs=1e-6)
        assert swarm_diversity(k * x) == pytest.approx(k * base, rel=1e-9, abs=1e-9)


class TestShouldStop:
    def test_length(self):
        s = SwarmStatistics.for_window(5)
        s.record(10, 1.0, 1.0)
        assert should_stop(s, TerminationConfig(t_max=10)) == (True, StopReason.SEARCH_LENGTH)

    def test_clustering(self):
        s = SwarmStatistics.for_window(5)
        s.record(1, 1.0, 1e-12)
        assert should_stop(s, TerminationConfig(t_max=None, diversity_threshold=1e-9)).reason is StopReason.CLUSTERING

    def test_convergence_needs_full_window(self):
        cfg = TerminationConfig(t_max=None, improvement_epsilon=1e-9, window=4)
        s = SwarmStatistics.for_window(4)
        values = [5.0, 5.0 - 1e-12, 5.0 - 2e-12, 5.0 - 3e-12]
        for it, v in enumerate(values[:3], start=1):
            s.record(it, v, 1.0)
            assert not should_stop(s, cfg).stop
        s.record(4, values[3], 1.0)
        assert should_stop(s, cfg) == (True, StopReason.CONVERGENCE)

    def test_improving_run_continues(self):
        cfg = TerminationConfig(t_max=None, improvement_epsilon=1e-9, window=3)
        s = SwarmStatistics.for_window(3)
        for it, v in enumerate([5.0, 4.0, 3.0], start=1):
            s.record(it, v, 1.0)
        assert not should_stop(s, cfg).stop

    def test_priority_order(self):
        s = SwarmStatistics.for_window(1)
        s.record(3, 1.0, 0.0)
        cfg = TerminationConfig(t_max=3, diversity_threshold=1.0, improvement_epsilon=1.0, window=1)
        assert should_stop(s, cfg).reason is StopReason.SEARCH_LENGTH

    def test_length_monotone(self):
        cfg = TerminationConfig(t_max=5)
        s = SwarmStatistics.for_window(2)
        seen = False
        for it in range(1, 12):
            s.record(it, 1.0, 1.0)
            stop = should_stop(s, cfg).stop
            assert stop or not seen
            seen = seen or stop

    @pytest.mark.parametrize("kwargs", [
        dict(t_max=None),
        dict(t_max=0),
        dict(diversity_threshold=-1.0),
        dict(improvement_epsilon=-1.0),
        dict(window=0),
    ])
    def test_config_validation(self, kwargs):
        with pytest.raises(ValueError):
            TerminationConfig(**kwargs)

    def test_history_bounded(self):
        s = SwarmStatistics.for_window(3)
        for it in range(10):
            s.record(it, float(it), 1.0)
        assert list(s.best_history) == [7.0, 8.0, 9.0]


class TestProblems:
    def test_sphere_origin(self):
        e = evaluate(make_sphere(3), np.zeros(3))
        assert e.objective == 0 and e.feasible

    def test_rosenbrock_optimum(self):
        assert evaluate(make_rosenbrock(2), [1.0, 1.0]).objective == 0

    def test_constrained_sphere_origin(self):
        e = evaluate(make_constrained_sphere(2), [0.0, 0.0])
        assert e.objective == 0 and e.violations == (1.0,) and not e.feasible

    def test_rastrigin_values(self):
        assert evaluate(make_rastrigin(2), [0.0, 0.0]).objective == 0
        x = 0.5
        brute = 10 * 1 + (x * x - 10 * math.cos(2 * math.pi * x))
        assert evaluate(make_rastrigin(1), [x]).objective == pytest.approx(20.25, abs=1e-12)
        assert brute == pytest.approx(20.25, abs=1e-12)

    def test_dimension_mismatch(self):
        with pytest.raises(ValueError):
            evaluate(make_sphere(3), np.zeros(2))

    @pytest.mark.parametrize("d", [2, 5, 10])
    def test_known_optima(self, d):
        for p in builtin_suite(d):
            x, f = p.known_optimum
            e = p.evaluate(x)
            assert abs(e.objective - f) <= 1e-12
            assert all(v == 0.0 for v in e.violations)

    def test_standard_bounds(self):
        assert make_sphere(2).bounds == SearchBounds.box(-100, 100, 2)
        assert make_rosenbrock(2).bounds == SearchBounds.box(-30, 30, 2)
        assert make_rastrigin(2).bounds == SearchBounds.box(-5.12, 5.12, 2)

    def test_suite_names(self):
        names = {p.name for p in builtin_suite(4)}
        assert {"sphere", "rosenbrock", "rastrigin", "constrained_sphere"} <= names

    def test_registry(self):
        register_problem("flat_test", lambda d: make_sphere(d))
        try:
            assert "flat_test" in problem_names()
            assert get_problem("flat_test", 2).dimension == 2
            with pytest.raises(ValueError):
                register_problem("flat_test", make_sphere)
        finally:
            unregister_problem("flat_test")
        with pytest.raises(KeyError):
            get_problem("flat_test", 2)

    def test_bounds_validation(self):
        with pytest.raises(ValueError):
            SearchBounds([0, 1], [1, 1])
        with pytest.raises(ValueError):
            SearchBounds([0], [np.inf])
