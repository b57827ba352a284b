import csv
import json

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from pswarm import cli
from pswarm import config as configio
from pswarm.engine import AttributeOverride, ConfigError, InitSpec, ParticleAttributes, RunConfig
from pswarm.initialization import InitialCondition, Perturbation, SamplingMethod, Simultaneous
from pswarm.memory import GatheringMode, Penalty, PreservingFeasibility, PriorityRules
from pswarm.problems import Problem, SearchBounds, register_problem, unregister_problem
from pswarm.sociometry import Forward, Global, Ring, Wheel
from pswarm.stochastic import CoupledClassical, DecoupledConvex, PointMass, ScalingMode, SumOfTwoUniforms, Uniform
from pswarm.termination import TerminationConfig


def cpso_doc(t_max=25):
    return {
        "problem": {"name": "sphere", "dimension": 5},
        "swarm": {"size": 10, "seed": 7, "boundary": "none"},
        "termination": {"t_max": t_max},
        "defaults": {
            "omega": {"kind": "point", "value": 0.7298},
            "phi": {"kind": "sum2u", "iw": 2.0, "sw": 2.0},
            "scaling": "component",
            "combiner": {"kind": "coupled"},
        },
    }


def write_doc(tmp_path, doc, name="run.json"):
    path = tmp_path / name
    path.write_text(json.dumps(doc))
    return str(path)


distributions = st.one_of(
    st.builds(PointMass, st.floats(-2, 2)),
    st.floats(0, 2).flatmap(lambda lo: st.builds(Uniform, st.just(lo), st.floats(lo, 4))),
    st.builds(SumOfTwoUniforms, st.floats(0, 3), st.floats(0, 3)),
)
attributes = st.builds(
    ParticleAttributes,
    omega=distributions,
    phi=distributions,
    scaling=st.sampled_from(list(ScalingMode)),
    combiner=st.one_of(st.just(CoupledClassical()), st.builds(DecoupledConvex, st.builds(Uniform, st.just(0.0), st.just(1.0)))),
    sociometry=st.sampled_from([Global(True), Global(False), Ring(1, True), Forward(2, False), Wheel(1, True)]),
    cht=st.sampled_from([PriorityRules(), PreservingFeasibility(), Penalty((2.0,), 1.5)]),
    gathering=st.sampled_from(list(GatheringMode)),
).filter(lambda a: not isinstance(a.combiner, CoupledClassical) or isinstance(a.phi, SumOfTwoUniforms))


class TestConfigFile:
    @settings(max_examples=60, deadline=None)
    @given(attributes, st.integers(0, 2 ** 64 - 1), st.sampled_from([Simultaneous(), Perturbation(0.2)]))
    def test_round_trip(self, attrs, seed, relation):
        cfg = RunConfig(
            problem="sphere",
            dimension=3,
            swarm_size=5,
            seed=seed,
            init=InitSpec(InitialCondition.TWO_POSITIONS_ONE_MEMORY, relation, SamplingMethod.LATIN_HYPERCUBE),
            termination=TerminationConfig(t_max=None, diversity_threshold=1e-8),
            defaults=attrs,
            overrides=(AttributeOverride((0, 4), omega=PointMass(0.1)),),
        )
        assert configio.loads(configio.dumps(cfg)) == cfg

    def test_minimal_document_uses_defaults(self):
        cfg = configio.config_from_dict({"problem": {"name": "sphere", "dimension": 2}, "swarm": {"size": 3}})
        assert cfg == RunConfig(problem="sphere", dimension=2, swarm_size=3)

    @pytest.mark.parametrize("mutate,path", [
        (lambda d: d["problem"].pop("name"), "problem.name"),
        (lambda d: d["problem"].update(dimension=0), "problem.dimension"),
        (lambda d: d["swarm"].update(colour="red"), "swarm"),
        (lambda d: d["defaults"].update(phi={"kind": "uniform", "lo": 3.0, "hi": 1.0}), "defaults.phi"),
        (lambda d: d["defaults"].update(phi={"kind": "gamma"}), "defaults.phi"),
        (lambda d: d["defaults"].update(bogus=1), "defaults"),
        (lambda d: d.update(overrides=[{"particles": [12]}]), "overrides[0].particles"),
    ])
    def test_errors_name_the_field(self, mutate, path):
        doc = cpso_doc()
        mutate(doc)
        with pytest.raises(ConfigError) as info:
            configio.config_from_dict(doc)
        assert info.value.path == path

    def test_bad_json(self):
        with pytest.raises(ConfigError):
            configio.loads("{not json")

    def test_missing_file(self, tmp_path):
        with pytest.raises(ConfigError):
            configio.load(tmp_path / "absent.json")


class TestRunCommand:
    def test_summary_reports_search_length(self, tmp_path, capsys):
        cfgpath = write_doc(tmp_path, cpso_doc(t_max=25))
        assert cli.main(["run", "--config", cfgpath, "--trace", str(tmp_path / "t.csv")]) == cli.EXIT_OK
        out = capsys.readouterr().out
        assert "termination: SearchLength" in out
        assert "iterations: 25" in out

    def test_traces_are_bitwise_reproducible(self, tmp_path):
        cfgpath = write_doc(tmp_path, cpso_doc())
        a, b, c = (tmp_path / n for n in ("a.csv", "b.csv", "c.csv"))
        cli.main(["run", "--config", cfgpath, "--trace", str(a)])
        cli.main(["run", "--config", cfgpath, "--trace", str(b)])
        cli.main(["run", "--config", cfgpath, "--trace", str(c), "--seed", "8"])
        assert a.read_bytes() == b.read_bytes()
        assert a.read_bytes() != c.read_bytes()
        assert b"\r" not in a.read_bytes()

    def test_missing_problem_name(self, tmp_path, capsys):
        doc = cpso_doc()
        del doc["problem"]["name"]
        assert cli.main(["run", "--config", write_doc(tmp_path, doc)]) == cli.EXIT_CONFIG
        assert "problem.name" in capsys.readouterr().err

    def test_runtime_failure_code(self, tmp_path, capsys):
        def broken(x):
            raise FloatingPointError("objective blew up")

        register_problem("broken_cli", lambda d: Problem("broken_cli", d, SearchBounds.box(0, 1, d), broken))
        try:
            doc = cpso_doc()
            doc["problem"]["name"] = "broken_cli"
            assert cli.main(["run", "--config", write_doc(tmp_path, doc)]) == cli.EXIT_RUNTIME
        finally:
            unregister_problem("broken_cli")
        assert "blew up" in capsys.readouterr().err

    def test_output_dir_env(self, tmp_path, monkeypatch):
        monkeypatch.setenv(cli.OUTPUT_DIR_ENV, str(tmp_path / "out"))
        cfgpath = write_doc(tmp_path, cpso_doc(t_max=3))
        assert cli.main(["run", "--config", cfgpath, "--dump", "dump.csv"]) == cli.EXIT_OK
        assert (tmp_path / "out" / "trace.csv").read_text().startswith("iteration,best_objective,diversity\n")
        assert (tmp_path / "out" / "dump.csv").exists()

    def test_trace_to_stdout(self, tmp_path, capsys):
        cli.main(["run", "--config", write_doc(tmp_path, cpso_doc(t_max=2)), "--trace", "-"])
        out, err = capsys.readouterr()
        assert out.splitlines()[0] == "iteration,best_objective,diversity" and len(out.splitlines()) == 4
        assert "termination: SearchLength" in err


class TestAnalyzeCommand:
    def test_default_grid(self, tmp_path, capsys):
        path = tmp_path / "grid.csv"
        assert cli.main(["analyze", "--omega", "-1:2", "--phi", "0:5", "--res", "300", "--output", str(path)]) == 0
        with open(path, newline="") as fh:
            rows = list(csv.DictReader(fh))
        assert len(rows) == 90000
        assert list(rows[0]) == ["omega", "phi", "rate", "kind", "convergent"]
        assert not any(r["convergent"] == "true" for r in rows if float(r["omega"]) >= 1)
        assert "omega = phi/2 - 1" in capsys.readouterr().out

    def test_rectangular_resolution(self, tmp_path):
        path = tmp_path / "g.csv"
        cli.main(["analyze", "--res", "4x3", "--output", str(path)])
        assert len(path.read_text().splitlines()) == 13

    @pytest.mark.parametrize("argv", [["--omega", "2:1"], ["--res", "1"], ["--phi", "a:b"]])
    def test_bad_arguments(self, argv):
        with pytest.raises(SystemExit) as info:
            cli.main(["analyze", *argv, "--output", "-"])
        assert info.value.code == cli.EXIT_USAGE


class TestInitPreview:
    def _rows(self, tmp_path, condition):
        doc = {"problem": {"name": "sphere", "dimension": 2}, "swarm": {"size": 4, "seed": 1},
               "init": {"condition": condition}}
        out = tmp_path / "init.csv"
        assert cli.main(["init-preview", "--config", write_doc(tmp_path, doc), "--output", str(out)]) == 0
        with open(out, newline="") as fh:
            return list(csv.DictReader(fh))

    def test_stagnation(self, tmp_path):
        rows = self._rows(tmp_path, "stagnation")
        assert len(rows) == 4
        for r in rows:
            assert r["x1_0"] == r["x0_0"] == r["xm_0"] and r["x1_1"] == r["x0_1"] == r["xm_1"]

    def test_two_positions_one_memory(self, tmp_path):
        rows = self._rows(tmp_path, "two_positions_one_memory")
        for r in rows:
            f = [float(r[k]) for k in ("f_xm", "f_x1", "f_x0")]
            assert f[0] <= f[1] and f[0] <= f[2]
            assert np.hypot(float(r["xm_0"]), float(r["xm_1"])) ** 2 == pytest.approx(f[0], rel=1e-12)


def test_list_problems(capsys):
    assert cli.main(["list-problems"]) == 0
    out = capsys.readouterr().out
    for name in ("sphere", "rosenbrock", "rastrigin", "constrained_sphere"):
        assert name in out
