"""Config parsing, serialization round-trips, file writers, CLI exit codes."""
import filecmp
import subprocess
import sys

import numpy as np
import pytest

import latticegames as lg
from latticegames import cli, outputs

MINIMAL = """\
payoff.a11 = -8
payoff.a12 = 3
payoff.a21 = 4
payoff.a22 = -8
lattice.L = 600
run.T = 10000
run.seed = 7
"""

FULL = """\
# exercises every section
payoff.a11 = 1.5
payoff.a12 = -0.25
payoff.a21 = 0.75
payoff.a22 = 2.0
lattice.d = 2
lattice.M = 1
lattice.L = 10,12
run.T = 4.0
run.seed = 11
run.replicates = 6
run.init = single-site
run.init_strategy = 2
run.init_position = 3,4
run.sample_times = 0.5,1.0,4.0
run.snapshot_policy = full
output.dir = results
output.basename = demo
output.pgm = false
replicator.u0 = 0.25
replicator.dt = 0.02
sweep.a11_min = -3.0
sweep.a11_max = 1.0
sweep.a11_steps = 5
sweep.a22_min = -3.0
sweep.a22_max = 1.0
sweep.a22_steps = 5
triangle.m = 0.5
outcome.fraction = 0.9
outcome.coex_het_floor = 0.04
outcome.cluster_decay_factor = 4.0
drift.min_surviving = 10
"""


class TestParseConfig:
    def test_minimal_defaults(self):
        cfg = lg.parse_config(MINIMAL)
        assert cfg.payoff == lg.PayoffMatrix(-8, 3, 4, -8)
        assert (cfg.d, cfg.M, cfg.L) == (1, 1, (600,))
        assert (cfg.T, cfg.seed, cfg.replicates) == (10000.0, 7, 1)
        assert cfg.init == "bernoulli" and cfg.init_p == 0.5
        assert cfg.schedule() == (10000.0,)
        assert cfg.out_dir == "out" and cfg.basename == "run"
        assert not cfg.write_pgm

    def test_full_document(self):
        cfg = lg.parse_config(FULL)
        assert cfg.L == (10, 12)
        assert cfg.init_position == (3, 4)
        assert cfg.sample_times == (0.5, 1.0, 4.0)
        assert cfg.sweep_a11 == (-3.0, 1.0, 5)
        assert cfg.thresholds.fraction == 0.9
        assert cfg.drift_min_surviving == 10

    def test_side_broadcast(self):
        cfg = lg.parse_config(MINIMAL.replace("lattice.L = 600",
                                              "lattice.d = 2\nlattice.L = 10"))
        assert cfg.L == (10, 10)

    def test_blank_lines_and_comments_skipped(self):
        cfg = lg.parse_config("# header\n\n" + MINIMAL + "\n  # trailing\n")
        assert cfg.seed == 7

    @pytest.mark.parametrize("doc,fragment", [
        (MINIMAL + "physics.h = 1\n", "physics.h"),
        (MINIMAL + "run.seed = 8\n", "run.seed"),
        (MINIMAL.replace("run.seed = 7\n", ""), "run.seed"),
        (MINIMAL.replace("lattice.L = 600", "lattice.L = 601"), "lattice.L"),
        (MINIMAL.replace("lattice.L = 600", "lattice.M = 2\nlattice.L = 8"), "lattice.L"),
        (MINIMAL.replace("run.seed = 7", "run.seed = seven"), "run.seed"),
        (MINIMAL + "run.init = diagonal\n", "run.init"),
        (MINIMAL + "run.init_p = 1.5\n", "run.init_p"),
        (MINIMAL + "run.init_strategy = 3\n", "run.init_strategy"),
        (MINIMAL + "run.init_position = 1,2\n", "run.init_position"),
        (MINIMAL + "run.init_position = 700\n", "run.init_position"),
        (MINIMAL + "run.sample_times = 1.0,0.5\n", "run.sample_times"),
        (MINIMAL + "run.sample_times = 1.0,20000.0\n", "run.sample_times"),
        (MINIMAL + "run.sample_dt = 1.0\nrun.sample_times = 1.0\n", "run.sample_times"),
        (MINIMAL + "run.sample_dt = -1\n", "run.sample_dt"),
        (MINIMAL + "run.snapshot_policy = always\n", "run.snapshot_policy"),
        (MINIMAL + "output.pgm = yes\n", "output.pgm"),
        (MINIMAL + "replicator.u0 = -0.5\n", "replicator.u0"),
        (MINIMAL + "replicator.dt = 20000\n", "replicator.dt"),
        (MINIMAL + "sweep.a11_min = 0\n", "sweep.a11_max"),
        (MINIMAL + "sweep.a11_min = 0\nsweep.a11_max = 1\nsweep.a11_steps = 0\n",
         "sweep.a11_steps"),
        (MINIMAL + "sweep.a11_min = 1\nsweep.a11_max = 0\nsweep.a11_steps = 3\n",
         "sweep.a11_max"),
        (MINIMAL + "triangle.m = 0\n", "triangle.m"),
        (MINIMAL + "outcome.fraction = 2\n", "outcome"),
        (MINIMAL + "drift.min_surviving = 0\n", "drift.min_surviving"),
        (MINIMAL.replace("run.T = 10000", "run.T = 0"), "run.T"),
        ("payoff.a11\n" + MINIMAL, "key = value"),
    ])
    def test_errors_name_the_key(self, doc, fragment):
        with pytest.raises(lg.ConfigError) as err:
            lg.parse_config(doc)
        assert fragment in str(err.value)

    def test_dt_schedule(self):
        cfg = lg.parse_config(MINIMAL.replace("run.T = 10000", "run.T = 1.0")
                              + "run.sample_dt = 0.3\n")
        assert cfg.schedule() == (0.0, 0.3, 0.6, 0.8999999999999999, 1.0)

    def test_dt_dividing_horizon_has_no_duplicate(self):
        cfg = lg.parse_config(MINIMAL.replace("run.T = 10000", "run.T = 1.0")
                              + "run.sample_dt = 0.25\n")
        sched = cfg.schedule()
        assert sched == (0.0, 0.25, 0.5, 0.75, 1.0)
        assert len(set(sched)) == len(sched)


class TestSerializeConfig:
    @pytest.mark.parametrize("doc", [MINIMAL, FULL])
    def test_round_trip_identity(self, doc):
        cfg = lg.parse_config(doc)
        text = lg.serialize_config(cfg)
        assert lg.parse_config(text) == cfg

    def test_serialization_idempotent(self):
        cfg = lg.parse_config(FULL)
        once = lg.serialize_config(cfg)
        twice = lg.serialize_config(lg.parse_config(once))
        assert once == twice

    def test_float_precision_survives(self):
        doc = MINIMAL.replace("payoff.a11 = -8", "payoff.a11 = 0.1000000000000001")
        cfg = lg.parse_config(lg.serialize_config(lg.parse_config(doc)))
        assert cfg.payoff.a11 == 0.1000000000000001


def small_run(tmp_path, **overrides):
    spec = lg.LatticeSpec(1, 1, (16,))
    params = lg.SimParams(T=1.0, seed=5, sample_times=(0.5, 1.0),
                          snapshot_policy=overrides.pop("policy", "full"))
    rng = lg.rng_stream(5, 0)
    cfg0 = lg.build_initial(lg.BernoulliInit(0.5), spec, rng)
    return lg.run_direct(cfg0, lg.PayoffMatrix(1, -1, 2, -2), params, rng=rng)


class TestWriters:
    def test_timeseries_csv(self, tmp_path):
        traj = small_run(tmp_path)
        path = tmp_path / "ts.csv"
        lg.write_timeseries_csv(traj, str(path))
        lines = path.read_text().splitlines()
        assert lines[0] == "time,density1,het_r1,interface_count"
        assert len(lines) == 1 + len(traj.times)
        t, dens, het, ic = lines[1].split(",")
        assert float(t) == traj.times[0]
        assert float(dens) == traj.density1[0]
        assert float(het) == traj.het_r1[0]
        assert int(ic) == traj.interface_count[0]

    def test_replicator_csv(self, tmp_path):
        ode = lg.integrate_replicator(lg.PayoffMatrix(-8, 3, 4, -8), 0.3, 1.0, 0.01)
        path = tmp_path / "ode.csv"
        lg.write_replicator_csv(ode, 0.3, str(path))
        lines = path.read_text().splitlines()
        assert lines[0] == "time,u1"
        assert lines[1] == "0.0,0.3"
        assert len(lines) == 2 + len(ode.times)
        last_t, last_u = lines[-1].split(",")
        assert float(last_t) == 1.0
        assert float(last_u) == ode.final

    def test_sweep_csv(self, tmp_path):
        params = lg.SimParams(T=1.0, seed=0)
        rep = lg.sweep_phase_diagram(0.0, 0.0, (-2.0,), (-2.0, 1.0),
                                     M=1, d=2, L=6, params=params, replicates=0)
        path = tmp_path / "sweep.csv"
        lg.write_sweep_csv(rep, str(path))
        lines = path.read_text().splitlines()
        assert lines[0] == ",".join(lg.SWEEP_HEADER)
        assert len(lines) == 3
        first = lines[1].split(",")
        assert first[0] == "-2.0" and first[1] == "-2.0"
        assert set(first[2:8]) <= {"true", "false"}
        assert first[9] == ""   # no empirical outcome requested

    def test_drift_csv(self, tmp_path):
        A = lg.PayoffMatrix(3, 1, 0, -1)
        est = lg.DriftEstimate(5.1, 0.2, 40, lg.GAP_GE2, total_time=33.0)
        res = lg.DriftResult(ge2=est, eq1=None, replicates_run=50, discarded=2)
        path = tmp_path / "drift.csv"
        lg.write_drift_csv(res, A, str(path))
        lines = path.read_text().splitlines()
        assert len(lines) == 2
        row = lines[1].split(",")
        assert row[0] == "gap>=2"
        assert float(row[1]) == 5.1
        assert float(row[5]) == 5.0 and row[6] == "exact"

    def test_spacetime_pgm(self, tmp_path):
        traj = small_run(tmp_path)
        path = tmp_path / "st.pgm"
        lg.write_spacetime_pgm(traj, str(path))
        lines = path.read_text().splitlines()
        assert lines[0] == "P2"
        assert lines[1] == "16 2"
        assert lines[2] == "255"
        for row in lines[3:]:
            assert set(row.split()) <= {"0", "255"}
        # top row is the first sample: strategy 1 maps to white
        top = np.array(lines[3].split(), dtype=int)
        want = np.where(traj.snapshots[0].strategies == 1, 255, 0)
        assert np.array_equal(top, want)

    def test_pgm_requires_snapshots(self, tmp_path):
        traj = small_run(tmp_path, policy="observables-only")
        with pytest.raises(ValueError):
            lg.write_spacetime_pgm(traj, str(tmp_path / "x.pgm"))

    def test_pgm_requires_1d(self, tmp_path):
        spec = lg.LatticeSpec(2, 1, (6, 6))
        params = lg.SimParams(T=0.5, seed=1, snapshot_policy="full")
        rng = lg.rng_stream(1, 0)
        cfg0 = lg.build_initial(lg.BernoulliInit(0.5), spec, rng)
        traj = lg.run_direct(cfg0, lg.PayoffMatrix(1, -1, 2, -2), params, rng=rng)
        with pytest.raises(ValueError):
            lg.write_spacetime_pgm(traj, str(tmp_path / "x.pgm"))

    def test_pgm_dimension_cap(self, tmp_path):
        spec = lg.LatticeSpec(1, 1, (10002,))
        cfg = lg.Configuration.uniform(spec, 1)
        traj = lg.Trajectory(
            times=np.array([1.0]), density1=np.array([1.0]),
            het_r1=np.array([0.0]), interface_count=np.array([0]),
            snapshots=[cfg], final_config=cfg, fixation=(1, 0.0), frozen=False,
            first_flip=None, n_flips=0, initial_density1=1.0, initial_het_r1=0.0)
        with pytest.raises(ValueError):
            lg.write_spacetime_pgm(traj, str(tmp_path / "x.pgm"))


SIM_DOC = """\
payoff.a11 = 1
payoff.a12 = -1
payoff.a21 = 2
payoff.a22 = -2
lattice.L = 40
run.T = 2.0
run.seed = 3
run.sample_dt = 0.5
output.basename = demo
output.pgm = true
"""


def write_doc(tmp_path, text, name="run.cfg"):
    path = tmp_path / name
    path.write_text(text)
    return str(path)


class TestCliSimulate:
    def test_writes_outputs(self, tmp_path, capsys):
        cfgp = write_doc(tmp_path, SIM_DOC)
        out = tmp_path / "out"
        assert cli.main(["simulate", "--config", cfgp, "--out", str(out)]) == 0
        msgs = capsys.readouterr().out
        ts = out / "demo_timeseries.csv"
        pgm = out / "demo_spacetime.pgm"
        assert ts.exists() and pgm.exists()
        assert f"wrote {ts}" in msgs and f"wrote {pgm}" in msgs
        lines = ts.read_text().splitlines()
        assert lines[0] == "time,density1,het_r1,interface_count"
        assert len(lines) == 6   # samples at 0, .5, 1, 1.5, 2
        head = pgm.read_text().splitlines()[:3]
        assert head == ["P2", "40 5", "255"]

    def test_byte_identical_reruns(self, tmp_path):
        cfgp = write_doc(tmp_path, SIM_DOC)
        a, b = tmp_path / "a", tmp_path / "b"
        assert cli.main(["simulate", "--config", cfgp, "--out", str(a)]) == 0
        assert cli.main(["simulate", "--config", cfgp, "--out", str(b)]) == 0
        for name in ("demo_timeseries.csv", "demo_spacetime.pgm"):
            assert filecmp.cmp(a / name, b / name, shallow=False)

    def test_seed_override_changes_output(self, tmp_path):
        cfgp = write_doc(tmp_path, SIM_DOC)
        a, b = tmp_path / "a", tmp_path / "b"
        cli.main(["simulate", "--config", cfgp, "--out", str(a), "--seed", "99"])
        cli.main(["simulate", "--config", cfgp, "--out", str(b)])
        assert not filecmp.cmp(a / "demo_timeseries.csv", b / "demo_timeseries.csv",
                               shallow=False)

    def test_pgm_needs_1d(self, tmp_path, capsys):
        doc = SIM_DOC.replace("lattice.L = 40", "lattice.d = 2\nlattice.L = 10")
        cfgp = write_doc(tmp_path, doc)
        assert cli.main(["simulate", "--config", cfgp, "--out", str(tmp_path / "o")]) == 2
        assert "output.pgm" in capsys.readouterr().err

    def test_out_colliding_with_file_is_io_error(self, tmp_path):
        cfgp = write_doc(tmp_path, SIM_DOC)
        blocker = tmp_path / "blocked"
        blocker.write_text("do not overwrite")
        assert cli.main(["simulate", "--config", cfgp, "--out", str(blocker)]) == 3
        assert blocker.read_text() == "do not overwrite"

    def test_missing_config_file(self, tmp_path, capsys):
        missing = str(tmp_path / "absent.cfg")
        assert cli.main(["simulate", "--config", missing]) == 2
        assert "--config" in capsys.readouterr().err


class TestCliReplicator:
    def test_converges_to_interior_point(self, tmp_path, capsys):
        doc = MINIMAL.replace("run.T = 10000", "run.T = 60") + "replicator.dt = 0.05\n"
        cfgp = write_doc(tmp_path, doc)
        out = tmp_path / "out"
        assert cli.main(["replicator", "--config", cfgp, "--out", str(out)]) == 0
        msgs = capsys.readouterr().out
        assert "regime = coexistence" in msgs
        last = (out / "run_replicator.csv").read_text().splitlines()[-1]
        assert float(last.split(",")[1]) == pytest.approx(11 / 23, abs=1e-4)


class TestCliSweep:
    def test_predicate_only(self, tmp_path, capsys):
        doc = (MINIMAL.replace("run.T = 10000", "run.T = 1")
               .replace("run.seed = 7", "run.seed = 7\nrun.replicates = 0")
               + "sweep.a11_min = -2\nsweep.a11_max = 2\nsweep.a11_steps = 3\n"
               + "sweep.a22_min = -2\nsweep.a22_max = 2\nsweep.a22_steps = 2\n")
        cfgp = write_doc(tmp_path, doc)
        out = tmp_path / "out"
        assert cli.main(["sweep", "--config", cfgp, "--out", str(out)]) == 0
        lines = (out / "run_sweep.csv").read_text().splitlines()
        assert len(lines) == 1 + 3 * 2
        assert "note:" in capsys.readouterr().out

    def test_with_replicates(self, tmp_path):
        doc = (SIM_DOC.replace("output.pgm = true", "output.pgm = false")
               .replace("run.T = 2.0", "run.T = 1.0")
               + "run.replicates = 3\n"
               + "sweep.a11_min = 1\nsweep.a11_max = 3\nsweep.a11_steps = 2\n"
               + "sweep.a22_min = -2\nsweep.a22_max = -1\nsweep.a22_steps = 1\n")
        cfgp = write_doc(tmp_path, doc)
        out = tmp_path / "out"
        assert cli.main(["sweep", "--config", cfgp, "--out", str(out)]) == 0
        lines = (out / "demo_sweep.csv").read_text().splitlines()
        assert len(lines) == 3
        assert all(row.split(",")[10] == "3" for row in lines[1:])

    def test_requires_grid(self, tmp_path, capsys):
        cfgp = write_doc(tmp_path, MINIMAL)
        assert cli.main(["sweep", "--config", cfgp, "--out", str(tmp_path / "o")]) == 2
        assert "sweep.a11_min" in capsys.readouterr().err


class TestCliClassify:
    def test_reports_fields(self, tmp_path, capsys):
        cfgp = write_doc(tmp_path, MINIMAL)
        assert cli.main(["classify", "--config", cfgp,
                         "--out", str(tmp_path / "o")]) == 0
        msgs = capsys.readouterr().out
        assert "replicator regime: coexistence" in msgs
        assert "game class:" in msgs
        assert "in clustering set: True" in msgs
        assert "gap >= 2: -1.0" in msgs
        assert "note:" in msgs


class TestCliCtable:
    def test_prints_table(self, capsys):
        assert cli.main(["ctable", "--max-M", "2", "--max-d", "3"]) == 0
        msgs = capsys.readouterr().out
        assert "1.4000" in msgs and "1.0000" in msgs
        assert len(msgs.splitlines()) == 3

    def test_rejects_bad_limits(self, capsys):
        assert cli.main(["ctable", "--max-M", "0"]) == 2


DRIFT_DOC = """\
payoff.a11 = 3
payoff.a12 = 1
payoff.a21 = 0
payoff.a22 = -1
lattice.L = 60
run.T = 1.0
run.seed = 21
run.init = halfspace
run.replicates = 8
drift.min_surviving = 5
"""


class TestCliBoundaryDrift:
    def test_runs_and_reports(self, tmp_path, capsys):
        cfgp = write_doc(tmp_path, DRIFT_DOC)
        out = tmp_path / "out"
        assert cli.main(["boundary-drift", "--config", cfgp, "--out", str(out)]) == 0
        msgs = capsys.readouterr().out
        assert "gap>=2: estimate" in msgs
        assert "discarded" in msgs
        lines = (out / "run_drift.csv").read_text().splitlines()
        assert lines[0].startswith("gap_class,estimate")
        assert len(lines) >= 2

    def test_requires_halfspace(self, tmp_path, capsys):
        doc = DRIFT_DOC.replace("run.init = halfspace\n", "")
        cfgp = write_doc(tmp_path, doc)
        assert cli.main(["boundary-drift", "--config", cfgp,
                         "--out", str(tmp_path / "o")]) == 2
        assert "run.init" in capsys.readouterr().err

    def test_requires_nearest_neighbor_1d(self, tmp_path, capsys):
        doc = DRIFT_DOC.replace("lattice.L = 60", "lattice.d = 2\nlattice.L = 12")
        cfgp = write_doc(tmp_path, doc)
        assert cli.main(["boundary-drift", "--config", cfgp,
                         "--out", str(tmp_path / "o")]) == 2
        assert "lattice.d" in capsys.readouterr().err


class TestCliParsing:
    def test_missing_config_flag_is_usage_error(self):
        with pytest.raises(SystemExit) as err:
            cli.main(["simulate"])
        assert err.value.code == 2

    def test_unknown_subcommand(self):
        with pytest.raises(SystemExit) as err:
            cli.main(["paint"])
        assert err.value.code == 2

    def test_console_script_installed(self):
        proc = subprocess.run([sys.executable, "-m", "latticegames.cli",
                               "ctable", "--max-M", "1", "--max-d", "2"],
                              capture_output=True, text=True)
        assert proc.returncode == 0
        assert "1.4000" in proc.stdout
