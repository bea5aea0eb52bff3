import numpy as np
import pytest
from numpy.testing import assert_allclose

from vibrodimer import cli
from vibrodimer.dynamics import TimeGrid, evolve_observables
from vibrodimer.errors import NotConverged, ParseError, ValidationError
from vibrodimer.runner import (SHIPPED_CONFIGS, ResultTable, check_convergence_table,
                               config_from_mapping, default_g0_values, load_config,
                               shipped_config, read_results, run_convergence, run_fig1,
                               run_scenario, run_sweep, write_results)

BASE = {
    "delta_e_cm1": 1042.0, "v_cm1": 92.0, "omega_vib_cm1": 1111.0,
    "g_cm1": 267.1, "temperature_k": 270.0,
}


def toml_text(mapping):
    def fmt(v):
        if isinstance(v, str):
            return f'"{v}"'
        if isinstance(v, list):
            return "[" + ", ".join(fmt(x) for x in v) + "]"
        return repr(v)
    return "\n".join(f"{k} = {fmt(v)}" for k, v in mapping.items()) + "\n"


@pytest.fixture
def write_config(tmp_path):
    def _write(**entries):
        path = tmp_path / "cfg.toml"
        path.write_text(toml_text(entries))
        return path
    return _write


class TestConfig:
    def test_shipped_fig1(self):
        cfg = shipped_config("fig1")
        m = cfg.model
        assert (m.delta_e, m.v, m.omega_vib, m.g) == (1042.0, 92.0, 1111.0, 267.1)
        assert m.temperature == 270.0 and m.n_trunc_vib == 5
        assert cfg.scenario == "fig1" and cfg.discord_grid_n == 64

    @pytest.mark.parametrize("name", SHIPPED_CONFIGS)
    def test_all_shipped_configs_parse(self, name):
        assert shipped_config(name).model.g == 267.1

    def test_sweep_defaults(self):
        cfg = shipped_config("fig2_pop")
        assert cfg.model.omega0 == pytest.approx(11.11)
        assert len(cfg.g0_values) == 21
        assert cfg.g0_values[0] == pytest.approx(2.671) and cfg.g0_values[-1] == pytest.approx(267.1)
        assert cfg.discord_grid_n == 0
        assert "g0_values_cm1" in cfg.defaults_used

    def test_default_sweep_brackets_tenth_of_g(self):
        values = np.array(default_g0_values(267.1))
        assert np.any(np.isclose(values, 26.71))
        assert np.all(np.diff(values) > 0)

    def test_missing_field(self, write_config):
        entries = dict(BASE, scenario="fig1")
        del entries["omega_vib_cm1"]
        with pytest.raises(ValidationError) as info:
            load_config(write_config(**entries))
        assert info.value.field == "omega_vib_cm1"
        assert "omega_vib_cm1" in str(info.value)

    def test_negative_truncation(self, write_config):
        with pytest.raises(ValidationError) as info:
            load_config(write_config(scenario="fig1", n_trunc_vib=-2, **BASE))
        assert info.value.field == "n_trunc_vib"

    def test_unknown_key(self, write_config):
        with pytest.raises(ValidationError) as info:
            load_config(write_config(scenario="fig1", omega_vib=1111.0, **BASE))
        assert info.value.field == "omega_vib"

    @pytest.mark.parametrize("key, value", [
        ("scenario", "fig9"), ("g0_cm1", -1.0), ("temperature_k", -5.0),
        ("n_points", 1), ("bath_init", "hot"), ("g_cm1", "big"), ("n_trunc_vib", 5.5),
    ])
    def test_invalid_values(self, key, value):
        raw = dict(BASE, scenario="custom")
        raw[key] = value
        with pytest.raises(ValidationError) as info:
            config_from_mapping(raw)
        assert info.value.field == key

    def test_empty_sweep(self):
        with pytest.raises(ValidationError):
            config_from_mapping(dict(BASE, scenario="sweep_pop", g0_values_cm1=[]))

    def test_parse_error_position(self, tmp_path):
        path = tmp_path / "bad.toml"
        path.write_text('scenario = "fig1"\ndelta_e_cm1 = = 3\n')
        with pytest.raises(ParseError) as info:
            load_config(path)
        assert info.value.line == 2
        assert info.value.column is not None

    def test_nested_table_rejected(self, tmp_path):
        path = tmp_path / "nested.toml"
        path.write_text(toml_text(dict(BASE, scenario="fig1")) + "[extra]\nx = 1\n")
        with pytest.raises(ValidationError):
            load_config(path)


def small(scenario, **extra):
    raw = dict(BASE, scenario=scenario, t_end_fs=200.0, n_points=11)
    raw.update(extra)
    return config_from_mapping(raw)


class TestResults:
    def test_roundtrip(self, tmp_path, rng):
        rows = rng.normal(size=(7, 3)) * 10.0 ** rng.integers(-8, 8, size=(7, 3))
        table = ResultTable(("a", "b", "c"), rows, {"n_trunc_vib": 5, "note": "x"})
        path = tmp_path / "t.csv"
        write_results(table, path)
        back = read_results(path)
        assert back.columns == table.columns
        assert back.metadata == table.metadata
        assert np.array_equal(back.rows, np.array([[float(f"{x:.12g}") for x in r] for r in rows]))
        assert_allclose(back.rows, rows, rtol=1e-11)

    def test_empty_table(self, tmp_path):
        path = tmp_path / "empty.csv"
        write_results(ResultTable(("g0_cm1", "time_fs", "value"), [], {"k": 1}), path)
        lines = path.read_text().splitlines()
        assert lines == ["# k = 1", "g0_cm1,time_fs,value"]
        assert read_results(path).rows.shape == (0, 3)

    def test_ragged_rows_rejected(self):
        with pytest.raises(ValueError):
            ResultTable(("a", "b"), np.zeros((2, 3)))

    def test_metadata_and_determinism(self, tmp_path):
        cfg = small("fig1", discord_grid_n=8, discord_refine_iters=5)
        paths = [tmp_path / "a.csv", tmp_path / "b.csv"]
        for path in paths:
            write_results(run_fig1(cfg), path)
        a, b = (p.read_text().splitlines() for p in paths)
        meta = read_results(paths[0]).metadata
        assert meta["n_trunc_vib"] == 5
        for key in ("delta_e_cm1", "v_cm1", "omega_vib_cm1", "g_cm1", "temperature_k",
                    "omega0_cm1", "g0_cm1", "code_version"):
            assert key in meta
        assert meta["time_window_source"] == "config"
        assert [x for x in a if not x.startswith("# run")] == [x for x in b if not x.startswith("# run")]


class TestScenarios:
    def test_fig1_columns(self):
        table = run_fig1(small("fig1", discord_grid_n=8, discord_refine_iters=10))
        assert table.columns == ("time_fs", "negativity", "discord", "eof_lb")
        assert table.rows.shape == (11, 4)
        assert np.all(table.column("negativity")[1:] > 0)
        assert np.all(table.column("discord")[1:] > 0)

    def test_fig1_uncoupled(self):
        table = run_fig1(small("fig1", g_cm1=0.0, discord_grid_n=8))
        assert np.max(np.abs(table.rows[:, 1:])) < 1e-12

    def test_sweep_zero_coupling_matches_two_factor(self):
        cfg = small("sweep_pop", g0_values_cm1=[0.0, 26.71], omega0_cm1=11.11, n_trunc_bath=4)
        table = run_sweep(cfg)
        assert table.columns == ("g0_cm1", "time_fs", "value")
        assert_allclose(table.column("g0_cm1"), np.repeat([0.0, 26.71], 11))
        ref = evolve_observables(cfg.model, cfg.grid, ["p_x_minus"])
        assert np.max(np.abs(table.where("g0_cm1", 0.0).column("value") - ref["p_x_minus"])) < 1e-9

    def test_sweep_workers_deterministic(self):
        cfg = small("sweep_neg_bath", g0_values_cm1=[5.0, 0.0, 20.0], n_trunc_bath=4)
        serial = run_sweep(cfg)
        from dataclasses import replace
        threaded = run_sweep(replace(cfg, workers=3))
        assert np.array_equal(serial.rows, threaded.rows)
        assert_allclose(serial.column("g0_cm1")[::11], [5.0, 0.0, 20.0])

    def test_sweep_optional_discord(self):
        cfg = small("sweep_neg_vib", g0_values_cm1=[10.0], n_trunc_bath=3, discord_grid_n=6,
                    discord_refine_iters=4)
        assert run_sweep(cfg).columns[-1] == "discord"

    def test_wrong_scenario(self):
        with pytest.raises(ValidationError):
            run_fig1(small("custom"))

    def test_convergence_table(self):
        table = run_convergence(small("convergence", discord_grid_n=0, n_trunc_vib=1))
        assert table.column("passed")[0] == 0.0
        with pytest.raises(NotConverged):
            check_convergence_table(table)

    def test_custom(self):
        table = run_scenario(small("custom", g0_cm1=10.0, n_trunc_bath=3, discord_grid_n=0))
        assert "negativity_bath" in table.columns
        assert np.ptp(table.column("energy")) < 1e-9


class TestCLI:
    def test_validate_shipped(self, capsys):
        assert cli.main(["validate"]) == 0
        assert "scenario=fig1" in capsys.readouterr().out

    def test_validation_exit_code(self, write_config, capsys):
        path = write_config(scenario="fig1", **{k: v for k, v in BASE.items() if k != "g_cm1"})
        assert cli.main(["validate", "--config", str(path)]) == 2
        assert "g_cm1" in capsys.readouterr().err

    def test_missing_file(self, tmp_path):
        assert cli.main(["fig1", "--config", str(tmp_path / "none.toml")]) == 2

    def test_scenario_mismatch(self, write_config):
        path = write_config(scenario="custom", **BASE)
        assert cli.main(["sweep", "--config", str(path)]) == 2

    def test_fig1_writes_csv(self, write_config, tmp_path):
        path = write_config(scenario="fig1", t_end_fs=100.0, n_points=3, discord_grid_n=4,
                            discord_refine_iters=2, **BASE)
        out = tmp_path / "out.csv"
        assert cli.main(["fig1", "--config", str(path), "--out", str(out), "--workers", "2"]) == 0
        table = read_results(out)
        assert table.rows.shape == (3, 4)
        assert table.metadata["workers"] == 2

    def test_nonconvergence_exit_code(self, write_config, tmp_path):
        path = write_config(scenario="convergence", n_trunc_vib=1, t_end_fs=300.0,
                            n_points=16, discord_grid_n=0, **BASE)
        assert cli.main(["convergence", "--config", str(path), "--out", str(tmp_path / "c.csv")]) == 3
        assert (tmp_path / "c.csv").exists()

    def test_converged_exit_code(self, write_config, tmp_path):
        path = write_config(scenario="convergence", n_trunc_vib=9, t_end_fs=300.0,
                            n_points=16, discord_grid_n=0, **BASE)
        assert cli.main(["convergence", "--config", str(path), "--out", str(tmp_path / "c.csv")]) == 0
