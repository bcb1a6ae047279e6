import json
import textwrap

import numpy as np
import pytest

from sun_coherence.cli import (
    EXIT_CONFIG,
    EXIT_NUMERICAL,
    EXIT_OK,
    OUTPUT_ENV,
    ConfigError,
    RunConfig,
    main,
    run,
    verify,
)

PROPORTIONAL = """
n_levels = 2
methods = {methods}

[hamiltonian]
kind = "rwa"
shape = "gaussian"
omega0 = {omega0}
delta0 = {delta0}
detuning_mode = "{mode}"
center = 5.0
width = 1.5

[grid]
t_start = 0.0
t_end = 10.0
n_steps = {n_steps}

[initial_state]
kind = "ground"

[output]
path = "{out}"
"""


def write_config(tmp_path, name="run.toml", methods=("rk4", "magnus", "closedform"), omega0=2.0,
                 delta0=0.8, mode="proportional", n_steps=4000, out=None):
    text = PROPORTIONAL.format(
        methods=json.dumps(list(methods)), omega0=omega0, delta0=delta0, mode=mode,
        n_steps=n_steps, out=out or (tmp_path / "out").as_posix(),
    )
    path = tmp_path / name
    path.write_text(text)
    return path


def load_csv(path):
    with open(path) as fh:
        header = fh.readline().strip().split(",")
    return header, np.loadtxt(path, delimiter=",", skiprows=1)


def test_run_proportional(tmp_path):
    cfg = write_config(tmp_path, methods=("liouville", "rk4", "magnus", "weinorman", "closedform"))
    assert main(["run", str(cfg)]) == EXIT_OK
    summary = json.loads((tmp_path / "out" / "summary.json").read_text())
    assert summary["analysis_frame"] == "F"
    assert summary["blocks"] == [[1], [2, 3]]
    assert all(v < 1e-6 for v in summary["pairwise_max_deviation"].values())
    for m, entry in summary["methods"].items():
        assert entry["norm2_drift"] < 1e-8
        assert max(entry["block_norm2_drift"]) < 1e-8
    assert summary["methods"]["liouville"]["trace_drift"] < 1e-8

    header, data = load_csv(tmp_path / "out" / "liouville.csv")
    assert header == ["time", "v1", "v2", "v3", "norm2", "block1_norm2", "block2_norm2", "trace", "purity"]
    assert data.shape == (4001, 9)


@pytest.mark.parametrize("method", ["rk4", "magnus", "closedform"])
def test_trajectory_columns_self_consistent(tmp_path, method):
    cfg = write_config(tmp_path)
    run(RunConfig.load(cfg))
    header, data = load_csv(tmp_path / "out" / f"{method}.csv")
    v = data[:, 1:4]
    assert np.max(np.abs(data[:, 4] - np.sum(v**2, axis=1))) < 1e-12
    assert np.max(np.abs(data[:, 5] + data[:, 6] - data[:, 4])) < 1e-12


def test_run_is_deterministic(tmp_path):
    a = write_config(tmp_path, "a.toml", out=(tmp_path / "a").as_posix())
    b = write_config(tmp_path, "b.toml", out=(tmp_path / "b").as_posix())
    assert main(["run", str(a)]) == EXIT_OK
    assert main(["run", str(b)]) == EXIT_OK
    for name in ["rk4.csv", "magnus.csv", "closedform.csv", "summary.json"]:
        assert (tmp_path / "a" / name).read_bytes() == (tmp_path / "b" / name).read_bytes()


def test_env_override(tmp_path, monkeypatch):
    cfg = write_config(tmp_path, methods=("rk4",))
    monkeypatch.setenv(OUTPUT_ENV, str(tmp_path / "elsewhere"))
    assert main(["run", str(cfg)]) == EXIT_OK
    assert (tmp_path / "elsewhere" / "rk4.csv").exists()
    assert not (tmp_path / "out").exists()


def test_random_qutrit(tmp_path):
    cfg = tmp_path / "q.toml"
    cfg.write_text(textwrap.dedent(f"""
        n_levels = 3
        methods = ["liouville", "rk4"]
        [hamiltonian]
        kind = "random"
        seed = 3
        [grid]
        t_start = 0
        t_end = 3
        n_steps = 3000
        [output]
        path = "{(tmp_path / 'q').as_posix()}"
    """))
    assert main(["run", str(cfg)]) == EXIT_OK
    summary = json.loads((tmp_path / "q" / "summary.json").read_text())
    assert summary["pairwise_max_deviation"]["liouville-rk4"] < 1e-8
    assert summary["methods"]["liouville"]["purity_drift"] < 1e-8


def test_zero_pulse_is_constant(tmp_path):
    cfg = write_config(tmp_path, methods=("liouville", "rk4", "magnus", "weinorman"),
                       omega0=0.0, delta0=0.0, mode="constant", n_steps=200)
    assert main(["run", str(cfg)]) == EXIT_OK
    for m in ["liouville", "rk4", "magnus", "weinorman"]:
        _, data = load_csv(tmp_path / "out" / f"{m}.csv")
        assert np.all(data[:, 1:4] == data[0, 1:4])


def test_matrix_hamiltonian_and_coherence_state(tmp_path):
    cfg = tmp_path / "m.toml"
    cfg.write_text(textwrap.dedent(f"""
        n_levels = 2
        methods = ["rk4", "magnus", "weinorman"]
        [hamiltonian]
        kind = "matrix"
        real = [[0.5, 0.2], [0.2, -0.5]]
        imag = [[0.0, -0.1], [0.1, 0.0]]
        [grid]
        t_start = 0
        t_end = 1
        n_steps = 1000
        [initial_state]
        kind = "coherence"
        vector = [0.0, 0.6, 0.8]
        [output]
        path = "{(tmp_path / 'm').as_posix()}"
    """))
    assert main(["run", str(cfg)]) == EXIT_OK
    summary = json.loads((tmp_path / "m" / "summary.json").read_text())
    assert all(v < 1e-8 for v in summary["pairwise_max_deviation"].values())


def test_config_errors(tmp_path, capsys):
    assert main(["run", str(tmp_path / "missing.toml")]) == EXIT_CONFIG
    bad = tmp_path / "bad.toml"
    bad.write_text("n_levels = 2\nmethods = []\n")
    assert main(["run", str(bad)]) == EXIT_CONFIG
    assert "methods" in capsys.readouterr().err
    bad.write_text('n_levels = 2\nmethods = ["rk4"]\n[hamiltonian]\nkind = "matrix"\n'
                   '[grid]\nt_start = 0\nt_end = 1\nn_steps = 4\n')
    assert main(["run", str(bad)]) == EXIT_CONFIG
    assert "real" in capsys.readouterr().err
    bad.write_text("this is = = not toml")
    assert main(["run", str(bad)]) == EXIT_CONFIG
    with pytest.raises(ConfigError):
        RunConfig.from_dict({"n_levels": 1, "methods": ["rk4"], "grid": {}, "hamiltonian": {}})
    with pytest.raises(ConfigError):
        RunConfig.from_dict({"n_levels": 2, "methods": ["euler"], "grid": {}, "hamiltonian": {}})


def test_magnus_on_non_commuting_family_fails(tmp_path, capsys):
    cfg = write_config(tmp_path, methods=("magnus",), mode="constant")
    assert main(["run", str(cfg)]) == EXIT_CONFIG
    err = capsys.readouterr().err.strip()
    assert "commute" in err and "\n" not in err


def test_closedform_needs_proportional(tmp_path):
    cfg = write_config(tmp_path, methods=("closedform",), mode="constant")
    assert main(["run", str(cfg)]) == EXIT_CONFIG


def test_singularity_is_numerical_abort(tmp_path):
    cfg = tmp_path / "s.toml"
    cfg.write_text(textwrap.dedent(f"""
        n_levels = 2
        methods = ["weinorman"]
        [hamiltonian]
        kind = "matrix"
        real = [[0.0, 0.0], [0.0, 0.0]]
        imag = [[0.0, -0.5], [0.5, 0.0]]
        [grid]
        t_start = 0
        t_end = 3
        n_steps = 300
        [output]
        path = "{(tmp_path / 's').as_posix()}"
    """))
    assert main(["run", str(cfg)]) == EXIT_NUMERICAL


def test_verify_default_passes(capsys):
    assert main(["verify", "--n-max", "5", "--trials", "100", "--seed", "1"]) == EXIT_OK
    out = capsys.readouterr().out
    assert out.strip().endswith("PASS")
    assert len([l for l in out.splitlines() if l.strip()[:1].isdigit()]) == 4


def test_verify_two_level_literal(capsys):
    ok, rows = verify(2, 1, 0)
    assert ok
    assert rows[0]["rwa_literal"] <= 1e-14


@pytest.mark.parametrize("argv", [["verify", "--trials", "0"], ["verify", "--n-max", "1"], []])
def test_verify_usage_errors(argv):
    assert main(argv) == EXIT_CONFIG
