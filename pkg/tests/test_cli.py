import json

import pytest

from kerrcat import cli
from kerrcat.config import table1_config


def run(capsys, *argv):
    code = cli.main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def write_config(tmp_path, mutate):
    data = table1_config().to_dict()
    mutate(data)
    path = tmp_path / "cfg.json"
    path.write_text(json.dumps(data))
    return str(path)


def table(text):
    rows = [line.split(",") for line in text.splitlines()[1:]]
    return {name: float(value) for name, value, _ in rows}


class TestDerive:
    def test_table1_rows(self, capsys):
        code, out, _ = run(capsys, "derive")
        assert code == 0
        rows = table(out)
        assert float(f"{rows['K_j/2pi']:.3g}") == 19.2
        assert float(f"{rows['alpha_c^+']:.3g}") == 0.0491

    def test_unpumped(self, capsys, tmp_path):
        def mutate(d):
            d["circuit"]["qubit1"]["pump_amplitude"] = 0.0
            d["circuit"]["qubit2"]["pump_amplitude"] = 0.0

        code, out, _ = run(capsys, "derive", "--config", write_config(tmp_path, mutate))
        rows = table(out)
        assert code == 0
        assert rows["p_j/2pi"] == 0.0 and rows["alpha_j"] == 0.0

    def test_deterministic(self, capsys):
        assert run(capsys, "derive")[1] == run(capsys, "derive")[1]

    def test_echo_config_reparses(self, capsys):
        from kerrcat.config import loads

        _, _, err = run(capsys, "derive", "--echo-config", "--dims", "25,25,6")
        cfg = loads(err)
        assert cfg.dims == (25, 25, 6)
        assert cfg.design == table1_config().design


class TestExitCodes:
    def test_unknown_key(self, capsys, tmp_path):
        path = write_config(tmp_path, lambda d: d["circuit"].update(bogus=1))
        code, _, err = run(capsys, "derive", "--config", path)
        assert code == 2
        assert "bogus" in err

    def test_missing_file(self, capsys):
        assert run(capsys, "derive", "--config", "/nonexistent.json")[0] == 2

    def test_bad_dims_flag(self, capsys):
        with pytest.raises(SystemExit) as exc:
            cli.main(["derive", "--dims", "1,2"])
        assert exc.value.code == 2

    def test_dims_below_minimum(self, capsys):
        assert run(capsys, "derive", "--dims", "1,20,5")[0] == 2

    def test_no_sign_change(self, capsys):
        code, _, err = run(capsys, "find-null", "--bracket", "0.05,0.1")
        assert code == 3
        assert "same sign" in err

    def test_broken_design_fails_verification(self, capsys, tmp_path):
        path = write_config(tmp_path, lambda d: d["circuit"].update(c1c_ff=0.0))
        code, out, _ = run(capsys, "verify", "--config", path, "--skip-dynamics")
        assert code == 4
        g_line = next(line for line in out.splitlines() if "g_jc" in line)
        assert g_line.startswith("[FAIL]")


class TestCommands:
    def test_find_null(self, capsys):
        code, out, _ = run(capsys, "find-null")
        assert code == 0
        flux = float(out.split()[0].split("=")[1])
        assert flux == pytest.approx(2e-3, rel=0.1)

    def test_zz_sweep_csv(self, capsys, tmp_path):
        path = tmp_path / "zz.csv"
        code, out, _ = run(capsys, "zz-sweep", "--range=-0.004,0.004", "--points", "5", "--out", str(path), "--jobs", "2")
        assert code == 0
        lines = path.read_text().splitlines()
        assert lines[0] == "phi_c_bias_over_2pi,zeta_zz_hz"
        assert len(lines) == 6
        assert out.startswith("# 5 points")

    def test_zz_sweep_stdout(self, capsys):
        code, out, _ = run(capsys, "zz-sweep", "--points", "3")
        assert code == 0
        assert out.splitlines()[0] == "phi_c_bias_over_2pi,zeta_zz_hz"

    def test_verify_static(self, capsys):
        code, out, _ = run(capsys, "verify", "--skip-dynamics")
        assert code == 0
        assert out.splitlines()[-1] == "overall: PASS"

    def test_residual(self, capsys, tmp_path):
        path = tmp_path / "res.csv"
        code, out, _ = run(capsys, "residual", "--duration", "100", "--samples", "200", "--out", str(path))
        assert code == 0
        values = [float(line.split(",")[1]) for line in path.read_text().splitlines()[1:]]
        assert len(values) == 201
        assert abs(values[0]) < 1e-14
        assert max(values) < 2e-7

    def test_gate(self, capsys, tmp_path):
        path = tmp_path / "gate.csv"
        code, out, _ = run(capsys, "gate", "--t-g", "25", "--mode", "both", "--out", str(path))
        assert code == 0
        fields = dict(item.split("=") for item in out.split() if "=" in item)
        assert float(fields["infidelity"]) < 1e-5
        assert fields["mode"] == "both-tuned"
        assert path.read_text().splitlines()[0].startswith("t_g_ns,mode,infidelity")

    def test_gate_sweep_small(self, capsys, tmp_path):
        path = tmp_path / "sweep.csv"
        code, out, _ = run(capsys, "gate-sweep", "--t-gs", "20,25", "--dims", "10,10,3", "--out", str(path), "--jobs", "2")
        assert code == 0
        assert len(path.read_text().splitlines()) == 3
        assert out.startswith("# best t_g=")


def test_coarse_tolerance_is_inconclusive(capsys, tmp_path):
    path = write_config(tmp_path, lambda d: d["numerics"].update(rel_tol=1e-6))
    code, out, _ = run(capsys, "verify", "--config", path)
    assert code == 3
    residual = next(line for line in out.splitlines() if "residual" in line)
    assert residual.startswith("[INCONCLUSIVE]")
    assert out.splitlines()[-1] == "overall: INCONCLUSIVE"


def test_module_entry_point():
    import subprocess
    import sys

    proc = subprocess.run([sys.executable, "-m", "kerrcat", "find-null"], capture_output=True, text=True)
    assert proc.returncode == 0
    assert proc.stdout.startswith("phi_c_bias_over_2pi=")
