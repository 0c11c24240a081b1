import json
import subprocess
import sys

import numpy as np
import pytest

from clmlab.cli import main, parse_grid
from clmlab.clm_exact import SolutionSnapshot


def run(tmp_path, *argv):
    return main(["--out-dir", str(tmp_path), "--quiet", *argv])


def test_help_lists_presets(capsys):
    with pytest.raises(SystemExit) as info:
        main(["--help"])
    assert info.value.code == 0
    out = capsys.readouterr().out
    for pid in ("I", "II", "III", "IV", "V", "VI", "III-fig"):
        assert f"  {pid} " in out
    assert "T=5.33333" in out and "-2.5/2/0.5" in out


def test_list_presets(capsys):
    assert main(["list-presets"]) == 0
    assert "III-fig" in capsys.readouterr().out


def test_usage_errors_exit_one(tmp_path):
    with pytest.raises(SystemExit) as info:
        run(tmp_path, "exact", "--preset", "I")
    assert info.value.code == 1
    with pytest.raises(SystemExit) as info:
        run(tmp_path, "exact", "--preset", "I", "--t", "0.5", "--grid", "1:2")
    assert info.value.code == 1
    assert run(tmp_path, "exact", "--preset", "nope", "--t", "0.5") == 1


def test_grid_syntax():
    g = parse_grid("-20:20:2001")
    assert len(g) == 2001 and g[0] == -20 and g[-1] == 20


def test_exact_first(tmp_path):
    assert run(tmp_path, "exact", "--preset", "I", "--t", "0.5", "--grid", "-20:20:2001") == 0
    snap = SolutionSnapshot.from_csv(tmp_path / "exact_I_t0.5.csv")
    assert snap.t == 0.5 and len(snap.xs) == 2001
    # peak height doubles from the initial profile (max |omega_0| = 1)
    assert np.max(np.abs(snap.omega)) == pytest.approx(2.0, rel=1e-12)
    man = json.loads((tmp_path / "exact_I_t0.5.manifest.json").read_text())
    assert man["command"] == "exact" and man["preset"] == "I"
    assert man["outputs"] == [str(tmp_path / "exact_I_t0.5.csv")]


def test_exact_t_zero_is_initial(tmp_path):
    from oracles import TRACES

    assert run(tmp_path, "--format", "json", "exact", "--preset", "III", "--t", "0") == 0
    snap = SolutionSnapshot.from_json(tmp_path / "exact_III_t0.json")
    w, h = TRACES["III"]
    assert np.max(np.abs(snap.omega - w(snap.xs))) <= 1e-14


def test_exact_conservation(tmp_path):
    assert run(tmp_path, "exact", "--preset", "V", "--t", "5.0") == 0
    man = json.loads((tmp_path / "exact_V_t5.manifest.json").read_text())
    assert man["results"]["conserved"] == pytest.approx(2.0, abs=1e-9)


def test_exact_at_singularity_exit_two(tmp_path):
    assert run(tmp_path, "exact", "--preset", "I", "--t", "1.0") == 2


def test_manifest_replay_is_byte_identical(tmp_path):
    a, b = tmp_path / "a", tmp_path / "b"
    assert main(["--out-dir", str(a), "--quiet", "exact", "--preset", "III", "--t", "0.7"]) == 0
    man = json.loads((a / "exact_III_t0.7.manifest.json").read_text())
    argv = [str(b) if v == str(a) else v for v in man["argv"]]
    assert main(argv) == 0
    assert (a / "exact_III_t0.7.csv").read_bytes() == (b / "exact_III_t0.7.csv").read_bytes()


def test_poles_second(tmp_path):
    assert run(tmp_path, "poles", "--preset", "II") == 0
    man = json.loads((tmp_path / "poles_II.manifest.json").read_text())
    merges = [e for e in man["results"]["events"] if e["kind"] == "merge"]
    assert len(merges) == 1
    assert merges[0]["t"] == pytest.approx(0.8, abs=1e-9)
    assert merges[0]["z"] == pytest.approx([0.0, -0.5], abs=1e-9)
    assert len(list(tmp_path.glob("poles_II_branch*.csv"))) == man["results"]["branches"]


def test_poles_sixth_straight_line(tmp_path):
    assert run(tmp_path, "--format", "json", "poles", "--preset", "VI", "--t1", "10") == 0
    doc = json.loads((tmp_path / "poles_VI.json").read_text())
    assert len(doc) == 1
    assert np.allclose(doc[0]["im_Z"], -1.0, atol=1e-12)
    assert doc[0]["t"][-1] == 10.0


def test_poles_fifth(tmp_path):
    assert run(tmp_path, "poles", "--preset", "V") == 0
    man = json.loads((tmp_path / "poles_V.manifest.json").read_text())
    assert man["results"]["branches"] == 3
    assert man["results"]["touch_T"] == pytest.approx(16 / 3, abs=1e-8)


def test_scaling_third(tmp_path):
    assert run(tmp_path, "scaling", "--preset", "III") == 0
    rep = json.loads((tmp_path / "scaling_III.json").read_text())
    assert rep["c_omega"] == pytest.approx(-1.5, abs=0.05)
    assert rep["c_l"] == pytest.approx(1.0, abs=0.05)
    assert rep["c_s"] == pytest.approx(0.5, abs=0.02)
    assert (tmp_path / "scaling_III_measurements.csv").exists()


def test_scaling_no_blowup_exit_two(tmp_path):
    assert run(tmp_path, "scaling", "--preset", "VI") == 2


def test_scaling_too_few_decades_exit_two(tmp_path):
    assert run(tmp_path, "scaling", "--preset", "III", "--taus", "1e-3:2e-3:8") == 2


def test_evolve_first(tmp_path):
    assert run(tmp_path, "evolve", "--preset", "I", "--t-end", "0.5", "--n", "4096", "--L", "40") == 0
    man = json.loads((tmp_path / "evolve_I.manifest.json").read_text())
    assert man["results"]["deviation"] <= 1e-6


def test_evolve_sixth_speed(tmp_path):
    assert run(tmp_path, "evolve", "--preset", "VI", "--t-end", "2") == 0
    man = json.loads((tmp_path / "evolve_VI.manifest.json").read_text())
    assert man["results"]["peak_speed"] == pytest.approx(1.0, abs=1e-3)


def test_evolve_refinement_monotone(tmp_path):
    devs = []
    for n in ("256", "1024", "4096"):
        d = tmp_path / n
        assert main(["--out-dir", str(d), "--quiet", "evolve", "--preset", "III", "--t-end", "0.2", "--n", n]) == 0
        devs.append(json.loads((d / "evolve_III.manifest.json").read_text())["results"]["deviation"])
    assert devs[0] > devs[1] > devs[2]


def test_evolve_guard_exit_three(tmp_path):
    assert run(tmp_path, "evolve", "--preset", "III", "--t-end", "0.5", "--guard", "3") == 3


def test_evolve_too_close_to_blowup(tmp_path):
    assert run(tmp_path, "evolve", "--preset", "III", "--t-end", "0.95") == 1


def test_profile_check(tmp_path):
    assert run(tmp_path, "profile-check", "--preset", "I", "--theorem", "exact") == 0
    man = json.loads((tmp_path / "profile_I_exact.manifest.json").read_text())
    assert man["results"]["max_err_omega"] <= 1e-12
    assert run(tmp_path, "profile-check", "--preset", "III", "--theorem", "two-scale-basic") == 0
    man = json.loads((tmp_path / "profile_III_two-scale-basic.manifest.json").read_text())
    assert man["results"]["slope_omega"] == pytest.approx(0.5, abs=0.1)


def test_profile_check_wrong_degeneracy(tmp_path):
    assert run(tmp_path, "profile-check", "--preset", "III", "--theorem", "one-scale") == 2
    assert run(tmp_path, "profile-check", "--preset", "V", "--theorem", "two-scale-general") == 1


def test_datum_file(tmp_path):
    f = tmp_path / "d.json"
    f.write_text(json.dumps({"eta0": {"num": [[-2, 0]], "den": [[0, 1], [1, 0]]}, "label": "mine"}))
    assert run(tmp_path, "exact", "--datum-file", str(f), "--t", "0.5") == 0
    assert (tmp_path / "exact_mine_t0.5.csv").exists()
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps({"eta0": {"num": [[1, 0]], "den": [[0, -1], [1, 0]]}}))
    assert run(tmp_path, "exact", "--datum-file", str(bad), "--t", "0.5") == 2


def test_module_entry_point(tmp_path):
    out = subprocess.run([sys.executable, "-m", "clmlab", "list-presets"], capture_output=True, text=True)
    assert out.returncode == 0 and "presets" in out.stdout
