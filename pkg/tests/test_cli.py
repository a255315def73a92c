import subprocess
import sys
from pathlib import Path

from volentropy.cli import main

DATA = Path(__file__).resolve().parent.parent / "data"


def run(argv, capsys):
    code = main([str(a) for a in argv])
    out, err = capsys.readouterr()
    return code, out, err


def test_entropy_figure8(capsys):
    code, out, _ = run(["entropy", "--graph", DATA / "fig8.graph"], capsys)
    assert code == 0
    assert "entropy_perron 1.0986122886" in out
    assert "bracket [" in out


def test_entropy_with_cover_file(capsys):
    code, out, _ = run(["entropy", "--graph", DATA / "fig8.graph", "--cover",
                        DATA / "fig8_kill_b.cover"], capsys)
    assert code == 0 and "entropy_orbit_count 0" in out


def test_missing_file_is_usage_error(capsys):
    code, _, err = run(["entropy", "--graph", "no/such/file.graph"], capsys)
    assert code == 1 and "cannot read" in err


def test_unknown_subcommand_and_missing_args(capsys):
    assert run(["frobnicate"], capsys)[0] == 1
    assert run([], capsys)[0] == 1
    assert run(["entropy"], capsys)[0] == 1
    assert run(["--budget", "0", "tomei"], capsys)[0] == 1


def test_malformed_graph(tmp_path, capsys):
    bad = tmp_path / "bad.graph"
    bad.write_text("graph\nvertices 1\nedge a 0 7 length=1\n")
    code, _, err = run(["entropy", "--graph", bad], capsys)
    assert code == 1 and "error" in err


def test_dumbbell_csv(tmp_path, capsys):
    code, out, _ = run(["--out", tmp_path, "dumbbell", DATA / "fig8.graph", DATA / "fig8.graph",
                        "--d", "1,2,16"], capsys)
    assert code == 0
    lines = (tmp_path / "dumbbell.csv").read_text().splitlines()
    assert lines[0] == "d,alpha,h_d,gap" and len(lines) == 4


def test_l1norm_dual_and_int(tmp_path, capsys):
    code, out, _ = run(["l1norm", DATA / "torus.cx", DATA / "torus.cycle", "--dual"], capsys)
    assert code == 0
    assert "value 2" in out and "dual_check pass" in out
    code, out, _ = run(["l1norm", DATA / "rp2.cx", DATA / "rp2_loop.cycle", "--ring", "int"],
                       capsys)
    assert code == 0 and "value 1" in out
    code, out, _ = run(["l1norm", DATA / "rp2.cx", DATA / "rp2_loop.cycle"], capsys)
    assert code == 0 and "value 0" in out


def test_l1norm_rejects_non_cycle(tmp_path, capsys):
    cyc = tmp_path / "c.cycle"
    cyc.write_text("U 1\n")
    code, _, err = run(["l1norm", DATA / "torus.cx", cyc], capsys)
    assert code == 1 and "not a cycle" in err
    cyc.write_text("U one\n")
    assert run(["l1norm", DATA / "torus.cx", cyc], capsys)[0] == 1


def test_tomei_report(tmp_path, capsys):
    code, out, _ = run(["--out", tmp_path, "tomei", "--m", "2", "--t-max", "30"], capsys)
    assert code == 0
    assert "euler_characteristic -2" in out and "literal_over_measured 1/27" in out
    assert (tmp_path / "tomei_skeleton.csv").exists()
    assert run(["tomei", "--m", "7"], capsys)[0] == 1


def test_systole_csv(tmp_path, capsys):
    code, _, _ = run(["--out", tmp_path, "systole", "--group", "free:2",
                      "--family", "sl2modp:3,5,7", "--m", "1"], capsys)
    assert code == 0
    rows = (tmp_path / "systole.csv").read_text().splitlines()
    assert rows[0] == "k,sys,vol,ratio,fit_c"
    assert rows[1].startswith("24,3,48,16,")
    assert run(["systole", "--family", "sl2modp:3", "--group", "free:3"], capsys)[0] == 1


def test_verify_single_suites(tmp_path, capsys):
    code, out, _ = run(["--out", tmp_path, "verify", "systole"], capsys)
    assert code == 0 and "0 failed" in out
    code, out, _ = run(["--out", tmp_path, "verify", "l1", "--corrupt-dual"], capsys)
    assert code == 2
    assert out.count("FAIL ") == 1 and "FAIL l1.dual_torus" in out
    assert run(["verify", "nope"], capsys)[0] == 1


def test_console_script_module_entry(tmp_path):
    proc = subprocess.run([sys.executable, "-m", "volentropy", "entropy", "--graph",
                           str(DATA / "theta.graph")], capture_output=True, text=True)
    assert proc.returncode == 0
    assert "entropy_perron 0.69314718" in proc.stdout
