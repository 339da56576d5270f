import csv
import io
import shutil
import subprocess

import pytest

from gel import cli
from gel.errors import ParseError


def run(argv, capsys):
    code = cli.run(argv)
    out, err = capsys.readouterr()
    return code, out, err


def body(text):
    return "".join(l for l in text.splitlines(True) if not l.startswith("#"))


def table(text):
    return list(csv.reader(io.StringIO(body(text))))


def test_parse_complex():
    assert cli.parse_complex("0.9+0.0i") == complex(0.9, 0.0)
    assert cli.parse_complex("0.5-14.13i") == complex(0.5, -14.13)
    assert cli.parse_complex("-1e-3+2E2i") == complex(-1e-3, 200)
    assert cli.parse_complex("1.5") == 1.5
    for bad in ("0.9+i", "i", "1+2j", "1 + 2i", "", "nan+1i"):
        with pytest.raises(ParseError):
            cli.parse_complex(bad)


def test_parse_grid():
    assert cli.parse_grid("10,10,3") == [10.0, 100.0, 1000.0]
    assert cli.parse_grid("5,1,1") == [5.0]
    for bad in ("10,2,0", "10,2", "a,2,3", "10,1,3", "-1,2,3"):
        with pytest.raises(ParseError):
            cli.parse_grid(bad)


def test_fmt():
    assert cli.fmt(0.1) == "0.1"
    assert cli.fmt(3) == "3"
    assert cli.fmt(True) == "true"
    assert cli.fmt(complex(1.5, -0.25)) == "1.5-0.25i"
    assert cli.fmt(complex(1, 0)) == "1.0+0.0i"


def test_counts_table(capsys):
    code, out, err = run(["counts", "--x-max", "1e4"], capsys)
    assert code == 0 and err == ""
    rows = table(out)
    assert rows[0] == ["x", "theta", "psi", "pi", "Pi", "error"]
    assert rows[1][0] == "10000.0" and rows[1][3] == "1214"
    assert out.startswith("# gel ")
    assert "# command: counts --x-max 1e4" in out


def test_counts_golden(capsys):
    code, out, _ = run(["counts", "--x-max", "100", "--grid", "10,10,2"], capsys)
    assert body(out) == (
        "x,theta,psi,pi,Pi,error\n"
        "10.0,1.9248473002384139,1.9248473002384139,1,1.0,-8.075152699761587\n"
        "100.0,84.49099983333456,86.41584713357297,22,22.5,-13.584152866427033\n"
    )


def test_validation_errors_exit_2(capsys):
    for argv in (
        ["pgt", "--x-max", "1e3", "--grid", "10,2,0"],
        ["counts"],
        ["counts", "--x-max", "1e3", "--grid", "10,10,4"],
        ["euler", "--x-max", "1e3"],
        ["euler", "--x-max", "1e3", "--s", "0.9+i"],
        ["nosuch"],
        ["counts", "--x-max", "1e3", "--threads", "0"],
        ["counts", "--x-max", "3"],
        ["explicit", "--x-max", "1e4", "--T", "200", "--spectral-file", "/nonexistent"],
        ["baseline", "ramanujan", "--grid", "1e4,10,1", "--s", "0.5+0i"],
    ):
        code, out, err = run(argv, capsys)
        assert code == 2, argv
        assert err.startswith("error: ") and out == ""


def test_unwritable_out(tmp_path, capsys):
    code, _, err = run(["counts", "--x-max", "100", "--out", str(tmp_path / "no" / "x.csv")], capsys)
    assert code == 2 and err.startswith("error:")


def test_internal_error_exit_1(capsys, monkeypatch):
    def boom(a, meta):
        raise RuntimeError("kaput")
    monkeypatch.setitem(cli.COMMANDS, "counts", boom)
    code, _, err = run(["counts", "--x-max", "100"], capsys)
    assert code == 1 and err.startswith("error: internal")


def test_out_file(tmp_path, capsys):
    p = tmp_path / "o.csv"
    code, out, _ = run(["pgt", "--grid", "1e3,10,2", "--out", str(p)], capsys)
    assert code == 0 and out == ""
    text = p.read_text(encoding="utf-8")
    assert "# fitted_exponent=" in text
    assert table(text)[0] == ["x", "psi", "error", "error_over_x34"]


def test_euler_and_mertens(capsys):
    code, out, _ = run(["euler", "--grid", "1e3,10,2", "--s", "1.5+0i", "--s", "0.75+2i",
                        "--renorm", "case3"], capsys)
    assert code == 0
    rows = table(out)
    assert len(rows) == 5 and rows[1][0] == "1.5+0.0i"
    code, out, _ = run(["mertens-geo", "--grid", "1e3,10,2"], capsys)
    assert code == 0 and len(table(out)) == 3


def test_baselines(capsys):
    code, out, _ = run(["baseline", "mertens", "--grid", "1e3,10,2"], capsys)
    assert code == 0 and table(out)[0] == ["x", "ratio"]
    code, out, _ = run(["baseline", "ramanujan", "--grid", "1e4,10,1", "--s", "0.75+0i", "--K", "10"],
                       capsys)
    assert code == 0 and table(out)[0][-1] == "err_K10"
    code, out, _ = run(["baseline", "drh", "--grid", "1e3,10,2"], capsys)
    assert code == 0 and "# mean_ratio=" in out


def test_kloosterman_and_sk(capsys):
    code, out, _ = run(["kloosterman", "--c-max", "40", "--mn-max", "3"], capsys)
    assert code == 0
    rows = table(out)
    assert [r[0] for r in rows[1:]] == ["trivial", "chi4"]
    assert all(r[-1] == "true" for r in rows[1:])
    code, out, _ = run(["sk-zeta", "--grid", "10,2,3", "--s", "0.9+0i"], capsys)
    assert code == 0 and len(table(out)) == 4


def test_spectral_commands_with_file(tmp_path, capsys):
    f = tmp_path / "m.txt"
    f.write_text("gel-spectral v1 test\n9.53369526135\t1\n12.17300832468\t1\n13.77975135189\t1\n")
    code, out, _ = run(["explicit", "--grid", "1e3,10,2", "--T", "4", "--spectral-file", str(f)], capsys)
    assert code == 0 and "# spectral_hash=" in out
    assert table(out)[0] == ["x", "T", "psi", "explicit", "residual", "naive_residual"]
    code, out, _ = run(["expsum", "--grid", "1e4,10,2", "--T", "13", "--spectral-file", str(f)], capsys)
    rows = table(out)
    assert code == 0 and len(rows) == 3


def test_cache_dir(tmp_path, capsys):
    code, a, _ = run(["spectrum", "--x-max", "1e3", "--cache-dir", str(tmp_path)], capsys)
    code2, b, _ = run(["spectrum", "--x-max", "1e3", "--cache-dir", str(tmp_path)], capsys)
    assert code == code2 == 0 and body(a) == body(b)
    assert (tmp_path / "manifest.json").exists()


@pytest.mark.parametrize("argv", [
    ["spectrum", "--x-max", "1e4"],
    ["counts", "--grid", "1e3,3,4"],
    ["euler", "--grid", "1e3,10,2", "--s", "0.9+0i"],
    ["kloosterman", "--c-max", "60", "--mn-max", "3"],
])
def test_thread_count_does_not_change_output(argv, capsys):
    _, a, _ = run(argv + ["--threads", "1"], capsys)
    _, b, _ = run(argv + ["--threads", "8"], capsys)
    assert body(a) == body(b) and body(a)


def test_help_and_version(capsys):
    assert cli.run(["--version"]) == 0
    assert "gel 0.1.0" in capsys.readouterr().out
    assert cli.run(["--help"]) == 0


@pytest.mark.skipif(shutil.which("gel") is None, reason="console script not installed")
def test_console_script():
    r = subprocess.run(["gel", "counts", "--x-max", "100"], capture_output=True, text=True)
    assert r.returncode == 0 and "x,theta,psi,pi,Pi,error" in r.stdout
    r = subprocess.run(["gel", "pgt", "--x-max", "1e3", "--grid", "10,2,0"], capture_output=True, text=True)
    assert r.returncode == 2 and r.stderr.startswith("error:")
