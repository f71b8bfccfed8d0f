import csv
import io
import json

import numpy as np
import pytest

from resource_gauges import cli
from resource_gauges.theories import MagicQubits, parse_theory, stabilizer_enumerate

from conftest import t_state


def write_state(path, data, dims, kind=None):
    data = np.asarray(data, dtype=complex)
    kind = kind or ("pure" if data.ndim == 1 else "mixed")
    path.write_text(json.dumps(cli.StateFile(kind, list(dims), data).to_json()))
    return str(path)


def run(capsys, *argv):
    code = cli.main([str(a) for a in argv])
    out, err = capsys.readouterr()
    return code, out, err


@pytest.fixture
def t_file(tmp_path):
    return write_state(tmp_path / "t.json", t_state(), [2])


def test_fmt_uses_twelve_significant_digits():
    assert cli.fmt(1 / 3) == "0.333333333333"
    assert cli.fmt(0.0) == "0"
    assert cli.fmt(np.inf) == "inf"
    assert cli.fmt(-np.inf) == "-inf"
    assert cli.fmt(np.nan) == "nan"


def test_state_file_round_trip(tmp_path, rng):
    z = rng.normal(size=(3, 3)) + 1j * rng.normal(size=(3, 3))
    rho = z @ z.conj().T
    rho /= np.trace(rho).real
    for data, dims in ((np.kron(t_state(), t_state()), [2, 2]), (rho, [3])):
        back = cli.load_state(write_state(tmp_path / "s.json", data, dims))
        assert back.dims == dims
        assert np.array_equal(back.data, data)


@pytest.mark.parametrize(
    "obj",
    [
        {"kind": "pure", "dims": [2], "re": [1.0]},
        {"kind": "pure", "dims": [2], "re": [1.0, 1.0]},  # not normalised
        {"kind": "mixed", "dims": [2], "re": [1, 0, 0, 0], "im": [0, 0]},
        {"kind": "thermal", "dims": [2], "re": [1.0, 0.0]},
        {"dims": [2], "re": [1.0, 0.0]},
    ],
)
def test_malformed_state_files_exit_3(tmp_path, capsys, obj):
    p = tmp_path / "bad.json"
    p.write_text(json.dumps(obj))
    code, _, err = run(capsys, "measure", p, "--theory", "magic:n=1", "--measure", "generalized_robustness")
    assert code == cli.EXIT_PARSE
    assert "parse error" in err


def test_measure_json_matches_library(capsys, t_file):
    code, out, _ = run(capsys, "measure", t_file, "--theory", "magic:n=1", "--measure", "generalized_robustness")
    assert code == cli.EXIT_OK
    rec = json.loads(out)
    assert rec["measure"] == "generalized_robustness"
    assert rec["theory"] == "magic:n=1"
    assert rec["status"] == "certified"
    assert rec["value"] == pytest.approx(2 - np.sqrt(3), abs=1e-8)
    assert rec["lower"] <= rec["upper"]


def test_measure_csv_quotes_theory_and_prints_witness(tmp_path, capsys):
    psi = np.array([1, 1, 0, 0], dtype=complex) / np.sqrt(2)
    # mixed input takes the program route, which carries a witness
    f = write_state(tmp_path / "c.json", 0.9 * np.outer(psi, psi.conj()) + 0.025 * np.eye(4), [4])
    code, out, _ = run(capsys, "measure", f, "--theory", "coherence:d=4,k=1",
                       "--measure", "generalized_robustness", "--format", "csv", "--witness", "print")
    assert code == cli.EXIT_OK
    rows = list(csv.reader(io.StringIO(out)))
    assert rows[0] == ["measure", "theory", "value", "status", "lower", "upper", "gap", "bound"]
    assert rows[1][1] == "coherence:d=4,k=1"
    assert float(rows[1][2]) == pytest.approx(0.9, abs=1e-6)  # l1 coherence of the mixture
    blank = rows.index([])
    assert rows[blank + 1] == ["row", "col", "re", "im"]
    assert len(rows) - blank - 2 == 16


def test_measure_witness_file(tmp_path, capsys):
    t = t_state()
    f = write_state(tmp_path / "tm.json", 0.9 * np.outer(t, t.conj()) + 0.05 * np.eye(2), [2])
    wpath = tmp_path / "w.json"
    code, out, _ = run(capsys, "measure", f, "--theory", "magic:n=1", "--measure", "generalized_robustness",
                       "--witness", "file", "--witness-file", wpath)
    assert code == cli.EXIT_OK
    assert json.loads(out)["witness_file"] == str(wpath)
    w = json.loads(wpath.read_text())
    W = np.asarray(w["re"]) + 1j * np.asarray(w["im"])
    assert W.shape == (2, 2)
    assert np.allclose(W, W.conj().T)


def test_measure_unsupported_exits_2(tmp_path, capsys):
    f = write_state(tmp_path / "s.json", np.full(4, 0.5), [2, 2])
    code, _, err = run(capsys, "measure", f, "--theory", "schmidt:dA=2,dB=2,k=1", "--measure", "nuclear_gauge")
    assert code == cli.EXIT_UNSUPPORTED
    assert "unsupported" in err


@pytest.mark.parametrize(
    "argv",
    [
        ["--theory", "magic:n=", "--measure", "generalized_robustness"],
        ["--theory", "coherence:d=3", "--measure", "generalized_robustness"],
        ["--theory", "magic:n=1", "--measure", "no_such_measure"],
        ["--theory", "magic:n=2", "--measure", "generalized_robustness"],  # dimension mismatch
        ["--theory", "magic:n=1"],  # missing --measure
    ],
)
def test_measure_parse_errors_exit_3(capsys, t_file, argv):
    code, _, _ = run(capsys, "measure", t_file, *argv)
    assert code == cli.EXIT_PARSE


def test_unwritable_output_exits_4(tmp_path, capsys, t_file):
    target = tmp_path / "missing_dir" / "out.json"
    code, _, err = run(capsys, "measure", t_file, "--theory", "magic:n=1",
                       "--measure", "best_free_approximation", "--output", target)
    assert code == cli.EXIT_WRITE
    assert "write error" in err


def test_stabilizer_dump_counts_and_round_trip(tmp_path, capsys):
    for n, count in ((1, 6), (2, 60)):
        path = tmp_path / f"stab{n}.txt"
        assert run(capsys, "stabilizers", "--n", n, "--output", path)[0] == cli.EXIT_OK
        lines = path.read_text().splitlines()
        assert lines[0] == str(count)
        assert len(lines) == count + 1
        back = cli.read_vectors(str(path))
        assert np.max(np.abs(back - stabilizer_enumerate(n))) <= 1e-12


def test_stabilizer_count_out_of_range_exits_3(capsys):
    assert run(capsys, "stabilizers", "--n", 9)[0] == cli.EXIT_PARSE


def test_dictionary_reproduces_builtin_polytope(tmp_path, capsys, t_file):
    path = tmp_path / "stab1.txt"
    run(capsys, "stabilizers", "--n", 1, "--output", path)
    base = ["measure", t_file, "--theory", "magic:n=1", "--measure", "generalized_robustness"]
    _, out_builtin, _ = run(capsys, *base)
    _, out_dict, _ = run(capsys, *base, "--dictionary", path)
    assert json.loads(out_dict)["value"] == pytest.approx(json.loads(out_builtin)["value"], abs=1e-9)


def test_sweep_is_deterministic_and_well_formed(tmp_path, capsys):
    argv = ["sweep", "--n", 1, "--points", 6, "--measures", "generalized_robustness,best_free_approximation"]
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    assert run(capsys, *argv, "--output", a)[0] == cli.EXIT_OK
    assert run(capsys, *argv, "--output", b)[0] == cli.EXIT_OK
    assert a.read_bytes() == b.read_bytes()
    rows = list(csv.reader(io.StringIO(a.read_text())))
    assert rows[0] == ["alpha", "generalized_robustness", "best_free_approximation"]
    vals = np.array(rows[1:], dtype=float)
    assert np.allclose(vals[:, 0], np.linspace(0, 1, 6))
    assert vals[0, 1] == pytest.approx(0.0, abs=1e-9)
    assert vals[-1, 1] == pytest.approx(2 - np.sqrt(3), abs=1e-6)  # program route, certified gap


def test_sweep_rejects_unknown_measure(capsys):
    assert run(capsys, "sweep", "--points", 3, "--measures", "volume")[0] == cli.EXIT_PARSE


def test_custom_line_sweep(tmp_path, capsys):
    s0 = write_state(tmp_path / "s0.json", np.eye(2) / 2, [2])
    s1 = write_state(tmp_path / "s1.json", t_state(), [2])
    code, out, _ = run(capsys, "sweep", "--family", "custom_line", "--start", s0, "--end", s1,
                       "--theory", "magic:n=1", "--points", 3, "--measures", "generalized_robustness")
    assert code == cli.EXIT_OK
    vals = np.array(list(csv.reader(io.StringIO(out)))[1:], dtype=float)
    assert vals[-1, 1] == pytest.approx(2 - np.sqrt(3), abs=1e-6)
    assert run(capsys, "sweep", "--family", "custom_line", "--points", 3)[0] == cli.EXIT_PARSE


def test_sample_deterministic_and_normalised(capsys):
    argv = ["sample", "--theory", "schmidt:dA=3,dB=3,k=2", "--count", 40, "--seed", 5]
    _, first, _ = run(capsys, *argv)
    _, second, _ = run(capsys, *argv)
    assert first == second
    rows = list(csv.reader(io.StringIO(first)))
    assert rows[0] == ["index", "normalized_gauge_sq_minus_one", "polar_gauge_sq", "geometric"]
    vals = np.array(rows[1:], dtype=float)
    assert vals.shape == (40, 4)
    assert np.all((vals[:, 1] >= 0) & (vals[:, 1] <= 1 + 1e-9))
    assert np.allclose(vals[:, 2] + vals[:, 3], 1.0, atol=1e-11)


@pytest.mark.parametrize("theory", ["schmidt:dA=3,dB=3,k=2", "coherence:d=5,k=2", "genuine:dims=2x2x2", "magic:n=1"])
def test_sample_free_family_has_zero_gauge_excess(capsys, theory):
    _, out, _ = run(capsys, "sample", "--theory", theory, "--count", 15, "--family", "free")
    vals = np.array(list(csv.reader(io.StringIO(out)))[1:], dtype=float)
    assert np.max(vals[:, 1]) <= 1e-8
    assert np.max(vals[:, 3]) <= 1e-8


def test_random_free_pure_is_free(rng):
    from resource_gauges import gauges

    for text in ("coherence:d=5,k=2", "schmidt:dA=3,dB=4,k=2", "genuine:dims=2x3x2", "magic:n=2"):
        theory = parse_theory(text)
        for _ in range(5):
            psi = cli.random_free_pure(theory, rng)
            assert gauges.pure_polar(psi, theory) == pytest.approx(1.0, abs=1e-10)


def test_check_passes_then_fails_with_negative_slack(capsys):
    argv = ["check", "--theory", "magic:n=1", "--count", 6]
    code, out, _ = run(capsys, *argv)
    assert code == cli.EXIT_OK
    assert out.strip().splitlines()[-1] == "ALL PASS"
    code, out, _ = run(capsys, *argv, "--slack", -1)
    assert code == cli.EXIT_CHECK_FAILED
    assert "FAIL faithfulness" in out
    assert out.strip().splitlines()[-1] == "SOME CHECKS FAILED"


def test_check_needs_polytope_theory(capsys):
    assert run(capsys, "check", "--theory", "coherence:d=3,k=2", "--count", 2)[0] == cli.EXIT_UNSUPPORTED


def test_check_states_include_free_mixtures():
    theory = MagicQubits(1)
    states = cli.random_check_states(theory, 6, seed=3)
    assert len(states) == 6
    for rho in states:
        assert np.trace(rho).real == pytest.approx(1.0)
        assert np.linalg.eigvalsh(rho).min() >= -1e-12
    again = cli.random_check_states(theory, 6, seed=3)
    assert all(np.array_equal(a, b) for a, b in zip(states, again))


def test_free_diagonal_state_has_unit_nuclear_gauge(tmp_path, capsys):
    f = write_state(tmp_path / "diag.json", np.diag([0.5, 0.3, 0.2]), [3])
    code, out, _ = run(capsys, "measure", f, "--theory", "coherence:d=3,k=1", "--measure", "nuclear_gauge")
    assert code == cli.EXIT_OK
    assert json.loads(out)["value"] == pytest.approx(1.0, abs=1e-9)


def test_schmidt_standard_robustness_on_mixed_exits_2(tmp_path, capsys):
    f = write_state(tmp_path / "m.json", np.eye(4) / 4, [2, 2])
    code, out, _ = run(capsys, "measure", f, "--theory", "schmidt:dA=2,dB=2,k=1", "--measure", "standard_robustness")
    assert code == cli.EXIT_UNSUPPORTED
    assert out == ""
