import io

import pytest

from dynconn.cli import (
    EXIT_CONFIG,
    EXIT_MISMATCH,
    EXIT_OK,
    EXIT_PARSE,
    RunConfig,
    SplitMix64,
    fit_slope,
    gen_trace,
    main,
    params,
    run_trace,
    scaling_csv,
    scaling_point,
)
from dynconn.core import parse_trace

PATH3 = "graph 3\nedge 0 1\nedge 1 2\non 0\non 1\nconn 0 1\noff 1\non 2\nconn 0 2\n"


def cli(*argv, stdin=None, monkeypatch=None):
    out, err = io.StringIO(), io.StringIO()
    if stdin is not None:
        monkeypatch.setattr("sys.stdin", io.StringIO(stdin))
    code = main(list(argv), out, err)
    return code, out.getvalue(), err.getvalue()


def test_path_trace_output(tmp_path):
    f = tmp_path / "p.tr"
    f.write_text(PATH3)
    code, out, _ = cli("run", str(f))
    assert code == EXIT_OK
    assert out.splitlines() == ["0 true", "1 false"]


def test_stdin_trace(monkeypatch):
    code, out, _ = cli("run", "-", stdin=PATH3, monkeypatch=monkeypatch)
    assert (code, out) == (EXIT_OK, "0 true\n1 false\n")


@pytest.mark.parametrize("seed", range(3))
def test_policies_agree(seed):
    text = gen_trace("subgraph", 32, 800, seed)
    a = run_trace(RunConfig(policy="classic"), text).answers
    b = run_trace(RunConfig(policy="degree"), text).answers
    assert a == b


@pytest.mark.parametrize("mode", ["subgraph", "subgraph-offline", "geom", "geom-offline"])
def test_check_oracle_exit_zero(tmp_path, mode):
    kind = mode.split("-")[0]
    f = tmp_path / "t.tr"
    f.write_text(gen_trace(kind, 40, 500, 5, d=2))
    code, _, err = cli("run", str(f), "--mode", mode, "--check-oracle")
    assert code == EXIT_OK, err


def test_mismatch_exit_code(tmp_path, monkeypatch):
    import dynconn.cli as mod

    monkeypatch.setattr(mod, "oracle_answers", lambda trace, counters=None: [False, True])
    f = tmp_path / "p.tr"
    f.write_text(PATH3)
    code, _, err = cli("run", str(f), "--check-oracle")
    assert code == EXIT_MISMATCH and "expected" in err


def test_parse_and_state_errors(tmp_path):
    bad = tmp_path / "bad.tr"
    bad.write_text("graph 2\nedge 0 5\n")
    code, _, err = cli("run", str(bad))
    assert code == EXIT_PARSE and "line 2" in err
    bad.write_text("graph 2\non 0\non 0\n")
    assert cli("run", str(bad))[0] == EXIT_PARSE
    assert cli("run", str(tmp_path / "missing.tr"))[0] == EXIT_PARSE


def test_config_errors(tmp_path):
    f = tmp_path / "p.tr"
    f.write_text(PATH3)
    assert cli("run", str(f), "--b", "1/2")[0] == EXIT_CONFIG
    assert cli("run", str(f), "--delta", "0")[0] == EXIT_CONFIG
    assert cli("run", str(f), "--mode", "geom")[0] != EXIT_OK
    assert cli("gen", "--n", "5", "--ops", "10", "--mix", "on=0.5,off=0.1")[0] == EXIT_CONFIG


def test_counters_output(tmp_path):
    f = tmp_path / "p.tr"
    f.write_text(gen_trace("subgraph", 16, 100, 1))
    csv = tmp_path / "c.csv"
    assert cli("run", str(f), "--counters-out", str(csv), "--counters-every", "25")[0] == EXIT_OK
    rows = csv.read_text().splitlines()
    assert rows[0].startswith("op_index,")
    assert len(rows) == 1 + 4 + 1


def test_gen_is_deterministic_and_parses():
    a = gen_trace("subgraph", 20, 300, 42)
    assert a == gen_trace("subgraph", 20, 300, 42)
    assert a != gen_trace("subgraph", 20, 300, 43)
    g = gen_trace("geom", 20, 300, 42, d=3)
    assert len(parse_trace(g).events) == 300
    assert len(parse_trace(a).events) == 300


def test_gen_exact_event_count():
    text = gen_trace("subgraph", 10, 100, 1, mix={"on": 0.4, "off": 0.4, "conn": 0.2})
    tr = parse_trace(text)
    assert len(tr.events) == 100
    assert {e.kind for e in tr.events} <= {"on", "off", "conn"}


def test_gen_cli_writes_file(tmp_path):
    out = tmp_path / "g.tr"
    code, _, _ = cli("gen", "--mode", "geom", "--n", "10", "--ops", "50", "--seed", "3", "-o", str(out))
    assert code == EXIT_OK
    assert out.read_text() == gen_trace("geom", 10, 50, 3)


def test_params():
    p = params("subgraph", 10**6)
    assert (p["delta"], p["q"]) == (100, 10**4)
    assert (str(p["update_exp"]), str(p["query_exp"])) == ("2/3", "1/3")
    p = params("geom", 1000, "1/2")
    assert (str(p["update_exp"]), str(p["query_exp"])) == ("9/10", "1/5")
    p = params("geom", 1000, "1/3")
    assert (str(p["update_exp"]), str(p["query_exp"])) == ("20/21", "1/7")
    p = params("geom-offline", 4096, 1)
    assert str(p["update_exp"]) == "1000/1147"


def test_params_cli():
    code, out, _ = cli("params", "--size", "1000000")
    assert code == EXIT_OK
    assert "delta\t100" in out.splitlines()


def test_splitmix_reference_values():
    # first outputs for seed 1234567 from the published SplitMix64 generator
    r = SplitMix64(1234567)
    assert [r.next() for _ in range(3)] == [6457827717110365317, 3203168211198807973, 9817491932198370423]


def test_fit_slope_exact_power():
    xs = [2**k for k in range(5)]
    assert fit_slope(xs, [x**0.5 for x in xs]) == pytest.approx(0.5)


def test_scaling_point_and_csv():
    row = scaling_point(512, 1)
    assert row["delta"] == 8 and row["vertex_updates"] == 2 * row["q"]
    text = scaling_csv([row, scaling_point(1024, 1)], 0.5)
    assert text.splitlines()[0].startswith("m,n,delta")
    assert text.rstrip().endswith("loglog_slope=0.5000")
