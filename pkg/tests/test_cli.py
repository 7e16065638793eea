import json

import pytest

from vagroup.cli import run


def call(*argv):
    import io

    out = io.StringIO()
    code = run(list(argv), out)
    return code, out.getvalue()


def test_sing_identity():
    assert call("sing", "--element", "identity") == (0, "{}\n")


def test_sing_beta():
    assert call("sing", "--element", "beta") == (0, "{0+, 1-}\n")


def test_distortion_beta(capsys):
    code, out = call("distortion", "--element", "beta", "--k", "12")
    assert code == 0
    rows = [l.split("\t") for l in out.splitlines() if l and l[0].isdigit()]
    assert len(rows) == 12
    assert all(r[4] == "1" for r in rows)


def test_decimal_column_is_display_only():
    _, exact = call("distortion", "--element", "contract", "--k", "3")
    _, dec = call("distortion", "--element", "contract", "--k", "3", "--decimal")
    assert [l.split("\t")[:6] for l in dec.splitlines()[2:]] == [l.split("\t") for l in exact.splitlines()[2:]]


def test_pow_over_budget(tmp_path):
    cfg = tmp_path / "c.json"
    cfg.write_text(json.dumps({"budget": 10}))
    code, _ = call("pow", "--element", "beta", "--k", "100", "--config", str(cfg))
    assert code == 2


def test_domain_errors_exit_1(tmp_path):
    assert call("sing", "--element", "va{ [0,1) ")[0] == 1
    assert call("random")[0] == 1
    assert call("eval", "--element", "x0", "--point", "1/2")[0] == 1
    bad = tmp_path / "c.json"
    bad.write_text(json.dumps({"nonsense": 1}))
    assert call("sing", "--element", "x0", "--config", str(bad))[0] == 1
    assert call("distortion", "--element", "identity", "--k", "3")[0] == 1


def test_usage_error_exits_1():
    with pytest.raises(SystemExit) as info:
        run(["nosuch"])
    assert info.value.code == 1


def test_compose_inv_eval():
    code, out = call("compose", "--element", "x0", "--element", "x0")
    assert code == 0 and out.startswith("va{")
    _, inv = call("inv", "--element", "x0")
    _, back = call("compose", "--element", "x0", "--element", inv.strip())
    assert back.strip() == "va{ [0,1) -> [0,1) }"
    assert call("eval", "--element", "x0", "--point", "1/2^1+") == (0, "1/2^2+\n")


def test_element_from_file(tmp_path):
    p = tmp_path / "e.va"
    p.write_text("pl{ [0,1/2) -> [1/2,1) ; [1/2,1) -> [0,1/2) }\n")
    assert call("order", "--element", str(p)) == (0, "finite\t2\n")


def test_order_and_into_v():
    assert call("order", "--element", "x0")[1].startswith("infinite\tHigmanLeaf n=1")
    assert call("order", "--element", "conj_swap") == (0, "finite\t2\n")
    assert call("into-v", "--element", "beta")[1].startswith("not-finite-order\tFixedSingularSlope")


def test_orbit_orbits_reduce():
    code, out = call("orbit", "--element", "beta", "--point", "0+")
    assert out.splitlines()[0] == "periodic\tpreperiod 0\tperiod 1"
    _, out = call("orbits", "--element", "planted_multi")
    assert out.splitlines()[0] == "orbit 0\t5/2^3+@0, 0+@1"
    _, out = call("reduce", "--element", "planted")
    assert "step\torbit 0\tremoved 0+" in out


def test_certify():
    code, out = call("certify", "--element", "drift")
    assert code == 0
    assert "certificate\tSingularGrowth" in out


def test_ball_build_query(tmp_path):
    path = tmp_path / "ball.txt"
    assert call("ball", "build", "--radius", "1", "--out", str(path))[0] == 0
    code, out = call("ball", "query", "--ball", str(path), "--element", "x0", "--element", "beta_l")
    assert out == "length\t1\nnot-in-ball\tradius 1\n"


def test_custom_genset(tmp_path):
    gens = tmp_path / "gens.va"
    gens.write_text("a = pl{ [0,1/2) -> [1/2,1) ; [1/2,1) -> [0,1/2) }\n")
    cfg = tmp_path / "c.json"
    cfg.write_text(json.dumps({"genset": "gens.va"}))
    code, out = call("ball", "build", "--radius", "3", "--config", str(cfg))
    assert code == 0
    assert "# size 2" in out


def test_random_is_seeded():
    a = call("random", "--seed", "5", "--length", "3", "--count", "3")
    b = call("random", "--seed", "5", "--length", "3", "--count", "3")
    assert a == b and a[0] == 0


def test_text_format(tmp_path):
    cfg = tmp_path / "c.json"
    cfg.write_text(json.dumps({"format": "text"}))
    code, out = call("distortion", "--element", "beta", "--k", "2", "--config", str(cfg))
    assert code == 0 and "\t" not in out.splitlines()[-1]
