import hashlib
import io
import json
import subprocess
import sys
from pathlib import Path

import pytest

from cobordisc import cli
from cobordisc.errors import InvariantError

SAMPLES = Path(__file__).resolve().parent.parent / "samples"


def run(*argv):
    buf = io.StringIO()
    code = cli.run(list(argv), out=buf)
    return code, buf.getvalue()


def run_json(*argv):
    code, text = run(*argv)
    return code, json.loads(text)


def sample(name):
    return str(SAMPLES / name)


def statuses(report):
    return {c["id"]: c["status"] for c in report["checks"]}


def test_hyperdet_both_methods():
    code, rep = run_json("hyperdet", "--input", sample("quadric_embedding.json"), "--method", "both")
    assert code == 0
    assert rep["result"]["formula"] == rep["result"]["schlafli"] == rep["result"]["value"] == 4
    assert statuses(rep)["hyperdet.formula_vs_schlafli"] == "pass"
    names = {c["name"]: c["status"] for c in rep["checks"]}
    assert names["formula_vs_schlafli"] == "pass"
    raw = Path(sample("quadric_embedding.json")).read_bytes()
    assert rep["input_sha256"] == hashlib.sha256(raw).hexdigest()


def test_hyperdet_single_method_and_kernel():
    code, rep = run_json("hyperdet", "--input", sample("degenerate_embedding.json"), "--method", "schlafli")
    assert code == 0 and rep["result"]["value"] == 0 and "formula" not in rep["result"]
    assert rep["result"]["kernel"]["point"] == [[1, -1], [1, -1], [1, 1]]


def test_hyperdet_other_format(tmp_path):
    f = tmp_path / "h.json"
    f.write_text(json.dumps({"format": [3, 3, 3], "entries": {"111": 1, "222": 1, "120": 1}}))
    code, rep = run_json("hyperdet", "--input", str(f))
    assert code == 0 and rep["result"]["kernel_point"] is not None


def test_equivariant_ki_table():
    code, rep = run_json("equivariant", "ki", "--n", "4", "--i", "2")
    assert code == 0
    assert [r["group"] for r in rep["result"]["homology"]] == ["Z", "Z/2", "Z/2", "0", "Z"]
    assert [(r["degree"], r["group"]) for r in rep["result"]["local_system"]] == [(2, "Z/2"), (3, "0"), (4, "Z")]
    assert rep["result"]["orientable"] is True
    assert statuses(rep) == {"equivariant.closed_form": "pass"}


def test_equivariant_ki_rejects_odd_n():
    code, rep = run_json("equivariant", "ki", "--n", "5", "--i", "2")
    assert code == 2 and rep["error"]["kind"] == "validation"


def test_missing_and_malformed_input(tmp_path):
    code, rep = run_json("cobordism", "check", "--input", str(tmp_path / "missing.json"))
    assert code == 2 and "cannot read" in rep["error"]["message"]
    bad = tmp_path / "bad.json"
    bad.write_text('{\n  "dims": [1,\n}')
    code, rep = run_json("homology", "--input", str(bad))
    assert code == 2 and "line 3" in rep["error"]["message"]


def test_unknown_subcommand(capsys):
    with pytest.raises(SystemExit) as exc:
        cli.run(["frobnicate"])
    assert exc.value.code == 2
    assert "usage" in capsys.readouterr().err


def test_ring_disc():
    code, rep = run_json("ring", "disc", "--input", sample("three_sphere_ring.json"), "--assoc")
    assert code == 0
    assert rep["result"]["discriminant"]["kind"] == "zero_certified"
    st = statuses(rep)
    assert st["ring.associative"] == "pass" and st["ring.commutative"] == "pass" and st["ring.unit"] == "pass"


def test_cobordism_commands():
    code, rep = run_json("cobordism", "check", "--input", sample("quadric_two_end.json"))
    assert code == 0 and rep["result"]["common_discriminant"] == 4
    code, rep = run_json("cobordism", "check", "--input", sample("three_sphere_cobordism.json"))
    assert code == 0 and rep["result"]["common_discriminant"] == 4 and rep["result"]["square"] is True
    code, rep = run_json("cobordism", "surgery", "--sigma", "3", "--alpha", "0")
    assert code == 0 and statuses(rep)["cobordism.square"] == "pass"
    code, rep = run_json("cobordism", "surgery", "--sigma", "1", "--alpha", "2")
    assert code == 1
    assert statuses(rep)["cobordism.multiplicative"] == "fail"
    assert statuses(rep)["cobordism.ends_equal"] == "pass"


def test_cobordism_invalid(tmp_path):
    f = tmp_path / "c.json"
    f.write_text(json.dumps({"ring": {"rank": 2}, "ends": []}))
    code, rep = run_json("cobordism", "check", "--input", str(f))
    assert code == 2


def test_homology_and_custom():
    code, rep = run_json("homology", "--input", sample("rp3.json"))
    assert code == 0 and [r["group"] for r in rep["result"]["homology"]] == ["Z", "Z/2", "0", "Z"]
    code, rep = run_json("equivariant", "custom", "--input", sample("rp2_twisted.json"))
    assert code == 0 and [r["group"] for r in rep["result"]["homology"]] == ["Z/2", "0", "Z"]


def test_specseq():
    code, rep = run_json("specseq", "--input", sample("filtered_d2.json"), "--verify")
    assert code == 0
    assert rep["result"]["convergence"]["collapse_page"] == 3
    assert rep["result"]["e_infinity"] == []
    code, rep = run_json("specseq", "--input", sample("filtered_d2.json"), "--page", "2")
    assert [p["r"] for p in rep["result"]["pages"]] == [2]
    assert rep["result"]["pages"][0]["differentials"][0]["matrix"] == [[1]]


def test_specseq_filtration_violation(tmp_path):
    f = tmp_path / "f.json"
    f.write_text(json.dumps({"coeff": "Z2", "dims": [1, 1], "boundaries": [[[1]]], "levels": [[1], [0]]}))
    code, rep = run_json("specseq", "--input", str(f))
    assert code == 2 and "(degree 1, index 0)" in rep["error"]["message"]


def test_pl_commands():
    code, rep = run_json("pl", "twist", "--input", sample("a2.json"), "--sphere", "0")
    assert code == 0 and rep["result"]["matrix"] == [[-1, 1], [0, 1]]
    assert set(statuses(rep).values()) == {"pass"}
    code, rep = run_json("pl", "solve", "--input", sample("t_graph.json"))
    assert code == 0 and rep["result"]["dimension"] == 0
    assert all(d["forced_zero"] for d in rep["result"]["discriminants"])
    code, rep = run_json("pl", "solve", "--input", sample("a2.json"))
    assert code == 0 and rep["result"]["dimension"] == 1
    assert statuses(rep)["gw.pair_discriminant"] == "inconclusive"
    code, rep = run_json("pl", "solve", "--input", sample("path4_difference_classes.json"))
    assert code == 2 and "self-intersection" in rep["error"]["message"]


def test_form_even():
    code, rep = run_json("form", "even", "--input", sample("hyperbolic_plane.json"))
    assert code == 0 and rep["result"]["even"] is True
    code, rep = run_json("form", "even", "--input", sample("odd_diagonal.json"))
    assert code == 0 and rep["result"]["even"] is False


def test_invariant_error_exit(monkeypatch):
    def boom(*a, **k):
        raise InvariantError("forced")

    monkeypatch.setattr(cli, "homology_K", boom)
    code, rep = run_json("equivariant", "ki", "--n", "4", "--i", "2")
    assert code == 3 and rep["error"] == {"kind": "invariant", "message": "forced"}


def test_pretty_output():
    code, text = run("--pretty", "equivariant", "ki", "--n", "4", "--i", "2")
    assert code == 0 and "H_2  Z/2" in text and "equivariant.closed_form: pass" in text
    code, text = run("specseq", "--input", sample("filtered_d2.json"), "--pretty")
    assert "E^2" in text and "q\\p" in text


def test_canonical_json_and_determinism():
    argv = ["cobordism", "surgery", "--sigma", "2", "--alpha", "1"]
    _, a = run(*argv)
    _, b = run(*argv)
    assert a == b
    obj = json.loads(a)
    assert a == cli.canonical(obj) + "\n"
    assert not any(isinstance(x, float) for x in walk(obj))


def walk(x):
    yield x
    if isinstance(x, dict):
        for v in x.values():
            yield from walk(v)
    elif isinstance(x, list):
        for v in x:
            yield from walk(v)


def test_module_entry_point():
    proc = subprocess.run(
        [sys.executable, "-m", "cobordisc", "equivariant", "ki", "--n", "2", "--i", "1"],
        capture_output=True, text=True, check=False,
    )
    assert proc.returncode == 0
    assert json.loads(proc.stdout)["result"]["orientable"] is True
