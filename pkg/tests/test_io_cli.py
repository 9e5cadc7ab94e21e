import json
import random
import re
import subprocess
import sys

import pytest

from bks2.catalogs import CATALOG_NAMES, builtin_catalog
from bks2.cli import main
from bks2.exact_algebra import SQRT2, Scalar, identity
from bks2.hv_model import check_born_all, validate_model
from bks2.hypergraph import RaySet
from bks2.io import (
    InputError,
    format_rays,
    load_model,
    load_rays,
    model_to_json,
    parse_contexts_spec,
    parse_model,
    parse_rays,
    parse_state,
)

from conftest import frac, make_model

THIRD = "1/3"
STATE_I3 = [[THIRD, "0", "0"], ["0", THIRD, "0"], ["0", "0", THIRD]]


def run(argv, capsys):
    code = main(argv)
    out = capsys.readouterr().out
    return code, out


def write(path, content):
    path.write_text(content if isinstance(content, str) else json.dumps(content), encoding="utf-8")
    return str(path)


@pytest.fixture
def delta_files(tmp_path):
    third = frac(1, 3)
    m = make_model([(1, 0, 0), (0, 1, 0), (0, 0, 1)], [third] * 3)
    return write(tmp_path / "m.json", model_to_json(m)), write(tmp_path / "s.json", STATE_I3)


class TestRayFiles:
    def test_basis(self, tmp_path):
        rs, warnings = load_rays(write(tmp_path / "r.txt", "1 0 0\n0 1 0\n0 0 1\n"))
        assert rs == builtin_catalog("basis3").rayset() and warnings == []

    def test_float_rejected(self, tmp_path):
        with pytest.raises(InputError, match=r"r\.txt:1:1"):
            load_rays(write(tmp_path / "r.txt", "0.5 0 0\n"))

    def test_dedup_warning(self, tmp_path):
        rs, warnings = load_rays(write(tmp_path / "r.txt", "2 0 0\n1 0 0\n"))
        assert len(rs) == 1
        assert warnings == [f"{tmp_path / 'r.txt'}:2: duplicate of the ray on line 1"]

    def test_comments_and_column(self):
        rs, _ = parse_rays("# header\n1 0 r2\n\n  0 1 0\n")
        assert len(rs) == 2
        with pytest.raises(InputError, match=r"<rays>:2:5"):
            parse_rays("1 0 0\n0 1 sqrt2\n")

    def test_dimension_mismatch_and_zero(self):
        with pytest.raises(InputError, match="expected 3 entries"):
            parse_rays("1 0 0\n1 0\n")
        with pytest.raises(InputError, match="zero vector"):
            parse_rays("0 0 0\n")
        with pytest.raises(InputError, match="no rays"):
            parse_rays("# nothing\n")

    @pytest.mark.parametrize("name", CATALOG_NAMES)
    def test_round_trip_catalogs(self, name):
        rs = builtin_catalog(name).rayset()
        back, warnings = parse_rays(format_rays(rs, comment=name))
        assert back == rs and warnings == []

    def test_round_trip_fuzz(self):
        rng = random.Random(8)
        pool = [Scalar(0), Scalar(1), Scalar(-2), SQRT2, frac(-3, 7) + SQRT2 / 5]
        for _ in range(300):
            d = rng.randint(2, 4)
            vecs = [[rng.choice(pool) for _ in range(d)] for _ in range(rng.randint(1, 8))]
            vecs = [v for v in vecs if any(v)] or [[Scalar(1)] * d]
            rs = RaySet(vecs)
            assert parse_rays(format_rays(rs))[0] == rs


class TestModelFiles:
    def test_round_trip(self, delta_files):
        m = load_model(delta_files[0])
        assert validate_model(m).passed
        again = parse_model(json.dumps(model_to_json(m)))
        assert model_to_json(again) == model_to_json(m)

    def test_float_rejected(self):
        text = '{"dimension": 3, "lambdas": [{"label": "a", "weight": 1.0}], "observables": []}'
        with pytest.raises(InputError, match="floating"):
            parse_model(text)

    def test_numeric_weight_rejected(self):
        text = '{"dimension": 3, "lambdas": [{"label": "a", "weight": 1}], "observables": []}'
        with pytest.raises(InputError, match="scalar string"):
            parse_model(text)

    def test_unknown_kind(self):
        text = '{"dimension": 3, "lambdas": [], "observables": [{"id": "X", "kind": "povm"}]}'
        with pytest.raises(InputError, match="unknown kind"):
            parse_model(text)

    def test_state(self):
        d = parse_state(json.dumps(STATE_I3))
        assert d == identity(3).scale(frac(1, 3))
        with pytest.raises(InputError):
            parse_state("[[0.5, 0], [0, 0.5]]")

    def test_contexts_spec(self):
        assert parse_contexts_spec("0,1;2,3") == [(0, 1), (2, 3)]
        with pytest.raises(InputError):
            parse_contexts_spec("0,x")


class TestCli:
    def test_basis3(self, capsys):
        code, out = run(["color", "--catalog", "basis3"], capsys)
        report = json.loads(out)
        assert code == 0 and report["verdict"] == "colorable" and report["witness"] == [1, 0, 0]

    @pytest.mark.parametrize("name", ["peres33", "ck31", "cabello18"])
    def test_noncolorable(self, name, capsys):
        code, out = run(["color", "--catalog", name], capsys)
        assert code == 1 and json.loads(out)["verdict"] == "non-colorable"

    def test_usage_errors(self, capsys):
        assert run(["color"], capsys)[0] == 2
        assert run(["color", "--catalog", "nope"], capsys)[0] == 2
        assert run(["frobnicate"], capsys)[0] == 2
        code, out = run(["color", "--rays", "/nonexistent/rays.txt"], capsys)
        assert code == 2 and json.loads(out)["verdict"] == "error"

    def test_count_and_witness(self, capsys):
        code, out = run(["color", "--catalog", "basis3", "--count", "--witness"], capsys)
        r = json.loads(out)
        assert r["count"] == {"value": 3, "exact": True} and r["witness_rays"] == ["1 0 0"]

    def test_contexts(self, capsys):
        code, out = run(["contexts", "--catalog", "peres33"], capsys)
        r = json.loads(out)
        assert code == 0 and len(r["contexts"]) == 16 and len(r["pairs"]) == 72

    def test_text_report(self, capsys):
        code, out = run(["--report", "text", "color", "--catalog", "basis3"], capsys)
        assert code == 0 and "verdict: colorable" in out
        code, out = run(["color", "--catalog", "basis3", "--report", "text"], capsys)
        assert "verdict: colorable" in out

    def test_verify_delta(self, delta_files, capsys):
        m, s = delta_files
        code, out = run(["verify-model", m, "--state", s, "--all-checks"], capsys)
        r = json.loads(out)
        assert code == 0 and r["verdict"] == "pass"
        names = [c["check"] for c in r["checks"]]
        assert "bks2" in names and "orthogonal_additivity[context 0]" in names
        assert all(c["verdict"] == "pass" for c in r["checks"])

    def test_verify_wrong_state(self, delta_files, tmp_path, capsys):
        m, _ = delta_files
        s = write(tmp_path / "d.json", [["1/2", "0", "0"], ["0", "1/4", "0"], ["0", "0", "1/4"]])
        code, out = run(["verify-model", m, "--state", s, "--check", "born"], capsys)
        assert code == 1 and json.loads(out)["verdict"] == "fail"

    def test_verify_invalid_state(self, delta_files, tmp_path, capsys):
        m, _ = delta_files
        s = write(tmp_path / "d.json", [["1", "0", "0"], ["0", "1", "0"], ["0", "0", "1"]])
        code, out = run(["verify-model", m, "--state", s], capsys)
        assert code == 2 and "trace" in json.loads(out)["error"]

    def test_verify_context_out_of_range(self, delta_files, capsys):
        m, s = delta_files
        assert run(["verify-model", m, "--state", s, "--context", "5"], capsys)[0] == 2

    def test_build_product(self, tmp_path, capsys):
        # canonical ids: 0 = (1,1), 1 = (1,0), 2 = (1,-1), 3 = (0,1)
        rays = write(tmp_path / "q.txt", "1 0\n0 1\n1 1\n1 -1\n")
        state = write(tmp_path / "s.json", [["3/4", "0"], ["0", "1/4"]])
        out_path = tmp_path / "model.json"
        code, out = run(["build-product", "--rays", rays, "--contexts", "1,3;0,2", "--state", state, "-o", str(out_path)], capsys)
        assert code == 0 and json.loads(out)["lambdas"] == 4
        m = load_model(out_path)
        assert check_born_all(m, parse_state(json.dumps([["3/4", "0"], ["0", "1/4"]]))).passed
        code, _ = run(["verify-model", str(out_path), "--state", state], capsys)
        assert code == 0

    def test_build_product_overlap(self, tmp_path, capsys):
        rays = write(tmp_path / "r.txt", "1 0 0\n0 1 0\n0 0 1\n0 1 1\n0 1 -1\n")
        state = write(tmp_path / "s.json", STATE_I3)
        code, out = run(["build-product", "--rays", rays, "--contexts", "0,2,4;0,1,3", "--state", state, "-o", str(tmp_path / "o.json")], capsys)
        assert code == 2 and "share" in json.loads(out)["error"]


DECIMAL = re.compile(r"^-?[0-9]*\.[0-9]+$|^-?[0-9]+(\.[0-9]*)?[eE][-+]?[0-9]+$")


def assert_no_floats(obj):
    if isinstance(obj, dict):
        for v in obj.values():
            assert_no_floats(v)
    elif isinstance(obj, list):
        for v in obj:
            assert_no_floats(v)
    else:
        assert not isinstance(obj, float)
        assert not (isinstance(obj, str) and DECIMAL.match(obj)), obj


class TestDeterminism:
    def test_reports_and_cnf_byte_identical(self, tmp_path, delta_files, capsys):
        m, s = delta_files
        commands = [
            ["color", "--catalog", "peres33", "--count"],
            ["color", "--catalog", "basis3", "--witness", "--count"],
            ["contexts", "--catalog", "ck31"],
            ["verify-model", m, "--state", s],
        ]
        for argv in commands:
            a, b = run(argv, capsys)[1], run(argv, capsys)[1]
            assert a == b
            assert_no_floats(json.loads(a))
        c1, c2 = tmp_path / "a.cnf", tmp_path / "b.cnf"
        run(["color", "--catalog", "ck31", "--emit-cnf", str(c1)], capsys)
        run(["color", "--catalog", "ck31", "--emit-cnf", str(c2)], capsys)
        assert c1.read_bytes() == c2.read_bytes()

    def test_ray_order_does_not_change_report(self, tmp_path, capsys):
        rays = [list(r.entries) for r in builtin_catalog("peres33").rayset()]
        random.Random(1).shuffle(rays)
        text = "\n".join(" ".join(str(x) for x in r) for r in rays)
        p = write(tmp_path / "shuffled.txt", text)
        q = write(tmp_path / "sorted.txt", format_rays(builtin_catalog("peres33").rayset()))
        a = json.loads(run(["color", "--rays", p], capsys)[1])
        b = json.loads(run(["color", "--rays", q], capsys)[1])
        for key in ("input_digest", "stats", "hypergraph", "verdict"):
            assert a[key] == b[key]

    def test_module_entry_point(self):
        proc = subprocess.run([sys.executable, "-m", "bks2", "color", "--catalog", "basis3"], capture_output=True, text=True)
        assert proc.returncode == 0 and json.loads(proc.stdout)["verdict"] == "colorable"
