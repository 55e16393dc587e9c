import json
import random

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from biref import io
from biref.algebra import NONSQUARE, SQUARE, field_make
from biref.cli import main
from biref.errors import NotAnIsometry, ParseError
from biref.linalg import eye
from biref.ortho import Isometry, is_isometry, random_isometry
from biref.space import BilinearSpace


def write(path, obj):
    path.write_text(json.dumps(obj))
    return str(path)


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


@settings(max_examples=40, deadline=None)
@given(st.sampled_from([(3, 1), (5, 1), (3, 2), (7, 1)]), st.integers(1, 5), st.booleans(), st.integers(0, 10**6))
def test_json_roundtrip(pk, n, square, seed):
    F = field_make(*pk)
    S = BilinearSpace.standard(F, n, SQUARE if square else NONSQUARE)
    phi = random_isometry(S, random.Random(seed))
    S2 = io.space_from_json(json.loads(io.dumps(io.space_to_json(S))))
    assert S2 == S
    phi2 = io.element_from_json(S2, json.loads(io.dumps(io.element_to_json(phi))))
    assert (phi2.matrix == phi.matrix).all()
    assert io.dumps(io.element_to_json(phi2)) == io.dumps(io.element_to_json(phi))


def test_parse_errors():
    with pytest.raises(ParseError):
        io.space_from_json({"field": {"p": 3}, "gram": [[1, 1], [0, 1]]})
    with pytest.raises(ParseError):
        io.space_from_json({"gram": [[1]]})
    with pytest.raises(ParseError):
        io.mat_from_json(field_make(3), [[1, 2], [3]])
    S = BilinearSpace(field_make(5), eye(2))
    with pytest.raises(NotAnIsometry):
        io.element_from_json(S, {"matrix": [[2, 0], [0, 1]]})


@pytest.fixture
def diag111(tmp_path):
    S = BilinearSpace(field_make(3), eye(3))
    return write(tmp_path / "s.json", io.space_to_json(S)), write(tmp_path / "e.json", {"matrix": eye(3).tolist()})


def test_cli_classify_identity(capsys, diag111):
    s, e = diag111
    code, out, _ = run(capsys, "classify", "--space", s, "--element", e, "--json")
    assert code == 0
    v = json.loads(out)["verdict"]
    assert v["biref_Omega"] is True and v["in_omega"] is True


def test_cli_classify_minus_one_hyperbolic(capsys, tmp_path):
    S = BilinearSpace.hyperbolic(field_make(3), 1)
    s = write(tmp_path / "s.json", io.space_to_json(S))
    e = write(tmp_path / "e.json", [[2, 0], [0, 2]])
    code, out, _ = run(capsys, "--json", "classify", "--space", s, "--element", e)
    v = json.loads(out)["verdict"]
    assert code == 0 and v["in_omega"] is False and v["biref_Omega"] is None and v["reason"]


def test_cli_asymmetric_gram_exits_2(capsys, tmp_path):
    s = write(tmp_path / "s.json", {"field": {"p": 3}, "gram": [[1, 1], [0, 1]]})
    e = write(tmp_path / "e.json", [[1, 0], [0, 1]])
    code, _, err = run(capsys, "classify", "--space", s, "--element", e)
    assert code == 2 and "ParseError" in err


def test_cli_anisotropic_needs_membership_flag(capsys, tmp_path):
    S = BilinearSpace(field_make(3), eye(2))
    s = write(tmp_path / "s.json", io.space_to_json(S))
    e = write(tmp_path / "e.json", [[0, 1], [2, 0]])
    assert run(capsys, "classify", "--space", s, "--element", e)[0] == 2
    code, out, _ = run(capsys, "classify", "--space", s, "--element", e, "--in-omega", "false", "--json")
    assert code == 0 and json.loads(out)["verdict"]["in_omega"] is False


def test_cli_gen_block(capsys, tmp_path):
    prefix = str(tmp_path / "b_")
    code, out, _ = run(capsys, "gen", "block", "--q", "3", "--block", "type2pm", "--t", "1", "--prefix", prefix, "--json")
    assert code == 0
    S = io.space_from_json(io.load(prefix + "space.json"))
    phi = io.element_from_json(S, io.load(prefix + "element.json"))
    assert S.dim == 3 and is_isometry(S, phi.matrix)
    assert [(p.coeffs, d) for p, d, _ in phi.elementary_divisors().entries] == [((2, 1), 3)]


def test_cli_gen_bad_spec(capsys):
    assert run(capsys, "gen", "block", "--block", "type1", "--m", "3")[0] == 2


def test_cli_gen_random_is_deterministic(capsys, tmp_path):
    S = BilinearSpace.standard(field_make(5), 4, NONSQUARE)
    s = write(tmp_path / "s.json", io.space_to_json(S))
    outs = [run(capsys, "gen", "random", "--space", s, "--reflections", "6", "--seed", "7", "--json")[1] for _ in range(2)]
    assert outs[0] == outs[1]
    rep = json.loads(outs[0])
    assert rep["seed"] == 7
    assert Isometry(S, np.array(rep["element"]["matrix"])).det == 1


def test_cli_rprofile_and_element_oracle(capsys, tmp_path):
    prefix = str(tmp_path / "r_")
    assert run(capsys, "gen", "rprofile", "--q", "3", "--prefix", prefix)[0] == 0
    code, out, _ = run(
        capsys, "oracle", "element", "--space", prefix + "space.json", "--element", prefix + "element.json", "--json"
    )
    rep = json.loads(out)
    assert code == 0 and rep["match"]
    assert rep["certificate"]["reversible_Omega"] and not rep["certificate"]["biref_Omega"]


def test_cli_decompose_and_exhaustive(capsys, tmp_path):
    prefix = str(tmp_path / "b_")
    run(capsys, "gen", "block", "--q", "3", "--block", "type2pm", "--eps", "-1", "--t", "1", "--prefix", prefix)
    code, out, _ = run(capsys, "decompose", "--space", prefix + "space.json", "--element", prefix + "element.json", "--json")
    assert code == 0 and [s["type"] for s in json.loads(out)["decomposition"]["summands"]] == ["2+"]
    code, out, _ = run(capsys, "oracle", "exhaustive", "--space", prefix + "space.json", "--json")
    rep = json.loads(out)["table"]
    assert code == 0 and rep["order"] == 48 and rep["status"] == "match"


def test_cli_verify_cells(capsys, tmp_path):
    code, out, _ = run(capsys, "verify", "--cell", "q=3,dim=4,disc=-1", "--json")
    cell = json.loads(out)["cells"][0]
    assert code == 0 and cell["status"] == "match" and cell["all_biref_Omega"] and cell["omega_order"] == 360
    # over GF(3) the hyperbolic plane has disc -1 and trivial Omega; disc +1 is the anisotropic plane
    code, out, _ = run(capsys, "verify", "--cell", "q=3,dim=2,disc=-1", "--cell", "q=3,dim=2,disc=+1", "--json")
    cells = json.loads(out)["cells"]
    assert [c["omega_order"] for c in cells] == [1, 2]
    assert [c["witt_index"] for c in cells] == [1, 0]


def test_cli_verify_skips_oversized_cells(capsys):
    code, out, _ = run(capsys, "verify", "--cell", "q=3,dim=6", "--caps", "group=1000", "--json")
    rep = json.loads(out)
    assert code == 0 and rep["cells"][0]["status"] == "skipped" and rep["status"] == "match"


def test_cli_verify_suite_and_out_file(capsys, tmp_path):
    out_file = tmp_path / "rep.json"
    code, _, _ = run(capsys, "verify", "--suite", "lemma-inv4", "--out", str(out_file), "--seed", "3")
    rep = json.loads(out_file.read_text())
    assert code == 0 and rep["seed"] == 3 and rep["suites"][0]["violations"] == 0
    assert run(capsys, "verify", "--suite", "nope")[0] == 2


def test_cli_bad_caps(capsys, diag111):
    s, e = diag111
    assert run(capsys, "--caps", "group=0", "classify", "--space", s, "--element", e)[0] == 2
