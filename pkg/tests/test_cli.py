import json
import subprocess
import sys
from fractions import Fraction as F

import pytest

from artifact.cli import (
    EXIT_ERROR,
    EXIT_FAILS,
    EXIT_INCONCLUSIVE,
    EXIT_OK,
    EXIT_USAGE,
    dispatch,
)
from artifact.seqcore import Geometric, PowerLaw, finite, omega, scale, seq_to_json


@pytest.fixture
def files(tmp_path):
    def write(name, obj):
        p = tmp_path / name
        p.write_text(json.dumps(obj))
        return str(p)

    return {
        "omega": write("omega.json", seq_to_json(omega())),
        "half": write("half.json", seq_to_json(scale(omega(), F(1, 2)))),
        "pow2": write("pow2.json", seq_to_json(PowerLaw(1, 2))),
        "geo": write("geo.json", seq_to_json(Geometric(1, F(1, 2)))),
        "one": write("one.json", seq_to_json(finite([1]))),
        "v321": write("v321.json", [3, 2, 1]),
        "v42": write("v42.json", [4, 2]),
        "v21": write("v21.json", [2, 1]),
        "v22": write("v22.json", [2, 2]),
        "half_vec": write("halfvec.json", ["1/2", "1/2"]),
        "halfmat": write("halfmat.json", [["1/2", "1/2"], ["1/2", "1/2"]]),
        "r26": write("r26.json", [["0", "1/2", "1/2"], ["1/2", "0", "1/2"], ["1/2", "1/2", "0"]]),
        "bad": write("bad.json", "x")[:-5] + "nope.json",
        "tmp": tmp_path,
    }


def run(argv, capsys):
    code = dispatch(argv)
    out = capsys.readouterr()
    return code, out.out, out.err


def test_check_exit_codes(files, capsys):
    code, out, _ = run(["check", "weak", files["half"], files["omega"]], capsys)
    assert code == EXIT_OK and json.loads(out)["verdict"] == "holds"
    code, out, _ = run(["check", "strong", files["half"], files["omega"]], capsys)
    assert code == EXIT_FAILS
    code, _, _ = run(["check", "p_shift", files["omega"], files["omega"], "--p", "0"], capsys)
    assert code == EXIT_OK


def test_check_usage_errors(files, capsys):
    code, _, err = run(["check", "nope", files["half"], files["omega"]], capsys)
    assert code == EXIT_USAGE and "usage error" in err
    code, _, _ = run(["check", "weak", files["bad"], files["omega"]], capsys)
    assert code == EXIT_USAGE
    code, _, _ = run(["frobnicate"], capsys)
    assert code == EXIT_USAGE
    code, _, _ = run(["check", "weak", files["half"], files["omega"], "--tol", "abc"], capsys)
    assert code == EXIT_USAGE


def test_horn_json_and_csv(files, capsys):
    code, out, _ = run(["horn", files["v321"], files["v42"]], capsys)
    payload = json.loads(out)
    assert code == EXIT_OK and payload["verification"]["ok"]
    code, out, _ = run(["horn", files["v321"], files["v42"], "--format", "csv"], capsys)
    assert out.splitlines()[0] == "1/2,1/2,0"


def test_horn_not_majorized_is_an_error(files, capsys):
    code, _, err = run(["horn", files["v42"], files["half_vec"]], capsys)
    assert code == EXIT_ERROR and "NotMajorized" in err


def test_canon_and_decompose(files, capsys):
    code, out, _ = run(["canon", files["half"], files["omega"], "--steps", "3"], capsys)
    assert code == EXIT_OK and "classification" in json.loads(out)
    code, out, _ = run(["decompose", files["half"], files["omega"], "--steps", "10"], capsys)
    assert code == EXIT_OK and json.loads(out)["meta"]["route"] == "alpha_infinite"


def test_intermediate(files, capsys):
    code, out, _ = run(["intermediate", "B_ii", files["v21"], files["v22"]], capsys)
    assert code == EXIT_OK and json.loads(out)["sequence"] == ["3", "1"]
    code, _, err = run(["intermediate", "B_ii", files["v321"], files["v42"]], capsys)
    assert code == EXIT_ERROR and "NotMajorized" in err
    code, out, _ = run(["intermediate", "zeta", files["geo"], files["omega"]], capsys)
    assert code == EXIT_OK and json.loads(out)["branch"] == "summable_clip"


def test_matrix_commands(files, capsys):
    code, out, _ = run(["classify", files["halfmat"]], capsys)
    assert code == EXIT_OK and json.loads(out)["doubly_stochastic"]
    code, out, _ = run(["birkhoff", files["halfmat"]], capsys)
    assert json.loads(out)["count"] == 2
    code, out, _ = run(["ortho-decide", files["r26"]], capsys)
    assert code == EXIT_FAILS and json.loads(out)["answer"] == "no"
    code, out, _ = run(["ortho-decide", files["halfmat"]], capsys)
    assert code == EXIT_OK and json.loads(out)["answer"] == "yes"


def test_ideal_commands(files, capsys):
    code, out, _ = run(["ideal", "member", files["pow2"], files["omega"]], capsys)
    assert code == EXIT_OK
    code, out, _ = run(["ideal", "member", files["omega"], files["pow2"]], capsys)
    assert code == EXIT_FAILS and json.loads(out)["witness"]["index"] == 0
    code, _, _ = run(["ideal", "am-closure", files["one"], files["geo"], "--c-grid", "1,2"], capsys)
    assert code == EXIT_OK
    code, _, _ = run(["ideal", "member", files["pow2"], files["omega"], "--c-grid", "x"], capsys)
    assert code == EXIT_USAGE
    code, _, _ = run(["ideal", "member", files["pow2"]], capsys)
    assert code == EXIT_USAGE
    code, out, _ = run(["ideal", "probe", files["omega"], files["halfmat"], "--horizon", "20"], capsys)
    assert code == EXIT_OK and json.loads(out)["scope"] == "sampled evidence only"


def test_inconclusive_exit_code(files, capsys):
    # <(9/10)^n> needs ampliation 7 to fit under <(1/2)^n>; cap it at 2
    g9 = files["tmp"] / "g9.json"
    g9.write_text(json.dumps(seq_to_json(Geometric(1, F(9, 10)))))
    code, out, _ = run(["ideal", "member", str(g9), files["geo"], "--m-max", "2"], capsys)
    assert code == EXIT_INCONCLUSIVE and json.loads(out)["verdict"] == "inconclusive"
    code, _, _ = run(["ideal", "member", str(g9), files["geo"]], capsys)
    assert code == EXIT_OK


def test_gen_round_trips_through_matrix_commands(files, capsys):
    out_path = str(files["tmp"] / "q.json")
    code, _, _ = run(["gen", "ex_2_11", "3", "--schur", "--out", out_path], capsys)
    assert code == EXIT_OK
    code, out, _ = run(["classify", out_path], capsys)
    assert code == EXIT_OK and json.loads(out)["row_stochastic"]
    code, _, _ = run(["gen", "ex_2_11", "three"], capsys)
    assert code == EXIT_USAGE
    code, _, _ = run(["gen", "ex_6_11", files["geo"], "3"], capsys)
    assert code == EXIT_ERROR


def test_json_output_is_deterministic(files, capsys):
    argv = ["check", "weak", files["half"], files["omega"]]
    _, a, _ = run(argv, capsys)
    _, b, _ = run(argv, capsys)
    assert a == b and a == json.dumps(json.loads(a), sort_keys=True, indent=2) + "\n"


def test_module_entry_point(files):
    p = subprocess.run([sys.executable, "-m", "artifact", "check", "weak", files["one"], files["geo"]],
                       capture_output=True, text=True)
    assert p.returncode == EXIT_OK
    assert json.loads(p.stdout)["verdict"] == "holds"
