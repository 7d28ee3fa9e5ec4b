import io
import itertools
import json

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from odecoquad import cli
from odecoquad.algebra import algebra_from_tensor
from odecoquad.io import (
    FormatError,
    algebra_to_json,
    dumps,
    read_algebra,
    read_any,
    read_tensor,
    tensor_to_json,
)
from odecoquad.odeco import diagonal_tensor, dim_Y, dim_Z, hyperbolic_S, random_odeco
from odecoquad.scalars import GaussQ, exact_array
from odecoquad.tensor import BilinearForm, SymTensor3

from builders import isotropic_tensor

fractions = st.fractions(min_value=-20, max_value=20, max_denominator=12)
gaussians = st.builds(GaussQ, fractions, fractions)


@st.composite
def tensors_with_forms(draw):
    n = draw(st.integers(0, 4))
    triples = list(itertools.combinations_with_replacement(range(n), 3))
    vals = draw(st.lists(gaussians, min_size=len(triples), max_size=len(triples)))
    t = SymTensor3(n, dict(zip(triples, vals)))
    if n and draw(st.booleans()):
        g = np.array([[GaussQ(0)] * n for _ in range(n)], dtype=object)
        for i in range(n):
            for j in range(i, n):
                g[i, j] = g[j, i] = draw(gaussians)
        return t, BilinearForm(g)
    return t, BilinearForm.identity(n)


@settings(max_examples=60, deadline=None)
@given(tensors_with_forms())
def test_tensor_round_trip_exact(tf):
    t, f = tf
    t2, f2 = read_tensor(dumps(tensor_to_json(t, f)))
    assert t2 == t and t2.exact
    assert np.array_equal(f2.gram, f.gram)


@settings(max_examples=40, deadline=None)
@given(st.integers(1, 4), st.integers(0, 10**6))
def test_tensor_round_trip_float(n, seed):
    rng = np.random.default_rng(seed)
    coeffs = {
        tr: complex(*rng.normal(size=2))
        for tr in itertools.combinations_with_replacement(range(n), 3)
    }
    t = SymTensor3(n, coeffs, exact=False)
    t2, _ = read_tensor(dumps(tensor_to_json(t)))
    assert not t2.exact
    assert all(t2[k] == v for k, v in coeffs.items())


def test_algebra_round_trip():
    for a in (
        algebra_from_tensor(random_odeco(3, 2, 1)),
        algebra_from_tensor(hyperbolic_S(), BilinearForm.hyperbolic()),
        algebra_from_tensor(isotropic_tensor(4, 2)),
    ):
        b = read_algebra(dumps(algebra_to_json(a)))
        assert np.array_equal(b.mul, a.mul) and np.array_equal(b.form.gram, a.form.gram)
    assert isinstance(read_any(dumps(tensor_to_json(diagonal_tensor(2)))), tuple)


def _tensor_doc(**over):
    doc = {
        "format": "symtensor3-v1",
        "dim": 2,
        "scalar": "gaussian-rational",
        "entries": [{"idx": [1, 1, 1], "re": "1", "im": "0"}],
    }
    doc.update(over)
    return doc


BAD_TENSORS = [
    _tensor_doc(entries=[{"idx": [2, 1, 1], "re": "1", "im": "0"}]),
    _tensor_doc(entries=[{"idx": [1, 1, 3], "re": "1", "im": "0"}]),
    _tensor_doc(entries=[{"idx": [0, 1, 1], "re": "1", "im": "0"}]),
    _tensor_doc(entries=[{"idx": [1, 1, 1], "re": "1"}, {"idx": [1, 1, 1], "re": "2"}]),
    _tensor_doc(entries=[{"idx": [1, 1, 1], "re": "0.5", "im": "0"}]),
    _tensor_doc(entries=[{"idx": [1, 1, 1], "re": "1/0", "im": "0"}]),
    _tensor_doc(entries=[{"idx": [1, 1, 1], "re": 1, "im": "0"}]),
    _tensor_doc(entries=[{"idx": [1, 1], "re": "1", "im": "0"}]),
    _tensor_doc(format="symtensor3-v2"),
    _tensor_doc(dim=-1),
    _tensor_doc(dim="2"),
    _tensor_doc(scalar="real"),
    _tensor_doc(gram=[["1", "0"]]),
    _tensor_doc(gram=[["1", "2"], ["3", "1"]]),
    _tensor_doc(scalar="complex-f64", entries=[{"idx": [1, 1, 1], "re": "abc", "im": "0"}]),
]


@pytest.mark.parametrize("doc", BAD_TENSORS)
def test_malformed_tensor_files(doc):
    with pytest.raises(FormatError):
        read_tensor(json.dumps(doc))


@pytest.mark.parametrize(
    "doc",
    [
        {"format": "algebra-v1", "dim": 2, "mul": [{"idx": [2, 1], "val": ["1", "0"]}]},
        {"format": "algebra-v1", "dim": 2, "mul": [{"idx": [1, 1], "val": ["1"]}]},
        {"format": "algebra-v1", "dim": 2, "mul": [{"idx": [1, 3], "val": ["1", "0"]}]},
        {"format": "algebra-v1", "dim": 2,
         "mul": [{"idx": [1, 1], "val": ["1", "0"]}, {"idx": [1, 1], "val": ["1", "0"]}]},
        # e1 e1 = e2 with the identity form is not invariant
        {"format": "algebra-v1", "dim": 2, "mul": [{"idx": [1, 1], "val": ["0", "1"]}]},
    ],
)
def test_malformed_algebra_files(doc):
    with pytest.raises(FormatError):
        read_algebra(json.dumps(doc))


def test_invalid_json():
    with pytest.raises(FormatError):
        read_any("{not json")
    with pytest.raises(FormatError):
        read_any("[1, 2]")
    with pytest.raises(FormatError):
        read_any('{"format": "other"}')


# --------------------------------------------------------------------------
# command line


@pytest.fixture
def run_cli(monkeypatch, capsys):
    def go(argv, stdin: str = ""):
        monkeypatch.setattr("sys.stdin", io.StringIO(stdin))
        code = cli.run(argv)
        out, err = capsys.readouterr()
        return code, out, err

    return go


def test_gen_odeco_then_check(run_cli):
    code, out, _ = run_cli(["gen", "odeco", "--n", "4", "--k", "4", "--seed", "7"])
    assert code == 0
    code, report, _ = run_cli(["check", "--json"], out)
    data = json.loads(report)
    assert code == 0 and data["residual_max_abs"] == 0 and data["in_X"]
    assert data["seed"] == 0 and data["verdict"] == "pass"


def test_gen_cw_then_check(run_cli):
    code, out, _ = run_cli(["gen", "cw", "--n", "3"])
    assert code == 0 and "gram" in json.loads(out)
    code, report, _ = run_cli(["--json", "check"], out)
    data = json.loads(report)
    assert code == 0 and data["in_X"] and data["unit"] is not None


def test_check_failures_exit_one(run_cli):
    bad = dumps(tensor_to_json(SymTensor3(2, {(0, 0, 0): 1, (0, 0, 1): 1})))
    code, out, _ = run_cli(["check"], bad)
    assert code == 1 and "verdict: fail" in out
    code, _, _ = run_cli(["check", "--variety", "Z"], dumps(tensor_to_json(diagonal_tensor(2))))
    assert code == 1
    code, _, _ = run_cli(["check", "--variety", "Z"], dumps(tensor_to_json(isotropic_tensor(4, 1))))
    assert code == 0


def test_gen_families(run_cli):
    code, out, _ = run_cli(["gen", "isotropic", "--n", "6", "--seed", "3"])
    assert code == 0 and read_tensor(out)[0].dim == 6
    code, out, _ = run_cli(["gen", "limit", "--t", "1/2"])
    t, f = read_tensor(out)
    assert code == 0 and t[(0, 0, 0)] == GaussQ(1) / 64 and not f.is_identity
    code, out, _ = run_cli(["gen", "limit", "--t", "0.5", "--mode", "float"])
    assert code == 0 and not read_tensor(out)[0].exact
    assert run_cli(["gen", "limit", "--t", "0"])[0] == 1
    code, _, _ = run_cli(["gen", "odeco", "--n", "3", "--k", "5"])
    assert code == 2


def test_seed_is_deterministic(run_cli):
    a = run_cli(["gen", "odeco", "--n", "3", "--seed", "11"])[1]
    b = run_cli(["--seed", "11", "gen", "odeco", "--n", "3"])[1]
    c = run_cli(["gen", "odeco", "--n", "3", "--seed", "12"])[1]
    assert a == b and a != c


def test_dims_csv(run_cli):
    code, out, _ = run_cli(["dims", "--n", "20"])
    rows = out.strip().splitlines()
    assert code == 0 and rows[0] == "n,dim_Y,dim_Z,dim_Z_minus_dim_Y"
    assert len(rows) == 21
    assert rows[16] == f"16,{dim_Y(16)},{dim_Z(16)},{dim_Z(16) - dim_Y(16)}"
    assert run_cli(["dims", "--n", "0"])[0] == 2


def test_algebra_commands(run_cli):
    e = dumps(tensor_to_json(diagonal_tensor(3)))
    code, out, _ = run_cli(["algebra", "unit", "--json"], e)
    assert code == 0 and json.loads(out)["unit"] == ["1", "1", "1"]
    code, out, _ = run_cli(["algebra", "decompose", "--json"], e)
    data = json.loads(out)
    assert code == 0 and len(data["blocks"]) == 3 and data["problems"] == []
    code, out, _ = run_cli(["algebra", "decompose", "--json", "--mode", "float"], e)
    assert code == 0 and len(json.loads(out)["blocks"]) == 3
    iso = dumps(tensor_to_json(isotropic_tensor(4, 5)))
    assert run_cli(["algebra", "nilpotent"], iso)[0] == 0
    assert run_cli(["algebra", "unit"], iso)[0] == 1
    assert run_cli(["algebra", "nilpotent"], e)[0] == 1
    alg = dumps(algebra_to_json(algebra_from_tensor(diagonal_tensor(2))))
    assert run_cli(["algebra", "unit"], alg)[0] == 0


def test_unitalize_and_deunitalize(run_cli):
    zero = dumps(tensor_to_json(SymTensor3.zero(2)))
    code, out, _ = run_cli(["unitalize"], zero)
    t, f = read_tensor(out)
    assert code == 0 and t == read_tensor(run_cli(["gen", "cw", "--n", "2"])[1])[0]
    code, back, _ = run_cli(["deunitalize"], out)
    assert code == 0
    obj = read_any(back)
    assert (obj.dim if not isinstance(obj, tuple) else obj[0].dim) == 2
    iso = dumps(tensor_to_json(isotropic_tensor(4, 2)))
    code, out, _ = run_cli(["unitalize"], iso)
    code, back, _ = run_cli(["deunitalize"], out)
    t2, _ = read_tensor(back)
    assert code == 0 and t2 == isotropic_tensor(4, 2)
    alg = dumps(algebra_to_json(algebra_from_tensor(isotropic_tensor(4, 2))))
    code, out, _ = run_cli(["unitalize"], alg)
    assert code == 0 and read_algebra(out).dim == 6
    code, _, err = run_cli(["deunitalize"], dumps(tensor_to_json(diagonal_tensor(2))))
    assert code == 1 and "NotLocal" in err


def test_tangent_dim_command(run_cli):
    code, out, _ = run_cli(["tangent-dim", "--json"], dumps(tensor_to_json(diagonal_tensor(4))))
    data = json.loads(out)
    assert code == 0 and data["tangent_dim"] == 10 and data["excess"] == 0 and data["in_X"]


def test_hilbert_commands(run_cli):
    cw = run_cli(["gen", "cw", "--n", "3"])[1]
    code, out, _ = run_cli(["hilbert", "hf", "--json"], cw)
    assert code == 0 and json.loads(out)["hilbert_function"] == [1, 3, 1]
    code, out, _ = run_cli(["hilbert", "gorenstein", "--json"], cw)
    assert code == 0 and json.loads(out)["gorenstein"]
    e = dumps(tensor_to_json(diagonal_tensor(2)))
    code, out, _ = run_cli(["hilbert", "ideal", "--json", "--degree", "2"], e)
    data = json.loads(out)
    assert code == 0 and data["quotient_dim"] == 2 and len(data["generators"]) == 4
    square_zero = {
        "format": "algebra-v1",
        "dim": 3,
        "mul": [{"idx": [1, 1], "val": ["1", "0", "0"]}, {"idx": [1, 2], "val": ["0", "1", "0"]},
                {"idx": [1, 3], "val": ["0", "0", "1"]}],
        "gram": [["1", "0", "0"], ["0", "1", "0"], ["0", "0", "1"]],
    }
    # a nondegenerate invariant form forces Gorenstein, so a non-Gorenstein
    # algebra file is rejected when read
    assert run_cli(["hilbert", "gorenstein"], json.dumps(square_zero))[0] == 2


def test_input_errors_exit_two(run_cli, tmp_path):
    assert run_cli(["check"], "{oops")[0] == 2
    code, _, err = run_cli(["check"], json.dumps(BAD_TENSORS[0]))
    assert code == 2 and err.count("\n") == 1 and "not sorted" in err
    assert run_cli(["check", "--in", str(tmp_path / "missing.json")])[0] == 2
    assert run_cli(["nonsense"])[0] == 2
    assert run_cli(["check", "--mode", "fuzzy"])[0] == 2
    float_file = dumps(tensor_to_json(diagonal_tensor(2, exact=False)))
    assert run_cli(["check"], float_file)[0] == 2
    assert run_cli(["check", "--mode", "float"], float_file)[0] == 0


def test_in_and_out_files(run_cli, tmp_path):
    path = tmp_path / "t.json"
    assert run_cli(["gen", "odeco", "--n", "3", "--out", str(path)])[0] == 0
    code, out, _ = run_cli(["check", "--in", str(path)])
    assert code == 0 and "in_X: True" in out


def test_version(run_cli):
    assert run_cli(["--version"])[0] == 0


def test_demo_counterexample(run_cli, tmp_path):
    path = tmp_path / "t12.json"
    code, out, _ = run_cli(["demo", "counterexample", "--json", "--out", str(path)])
    data = json.loads(out)
    assert code == 0
    assert data["dim_A"] == 12 and data["tensor_dim"] == 12
    assert data["residual_nonzero"] == 0 and data["is_two_step_nilpotent"]
    assert "non-smoothable" in data["citation"]
    t, f = read_tensor(path.read_text())
    assert t.dim == 12 and f.is_identity
    code, _, _ = run_cli(["check", "--variety", "Z", "--in", str(path)])
    assert code == 0


def test_gram_from_exact_array_round_trip():
    f = BilinearForm(exact_array([[0, 1], [1, 0]]))
    doc = tensor_to_json(hyperbolic_S(), f)
    assert doc["gram"] == [["0", "1"], ["1", "0"]]
