import json

import jsonschema
import pytest

from lfpoly import exprfile
from lfpoly import expr as E
from lfpoly.errors import ExpressionFileError

from conftest import build, zpoly, ZETA

SAMPLE = """
{
  "lfunctions": [
    {"id": "zeta", "kind": "zeta"},
    {"id": "chi3", "kind": "dirichlet", "modulus": 3, "characterIndex": 1}
  ],
  "monomials": [
    {"coeff": [2.5, 0.0],
     "factors": [{"lfunc": "zeta", "deriv": 2, "exp": 1}]},
    {"coeff": [0.0, -1.0],
     "factors": [{"lfunc": "chi3", "deriv": 0, "exp": 2},
                 {"lfunc": "zeta", "deriv": 1, "exp": 1}]}
  ]
}
"""


def test_loads_sample():
    F = exprfile.loads(SAMPLE)
    assert set(F.lfuncs) == {"zeta", "chi3"}
    assert len(F.monomials) == 2
    assert F.lfuncs["chi3"].conductor == 3


def test_dumps_is_idempotent():
    F = exprfile.loads(SAMPLE)
    text = exprfile.dumps(F)
    assert exprfile.dumps(exprfile.loads(text)) == text
    assert text.endswith("\n")


def test_round_trip_preserves_coefficients():
    F = exprfile.loads(SAMPLE)
    G = exprfile.loads(exprfile.dumps(F))
    ca = E.dirichlet_coefficients(F, 50).eta
    cb = E.dirichlet_coefficients(G, 50).eta
    assert (ca == cb).all()


def test_dump_load_files(tmp_path):
    F = zpoly((1.0, [(1, 1)]), (3.0, [(2, 1)]))
    p = tmp_path / "expr.json"
    exprfile.dump(F, p)
    G = exprfile.load(p)
    assert exprfile.dumps(F) == exprfile.dumps(G)


def test_dumps_validates_against_schema():
    import lfpoly.schemas
    import importlib.resources as res

    schema = json.loads(
        res.files(lfpoly.schemas).joinpath("expression.schema.json").read_text()
    )
    doc = json.loads(exprfile.dumps(exprfile.loads(SAMPLE)))
    jsonschema.validate(doc, schema)


def test_bad_json_reports_position():
    with pytest.raises(ExpressionFileError) as ei:
        exprfile.loads('{"lfunctions": [,]}')
    assert ei.value.line == 1
    assert ei.value.column > 1


def test_unknown_lfunc_reference():
    bad = SAMPLE.replace('"lfunc": "chi3"', '"lfunc": "nope"')
    with pytest.raises(ExpressionFileError, match="nope"):
        exprfile.loads(bad)


def test_bad_kind():
    bad = SAMPLE.replace('"kind": "zeta"', '"kind": "elliptic"')
    with pytest.raises(ExpressionFileError, match="elliptic"):
        exprfile.loads(bad)


def test_empty_monomials_rejected():
    with pytest.raises(ExpressionFileError):
        exprfile.loads('{"lfunctions": [], "monomials": []}')


def test_character_index_out_of_range():
    bad = SAMPLE.replace('"characterIndex": 1', '"characterIndex": 9')
    with pytest.raises(ExpressionFileError, match="out of range"):
        exprfile.loads(bad)


def test_negative_deriv_rejected():
    bad = SAMPLE.replace('"deriv": 2', '"deriv": -1')
    with pytest.raises(ExpressionFileError):
        exprfile.loads(bad)


def test_zero_exp_rejected():
    bad = SAMPLE.replace('"exp": 2', '"exp": 0')
    with pytest.raises(ExpressionFileError):
        exprfile.loads(bad)


def test_missing_key():
    with pytest.raises(ExpressionFileError, match="monomials"):
        exprfile.loads('{"lfunctions": []}')


def test_duplicate_lfunction_id():
    bad = SAMPLE.replace(
        '{"id": "chi3", "kind": "dirichlet", "modulus": 3, "characterIndex": 1}',
        '{"id": "zeta", "kind": "dirichlet", "modulus": 3, "characterIndex": 1}',
    ).replace('"lfunc": "chi3"', '"lfunc": "zeta"')
    with pytest.raises(ExpressionFileError):
        exprfile.loads(bad)
