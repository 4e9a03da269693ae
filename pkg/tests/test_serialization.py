import io
import json

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import DATA
from liecurv import GnSpec, InvariantForm, LieAlgebra, Metric, build_gn, so3
from liecurv.errors import DocumentError
from liecurv.gn_family import GnMetricParams, gn_metric
from liecurv.lie_core import validate_jacobi
from liecurv.quad_form import check_ad_invariance
from liecurv.serialization import algebra_document, dumps, load_algebra, parse_document, save_algebra

finite = st.floats(allow_nan=False, allow_infinity=False, min_value=-1e300, max_value=1e300)


def _roundtrip(alg, form=None, metric=None):
    text = dumps(algebra_document(alg, form, metric))
    return load_algebra(io.StringIO(text))


def _same_bits(a, b):
    return a.shape == b.shape and a.tobytes() == b.tobytes()


@st.composite
def documents(draw):
    n = draw(st.integers(1, 5))
    C = np.zeros((n, n, n))
    for i in range(n):
        for j in range(i + 1, n):
            for k in range(n):
                if draw(st.booleans()):
                    C[i, j, k] = draw(finite.filter(lambda v: v != 0))
    S = np.array(draw(st.lists(finite, min_size=n * n, max_size=n * n))).reshape(n, n)
    form = InvariantForm(np.triu(S) + np.triu(S, 1).T)
    d = np.array(draw(st.lists(st.floats(1e-3, 1e3), min_size=n, max_size=n)))
    return LieAlgebra(C), form, Metric(np.diag(d))


@settings(max_examples=60, deadline=None)
@given(documents())
def test_roundtrip_bit_identical(doc):
    alg, form, metric = doc
    alg2, form2, metric2 = _roundtrip(alg, form, metric)
    assert _same_bits(alg.structure, alg2.structure)
    assert _same_bits(form.matrix, form2.matrix)
    assert _same_bits(metric.matrix, metric2.matrix)


def test_roundtrip_awkward_floats(tmp_path):
    vals = [0.1, 1 / 3, np.nextafter(1.0, 2.0), 5e-324, 1.7976931348623157e308, -2.2250738585072014e-308]
    C = np.zeros((3, 3, 3))
    C[0, 1, 2], C[0, 2, 1], C[1, 2, 0] = vals[:3]
    form = InvariantForm(np.diag(vals[3:]))
    alg = LieAlgebra(C, ("a", "b", "c"))
    path = tmp_path / "x.json"
    save_algebra(path, alg, form)
    alg2, form2, metric2 = load_algebra(path)
    assert alg2 == alg and alg2.labels == ("a", "b", "c")
    assert _same_bits(form.matrix, form2.matrix)
    assert metric2 is None


def test_g1_document_loads_and_validates():
    doc = {"dim": 4, "brackets": [
        {"i": 1, "j": 2, "k": 2, "c": 1},
        {"i": 1, "j": 3, "k": 3, "c": -1},
        {"i": 2, "j": 3, "k": 4, "c": 1},
    ]}
    alg, form, metric = parse_document(doc)
    ref, ref_form = build_gn(GnSpec((1.0,)))
    assert np.array_equal(alg.structure, ref.structure)
    assert alg.structure[1, 0, 1] == -1.0
    assert validate_jacobi(alg).passed
    assert form is None and metric is None


def test_shipped_documents():
    alg, form, metric = load_algebra(DATA / "g1.json")
    spec = GnSpec((1.0,))
    ref, ref_form = build_gn(spec)
    assert alg == ref
    assert np.array_equal(form.matrix, ref_form.matrix)
    assert np.allclose(metric.matrix, gn_metric(spec, GnMetricParams(np.array([2.0, 1, 1, 1]))).matrix)
    assert check_ad_invariance(alg, form).passed
    alg, form, metric = load_algebra(DATA / "so3.json")
    assert alg == so3()
    alg, form, metric = load_algebra(DATA / "abelian3.json")
    assert alg == LieAlgebra.abelian(3)


def test_empty_brackets_is_abelian():
    alg, form, metric = parse_document({"dim": 3, "brackets": []})
    assert alg == LieAlgebra.abelian(3)
    alg, _, _ = parse_document({"dim": 2})
    assert alg.max_abs_constant() == 0.0


@pytest.mark.parametrize("doc, code, location", [
    ({"dim": 3, "brackets": [{"i": 2, "j": 2, "k": 1, "c": 1.0}]}, "E_DIAG_BRACKET", "brackets[0]"),
    ({"dim": 3, "brackets": [{"i": 3, "j": 1, "k": 1, "c": 1.0}]}, "E_BRACKET_ORDER", "brackets[0]"),
    ({"dim": 3, "brackets": [{"i": 1, "j": 4, "k": 1, "c": 1.0}]}, "E_INDEX_RANGE", "brackets[0].j"),
    ({"dim": 3, "brackets": [{"i": 1, "j": 2, "k": 0, "c": 1.0}]}, "E_INDEX_RANGE", "brackets[0].k"),
    ({"dim": 3, "brackets": [{"i": 1, "j": 2, "k": 3, "c": 1.0},
                             {"i": 1, "j": 2, "k": 3, "c": 2.0}]}, "E_DUPLICATE_BRACKET", "brackets[1]"),
    ({"dim": 2, "form": [[1.0, 2.0], [0.0, 1.0]]}, "E_ASYMMETRIC", "form[0][1]"),
    ({"dim": 2, "metric": [[1.0, 0.0], [0.0, -1.0]]}, "E_NOT_SPD", "metric"),
    ({"dim": 2, "metric": [[1.0, 0.0]]}, "E_SCHEMA", "metric"),
    ({"dim": 0}, "E_SCHEMA", "dim"),
    ({"dim": 2, "extra": 1}, "E_SCHEMA", "extra"),
    ({"dim": 2, "brackets": [{"i": 1, "j": 2, "k": 1}]}, "E_SCHEMA", "brackets[0]"),
    ({"dim": 2, "brackets": [{"i": 1.0, "j": 2, "k": 1, "c": 1}]}, "E_SCHEMA", "brackets[0].i"),
    ({"dim": 2, "labels": ["a"]}, "E_SCHEMA", "labels"),
])
def test_error_codes(doc, code, location):
    with pytest.raises(DocumentError) as info:
        parse_document(doc)
    assert info.value.code == code
    assert info.value.location == location
    assert info.value.to_dict()["code"] == code


def test_parse_and_io_errors(tmp_path):
    with pytest.raises(DocumentError) as info:
        load_algebra(io.StringIO('{"dim": 3, '))
    assert info.value.code == "E_PARSE"
    assert "line 1" in info.value.location
    with pytest.raises(DocumentError) as info:
        load_algebra(io.StringIO('{"dim": 2, "form": [[NaN, 0], [0, 1]]}'))
    assert info.value.code == "E_NONFINITE"
    with pytest.raises(DocumentError) as info:
        load_algebra(tmp_path / "missing.json")
    assert info.value.code == "E_IO"


def test_dumps_is_valid_json_and_stable():
    alg, form = build_gn(GnSpec((1.0, 2.0)))
    doc = algebra_document(alg, form)
    text = dumps(doc)
    assert json.loads(text) == doc
    assert dumps(json.loads(text)) == text
    with pytest.raises(ValueError):
        dumps({"v": float("nan")})
