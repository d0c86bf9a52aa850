import json

import pytest
from hypothesis import given
from hypothesis import strategies as st

from linfty.fileformat import Document, FormatError, Library, dumps, format_coeff, parse_coeff
from linfty.homotopy import verify_homotopy
from linfty.mc import check_mc
from linfty.modules import check_module
from linfty.scalars import qq
from linfty.shipped import BUILDERS, resolve, shipped_files
from linfty.structures import check_linfty, check_morphism

SHIPPED = [name for name, _ in shipped_files()]

YAML_DOC = """
format: linfty/1
context: {hbar_order: 2, weight: 3}
spaces:
  g: [[x, 0], [y, 1]]
dglas:
  D: {space: g, differential: {x: {y: 2}}}
structures:
  Q: {dgla: D}
elements:
  pi: {structure: Q, kind: mc, value: {y: [0, 1/2]}}
"""


def test_library_is_complete():
    assert set(SHIPPED) == set(BUILDERS) == {"abelian", "gl2", "end_complex", "hochschild",
                                             "gl2_contraction", "curved_lie"}


@pytest.mark.parametrize("name", SHIPPED)
def test_round_trip(name):
    text = open(resolve(name), encoding="utf-8").read()
    doc = Document.parse(text, name)
    assert doc.serialize() == text
    assert Document.parse(doc.serialize()).serialize() == text


@pytest.mark.parametrize("name", SHIPPED)
def test_shipped_matches_builders(name):
    assert BUILDERS[name]().serialize() == open(resolve(name), encoding="utf-8").read()


@pytest.mark.parametrize("name", SHIPPED)
def test_shipped_objects_are_valid(name):
    doc = Document.load(resolve(name))
    lib = Library(doc, doc.context)
    W = min(doc.context.W, 3)
    for s in doc.structures:
        assert check_linfty(lib.structure(s), W).ok
    for m in doc.morphisms:
        assert check_morphism(lib.morphism(m), W).ok
    for m in doc.modules:
        assert check_module(lib.module(m), W).ok
    for e, rec in doc.elements.items():
        if rec["kind"] == "mc":
            Q, v = lib.element(e)
            assert check_mc(Q, v).ok
    for w in doc.witnesses:
        assert verify_homotopy(lib.witness(w), W).ok


def test_yaml_input_canonical_output():
    doc = Document.parse(YAML_DOC)
    out = doc.serialize()
    data = json.loads(out)
    assert data["context"] == {"hbar_order": 2, "weight": 3}
    assert data["dglas"]["D"]["differential"] == {"x": {"y": "2"}}
    assert data["elements"]["pi"]["value"] == {"y": ["0", "1/2"]}
    assert Document.parse(out).serialize() == out


def test_context_override():
    doc = Document.parse(YAML_DOC, N=1, W=2)
    assert (doc.context.N, doc.context.W) == (1, 2)


@pytest.mark.parametrize("text,where", [
    ("[1, 2]", "<input>"),
    ("format: other/2", "<input>.format"),
    ("bogus: {}", "<input>"),
    ("spaces: {g: [[x, 0.5]]}", "spaces.g[0]"),
    ("spaces: {g: [[x, 0], [x, 1]]}", "spaces.g"),
    ("spaces: {g: [[x, 0]]}\ndglas: {D: {space: h}}", "dglas.D"),
    ("spaces: {g: [[x, 0]]}\ndglas: {D: {space: g, differential: {z: {x: 1}}}}", "dglas.D"),
    ("spaces: {g: [[x, 1]]}\ndglas: {D: {space: g}}\nstructures: {Q: {dgla: D}}\n"
     "elements: {p: {structure: Q, kind: mc, value: {x: 0.5}}}", "elements.p"),
    ("spaces: {g: [[x, 1]]}\ndglas: {D: {space: g}}\nstructures: {Q: {dgla: D}}\n"
     "elements: {p: {structure: Q, kind: weird, value: {}}}", "elements.p"),
    ("context: {hbar_order: -1}", "<input>.context"),
    ("a: [b", "<input>"),
])
def test_errors_have_locations(text, where):
    with pytest.raises(FormatError) as ei:
        Document.parse(text)
    assert ei.value.where.startswith(where)


def test_missing_file():
    with pytest.raises(FormatError):
        Document.load("/nonexistent/file.json")
    with pytest.raises(FileNotFoundError):
        resolve("@nope")


def test_merge_rejects_duplicates():
    a = Document.parse(YAML_DOC)
    b = Document.parse(YAML_DOC)
    with pytest.raises(FormatError):
        a.merge(b)


rationals = st.fractions(max_denominator=9).map(lambda f: qq(f.numerator, f.denominator))
terms = st.dictionaries(st.tuples(st.integers(0, 3), st.integers(0, 2)), rationals.filter(bool), max_size=6)


class TestCoefficients:
    @given(terms)
    def test_round_trip(self, t):
        out = format_coeff(t)
        assert parse_coeff(json.loads(json.dumps(out)), "c") == t

    def test_canonical_forms(self):
        assert format_coeff({}) == "0"
        assert format_coeff({(0, 0): qq(1, 2)}) == "1/2"
        assert format_coeff({(2, 0): qq(3)}) == ["0", "0", "3"]
        assert format_coeff({(1, 1): qq(-1)}) == [[], ["0", "-1"]]

    @pytest.mark.parametrize("bad", [1.5, True, None, "x", [1, "1/0"], [[0.1]]])
    def test_rejected(self, bad):
        with pytest.raises(FormatError):
            parse_coeff(bad, "c")

    def test_accepted(self):
        assert parse_coeff("-6/4", "c") == {(0, 0): qq(-3, 2)}
        assert parse_coeff([0, [1, 2]], "c") == {(1, 0): qq(1), (1, 1): qq(2)}


def test_dumps_layout():
    assert dumps({"a": [1, 2]}) == '{"a": [1, 2]}\n'
    long = {"k": ["x" * 30, "y" * 30, "z" * 30]}
    assert dumps(long).splitlines()[1] == '  "k": ['
