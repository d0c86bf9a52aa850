"""The shipped example library: builders for the files in linfty/data.

`python3 -m linfty.shipped` rewrites the data directory from these builders.
"""

import os
import sys
from importlib import resources

from .dgla import DGLAData, from_dgla
from .elements import element
from .fileformat import Document, export_dgla, export_element, export_module, export_morphism
from .graded import GradedSpace
from .homotopy import _materialize, exact_gauge_witness, exp_ad_morphism
from .library import end_dgla, gl2, hochschild_dual_numbers, curved_lie, three_term_complex
from .modules import adjoint_module, end_module
from .scalars import Context

CTX = Context(3, 4)


def _doc():
    return Document(CTX)


def abelian():
    """Abelian DGLA u -> v, w -> z with a closed MC element."""
    g = GradedSpace([("u", 0), ("v", 1), ("w", 1), ("z", 2)])
    data = DGLAData.from_tables(g, {"u": {"v": 1}, "w": {"z": 1}}, ctx=CTX, name="abelian")
    doc = _doc()
    export_dgla(doc, "abelian", data, "g")
    doc.structures["Q"] = {"dgla": "abelian"}
    export_element(doc, "pi", "Q", element(g, {"v": [0, 1, "1/2"]}, CTX.N), "mc")
    export_element(doc, "lambda", "Q", element(g, {"u": [0, 1]}, CTX.N), "lambda")
    return doc


def gl2_file():
    data = gl2(CTX)
    doc = _doc()
    export_dgla(doc, "gl2", data, "gl2")
    doc.structures["Q"] = {"dgla": "gl2"}
    Q = from_dgla(data, name="Q")
    x = element(data.g, {"e12": [0, 1], "e21": [0, 0, -1]}, CTX.N)
    export_morphism(doc, "conj", exp_ad_morphism(Q, x), "Q", "Q", CTX.W)
    export_module(doc, "ad", adjoint_module(Q), "Q", CTX.W, "gl2")
    return doc


def end_complex():
    """End of the complex m0 -> m1 (+ closed n0), its module, an exact-g witness."""
    M, b = three_term_complex()
    data = end_dgla(M, b, CTX, "End")
    doc = _doc()
    doc.spaces["M"] = M
    export_dgla(doc, "End", data, "E")
    doc.structures["Q"] = {"dgla": "End"}
    Q = from_dgla(data, name="Q")
    export_module(doc, "M", end_module(Q), "Q", CTX.W, "M")
    E = data.g
    alpha = element(E, {"m0|m1": [0, 1], "n0|m1": [0, 2, 1]}, CTX.N)
    wit, g = exact_gauge_witness(Q, alpha)
    doc.witnesses["exact_g"] = {"source": "Q", "target": "Q",
                                "F": _materialize(wit.F.word, Q.S, CTX.W),
                                "lambda": _materialize(wit.lam.word, Q.S, CTX.W)}
    export_element(doc, "alpha", "Q", alpha)
    export_element(doc, "g", "Q", g, "gauge")
    export_element(doc, "pi", "Q", element(E, {"m1|n0": [0, 1]}, CTX.N), "mc")
    export_element(doc, "lambda", "Q", element(E, {"n0|m0": [0, 1], "m0|n0": [0, 0, 1]}, CTX.N), "lambda")
    return doc


def hochschild():
    data = hochschild_dual_numbers(CTX)
    doc = _doc()
    export_dgla(doc, "Hoch", data, "C")
    doc.structures["Q"] = {"dgla": "Hoch"}
    export_element(doc, "pi", "Q", element(data.g, {"c2_1": [0, 1]}, CTX.N), "mc")
    return doc


def gl2_contraction():
    """B = gl2 + (a -> b) contracting onto A = gl2; i is a DGLA morphism."""
    base = gl2(CTX)
    A = base.g
    B = GradedSpace(A.basis() + [("a", 0), ("b", 1)])
    br = {}
    for (i, j), v in base.br.items():
        br[(B.index[A.labels[i]], B.index[A.labels[j]])] = {((B.index[A.labels[w[0]]],), h, k): x
                                                              for (w, h, k), x in v.items()}
    dB = {(B.index["a"],): element(B, {"b": 1}, CTX.N)}
    dataB = DGLAData(B, dB, br, None, CTX, "gl2+acyclic")
    doc = _doc()
    export_dgla(doc, "gl2", base, "A")
    export_dgla(doc, "B", dataB, "B")
    doc.structures["QA"] = {"dgla": "gl2"}
    doc.structures["QB"] = {"dgla": "B"}
    i = {(a,): element(B, {lab: 1}, CTX.N) for a, lab in enumerate(A.labels)}
    p = {(B.index[lab],): element(A, {lab: 1}, CTX.N) for lab in A.labels}
    h = {(B.index["b"],): element(B, {"a": 1}, CTX.N)}
    doc.contractions["C"] = {"A": "A", "B": "B", "dA": {}, "dB": dB, "i": i, "p": p, "h": h, "structure": "QB"}
    return doc


def curved():
    data = curved_lie(1, 1, CTX)
    doc = _doc()
    export_dgla(doc, "curved", data, "g")
    doc.structures["Q"] = {"dgla": "curved"}
    export_element(doc, "pi", "Q", element(data.g, {"x": [0, 1], "y": [0, 1]}, CTX.N), "mc")
    return doc


BUILDERS = {
    "abelian": abelian,
    "gl2": gl2_file,
    "end_complex": end_complex,
    "hochschild": hochschild,
    "gl2_contraction": gl2_contraction,
    "curved_lie": curved,
}


def data_dir():
    return resources.files("linfty") / "data"


def shipped_files():
    """Sorted list of (name, path) for the shipped library."""
    d = data_dir()
    return sorted((p.name[:-5], str(p)) for p in d.iterdir() if p.name.endswith(".json"))


def resolve(name):
    """'@gl2' or 'gl2' -> path of the shipped file."""
    key = name[1:] if name.startswith("@") else name
    for n, path in shipped_files():
        if n == key:
            return path
    raise FileNotFoundError(f"no shipped example named {key!r}")


def main(argv=None):
    out = (argv or sys.argv[1:] or [str(data_dir())])[0]
    os.makedirs(out, exist_ok=True)
    for name, build in BUILDERS.items():
        with open(os.path.join(out, f"{name}.json"), "w", encoding="utf-8") as fh:
            fh.write(build().serialize())
    return 0


if __name__ == "__main__":
    sys.exit(main())
