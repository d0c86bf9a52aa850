"""Structure files: a declarative, human-writable description of spaces, DGLAs,
L-infinity structures, morphisms, elements, modules, contractions and homotopy
witnesses.

Files are read as YAML (JSON is a subset) and written as canonical JSON, so a
canonical file survives parse -> serialize byte for byte.  See README.md for
the grammar.
"""

import json

import yaml

from .coalgebra import UNIT
from .dgla import DGLAData, from_dgla
from .graded import GradedSpace
from .homotopy import HomotopyWitness
from .modules import LInftyModule
from .scalars import Context, fmt_q, to_q
from .structures import LInftyMorphism, LInftyStructure
from .transfer import Contraction
from .vec import add_term

FORMAT = "linfty/1"
SECTIONS = ("spaces", "dglas", "structures", "morphisms", "elements", "modules", "contractions", "witnesses")


class FormatError(ValueError):
    """Parse or schema error with a location path."""

    def __init__(self, where, msg):
        super().__init__(f"{where}: {msg}")
        self.where = where


# -- coefficients ------------------------------------------------------------


def parse_coeff(c, where):
    """rational | [rational per hbar power] | [[rational per t power] per hbar power] -> {(h, k): q}."""
    out = {}
    try:
        if isinstance(c, list):
            for h, entry in enumerate(c):
                if isinstance(entry, list):
                    for k, x in enumerate(entry):
                        q = _rat(x)
                        if q:
                            out[(h, k)] = q
                else:
                    q = _rat(entry)
                    if q:
                        out[(h, 0)] = q
        else:
            q = _rat(c)
            if q:
                out[(0, 0)] = q
    except (TypeError, ValueError) as e:
        raise FormatError(where, f"bad coefficient {c!r} ({e})") from None
    return out


def _rat(x):
    if isinstance(x, bool) or x is None:
        raise TypeError("not a rational")
    if isinstance(x, float):
        raise TypeError("floats are not allowed; write p/q")
    return to_q(x if not isinstance(x, int) else int(x))


def format_coeff(terms):
    if not terms:
        return "0"
    maxh = max(h for h, _ in terms)
    if all(k == 0 for _, k in terms):
        if maxh == 0:
            return fmt_q(terms[(0, 0)])
        return [fmt_q(terms.get((h, 0), 0)) for h in range(maxh + 1)]
    rows = []
    for h in range(maxh + 1):
        ks = [k for hh, k in terms if hh == h]
        if not ks:
            rows.append([])
            continue
        rows.append([fmt_q(terms.get((h, k), 0)) for k in range(max(ks) + 1)])
    return rows


def _group(v):
    """vector -> {basis key: {(h, k): q}}."""
    out = {}
    for (b, h, k), x in v.items():
        out.setdefault(b, {})[(h, k)] = x
    return out


# -- low-level readers ---------------------------------------------------------


def _need(d, key, where, typ=None):
    if not isinstance(d, dict) or key not in d:
        raise FormatError(where, f"missing field {key!r}")
    v = d[key]
    if typ is not None and not isinstance(v, typ):
        raise FormatError(f"{where}.{key}", f"expected {typ.__name__}")
    return v


def _check_keys(d, allowed, where):
    if not isinstance(d, dict):
        raise FormatError(where, "expected a mapping")
    extra = set(d) - set(allowed)
    if extra:
        raise FormatError(where, f"unknown field(s) {sorted(extra)}")


def read_vector(space, d, where, N):
    """{label: coeff} -> weight-one vector in `space`."""
    if not isinstance(d, dict):
        raise FormatError(where, "expected {label: coefficient}")
    out = {}
    for lab, c in d.items():
        lab = str(lab)
        if lab not in space.index:
            raise FormatError(where, f"unknown basis label {lab!r}")
        for (h, k), x in parse_coeff(c, f"{where}.{lab}").items():
            if h <= N:
                add_term(out, ((space.index[lab],), h, k), x)
    return out


def write_vector(space, v):
    g = _group(v)
    return {space.labels[w[0]]: format_coeff(g[w]) for w in sorted(g)}


def read_word(space, labels, where):
    if not isinstance(labels, list):
        raise FormatError(where, "a word is a list of labels")
    try:
        s, w = space.parse_word([str(x) for x in labels])
    except ValueError as e:
        raise FormatError(where, str(e)) from None
    if not s:
        raise FormatError(where, "word vanishes (repeated odd factor)")
    return s, w


def read_linear(src, tgt, d, where, N):
    """{label: {label: coeff}} -> {(i,): vector}."""
    if not isinstance(d, dict):
        raise FormatError(where, "expected {label: {label: coefficient}}")
    out = {}
    for lab, img in d.items():
        lab = str(lab)
        if lab not in src.index:
            raise FormatError(where, f"unknown basis label {lab!r}")
        v = read_vector(tgt, img, f"{where}.{lab}", N)
        if v:
            out[(src.index[lab],)] = v
    return out


def write_linear(src, tgt, table):
    return {src.labels[i]: write_vector(tgt, table[(i,)]) for (i,) in sorted(table) if table[(i,)]}


def read_taylor(space_src, space_tgt, entries, where, N):
    """[[word labels], {label: coeff}] -> {word: vector}."""
    if not isinstance(entries, list):
        raise FormatError(where, "taylor must be a list of [word, value] pairs")
    out = {}
    for n, e in enumerate(entries):
        loc = f"{where}[{n}]"
        if not isinstance(e, list) or len(e) != 2:
            raise FormatError(loc, "expected [word, value]")
        s, w = read_word(space_src, e[0], loc)
        v = read_vector(space_tgt, e[1], loc, N)
        acc = out.setdefault(w, {})
        for key, x in v.items():
            add_term(acc, key, s * x)
        if not acc:
            del out[w]
    return out


def write_taylor(space_src, space_tgt, taylor):
    rows = []
    for w in sorted(taylor, key=lambda w: (len(w), w)):
        if taylor[w]:
            rows.append([[space_src.labels[i] for i in w], write_vector(space_tgt, taylor[w])])
    return rows


# -- the document -------------------------------------------------------------------


class Document:
    """Normalized file contents: every section maps names to plain records."""

    def __init__(self, context=None, **sections):
        self.context = context or Context()
        for s in SECTIONS:
            setattr(self, s, dict(sections.get(s, {})))

    # -- parsing ------------------------------------------------------
    @classmethod
    def parse(cls, text, source="<input>", N=None, W=None):
        """Parse YAML/JSON text; N and W override the file's context."""
        try:
            raw = yaml.safe_load(text)
        except yaml.YAMLError as e:
            raise FormatError(source, f"not valid YAML/JSON: {e}") from None
        if not isinstance(raw, dict):
            raise FormatError(source, "top level must be a mapping")
        _check_keys(raw, ("format", "context") + SECTIONS, source)
        fmt = raw.get("format", FORMAT)
        if fmt != FORMAT:
            raise FormatError(f"{source}.format", f"unsupported format {fmt!r}")
        ctxd = raw.get("context", {}) or {}
        _check_keys(ctxd, ("hbar_order", "weight"), f"{source}.context")
        try:
            ctx = Context(int(ctxd.get("hbar_order", 3) if N is None else N),
                          int(ctxd.get("weight", 4) if W is None else W))
        except (TypeError, ValueError) as e:
            raise FormatError(f"{source}.context", str(e)) from None
        doc = cls(ctx)
        N = ctx.N
        for name, rec in (raw.get("spaces") or {}).items():
            loc = f"spaces.{name}"
            if not isinstance(rec, list):
                raise FormatError(loc, "a space is a list of [label, degree]")
            basis = []
            for n, item in enumerate(rec):
                if not (isinstance(item, list) and len(item) == 2 and isinstance(item[1], int)):
                    raise FormatError(f"{loc}[{n}]", "expected [label, integer degree]")
                basis.append((str(item[0]), item[1]))
            try:
                doc.spaces[name] = GradedSpace(basis)
            except ValueError as e:
                raise FormatError(loc, str(e)) from None
        for name, rec in (raw.get("dglas") or {}).items():
            loc = f"dglas.{name}"
            _check_keys(rec, ("space", "differential", "bracket", "curvature"), loc)
            g = doc._space(_need(rec, "space", loc), loc)
            d = read_linear(g, g, rec.get("differential", {}) or {}, f"{loc}.differential", N)
            br = {}
            for n, e in enumerate(rec.get("bracket", []) or []):
                bl = f"{loc}.bracket[{n}]"
                if not (isinstance(e, list) and len(e) == 2 and isinstance(e[0], list) and len(e[0]) == 2):
                    raise FormatError(bl, "expected [[a, b], {label: coeff}]")
                a, b = (str(x) for x in e[0])
                for x in (a, b):
                    if x not in g.index:
                        raise FormatError(bl, f"unknown basis label {x!r}")
                br[(g.index[a], g.index[b])] = read_vector(g, e[1], bl, N)
            R = read_vector(g, rec.get("curvature", {}) or {}, f"{loc}.curvature", N)
            doc.dglas[name] = {"space": rec["space"], "d": d, "br": br, "R": R}
        for name, rec in (raw.get("structures") or {}).items():
            loc = f"structures.{name}"
            _check_keys(rec, ("space", "dgla", "taylor"), loc)
            if "dgla" in rec:
                if rec["dgla"] not in doc.dglas:
                    raise FormatError(loc, f"unknown dgla {rec['dgla']!r}")
                doc.structures[name] = {"dgla": rec["dgla"]}
            else:
                L = doc._space(_need(rec, "space", loc), loc)
                S = L.shift(1)
                doc.structures[name] = {"space": rec["space"],
                                        "taylor": read_taylor(S, S, rec.get("taylor", []), f"{loc}.taylor", N)}
        for name, rec in (raw.get("morphisms") or {}).items():
            loc = f"morphisms.{name}"
            _check_keys(rec, ("source", "target", "taylor"), loc)
            src, tgt = doc._struct_space(_need(rec, "source", loc), loc), doc._struct_space(_need(rec, "target", loc), loc)
            doc.morphisms[name] = {"source": rec["source"], "target": rec["target"],
                                   "taylor": read_taylor(src.shift(1), tgt.shift(1), rec.get("taylor", []),
                                                         f"{loc}.taylor", N)}
        for name, rec in (raw.get("elements") or {}).items():
            loc = f"elements.{name}"
            _check_keys(rec, ("structure", "value", "kind"), loc)
            L = doc._struct_space(_need(rec, "structure", loc), loc)
            kind = rec.get("kind", "element")
            if kind not in ("element", "mc", "gauge", "lambda", "path"):
                raise FormatError(loc, f"unknown element kind {kind!r}")
            doc.elements[name] = {"structure": rec["structure"], "kind": kind,
                                  "value": read_vector(L, rec.get("value", {}) or {}, f"{loc}.value", N)}
        for name, rec in (raw.get("modules") or {}).items():
            loc = f"modules.{name}"
            _check_keys(rec, ("base", "space", "taylor"), loc)
            L = doc._struct_space(_need(rec, "base", loc), loc)
            M = doc._space(_need(rec, "space", loc), loc)
            S = L.shift(1)
            tay = {}
            entries = rec.get("taylor", []) or []
            if not isinstance(entries, list):
                raise FormatError(f"{loc}.taylor", "expected a list")
            for n, e in enumerate(entries):
                el = f"{loc}.taylor[{n}]"
                if not (isinstance(e, list) and len(e) == 3):
                    raise FormatError(el, "expected [word, module label, {label: coeff}]")
                s, w = read_word(S, e[0], el)
                e[1] = str(e[1])
                if e[1] not in M.index:
                    raise FormatError(el, f"unknown module label {e[1]!r}")
                v = read_vector(M, e[2], el, N)
                acc = tay.setdefault((w, M.index[e[1]]), {})
                for ((j,), h, k), x in v.items():
                    add_term(acc, ((UNIT, j), h, k), s * x)
            doc.modules[name] = {"base": rec["base"], "space": rec["space"],
                                 "taylor": {k: v for k, v in tay.items() if v}}
        for name, rec in (raw.get("contractions") or {}).items():
            loc = f"contractions.{name}"
            _check_keys(rec, ("A", "B", "dA", "dB", "i", "p", "h", "structure"), loc)
            A = doc._space(_need(rec, "A", loc), loc)
            B = doc._space(_need(rec, "B", loc), loc)
            out = {"A": rec["A"], "B": rec["B"], "structure": rec.get("structure")}
            if out["structure"] is not None and out["structure"] not in doc.structures:
                raise FormatError(loc, f"unknown structure {out['structure']!r}")
            for key, s, t in (("dA", A, A), ("dB", B, B), ("i", A, B), ("p", B, A), ("h", B, B)):
                out[key] = read_linear(s, t, rec.get(key, {}) or {}, f"{loc}.{key}", N)
            doc.contractions[name] = out
        for name, rec in (raw.get("witnesses") or {}).items():
            loc = f"witnesses.{name}"
            _check_keys(rec, ("source", "target", "F", "lambda"), loc)
            src = doc._struct_space(_need(rec, "source", loc), loc).shift(1)
            tgt = doc._struct_space(_need(rec, "target", loc), loc).shift(1)
            doc.witnesses[name] = {"source": rec["source"], "target": rec["target"],
                                   "F": read_taylor(src, tgt, rec.get("F", []), f"{loc}.F", N),
                                   "lambda": read_taylor(src, tgt, rec.get("lambda", []), f"{loc}.lambda", N)}
        return doc

    @classmethod
    def load(cls, path, N=None, W=None):
        try:
            with open(path, encoding="utf-8") as fh:
                text = fh.read()
        except OSError as e:
            raise FormatError(str(path), f"cannot read file: {e.strerror}") from None
        return cls.parse(text, str(path), N, W)

    def _space(self, name, where):
        if name not in self.spaces:
            raise FormatError(where, f"unknown space {name!r}")
        return self.spaces[name]

    def _struct_space(self, name, where):
        rec = self.structures.get(name)
        if rec is None:
            raise FormatError(where, f"unknown structure {name!r}")
        if "dgla" in rec:
            return self.spaces[self.dglas[rec["dgla"]]["space"]]
        return self.spaces[rec["space"]]

    def space_name(self, space):
        for name, sp in self.spaces.items():
            if sp == space:
                return name
        return None

    # -- merging ----------------------------------------------------------
    def merge(self, other, where="<merge>"):
        for s in SECTIONS:
            mine, theirs = getattr(self, s), getattr(other, s)
            for name, rec in theirs.items():
                if name in mine:
                    if s == "spaces" and mine[name] == rec:
                        continue
                    raise FormatError(f"{where}.{s}.{name}", "duplicate name")
                mine[name] = rec
        return self

    # -- serialization ------------------------------------------------
    def to_data(self):
        out = {"format": FORMAT, "context": {"hbar_order": self.context.N, "weight": self.context.W}}
        if self.spaces:
            out["spaces"] = {n: [[lab, d] for lab, d in sp.basis()] for n, sp in sorted(self.spaces.items())}
        if self.dglas:
            sec = {}
            for n, rec in sorted(self.dglas.items()):
                g = self.spaces[rec["space"]]
                r = {"space": rec["space"]}
                if rec["d"]:
                    r["differential"] = write_linear(g, g, rec["d"])
                br = [[[g.labels[i], g.labels[j]], write_vector(g, v)] for (i, j), v in sorted(rec["br"].items()) if v]
                if br:
                    r["bracket"] = br
                if rec["R"]:
                    r["curvature"] = write_vector(g, rec["R"])
                sec[n] = r
            out["dglas"] = sec
        if self.structures:
            sec = {}
            for n, rec in sorted(self.structures.items()):
                if "dgla" in rec:
                    sec[n] = {"dgla": rec["dgla"]}
                else:
                    S = self.spaces[rec["space"]].shift(1)
                    sec[n] = {"space": rec["space"], "taylor": write_taylor(S, S, rec["taylor"])}
            out["structures"] = sec
        if self.morphisms:
            sec = {}
            for n, rec in sorted(self.morphisms.items()):
                S = self._struct_space(rec["source"], n).shift(1)
                T = self._struct_space(rec["target"], n).shift(1)
                sec[n] = {"source": rec["source"], "target": rec["target"],
                          "taylor": write_taylor(S, T, rec["taylor"])}
            out["morphisms"] = sec
        if self.elements:
            sec = {}
            for n, rec in sorted(self.elements.items()):
                L = self._struct_space(rec["structure"], n)
                sec[n] = {"structure": rec["structure"], "kind": rec["kind"], "value": write_vector(L, rec["value"])}
            out["elements"] = sec
        if self.modules:
            sec = {}
            for n, rec in sorted(self.modules.items()):
                S = self._struct_space(rec["base"], n).shift(1)
                M = self.spaces[rec["space"]]
                rows = []
                for (w, j) in sorted(rec["taylor"], key=lambda kj: (len(kj[0]), kj[0], kj[1])):
                    v = {((jj,), h, k): x for ((_, jj), h, k), x in rec["taylor"][(w, j)].items()}
                    rows.append([[S.labels[i] for i in w], M.labels[j], write_vector(M, v)])
                sec[n] = {"base": rec["base"], "space": rec["space"], "taylor": rows}
            out["modules"] = sec
        if self.contractions:
            sec = {}
            for n, rec in sorted(self.contractions.items()):
                A, B = self.spaces[rec["A"]], self.spaces[rec["B"]]
                r = {"A": rec["A"], "B": rec["B"]}
                for key, s, t in (("dA", A, A), ("dB", B, B), ("i", A, B), ("p", B, A), ("h", B, B)):
                    r[key] = write_linear(s, t, rec[key])
                if rec.get("structure") is not None:
                    r["structure"] = rec["structure"]
                sec[n] = r
            out["contractions"] = sec
        if self.witnesses:
            sec = {}
            for n, rec in sorted(self.witnesses.items()):
                S = self._struct_space(rec["source"], n).shift(1)
                T = self._struct_space(rec["target"], n).shift(1)
                sec[n] = {"source": rec["source"], "target": rec["target"],
                          "F": write_taylor(S, T, rec["F"]), "lambda": write_taylor(S, T, rec["lambda"])}
            out["witnesses"] = sec
        return out

    def serialize(self):
        return dumps(self.to_data())


def dumps(data, width=100):
    """Canonical JSON: containers that fit on one line stay inline."""
    return _dump(data, 0, width) + "\n"


def _dump(x, level, width):
    flat = json.dumps(x, ensure_ascii=False, separators=(", ", ": "))
    if not isinstance(x, (dict, list)) or len(flat) + 2 * level <= width or not x:
        return flat
    pad = "  " * (level + 1)
    if isinstance(x, dict):
        items = [f"{pad}{json.dumps(k, ensure_ascii=False)}: {_dump(v, level + 1, width)}" for k, v in x.items()]
        return "{\n" + ",\n".join(items) + "\n" + "  " * level + "}"
    items = [pad + _dump(v, level + 1, width) for v in x]
    return "[\n" + ",\n".join(items) + "\n" + "  " * level + "]"


# -- building objects ---------------------------------------------------------------


class Library:
    """Objects built from a Document, cached by name."""

    def __init__(self, doc, ctx=None):
        self.doc = doc
        self.ctx = ctx or doc.context
        self._dglas, self._structs, self._morphs, self._mods = {}, {}, {}, {}

    def dgla(self, name):
        if name not in self._dglas:
            rec = self.doc.dglas[name]
            g = self.doc.spaces[rec["space"]]
            self._dglas[name] = DGLAData(g, rec["d"], rec["br"], rec["R"], self.ctx, name)
        return self._dglas[name]

    def structure(self, name):
        if name not in self._structs:
            rec = self.doc.structures.get(name)
            if rec is None:
                raise FormatError(name, "unknown structure")
            if "dgla" in rec:
                Q = from_dgla(self.dgla(rec["dgla"]), check=False, name=name)
            else:
                Q = LInftyStructure(self.doc.spaces[rec["space"]], rec["taylor"], self.ctx, name)
            self._structs[name] = Q
        return self._structs[name]

    def morphism(self, name):
        if name not in self._morphs:
            rec = self.doc.morphisms.get(name)
            if rec is None:
                raise FormatError(name, "unknown morphism")
            self._morphs[name] = LInftyMorphism(self.structure(rec["source"]), self.structure(rec["target"]),
                                                rec["taylor"], self.ctx, name)
        return self._morphs[name]

    def element(self, name):
        rec = self.doc.elements.get(name)
        if rec is None:
            raise FormatError(name, "unknown element")
        return self.structure(rec["structure"]), dict(rec["value"])

    def module(self, name):
        if name not in self._mods:
            rec = self.doc.modules.get(name)
            if rec is None:
                raise FormatError(name, "unknown module")
            self._mods[name] = LInftyModule(self.structure(rec["base"]), self.doc.spaces[rec["space"]],
                                            rec["taylor"], name)
        return self._mods[name]

    def contraction(self, name):
        rec = self.doc.contractions.get(name)
        if rec is None:
            raise FormatError(name, "unknown contraction")
        C = Contraction(self.doc.spaces[rec["A"]], self.doc.spaces[rec["B"]], rec["dA"], rec["dB"],
                        rec["i"], rec["p"], rec["h"], self.ctx, name)
        QB = self.structure(rec["structure"]) if rec.get("structure") else None
        return C, QB

    def witness(self, name):
        rec = self.doc.witnesses.get(name)
        if rec is None:
            raise FormatError(name, "unknown witness")
        return HomotopyWitness(self.structure(rec["source"]), self.structure(rec["target"]),
                               rec["F"], rec["lambda"], name)


# -- exporting computed objects ------------------------------------------------------


def export_structure(doc, name, Q, max_weight, space_name=None):
    sn = space_name or doc.space_name(Q.L) or f"{name}.space"
    doc.spaces.setdefault(sn, Q.L)
    doc.structures[name] = {"space": sn, "taylor": Q.taylor_upto(max_weight)}
    return sn


def export_morphism(doc, name, F, source, target, max_weight):
    doc.morphisms[name] = {"source": source, "target": target, "taylor": F.taylor_upto(max_weight)}


def export_element(doc, name, structure, v, kind="element"):
    doc.elements[name] = {"structure": structure, "kind": kind, "value": dict(v)}


def export_dgla(doc, name, data, space_name=None):
    sn = space_name or doc.space_name(data.g) or f"{name}.space"
    doc.spaces.setdefault(sn, data.g)
    br = {(i, j): v for (i, j), v in data.br.items() if i <= j}
    doc.dglas[name] = {"space": sn, "d": dict(data.d), "br": br, "R": dict(data.R)}
    return sn


def export_module(doc, name, mod, base, max_weight, space_name=None):
    sn = space_name or doc.space_name(mod.M) or f"{name}.space"
    doc.spaces.setdefault(sn, mod.M)
    tay = {}
    for key in mod.keys(max_weight):
        v = mod.phi1.word(key)
        if v:
            tay[key] = v
    doc.modules[name] = {"base": base, "space": sn, "taylor": tay}
