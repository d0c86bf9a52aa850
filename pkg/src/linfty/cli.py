"""Command line front end: `linfty <command> [options] FILE...`.

Every command prints one canonical JSON report to standard output and exits
with 0 (all verdicts pass), 1 (a check failed), 2 (unreadable or invalid
input) or 3 (internal error).  Reports carry no timing, so repeated runs are
byte-identical.
"""

import argparse
import os
import sys

from . import homotopy as hom
from . import mc
from .fileformat import (Document, FormatError, Library, dumps, export_element, export_morphism,
                         export_structure, format_coeff, _group)
from .modules import check_module, twist_module
from .shipped import resolve
from .structures import (Report, check_linfty, check_morphism, compose, identity_morphism, invert,
                         taylor_difference)
from .transfer import minimal_model, transfer
from .vec import at_t, first_difference, sub

EXIT_OK, EXIT_FAIL, EXIT_INPUT, EXIT_INTERNAL = 0, 1, 2, 3
THREADS_ENV = "LINFTY_THREADS"


class InputError(ValueError):
    pass


# -- rendering -------------------------------------------------------------------


def render_vector(v, space=None, mspace=None):
    """Vector -> sorted [[labels], coefficient] rows (module keys add the M label)."""
    rows = []
    for key, terms in sorted(_group(v).items(), key=lambda kv: _sort_key(kv[0])):
        rows.append([_render_key(key, space, mspace), format_coeff(terms)])
    return rows


def _sort_key(key):
    if key and isinstance(key[0], tuple):
        return (1, len(key[0]), key)
    return (0, len(key), key)


def _render_key(key, space, mspace):
    if key and isinstance(key[0], tuple):
        w, j = key
        labs = [space.labels[i] for i in w] if space is not None else list(w)
        return labs + ["|", mspace.labels[j] if mspace is not None else j]
    return [space.labels[i] for i in key] if space is not None else list(key)


def verdict(check, rep, space=None, mspace=None, **extra):
    out = {"check": check, "ok": bool(rep.ok), "checked": rep.checked}
    if not rep.ok:
        out["witness"] = [str(x) for x in rep.witness] if rep.witness is not None else None
        out["residual"] = render_vector(rep.residual, space, mspace)
        if rep.detail:
            out["detail"] = rep.detail
    out.update(extra)
    return out


def bool_verdict(check, ok, witness=None, residual=None, space=None):
    rep = Report(bool(ok), 1, witness, residual or {}, check)
    return verdict(check, rep, space)


def equality_verdict(check, F, G, W):
    diff = taylor_difference(F.f1, G.f1, F.source.S, W)
    if diff is None:
        return bool_verdict(check, True)
    w, d = diff
    return bool_verdict(check, False, tuple(F.source.S.labels[i] for i in w), d, F.target.S)


# -- input handling ------------------------------------------------------------------


def load_documents(paths, N=None, W=None):
    doc = None
    for p in paths:
        path = resolve(p) if p.startswith("@") else p
        d = Document.load(path, N, W)
        if doc is None:
            doc = d
        else:
            if d.context != doc.context:
                raise FormatError(p, "context differs from the first file; pass --hbar-order/--weight")
            doc.merge(d, p)
    return doc


def pick(section, name, what, kind=None):
    """Select by name, or the unique candidate."""
    if name is not None:
        if name not in section:
            raise InputError(f"unknown {what} {name!r}")
        return name
    names = sorted(n for n, rec in section.items() if kind is None or rec.get("kind") == kind)
    if len(names) != 1:
        raise InputError(f"choose a {what} with --{what.replace(' ', '-')} (candidates: {names})")
    return names[0]


def require(name, what):
    if name is None:
        raise InputError(f"--{what} is required")
    return name


def element_in(lib, name, structure=None):
    Q, v = lib.element(name)
    rec = lib.doc.elements[name]
    if structure is not None and rec["structure"] != structure:
        raise InputError(f"element {name!r} lives on {rec['structure']!r}, not {structure!r}")
    return rec["structure"], Q, v


def write_artifact(path, doc):
    if path is None:
        return None
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(doc.serialize())
    return path


def _copy_base(doc, src, names):
    """Artifact document carrying the named structures (and what they need)."""
    out = Document(doc.context)
    for n in names:
        rec = doc.structures[n]
        out.structures[n] = rec
        if "dgla" in rec:
            d = doc.dglas[rec["dgla"]]
            out.dglas[rec["dgla"]] = d
            out.spaces[d["space"]] = doc.spaces[d["space"]]
        else:
            out.spaces[rec["space"]] = doc.spaces[rec["space"]]
    return out


# -- commands ----------------------------------------------------------------------


def cmd_validate(args, lib):
    doc, W = lib.doc, lib.ctx.W
    verdicts = []
    wanted = set(args.structure or []) | set(args.morphism or [])
    for name in sorted(doc.dglas):
        rep = lib.dgla(name).validate()
        verdicts.append(verdict(f"dgla:{name}", rep, lib.dgla(name).g))
    for name in sorted(doc.structures):
        if wanted and name not in wanted:
            continue
        Q = lib.structure(name)
        verdicts.append(degree_verdict(f"degree:{name}", Q.S, Q.S, doc.structures[name].get("taylor"), 1))
        verdicts.append(verdict(f"linfty:{name}", check_linfty(Q, W), Q.S))
    for name in sorted(doc.morphisms):
        if wanted and name not in wanted:
            continue
        F = lib.morphism(name)
        verdicts.append(degree_verdict(f"degree:{name}", F.source.S, F.target.S, doc.morphisms[name]["taylor"], 0))
        verdicts.append(verdict(f"morphism:{name}", check_morphism(F, W), F.target.S))
    if not wanted:
        for name in sorted(doc.modules):
            mod = lib.module(name)
            verdicts.append(verdict(f"module:{name}", check_module(mod, W), mod.S, mod.M))
        for name in sorted(doc.elements):
            rec = doc.elements[name]
            if rec["kind"] == "mc":
                Q, v = lib.element(name)
                verdicts.append(verdict(f"mc:{name}", mc.check_mc(Q, v), Q.S))
        for name in sorted(doc.contractions):
            C, _ = lib.contraction(name)
            verdicts.append(verdict(f"contraction:{name}", C.validate(), C.B))
        for name in sorted(doc.witnesses):
            wit = lib.witness(name)
            verdicts.append(verdict(f"homotopy:{name}", hom.verify_homotopy(wit, W), wit.target.S))
    return verdicts, {}, None


def degree_verdict(check, src, tgt, taylor, deg):
    for w, v in sorted((taylor or {}).items()):
        want = src.word_degree(w) + deg
        for (u, _, _) in v:
            if tgt.word_degree(u) != want:
                return bool_verdict(check, False, tuple(src.labels[i] for i in w), v, tgt)
    return bool_verdict(check, True)


def cmd_transfer(args, lib):
    doc, W = lib.doc, lib.ctx.W
    cname = pick(doc.contractions, args.contraction, "contraction")
    C, QB = lib.contraction(cname)
    if args.structure:
        QB = lib.structure(args.structure)
    if QB is None:
        raise InputError("the contraction names no structure; pass --structure")
    rep = C.validate()
    verdicts = [verdict(f"contraction:{cname}", rep, C.B)]
    if not rep.ok:
        return verdicts, {}, None
    res = transfer(C, QB, W)
    return _transfer_verdicts(verdicts, res, W, "QA", doc.contractions[cname]["A"])


def _transfer_verdicts(verdicts, res, W, qname, space_name):
    QA, P, I = res.QA, res.P, res.I
    verdicts.append(verdict(f"linfty:{qname}", check_linfty(QA, W), QA.S))
    verdicts.append(verdict("morphism:P", check_morphism(P, W), QA.S))
    verdicts.append(verdict("morphism:I", check_morphism(I, W), I.target.S))
    verdicts.append(equality_verdict("P.I=id", compose(P, I), identity_morphism(QA), W))
    art = Document(res.contraction.ctx)
    export_structure(art, qname, QA, W, space_name)
    bname = res.contraction.name + ".B"
    export_structure(art, "QB", I.target, W, bname)
    export_morphism(art, "P", P, "QB", qname, W)
    export_morphism(art, "I", I, qname, "QB", W)
    results = {qname: render_taylor(QA.taylor_upto(W), QA.S)}
    return verdicts, results, art


def render_taylor(taylor, src):
    return [[[src.labels[i] for i in w], render_vector(v, src)] for w, v in sorted(taylor.items(), key=lambda kv: (len(kv[0]), kv[0]))]


def cmd_minimal(args, lib):
    doc, W = lib.doc, lib.ctx.W
    name = pick(doc.structures, args.structure, "structure")
    Q = lib.structure(name)
    res = minimal_model(Q, W)
    verdicts, results, art = _transfer_verdicts([], res, W, "H", f"H({name})")
    q1 = any(res.QA.q1.word((i,)) for i in range(res.QA.L.dim))
    verdicts.append(bool_verdict("minimal:Q1=0", not q1))
    results["cohomology"] = [[lab, d] for lab, d in res.QA.L.basis()]
    return verdicts, results, art


def cmd_twist(args, lib):
    doc, W = lib.doc, lib.ctx.W
    pname = pick(doc.elements, args.pi, "pi", "mc") if args.pi is None else args.pi
    sname, Q, pi = element_in(lib, pname)
    Qpi = mc.twist_structure(Q, pi, f"{sname}^{pname}")
    flat = mc.check_mc(Q, pi).ok
    verdicts = [verdict(f"linfty:{Qpi.name}", check_linfty(Qpi, W), Q.S)]
    art = _copy_base(doc, None, [])
    export_structure(art, Qpi.name, Qpi, W, doc.space_name(Q.L))
    results = {"flat": flat, "curvature": render_vector(Qpi.curvature, Q.S)}
    for mname in args.morphism or []:
        F = lib.morphism(mname)
        if doc.morphisms[mname]["source"] != sname:
            raise InputError(f"morphism {mname!r} does not start at {sname!r}")
        Fpi, S = mc.twist_morphism(F, pi, source=Qpi)
        tname = f"{doc.morphisms[mname]['target']}^{mname}({pname})"
        Fpi.target.name = tname
        verdicts.append(verdict(f"morphism:{mname}^{pname}", check_morphism(Fpi, W), F.target.S))
        export_structure(art, tname, Fpi.target, W, doc.space_name(F.target.L))
        export_morphism(art, f"{mname}^{pname}", Fpi, Qpi.name, tname, W)
        results[f"{mname}_MC({pname})"] = render_vector(S, F.target.S)
    for modname in sorted(n for n, r in doc.modules.items() if r["base"] == sname):
        mod = twist_module(lib.module(modname), pi, base=Qpi)
        verdicts.append(verdict(f"module:{modname}^{pname}", check_module(mod, W), mod.S, mod.M))
    return verdicts, results, art


def cmd_mc(args, lib):
    doc = lib.doc
    pname = pick(doc.elements, args.pi, "pi", "mc") if args.pi is None else args.pi
    sname, Q, pi = element_in(lib, pname)
    r = mc.mc_residual(Q, pi)
    k, obs = mc.mc_obstruction(Q, pi)
    results = {"element": pname, "structure": sname,
               "solves_to_order": (lib.ctx.N + 1) if k is None else k,
               "obstruction": render_vector(obs, Q.S)}
    if args.extend is not None:
        # pi is claimed to solve MC mod hbar^extend; report the next obstruction
        ok = k is None or k >= args.extend
        results["obstruction_order"] = args.extend
        nxt = {key: x for key, x in r.items() if key[1] == args.extend}
        results["obstruction"] = render_vector(nxt, Q.S)
        return [bool_verdict(f"mc mod hbar^{args.extend}:{pname}", ok, ("Q^1(exp pi)",), r, Q.S)], results, None
    return [verdict(f"mc:{pname}", mc.check_mc(Q, pi), Q.S)], results, None


def cmd_gauge(args, lib):
    gname = require(args.g, "g")
    sname, Q, g = element_in(lib, gname)
    pname = require(args.pi, "pi")
    _, _, pi = element_in(lib, pname, sname)
    out = mc.gauge_act(Q, g, pi)
    verdicts = [verdict(f"mc:{pname}", mc.check_mc(Q, pi), Q.S),
                verdict(f"mc:exp({gname}).{pname}", mc.check_mc(Q, out), Q.S)]
    art = _copy_base(lib.doc, None, [sname])
    export_element(art, f"exp({gname}).{pname}", sname, out, "mc")
    return verdicts, {"result": render_vector(out, Q.S)}, art


def cmd_homotopy_integrate(args, lib):
    lname = require(args.lam, "lambda")
    sname, Q, lam = element_in(lib, lname)
    pname = require(args.pi0 or args.pi, "pi0")
    _, _, pi0 = element_in(lib, pname, sname)
    pit = mc.integrate_homotopy(Q, pi0, lam)
    pi1 = at_t(pit, 1)
    verdicts = [verdict("path-ode", mc.verify_path(Q, pit, lam), Q.S),
                verdict(f"mc:{pname}", mc.check_mc(Q, pi0), Q.S),
                verdict("mc:pi(1)", mc.check_mc(Q, pi1), Q.S)]
    art = _copy_base(lib.doc, None, [sname])
    export_element(art, "pi(t)", sname, pit, "path")
    export_element(art, "pi(1)", sname, pi1, "mc")
    return verdicts, {"pi(t)": render_vector(pit, Q.S), "pi(1)": render_vector(pi1, Q.S)}, art


def cmd_gauge_reconstruct(args, lib):
    lname = require(args.lam, "lambda")
    sname, Q, lam = element_in(lib, lname)
    if not hasattr(Q, "dgla"):
        raise InputError("gauge reconstruction needs a DGLA structure")
    A = mc.reconstruct_gauge(Q, lam)
    g = at_t(A, 1)
    results = {"A(t)": render_vector(A, Q.S), "g": render_vector(g, Q.S)}
    verdicts = []
    pname = args.pi0 or args.pi
    if pname is not None:
        _, _, pi0 = element_in(lib, pname, sname)
        pi1 = at_t(mc.integrate_homotopy(Q, pi0, lam), 1)
        via = mc.gauge_act(Q, g, pi0)
        d = sub(pi1, via)
        verdicts.append(bool_verdict("endpoint=exp(g).pi0", not d, ("pi(1)",), d, Q.S))
    verdicts.append(bool_verdict("lambda recovered", _recovers(Q.dgla, A, lam)))
    art = _copy_base(lib.doc, None, [sname])
    export_element(art, "A(t)", sname, A, "path")
    export_element(art, "g", sname, g, "gauge")
    return verdicts, results, art


def _recovers(data, A, lam):
    """((e^{ad A} - 1)/ad A)(dA/dt) == lambda."""
    from math import factorial

    from .scalars import qq
    from .vec import add_to, d_dt

    B = d_dt(A)
    out, term, n = dict(B), B, 0
    while True:
        n += 1
        term = data.bracket(A, term)
        if not term:
            break
        add_to(out, term, qq(1, factorial(n + 1)))
    return first_difference(out, lam) is None


def cmd_certify_homotopy(args, lib):
    doc, W = lib.doc, lib.ctx.W
    names = [args.witness] if args.witness else sorted(doc.witnesses)
    if not names:
        raise InputError("no homotopy witness in the input")
    verdicts, results = [], {}
    for n in names:
        wit = lib.witness(n)
        rep = hom.verify_homotopy(wit, W)
        extra = {}
        if "first_failure" in rep.data:
            extra["first_failure"] = list(rep.data["first_failure"])
        verdicts.append(verdict(f"homotopy:{n}", rep, wit.target.S, **extra))
        if rep.ok:
            F0, F1 = rep.data["F0"], rep.data["F1"]
            results[n] = {"F(0)": render_taylor(F0.taylor_upto(W), wit.source.S),
                          "F(1)": render_taylor(F1.taylor_upto(W), wit.source.S)}
    return verdicts, results, None


def cmd_invert(args, lib):
    doc, W = lib.doc, lib.ctx.W
    mname = pick(doc.morphisms, (args.morphism or [None])[0], "morphism")
    F = lib.morphism(mname)
    G = invert(F, f"{mname}^-1")
    verdicts = [verdict(f"morphism:{G.name}", check_morphism(G, W), G.target.S),
                equality_verdict("inverse.F=id", compose(G, F), identity_morphism(F.source), W),
                equality_verdict("F.inverse=id", compose(F, G), identity_morphism(F.target), W)]
    rec = doc.morphisms[mname]
    art = _copy_base(doc, None, sorted({rec["source"], rec["target"]}))
    export_morphism(art, G.name, G, rec["target"], rec["source"], W)
    return verdicts, {"inverse": render_taylor(G.taylor_upto(W), G.source.S)}, art


def cmd_compose(args, lib):
    doc, W = lib.doc, lib.ctx.W
    names = args.morphism or []
    if len(names) != 2:
        raise InputError("compose needs --morphism F --morphism G (computes G.F)")
    fname, gname = names
    recF, recG = doc.morphisms.get(fname), doc.morphisms.get(gname)
    if recF is None or recG is None:
        raise InputError(f"unknown morphism {fname if recF is None else gname!r}")
    if recF["target"] != recG["source"]:
        raise InputError(f"{fname} ends at {recF['target']!r} but {gname} starts at {recG['source']!r}")
    F, G = lib.morphism(fname), lib.morphism(gname)
    H = compose(G, F, f"{gname}.{fname}")
    verdicts = [verdict(f"morphism:{H.name}", check_morphism(H, W), H.target.S)]
    art = _copy_base(doc, None, sorted({recF["source"], recG["target"]}))
    export_morphism(art, H.name, H, recF["source"], recG["target"], W)
    return verdicts, {"composite": render_taylor(H.taylor_upto(W), H.source.S)}, art


COMMANDS = {
    "validate": cmd_validate,
    "transfer": cmd_transfer,
    "minimal": cmd_minimal,
    "twist": cmd_twist,
    "mc": cmd_mc,
    "gauge": cmd_gauge,
    "homotopy-integrate": cmd_homotopy_integrate,
    "gauge-reconstruct": cmd_gauge_reconstruct,
    "certify-homotopy": cmd_certify_homotopy,
    "invert": cmd_invert,
    "compose": cmd_compose,
}


def build_parser():
    ap = argparse.ArgumentParser(prog="linfty", description="Exact L-infinity computations on structure files.")
    ap.add_argument("command", choices=sorted(COMMANDS) + ["list"])
    ap.add_argument("files", nargs="*", metavar="FILE", help="structure files; @name selects a shipped example")
    ap.add_argument("--hbar-order", type=int, default=None, help="work modulo hbar^(N+1)")
    ap.add_argument("--weight", type=int, default=None, help="weight cap for checks")
    ap.add_argument("--out", default=None, help="write computed objects to this structure file")
    ap.add_argument("--structure", action="append", default=None)
    ap.add_argument("--morphism", action="append", default=None)
    ap.add_argument("--contraction")
    ap.add_argument("--witness")
    ap.add_argument("--pi")
    ap.add_argument("--pi0")
    ap.add_argument("--g")
    ap.add_argument("--lambda", dest="lam")
    ap.add_argument("--extend", type=int, default=None,
                    help="treat pi as a solution mod hbar^K and report the hbar^K obstruction")
    return ap


def thread_count():
    raw = os.environ.get(THREADS_ENV)
    if raw is None:
        return 1
    try:
        n = int(raw)
    except ValueError:
        raise InputError(f"{THREADS_ENV} must be a positive integer") from None
    if n < 1:
        raise InputError(f"{THREADS_ENV} must be a positive integer")
    return n


def run(argv):
    """(exit code, report dict)."""
    args = build_parser().parse_args(argv)
    report = {"command": args.command, "files": list(args.files)}
    if args.command == "list":
        from .shipped import shipped_files
        report["examples"] = [n for n, _ in shipped_files()]
        report["ok"] = True
        return EXIT_OK, report
    try:
        thread_count()
        if not args.files:
            raise InputError("no input files")
        if args.structure and args.command != "validate":
            args.structure = args.structure[-1]
        doc = load_documents(args.files, args.hbar_order, args.weight)
        report["context"] = {"hbar_order": doc.context.N, "weight": doc.context.W}
        lib = Library(doc)
        verdicts, results, art = COMMANDS[args.command](args, lib)
    except (FormatError, InputError, ValueError, OSError) as e:
        report.update(ok=False, error=str(e))
        return EXIT_INPUT, report
    except Exception as e:  # noqa: BLE001 - reported as an internal error
        report.update(ok=False, error=f"internal error: {type(e).__name__}: {e}")
        return EXIT_INTERNAL, report
    report["verdicts"] = verdicts
    if results:
        report["results"] = results
    ok = all(v["ok"] for v in verdicts)
    report["ok"] = ok
    if art is not None and args.out:
        report["artifact"] = write_artifact(args.out, art)
    return (EXIT_OK if ok else EXIT_FAIL), report


def main(argv=None):
    code, report = run(sys.argv[1:] if argv is None else argv)
    sys.stdout.write(dumps(report))
    return code


if __name__ == "__main__":
    sys.exit(main())
