"""JSON workspaces: parsing with name resolution, and canonical serialization.

A workspace file is ``{"documents": [...]}``; each document has ``kind`` and
``name``.  Wherever a document refers to another value it may give either a
name or an inline payload of the expected kind.  Functors, transformations
and rep morphisms inside composite documents are written as inline
``{"on_obj", "on_mor"}`` maps whose endpoints are implied by their position.
"""
import json

from strata.constructible import (ConstructibleDatum, Link, RepMorphism, TMStratDatum,
                                  TripleDatum, complete_rep_morphism, p_kl)
from strata.errors import DanglingReference, ParseError, StrataError
from strata.fincat import FinCat, FunctorData, NatTransData, find_equivalence, identity_functor
from strata.gluing import GluingDatum
from strata.monodromy import (BundleDatum, HomotopyDatum, Pasting, Presentation2,
                              PresentationMap, Step, TransportDatum, TwoRep, _word_transport,
                              word)
from strata.posetstack import PosetStack, StratPoset
from strata.pseudo import Modification, PseudoFunctor, PseudoTransformation

KINDS = (
    "fincat", "functor", "nattrans", "pseudofunctor", "pseudotransformation", "modification",
    "strat_poset", "poset_stack", "gluing_datum", "presentation", "presentation_map",
    "two_rep", "transport", "bundle", "tm_datum", "constructible_datum",
)


def canonical_dumps(doc):
    """Sorted keys, two-space indent, trailing newline: the only output format."""
    return json.dumps(doc, sort_keys=True, indent=2, ensure_ascii=False) + "\n"


class Workspace:
    """Named documents with lazily parsed, memoized values."""

    def __init__(self, documents):
        if not isinstance(documents, list):
            raise ParseError("'documents' must be an array")
        self.docs = {}
        for i, doc in enumerate(documents):
            if not isinstance(doc, dict) or not isinstance(doc.get("name"), str):
                raise ParseError("every document needs a string 'name'", {"index": i})
            if doc.get("kind") not in KINDS:
                raise ParseError(f"unknown kind {doc.get('kind')!r}", {"name": doc["name"]})
            if doc["name"] in self.docs:
                raise ParseError(f"duplicate name {doc['name']!r}", {"name": doc["name"]})
            self.docs[doc["name"]] = doc
        self._values = {}
        self._busy = set()

    @classmethod
    def loads(cls, text):
        try:
            data = json.loads(text)
        except json.JSONDecodeError as e:
            raise ParseError(f"invalid JSON: {e.msg}", {"line": e.lineno, "column": e.colno})
        if not isinstance(data, dict) or "documents" not in data:
            raise ParseError("workspace must be an object with a 'documents' array")
        return cls(data["documents"])

    @classmethod
    def load(cls, path):
        with open(path, encoding="utf-8") as fh:
            return cls.loads(fh.read())

    def names(self, kind=None):
        return sorted(n for n, d in self.docs.items() if kind is None or d["kind"] == kind)

    def kind(self, name):
        if name not in self.docs:
            raise DanglingReference(f"no document named {name!r}", {"name": name})
        return self.docs[name]["kind"]

    def get(self, name, kind=None):
        doc_kind = self.kind(name)
        if kind is not None and doc_kind != kind:
            raise ParseError(f"{name!r} is a {doc_kind}, expected {kind}",
                             {"name": name, "expected": kind, "found": doc_kind})
        if name not in self._values:
            if name in self._busy:
                raise ParseError("cyclic reference", {"name": name})
            self._busy.add(name)
            try:
                self._values[name] = self.parse(self.docs[name], doc_kind)
            finally:
                self._busy.discard(name)
        return self._values[name]

    def resolve(self, value, kind, **context):
        if isinstance(value, str):
            return self.get(value, kind)
        if isinstance(value, dict):
            return self.parse(value, kind, **context)
        raise ParseError(f"expected a name or an inline {kind}", {"value": repr(value)})

    def parse(self, doc, kind, **context):
        try:
            return _PARSERS[kind](self, doc, **context)
        except StrataError:
            raise
        except (KeyError, TypeError, ValueError, AttributeError, IndexError) as e:
            raise ParseError(f"malformed {kind}: {e!r}", {"name": doc.get("name"), "kind": kind})


# ---------------------------------------------------------------------------
# parsers


def _parse_fincat(ws, doc):
    ident = doc["identity"]
    comp = {(f, g): h for f, g, h in doc["comp"]}
    return FinCat(doc["objects"], [tuple(m) for m in doc["morphisms"]], ident, comp)


def _parse_functor(ws, doc, src=None, dst=None):
    src = src if src is not None else ws.resolve(doc["src"], "fincat")
    dst = dst if dst is not None else ws.resolve(doc["dst"], "fincat")
    return FunctorData(src, dst, doc["on_obj"], doc["on_mor"])


def _parse_nattrans(ws, doc):
    return NatTransData(ws.resolve(doc["src"], "functor"), ws.resolve(doc["dst"], "functor"),
                        doc["components"])


def _pseudo_parts(ws, doc, shape):
    at = {a: ws.resolve(v, "fincat") for a, v in doc["at"].items()}
    along = {}
    for m, a, b in shape.morphisms:
        v = doc["along"].get(m)
        if v is None and a == b:
            along[m] = identity_functor(at[a])
        elif v is None:
            raise ParseError(f"no functor along {m!r}", {"morphism": m})
        else:
            along[m] = ws.resolve(v, "functor", src=at[a], dst=at[b])
    comp_iso = {(s, t): comps for s, t, comps in doc.get("comp_iso", [])}
    unit_iso = dict(doc.get("unit_iso", {}))
    return at, along, comp_iso, unit_iso


def _parse_pseudofunctor(ws, doc):
    shape = ws.resolve(doc["shape"], "fincat")
    return PseudoFunctor(shape, *_pseudo_parts(ws, doc, shape))


def _transformation(ws, doc, src, dst):
    comp = {a: ws.resolve(v, "functor", src=src.at[a], dst=dst.at[a])
            for a, v in doc["component"].items()}
    square = dict(doc.get("square", {}))
    for m, a, b in src.shape.morphisms:
        if m not in square and a == b and a in comp:
            cat = dst.at[a]
            square[m] = {x: cat.id(comp[a].obj(x)) for x in src.at[a].objects}
    return PseudoTransformation(src, dst, comp, square)


def _parse_pseudotransformation(ws, doc, src=None, dst=None):
    src = src if src is not None else _pseudo_ref(ws, doc["src"])
    dst = dst if dst is not None else _pseudo_ref(ws, doc["dst"])
    return _transformation(ws, doc, src, dst)


def _pseudo_ref(ws, value):
    if isinstance(value, str) and ws.kind(value) == "poset_stack":
        return ws.get(value)
    return ws.resolve(value, "pseudofunctor")


def _parse_modification(ws, doc):
    src = ws.resolve(doc["src"], "pseudotransformation")
    dst = ws.resolve(doc["dst"], "pseudotransformation")
    return Modification(src, dst, doc["component"])


def _parse_strat_poset(ws, doc):
    return StratPoset(doc["elements"], [tuple(p) for p in doc["leq"]],
                      {x: int(v) for x, v in doc["level"].items()})


def _parse_poset_stack(ws, doc, base=None):
    base = base if base is not None else ws.resolve(doc["base"], "strat_poset")
    at, along, comp_iso, unit_iso = _pseudo_parts(ws, doc, base.category())
    return PosetStack(base, at, along, comp_iso, unit_iso)


def _key(text, size):
    parts = tuple(int(p) for p in str(text).split(","))
    if len(parts) != size:
        raise ParseError(f"expected {size} comma-separated levels, got {text!r}")
    return parts


def _parse_gluing_datum(ws, doc):
    X = ws.resolve(doc["base"], "strat_poset")
    stacks = {}
    for k, v in doc["stacks"].items():
        k = int(k)
        stacks[k] = ws.resolve(v, "poset_stack", base=X.sub(X.stratum(k)))
    ambient = ws.resolve(doc["ambient"], "poset_stack") if doc.get("ambient") else None
    d = GluingDatum(X, stacks, ambient=ambient)
    tw = d.towers()
    for key, v in doc.get("F", {}).items():
        k, l = _key(key, 2)
        d.F[(k, l)] = _transformation(ws, v, tw.tower((k,)), tw.tower((k, l)))
    for key, v in doc.get("f", {}).items():
        d.f[_key(key, 3)] = v
    return d


def _word(value):
    if not isinstance(value, list) or not value:
        raise ParseError("a word is a non-empty array [start, letter, ...]", {"value": value})
    return word(value[0], *value[1:])


def _pasting(value):
    steps = tuple(Step(_word(p), c, int(s), _word(q)) for p, c, s, q in value["steps"])
    return Pasting(_word(value["source"]), steps)


def _parse_presentation(ws, doc):
    return Presentation2(doc["basepoints"], [tuple(g) for g in doc.get("gen1", [])],
                         [(c, _word(s), _word(d)) for c, s, d in doc.get("gen2", [])],
                         [(r, _pasting(a), _pasting(b)) for r, a, b in doc.get("rel2", [])])


def _parse_presentation_map(ws, doc, src=None, dst=None):
    src = src if src is not None else ws.resolve(doc["src"], "presentation")
    dst = dst if dst is not None else ws.resolve(doc["dst"], "presentation")
    return PresentationMap(src, dst, doc["on_points"],
                           {g: _word(w) for g, w in doc.get("on_gen1", {}).items()},
                           {c: _pasting(p) for c, p in doc.get("on_gen2", {}).items()})


def _parse_two_rep(ws, doc):
    P = ws.resolve(doc["presentation"], "presentation")
    at = {b: ws.resolve(v, "fincat") for b, v in doc["at"].items()}
    along1 = {}
    for g, s, d in P.gen1:
        along1[g] = ws.resolve(doc["along1"][g], "functor", src=at[s], dst=at[d])
    return TwoRep(P, at, along1, doc.get("along2", {}))


def _parse_transport(ws, doc):
    return TransportDatum(ws.resolve(doc["src_fiber"], "presentation"),
                          ws.resolve(doc["dst_fiber"], "presentation"),
                          doc["points"], doc.get("gens", {}),
                          {x: _word(w) for x, w in doc["paths"].items()},
                          {d: _pasting(p) for d, p in doc.get("fillers", {}).items()})


def _parse_bundle(ws, doc):
    base = ws.resolve(doc["base"], "presentation")
    total = ws.resolve(doc["total"], "presentation")
    fibers = {b: ws.resolve(v, "presentation") for b, v in doc["fibers"].items()}
    transports = {g: ws.resolve(v, "transport") for g, v in doc.get("transports", {}).items()}
    bd = BundleDatum(base, total, fibers, transports, {})
    for c, s, d in base.gen2:
        h = doc.get("homotopies", {})[c]
        bd.homotopies[c] = HomotopyDatum(
            _word_transport(bd, s), _word_transport(bd, d),
            {x: _word(w) for x, w in h["betas"].items()},
            {x: _pasting(p) for x, p in h["fillers"].items()})
    return bd


def _parse_tm_datum(ws, doc):
    strata = {int(k): ws.resolve(v, "presentation") for k, v in doc["strata"].items()}
    links = {}
    for key, v in doc["links"].items():
        k, l = _key(key, 2)
        L = ws.resolve(v["presentation"], "presentation")
        incl = ws.resolve(v["incl"], "presentation_map", src=L, dst=strata[l])
        links[(k, l)] = Link(L, incl, ws.resolve(v["bundle"], "bundle"))
    triples = {}
    for key, v in doc.get("triples", {}).items():
        triples[_key(key, 3)] = TripleDatum(
            {(y, z): p for y, z, p in v["points"]},
            {(y, d): _word(w) for y, d, w in v.get("fiber_words", [])},
            {(g, z): _word(w) for g, z, w in v.get("lift_words", [])})
    return TMStratDatum(strata, links, triples)


def _parse_constructible_datum(ws, doc):
    tm = ws.resolve(doc["tm"], "tm_datum")
    reps = {int(k): ws.resolve(v, "two_rep") for k, v in doc["reps"].items()}
    d = ConstructibleDatum(tm, reps)
    for key, v in doc.get("F", {}).items():
        k, l = _key(key, 2)
        target = p_kl(tm, k, l, reps[l])
        comps = {}
        for b in tm.strata[k].basepoints:
            spec = v["components"][b]
            src, dst = reps[k].at[b], target.at[b]
            if spec == "first-equivalence":
                comps[b] = find_equivalence(src, dst)
                if comps[b] is None:
                    raise ParseError("no equivalence for an F component", {"pair": key, "basepoint": b})
            else:
                comps[b] = ws.resolve(spec, "functor", src=src, dst=dst)
        if "squares" in v:
            d.F[(k, l)] = RepMorphism(reps[k], target, comps, v["squares"])
        else:
            d.F[(k, l)] = complete_rep_morphism(reps[k], target, comps)
    for key, v in doc.get("f", {}).items():
        d.f[_key(key, 3)] = v
    d.test_reps = {int(m): [ws.resolve(r, "two_rep") for r in v]
                   for m, v in doc.get("test_reps", {}).items()}
    return d


_PARSERS = {
    "fincat": _parse_fincat,
    "functor": _parse_functor,
    "nattrans": _parse_nattrans,
    "pseudofunctor": _parse_pseudofunctor,
    "pseudotransformation": _parse_pseudotransformation,
    "modification": _parse_modification,
    "strat_poset": _parse_strat_poset,
    "poset_stack": _parse_poset_stack,
    "gluing_datum": _parse_gluing_datum,
    "presentation": _parse_presentation,
    "presentation_map": _parse_presentation_map,
    "two_rep": _parse_two_rep,
    "transport": _parse_transport,
    "bundle": _parse_bundle,
    "tm_datum": _parse_tm_datum,
    "constructible_datum": _parse_constructible_datum,
}


# ---------------------------------------------------------------------------
# serializers (always inline, always sorted)


def fincat_payload(c):
    return {
        "objects": sorted(c.objects),
        "morphisms": sorted([m, s, d] for m, s, d in c.morphisms),
        "identity": dict(sorted(c.identity.items())),
        "comp": sorted([f, g, h] for (f, g), h in c.comp.items()),
    }


def functor_payload(F):
    return {"on_obj": dict(sorted(F.on_obj.items())), "on_mor": dict(sorted(F.on_mor.items()))}


def strat_poset_payload(X):
    return {"elements": list(X.elements), "leq": sorted([a, b] for a, b in X.leq),
            "level": dict(sorted(X.level.items()))}


def _comps(v):
    return dict(sorted(getattr(v, "components", v).items()))


def pseudo_payload(D):
    out = {
        "at": {a: fincat_payload(D.at[a]) for a in sorted(D.at)},
        "along": {m: functor_payload(D.along[m]) for m in sorted(D.along)},
    }
    comp_iso = [[s, t, _comps(v)] for (s, t), v in sorted(D.comp_iso.items())
                if any(D.at[D.shape.dst(t)].identity.get(D.along[D.shape.comp[(s, t)]].obj(x))
                       != f for x, f in _comps(v).items())]
    if comp_iso:
        out["comp_iso"] = comp_iso
    unit_iso = {a: _comps(v) for a, v in sorted(D.unit_iso.items())
                if any(D.at[a].identity.get(x) != f for x, f in _comps(v).items())}
    if unit_iso:
        out["unit_iso"] = unit_iso
    return out


def poset_stack_payload(C):
    return {"base": strat_poset_payload(C.base), **pseudo_payload(C)}


def descent_payload(dc):
    shape = dc.diagram.shape
    fams = {}
    for o in dc.objects:
        xs, phis = dc.families[o]
        fams[o] = {"objects": dict(zip(shape.objects, xs)),
                   "isos": dict(zip([m for m, _, _ in shape.morphisms], phis))}
    return {"category": fincat_payload(dc), "families": fams}


def sections_payload(nu):
    P = nu.rep.presentation
    fams = {}
    for o in nu.objects:
        xs, phis = nu.families[o]
        fams[o] = {"points": dict(zip(P.basepoints, xs)),
                   "phis": dict(zip([g for g, _, _ in P.gen1], phis))}
    return {"category": fincat_payload(nu), "families": fams}


def word_payload(w):
    return [w.start] + [g if e > 0 else f"{g}^-1" for g, e in w.letters]


def presentation_payload(P):
    out = {"basepoints": list(P.basepoints), "gen1": [list(g) for g in P.gen1]}
    if P.gen2:
        out["gen2"] = [[c, word_payload(s), word_payload(d)] for c, s, d in P.gen2]
    if P.rel2:
        out["rel2"] = [[r, pasting_payload(a), pasting_payload(b)] for r, a, b in P.rel2]
    return out


def pasting_payload(p):
    return {"source": word_payload(p.source),
            "steps": [[word_payload(s.prefix), s.cell, s.sign, word_payload(s.suffix)]
                      for s in p.steps]}


def two_rep_payload(alpha):
    P = alpha.presentation
    out = {"presentation": presentation_payload(P),
           "at": {b: fincat_payload(alpha.at[b]) for b in P.basepoints},
           "along1": {g: functor_payload(alpha.along1[g]) for g, _, _ in P.gen1}}
    if alpha.along2:
        out["along2"] = {c: _comps(v) for c, v in sorted(alpha.along2.items())}
    return out


def transformation_payload(t):
    out = {"component": {a: functor_payload(F) for a, F in sorted(t.component.items())}}
    sq = {}
    for m, v in sorted(t.square.items()):
        a, b = t.src.shape.src(m), t.src.shape.dst(m)
        comps = _comps(v)
        if a != b or any(t.dst.at[a].identity.get(t.component[a].obj(x)) != f
                         for x, f in comps.items()):
            sq[m] = comps
    out["square"] = sq
    return out


def gluing_datum_payload(d):
    out = {"base": strat_poset_payload(d.base),
           "stacks": {str(k): pseudo_payload(C) for k, C in sorted(d.stacks.items())},
           "F": {f"{k},{l}": transformation_payload(F) for (k, l), F in sorted(d.F.items())},
           "f": {",".join(map(str, key)): {x: _comps(v) for x, v in sorted(comps.items())}
                 for key, comps in sorted(d.f.items())}}
    return out


def document(kind, name, payload):
    return {"kind": kind, "name": name, **payload}


def report_payload(command, rep, info=None):
    """Report with the first violation under ``witness`` and a text rendering."""
    out = {"command": command, "ok": rep.ok, "violations": _jsonable(rep.violations),
           "witness": _jsonable(rep.first()), "text": rep.text()}
    if info:
        out["info"] = _jsonable(info)
    return out


def _jsonable(v):
    if isinstance(v, dict):
        return {str(k): _jsonable(x) for k, x in sorted(v.items(), key=lambda kv: str(kv[0]))}
    if isinstance(v, (list, tuple)):
        return [_jsonable(x) for x in v]
    if v is None or isinstance(v, (bool, int, float, str)):
        return v
    return repr(v)


__all__ = [
    "KINDS", "Workspace", "canonical_dumps", "descent_payload", "document", "fincat_payload",
    "functor_payload", "gluing_datum_payload", "poset_stack_payload", "presentation_payload",
    "report_payload", "sections_payload", "two_rep_payload",
]
