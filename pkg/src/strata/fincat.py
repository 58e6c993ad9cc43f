"""Finite categories, functors and natural transformations.

A :class:`FinCat` is given by explicit object and morphism lists plus a total
composition table.  Morphism ids are unique across the whole category, so
hom-sets are derived views.  ``comp[(f, g)]`` is ``g∘f`` for ``f: a→b`` and
``g: b→c``; everything in this package composes in diagrammatic order.
"""
import hashlib
import itertools

import numpy as np

from strata import kernels
from strata.errors import ShapeMismatch, SizeCapExceeded, UnknownIdentifier
from strata.limits import current
from strata.report import Report


class FinCat:
    """A finite category with a flat composition table.

    Objects and morphisms are stored sorted by id, which fixes the canonical
    enumeration order used by every search in the package.
    """

    def __init__(self, objects, morphisms, identity, comp):
        self.objects = tuple(sorted(objects))
        self.morphisms = tuple(sorted((m, s, d) for m, s, d in morphisms))
        self.identity = dict(sorted(identity.items()))
        self.comp = dict(comp)
        self._src = {m: s for m, s, _ in self.morphisms}
        self._dst = {m: d for m, _, d in self.morphisms}
        self._homs = None
        self._inv = {}
        self._ix = None
        self._fp = None

    def __repr__(self):
        return f"FinCat({len(self.objects)} objects, {len(self.morphisms)} morphisms)"

    # -- basic structure ------------------------------------------------
    def src(self, f):
        return self._src[f]

    def dst(self, f):
        return self._dst[f]

    def id(self, a):
        return self.identity[a]

    def then(self, *path):
        """Compose morphisms given in path order: ``then(f, g) = g∘f``."""
        out = path[0]
        for g in path[1:]:
            out = self.comp[(out, g)]
        return out

    def hom(self, a, b):
        if self._homs is None:
            homs = {}
            for m, s, d in self.morphisms:
                homs.setdefault((s, d), []).append(m)
            self._homs = {k: tuple(v) for k, v in homs.items()}
        return self._homs.get((a, b), ())

    def inverse(self, f):
        """Two-sided inverse of ``f`` found by searching the table, or None."""
        if f in self._inv:
            return self._inv[f]
        a, b = self._src[f], self._dst[f]
        found = None
        for g in self.hom(b, a):
            if self.comp.get((f, g)) == self.identity[a] and self.comp.get((g, f)) == self.identity[b]:
                found = g
                break
        self._inv[f] = found
        return found

    def is_iso(self, f):
        return self.inverse(f) is not None

    def isos(self, a, b):
        return tuple(f for f in self.hom(a, b) if self.is_iso(f))

    # -- identity and equality ------------------------------------------
    def fingerprint(self):
        if self._fp is None:
            h = hashlib.blake2b(digest_size=16)
            h.update(repr(self.objects).encode())
            h.update(repr(self.morphisms).encode())
            h.update(repr(sorted(self.identity.items())).encode())
            h.update(repr(sorted(self.comp.items())).encode())
            self._fp = h.hexdigest()
        return self._fp

    def __eq__(self, other):
        if self is other:
            return True
        if not isinstance(other, FinCat):
            return NotImplemented
        return self.fingerprint() == other.fingerprint()

    def __hash__(self):
        return hash(self.fingerprint())

    # -- integer view for the kernels -----------------------------------
    def index(self):
        if self._ix is None:
            self._ix = _IntView(self)
        return self._ix


class _IntView:
    """Integer-indexed arrays of a category, built on demand."""

    def __init__(self, c):
        self.oi = {o: i for i, o in enumerate(c.objects)}
        self.mi = {m: i for i, (m, _, _) in enumerate(c.morphisms)}
        n = len(c.morphisms)
        self.src = np.array([self.oi.get(s, -1) for _, s, _ in c.morphisms], dtype=np.int32)
        self.dst = np.array([self.oi.get(d, -1) for _, _, d in c.morphisms], dtype=np.int32)
        self.ident = np.array([self.mi.get(c.identity.get(o), -1) for o in c.objects], dtype=np.int32)
        order = sorted(range(n), key=lambda i: (self.src[i], i))
        counts = np.bincount(self.src[self.src >= 0], minlength=len(c.objects))
        self.out_offsets = np.zeros(len(c.objects) + 1, dtype=np.int32)
        self.out_offsets[1:] = np.cumsum(counts)
        self.out_items = np.array([i for i in order if self.src[i] >= 0], dtype=np.int32)
        self.table = np.full((n, n), -1, dtype=np.int32)
        for (f, g), h in c.comp.items():
            i, j, k = self.mi.get(f), self.mi.get(g), self.mi.get(h)
            if i is not None and j is not None and k is not None:
                self.table[i, j] = k


# ---------------------------------------------------------------------------
# standard small categories


def discrete(objects):
    objects = list(objects)
    ids = {o: f"id_{o}" for o in objects}
    return FinCat(objects, [(ids[o], o, o) for o in objects], ids,
                  {(ids[o], ids[o]): ids[o] for o in objects})


def terminal():
    return discrete(["*"])


def empty():
    return FinCat([], [], {}, {})


def poset_category(elements, leq, mor_id=None):
    """The category of a preorder: one morphism per related pair."""
    elements = list(elements)
    mor_id = mor_id or (lambda x, y: f"{x}<={y}")
    rel = set(leq) | {(x, x) for x in elements}
    morphisms = [(mor_id(x, y), x, y) for (x, y) in sorted(rel)]
    identity = {x: mor_id(x, x) for x in elements}
    comp = {}
    for (x, y) in rel:
        for (y2, z) in rel:
            if y == y2:
                comp[(mor_id(x, y), mor_id(y, z))] = mor_id(x, z)
    return FinCat(elements, morphisms, identity, comp)


def arrow():
    """The walking arrow ``a → b``."""
    return poset_category(["a", "b"], [("a", "b")], lambda x, y: "f" if x != y else f"id_{x}")


def indiscrete(objects):
    """One morphism between every ordered pair: all morphisms invertible."""
    objects = list(objects)
    rel = [(x, y) for x in objects for y in objects]
    return poset_category(objects, rel, lambda x, y: f"{x}>{y}")


def cyclic_group(order, obj="*"):
    """One object whose endomorphisms form ``Z/order``; ``g0`` is the identity."""
    mors = [(f"g{i}", obj, obj) for i in range(order)]
    comp = {(f"g{i}", f"g{j}"): f"g{(i + j) % order}" for i in range(order) for j in range(order)}
    return FinCat([obj], mors, {obj: "g0"}, comp)


# ---------------------------------------------------------------------------
# validation


def validate_category(c):
    """Check every invariant of ``c``; return a report listing violations."""
    rep = Report()
    obj_set = set(c.objects)
    if len(obj_set) != len(c.objects):
        for o in sorted({o for o in c.objects if c.objects.count(o) > 1}):
            rep.add("duplicate-object", object=o)
    mor_ids = [m for m, _, _ in c.morphisms]
    if len(set(mor_ids)) != len(mor_ids):
        for m in sorted({m for m in mor_ids if mor_ids.count(m) > 1}):
            rep.add("duplicate-morphism", morphism=m)
    for m, s, d in c.morphisms:
        if s not in obj_set or d not in obj_set:
            rep.add("unknown-endpoint", morphism=m)
    for o in c.objects:
        i = c.identity.get(o)
        if i is None or i not in c._src:
            rep.add("identity-missing", object=o)
        elif c._src[i] != o or c._dst[i] != o:
            rep.add("identity-endpoints", object=o, morphism=i)
    outs = {}
    ins = {}
    for m, s, d in c.morphisms:
        outs.setdefault(s, []).append(m)
        ins.setdefault(d, []).append(m)
    composable = set()
    for f, _, b in c.morphisms:
        for g in outs.get(b, ()):
            composable.add((f, g))
    for pair in sorted(composable):
        if pair not in c.comp:
            rep.add("comp-missing", pair=list(pair))
    for pair in sorted(c.comp):
        f, g = pair
        h = c.comp[pair]
        if pair not in composable:
            rep.add("comp-extra", pair=list(pair))
        elif h not in c._src or c._src[h] != c._src[f] or c._dst[h] != c._dst[g]:
            rep.add("comp-endpoints", pair=list(pair), result=h)
    for o in c.objects:
        i = c.identity.get(o)
        if i is None or i not in c._src or c._src[i] != o or c._dst[i] != o:
            continue
        for f in outs.get(o, ()):
            if c.comp.get((i, f)) != f:
                rep.add("unit-left", object=o, morphism=f)
        for f in ins.get(o, ()):
            if c.comp.get((f, i)) != f:
                rep.add("unit-right", object=o, morphism=f)
    ix = c.index()
    names = [m for m, _, _ in c.morphisms]
    for f, g, h in sorted(kernels.assoc_violations(ix.table, ix.out_offsets, ix.out_items, ix.dst)):
        rep.add("associativity", triple=[names[f], names[g], names[h]])
    return rep


# ---------------------------------------------------------------------------
# functors


class FunctorData:
    def __init__(self, src, dst, on_obj, on_mor):
        self.src = src
        self.dst = dst
        self.on_obj = dict(on_obj)
        self.on_mor = dict(on_mor)

    def __repr__(self):
        return f"FunctorData({len(self.on_obj)} objects → {self.dst!r})"

    def obj(self, x):
        return self.on_obj[x]

    def mor(self, f):
        return self.on_mor[f]

    def key(self):
        return (tuple(self.on_obj[o] for o in self.src.objects),
                tuple(self.on_mor[m] for m, _, _ in self.src.morphisms))

    def __eq__(self, other):
        if not isinstance(other, FunctorData):
            return NotImplemented
        return (self.src == other.src and self.dst == other.dst
                and self.on_obj == other.on_obj and self.on_mor == other.on_mor)

    def __hash__(self):
        return hash((self.src, self.dst, self.key()))


def identity_functor(c):
    return FunctorData(c, c, {o: o for o in c.objects}, {m: m for m, _, _ in c.morphisms})


def constant_functor(c, d, obj):
    i = d.id(obj)
    return FunctorData(c, d, {o: obj for o in c.objects}, {m: i for m, _, _ in c.morphisms})


def compose_functors(*fs):
    """Composite in path order: ``compose_functors(F, G) = G∘F``."""
    out = fs[0]
    for g in fs[1:]:
        if out.dst is not g.src and out.dst != g.src:
            raise ShapeMismatch("functors are not composable")
        out = FunctorData(out.src, g.dst,
                          {x: g.on_obj[y] for x, y in out.on_obj.items()},
                          {f: g.on_mor[h] for f, h in out.on_mor.items()})
    return out


def validate_functor(F):
    """Check endpoints, identities and composition exhaustively."""
    c, d = F.src, F.dst
    dobj = set(d.objects)
    for o in c.objects:
        if o not in F.on_obj:
            raise UnknownIdentifier(f"object {o!r} has no image", {"object": o})
        if F.on_obj[o] not in dobj:
            raise UnknownIdentifier(f"image {F.on_obj[o]!r} is not an object", {"object": o})
    for m, _, _ in c.morphisms:
        if m not in F.on_mor:
            raise UnknownIdentifier(f"morphism {m!r} has no image", {"morphism": m})
        if F.on_mor[m] not in d._src:
            raise UnknownIdentifier(f"image {F.on_mor[m]!r} is not a morphism", {"morphism": m})
    extra = sorted(set(F.on_obj) - set(c.objects)) + sorted(set(F.on_mor) - set(c._src))
    if extra:
        raise UnknownIdentifier(f"map mentions unknown ids {extra}", {"ids": extra})
    rep = Report()
    bad_ends = set()
    for m, s, t in c.morphisms:
        g = F.on_mor[m]
        if d.src(g) != F.on_obj[s] or d.dst(g) != F.on_obj[t]:
            rep.add("endpoint", morphism=m, image=g)
            bad_ends.add(m)
    for o in c.objects:
        if F.on_mor[c.id(o)] != d.id(F.on_obj[o]):
            rep.add("identity", object=o)
    if bad_ends:
        return rep
    ci, di = c.index(), d.index()
    fmor = np.array([di.mi[F.on_mor[m]] for m, _, _ in c.morphisms], dtype=np.int32)
    names = [m for m, _, _ in c.morphisms]
    for f, g in sorted(kernels.functor_violations(ci.table, ci.out_offsets, ci.out_items,
                                                  ci.dst, fmor, di.table)):
        rep.add("composition", pair=[names[f], names[g]])
    return rep


# ---------------------------------------------------------------------------
# natural transformations


class NatTransData:
    """Components ``components[x]: src_fun(x) → dst_fun(x)``."""

    def __init__(self, src_fun, dst_fun, components, iso=False):
        self.src_fun = src_fun
        self.dst_fun = dst_fun
        self.components = dict(components)
        self.iso = iso

    def __repr__(self):
        return f"NatTransData({len(self.components)} components, iso={self.iso})"

    @property
    def src_cat(self):
        return self.src_fun.src

    @property
    def dst_cat(self):
        return self.src_fun.dst

    def at(self, x):
        return self.components[x]

    def is_invertible(self):
        d = self.dst_cat
        return all(d.is_iso(m) for m in self.components.values())

    def __eq__(self, other):
        if not isinstance(other, NatTransData):
            return NotImplemented
        return (self.src_fun == other.src_fun and self.dst_fun == other.dst_fun
                and self.components == other.components)

    def __hash__(self):
        return hash(tuple(sorted(self.components.items())))


def _same(c, d):
    return c is d or c == d


def validate_nat_trans(alpha):
    F, G = alpha.src_fun, alpha.dst_fun
    if not (_same(F.src, G.src) and _same(F.dst, G.dst)):
        raise ShapeMismatch("source and target functors have different endpoints")
    c, d = F.src, F.dst
    rep = Report()
    for o in c.objects:
        m = alpha.components.get(o)
        if m is None or m not in d._src:
            raise UnknownIdentifier(f"component at {o!r} missing or unknown", {"object": o})
        if d.src(m) != F.obj(o) or d.dst(m) != G.obj(o):
            rep.add("component-endpoint", object=o, morphism=m)
    if rep.violations:
        return rep
    ci, di = c.index(), d.index()
    names = [m for m, _, _ in c.morphisms]
    fmor = np.array([di.mi[F.mor(m)] for m in names], dtype=np.int32)
    gmor = np.array([di.mi[G.mor(m)] for m in names], dtype=np.int32)
    comps = np.array([di.mi[alpha.components[o]] for o in c.objects], dtype=np.int32)
    for f in sorted(kernels.naturality_violations(ci.src, ci.dst, fmor, gmor, comps, di.table)):
        rep.add("naturality", morphism=names[f])
    if alpha.iso:
        for o in c.objects:
            if not d.is_iso(alpha.components[o]):
                rep.add("not-invertible", object=o)
    return rep


def identity_nat(F):
    return NatTransData(F, F, {o: F.dst.id(F.obj(o)) for o in F.src.objects}, iso=True)


def vertical_compose(beta, alpha):
    """``(β·α)_x = β_x ∘ α_x`` for ``α: F ⇒ G`` and ``β: G ⇒ H``."""
    if alpha.dst_fun != beta.src_fun:
        raise ShapeMismatch("vertical composition needs α's target to equal β's source")
    d = alpha.dst_cat
    comps = {x: d.comp[(alpha.components[x], beta.components[x])] for x in alpha.components}
    return NatTransData(alpha.src_fun, beta.dst_fun, comps, iso=alpha.iso and beta.iso)


def whisker_left(F, alpha):
    """Precompose: ``α: G ⇒ H`` on ``D``, ``F: C → D`` gives ``αF: G∘F ⇒ H∘F``."""
    if not _same(F.dst, alpha.src_cat):
        raise ShapeMismatch("functor target differs from the transformation's domain")
    comps = {x: alpha.components[F.obj(x)] for x in F.src.objects}
    return NatTransData(compose_functors(F, alpha.src_fun), compose_functors(F, alpha.dst_fun),
                        comps, iso=alpha.iso)


def whisker_right(alpha, F):
    """Postcompose: ``α: G ⇒ H`` into ``D``, ``F: D → E`` gives ``Fα: F∘G ⇒ F∘H``."""
    if not _same(alpha.dst_cat, F.src):
        raise ShapeMismatch("transformation codomain differs from the functor's domain")
    comps = {x: F.mor(m) for x, m in alpha.components.items()}
    return NatTransData(compose_functors(alpha.src_fun, F), compose_functors(alpha.dst_fun, F),
                        comps, iso=alpha.iso)


def inverse_nat(alpha):
    d = alpha.dst_cat
    comps = {}
    for x, m in alpha.components.items():
        inv = d.inverse(m)
        if inv is None:
            raise ShapeMismatch(f"component at {x!r} is not invertible", {"object": x})
        comps[x] = inv
    return NatTransData(alpha.dst_fun, alpha.src_fun, comps, iso=True)


def find_nat_trans(F, G, iso=False):
    """First natural transformation ``F ⇒ G`` in canonical order, or None."""
    for alpha in iter_nat_trans(F, G, iso=iso):
        return alpha
    return None


def iter_nat_trans(F, G, iso=False):
    c, d = F.src, F.dst
    objs = c.objects
    cap = current().max_families
    # morphisms of c checked once both endpoints are assigned
    pos = {o: i for i, o in enumerate(objs)}
    checks = [[] for _ in objs]
    for m, a, b in c.morphisms:
        checks[max(pos[a], pos[b])].append((m, a, b))
    choice = {}
    counter = [0]

    def cands(o):
        hs = d.hom(F.obj(o), G.obj(o))
        return [h for h in hs if d.is_iso(h)] if iso else list(hs)

    def rec(i):
        if i == len(objs):
            yield NatTransData(F, G, dict(choice), iso=iso)
            return
        o = objs[i]
        for h in cands(o):
            counter[0] += 1
            if counter[0] > cap:
                raise SizeCapExceeded("natural transformation search passed the cap",
                                      {"bound": cap})
            choice[o] = h
            good = True
            for m, a, b in checks[i]:
                if d.comp[(choice[a], G.mor(m))] != d.comp[(F.mor(m), choice[b])]:
                    good = False
                    break
            if good:
                yield from rec(i + 1)
            del choice[o]

    yield from rec(0)


def find_nat_iso(F, G):
    return find_nat_trans(F, G, iso=True)


# ---------------------------------------------------------------------------
# equivalence oracle


class EquivalenceReport:
    def __init__(self, faithful, full, essentially_surjective,
                 quasi_inverse=None, unit=None, counit=None):
        self.faithful = faithful
        self.full = full
        self.essentially_surjective = essentially_surjective
        self.quasi_inverse = quasi_inverse
        self.unit = unit
        self.counit = counit

    @property
    def ok(self):
        return (self.faithful is True and self.full is True
                and self.essentially_surjective is True)

    def __bool__(self):
        return self.ok

    def to_dict(self):
        return {"equivalence": self.ok, "faithful": self.faithful, "full": self.full,
                "essentially_surjective": self.essentially_surjective}


def _check_size(*cats):
    lim = current()
    for c in cats:
        if len(c.objects) > lim.max_objects or len(c.morphisms) > lim.max_morphisms:
            raise SizeCapExceeded(
                f"category with {len(c.objects)} objects / {len(c.morphisms)} morphisms "
                f"exceeds caps {lim.max_objects}/{lim.max_morphisms}",
                {"objects": len(c.objects), "morphisms": len(c.morphisms)})


def is_equivalence(F, quasi_inverse=True):
    """Decide faithful / full / essentially surjective by exhaustive search.

    When all three hold, a quasi-inverse is built from the first object
    choices and first counit isomorphisms in canonical order.
    """
    c, d = F.src, F.dst
    _check_size(c, d)
    faithful = full = True
    for a in c.objects:
        for b in c.objects:
            image = {}
            for m in c.hom(a, b):
                image.setdefault(F.mor(m), []).append(m)
            if faithful is True:
                for g, ms in sorted(image.items()):
                    if len(ms) > 1:
                        faithful = {"source": a, "target": b, "morphisms": ms[:2], "image": g}
                        break
            if full is True:
                for g in d.hom(F.obj(a), F.obj(b)):
                    if g not in image:
                        full = {"source": a, "target": b, "missing": g,
                                "hom_size": len(c.hom(a, b)),
                                "image_hom_size": len(d.hom(F.obj(a), F.obj(b)))}
                        break
    pick = {}
    ess = True
    exact = {}
    for x in c.objects:
        exact.setdefault(F.obj(x), x)
    for y in d.objects:
        if y in exact:
            pick[y] = (exact[y], d.id(y))
            continue
        for x in c.objects:
            isos = d.isos(F.obj(x), y)
            if isos:
                pick[y] = (x, isos[0])
                break
        else:
            ess = {"object": y}
            break
    rep = EquivalenceReport(faithful, full, ess)
    if rep.ok and quasi_inverse:
        _attach_quasi_inverse(F, pick, rep)
    return rep


def _attach_quasi_inverse(F, pick, rep):
    c, d = F.src, F.dst
    pre = {}
    for a in c.objects:
        for b in c.objects:
            for m in c.hom(a, b):
                pre[(a, b, F.mor(m))] = m
    on_obj = {y: pick[y][0] for y in d.objects}
    eps = {y: pick[y][1] for y in d.objects}
    on_mor = {}
    for u, y, z in d.morphisms:
        target = d.then(eps[y], u, d.inverse(eps[z]))
        on_mor[u] = pre[(on_obj[y], on_obj[z], target)]
    G = FunctorData(d, c, on_obj, on_mor)
    counit = NatTransData(compose_functors(G, F), identity_functor(d), eps, iso=True)
    unit_comps = {}
    for x in c.objects:
        y = F.obj(x)
        unit_comps[x] = pre[(x, on_obj[y], d.inverse(eps[y]))]
    unit = NatTransData(identity_functor(c), compose_functors(F, G), unit_comps, iso=True)
    rep.quasi_inverse, rep.unit, rep.counit = G, unit, counit


def iter_functors(c, d):
    """All functors ``c → d`` in lexicographic order of (object map, morphism map)."""
    cap = current().max_families
    counter = [0]
    objs = c.objects
    pos = {o: i for i, o in enumerate(objs)}
    nonid = [(m, a, b) for m, a, b in c.morphisms if m != c.id(a)]
    by_obj = [[] for _ in objs]
    for m, a, b in nonid:
        by_obj[max(pos[a], pos[b])].append((a, b))
    omap = {}

    def tick():
        counter[0] += 1
        if counter[0] > cap:
            raise SizeCapExceeded("functor enumeration passed the candidate cap", {"bound": cap})

    mors = [m for m, _, _ in c.morphisms]
    # composition constraints checked when the last of (f, g, g∘f) is assigned
    mpos = {m: i for i, m in enumerate(mors)}
    cons = [[] for _ in mors]
    for (f, g), h in c.comp.items():
        cons[max(mpos[f], mpos[g], mpos[h])].append((f, g, h))

    def rec_mor(i, mmap):
        if i == len(mors):
            yield FunctorData(c, d, dict(omap), dict(mmap))
            return
        m = mors[i]
        a, b = c.src(m), c.dst(m)
        cands = [d.id(omap[a])] if m == c.id(a) else d.hom(omap[a], omap[b])
        for g in cands:
            tick()
            mmap[m] = g
            if all(d.comp[(mmap[f], mmap[g2])] == mmap[h] for f, g2, h in cons[i]):
                yield from rec_mor(i + 1, mmap)
            del mmap[m]

    def rec_obj(i):
        if i == len(objs):
            yield from rec_mor(0, {})
            return
        for y in d.objects:
            tick()
            omap[objs[i]] = y
            if all(d.hom(omap[a], omap[b]) for a, b in by_obj[i]):
                yield from rec_obj(i + 1)
            del omap[objs[i]]

    yield from rec_obj(0)


def find_equivalence(c, d):
    """Canonically first functor ``c → d`` accepted by :func:`is_equivalence`."""
    _check_size(c, d)
    for F in iter_functors(c, d):
        if is_equivalence(F, quasi_inverse=False).ok:
            return F
    return None


class FunctorCategory(FinCat):
    """A functor category remembering the functor and transformation behind each id."""

    def __init__(self, objects, morphisms, identity, comp, functors, transformations):
        super().__init__(objects, morphisms, identity, comp)
        self.functors = functors
        self.transformations = transformations


def _width(n):
    return len(str(max(n - 1, 0)))


def functor_category(c, d):
    lim = current()
    _check_size(c, d)
    functors = list(iter_functors(c, d))
    if len(functors) > lim.max_objects:
        raise SizeCapExceeded("functor category has too many objects",
                              {"objects": len(functors), "bound": lim.max_objects})
    w = _width(len(functors))
    fid = [f"F{i:0{w}d}" for i in range(len(functors))]
    trans = []
    for i, F in enumerate(functors):
        for j, G in enumerate(functors):
            for alpha in iter_nat_trans(F, G):
                trans.append((i, j, alpha))
                if len(trans) > lim.max_morphisms:
                    raise SizeCapExceeded("functor category has too many morphisms",
                                          {"bound": lim.max_morphisms})
    w2 = _width(len(trans))
    tid = [f"t{k:0{w2}d}" for k in range(len(trans))]
    lookup = {(i, j, tuple(sorted(a.components.items()))): tid[k]
              for k, (i, j, a) in enumerate(trans)}
    identity = {}
    for i, F in enumerate(functors):
        identity[fid[i]] = lookup[(i, i, tuple(sorted(identity_nat(F).components.items())))]
    comp = {}
    by_src = {}
    for k, (i, j, a) in enumerate(trans):
        by_src.setdefault(i, []).append(k)
    for k, (i, j, a) in enumerate(trans):
        for k2 in by_src.get(j, []):
            _, l, b = trans[k2]
            ba = vertical_compose(b, a)
            comp[(tid[k], tid[k2])] = lookup[(i, l, tuple(sorted(ba.components.items())))]
    return FunctorCategory(fid, [(tid[k], fid[i], fid[j]) for k, (i, j, _) in enumerate(trans)],
                           identity, comp,
                           {fid[i]: F for i, F in enumerate(functors)},
                           {tid[k]: a for k, (_, _, a) in enumerate(trans)})


def product_category(cats):
    """Cartesian product; object ids are tuples joined with ``,``."""
    cats = list(cats)
    objs = list(itertools.product(*[c.objects for c in cats]))
    mors = list(itertools.product(*[c.morphisms for c in cats]))

    def oid(t):
        return "(" + ",".join(t) + ")"

    def mid(t):
        return "(" + ",".join(m for m, _, _ in t) + ")"

    morphisms = [(mid(t), oid(tuple(s for _, s, _ in t)), oid(tuple(d for _, _, d in t)))
                 for t in mors]
    identity = {oid(t): "(" + ",".join(c.id(o) for c, o in zip(cats, t)) + ")" for t in objs}
    comp = {}
    by_src = {}
    for t in mors:
        by_src.setdefault(tuple(s for _, s, _ in t), []).append(t)
    for t in mors:
        for u in by_src.get(tuple(d for _, _, d in t), []):
            comp[(mid(t), mid(u))] = "(" + ",".join(
                c.comp[(f[0], g[0])] for c, f, g in zip(cats, t, u)) + ")"
    return FinCat([oid(t) for t in objs], morphisms, identity, comp)
