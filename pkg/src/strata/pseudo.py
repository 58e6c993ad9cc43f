"""Pseudofunctors into finite categories and their descent categories.

Orientation conventions (fixed once, used everywhere):

* ``comp_iso[(s, t)]`` for ``s: a→b``, ``t: b→c`` is ``D(t∘s) ⇒ D(t)∘D(s)``;
* ``unit_iso[a]`` is ``Id ⇒ D(id_a)``;
* a transformation ``τ: D ⇒ E`` has squares ``E(s)∘τ_a ⇒ τ_b∘D(s)``;
* a descent object is ``(x_a, φ_s: D(s)(x_a) → x_b)``.
"""
import collections
import concurrent.futures
import hashlib

from strata.errors import ConeIncoherent, InvalidData, SizeCapExceeded, UnknownIdentifier
from strata.fincat import (FinCat, FunctorData, NatTransData, compose_functors, identity_functor,
                           identity_nat, validate_category, validate_functor, validate_nat_trans,
                           _width)
from strata.limits import current
from strata.report import Report


def full_subcategory(c, objects):
    keep = set(objects)
    mors = [(m, s, d) for m, s, d in c.morphisms if s in keep and d in keep]
    ids = {m for m, _, _ in mors}
    comp = {k: v for k, v in c.comp.items() if k[0] in ids and k[1] in ids}
    return FinCat([o for o in c.objects if o in keep], mors,
                  {o: c.id(o) for o in c.objects if o in keep}, comp)


def _comps(alpha):
    return alpha.components if isinstance(alpha, NatTransData) else alpha


class PseudoFunctor:
    """A pseudofunctor ``shape → Cat`` with explicit coherence isomorphisms.

    Missing ``comp_iso``/``unit_iso`` entries are filled with identities, which
    requires the corresponding functors to agree on the nose.
    """

    def __init__(self, shape, at, along, comp_iso=None, unit_iso=None):
        self.shape = shape
        self.at = dict(at)
        self.along = dict(along)
        for a in shape.objects:
            if a not in self.at:
                raise UnknownIdentifier(f"no category at shape object {a!r}", {"object": a})
        for m, _, _ in shape.morphisms:
            if m not in self.along:
                raise UnknownIdentifier(f"no functor along shape morphism {m!r}", {"morphism": m})
        self.comp_iso = dict(comp_iso or {})
        self.unit_iso = dict(unit_iso or {})
        for a in shape.objects:
            if a not in self.unit_iso:
                F = self.along[shape.id(a)]
                if F != identity_functor(self.at[a]):
                    raise InvalidData(f"unit isomorphism at {a!r} missing and D(id) is not Id",
                                      {"object": a})
                self.unit_iso[a] = identity_nat(F)
        for (s, t), _ in shape.comp.items():
            if (s, t) not in self.comp_iso:
                st = shape.comp[(s, t)]
                composite = compose_functors(self.along[s], self.along[t])
                if composite != self.along[st]:
                    raise InvalidData(f"comparison for ({s!r}, {t!r}) missing and the functors differ",
                                      {"pair": [s, t]})
                self.comp_iso[(s, t)] = identity_nat(composite)
        self._fp = None

    def fingerprint(self):
        if self._fp is None:
            h = hashlib.blake2b(digest_size=16)
            h.update(self.shape.fingerprint().encode())
            for a in self.shape.objects:
                h.update(self.at[a].fingerprint().encode())
                h.update(repr(sorted(_comps(self.unit_iso[a]).items())).encode())
            for m, _, _ in self.shape.morphisms:
                F = self.along[m]
                h.update(repr((sorted(F.on_obj.items()), sorted(F.on_mor.items()))).encode())
            for k in sorted(self.comp_iso):
                h.update(repr((k, sorted(_comps(self.comp_iso[k]).items()))).encode())
            self._fp = h.hexdigest()
        return self._fp

    def F(self, s):
        return self.along[s]

    def comp_at(self, s, t, x):
        return _comps(self.comp_iso[(s, t)])[x]

    def unit_at(self, a, x):
        return _comps(self.unit_iso[a])[x]

    def restrict(self, objects):
        """Restriction to the full subcategory of the shape on ``objects``."""
        sub = full_subcategory(self.shape, objects)
        ids = {m for m, _, _ in sub.morphisms}
        return PseudoFunctor(sub, {a: self.at[a] for a in sub.objects},
                             {m: self.along[m] for m in ids},
                             {k: v for k, v in self.comp_iso.items() if k[0] in ids and k[1] in ids},
                             {a: self.unit_iso[a] for a in sub.objects})


def strict_pseudofunctor(shape, at, along):
    return PseudoFunctor(shape, at, along)


def constant_pseudofunctor(shape, c):
    I = identity_functor(c)
    return PseudoFunctor(shape, {a: c for a in shape.objects}, {m: I for m, _, _ in shape.morphisms})


def validate_pseudofunctor(D):
    """Check values, functors, coherence isomorphisms and their coherence."""
    rep = Report()
    shape = D.shape
    rep.extend(validate_category(shape), where="shape")
    for a in shape.objects:
        rep.extend(validate_category(D.at[a]), where="value", shape_object=a)
    if not rep.ok:
        return rep
    for m, a, b in shape.morphisms:
        F = D.along[m]
        if F.src != D.at[a] or F.dst != D.at[b]:
            rep.add("functor-endpoints", shape_morphism=m)
            continue
        rep.extend(validate_functor(F), shape_morphism=m)
    if not rep.ok:
        return rep
    for (s, t), alpha in sorted(D.comp_iso.items()):
        comps = _comps(alpha)
        c = D.at[shape.dst(t)]
        st = shape.comp[(s, t)]
        for x in D.at[shape.src(s)].objects:
            m = comps.get(x)
            want_src = D.along[st].obj(x)
            want_dst = D.along[t].obj(D.along[s].obj(x))
            if m is None or m not in c._src or c.src(m) != want_src or c.dst(m) != want_dst:
                rep.add("comp-iso-endpoint", pair=[s, t], object=x)
            elif not c.is_iso(m):
                rep.add("comp-iso-not-invertible", pair=[s, t], object=x)
        if rep.ok:
            composite = compose_functors(D.along[s], D.along[t])
            nat = validate_nat_trans(NatTransData(D.along[st], composite, comps))
            rep.extend(nat, pair=[s, t])
    for a in shape.objects:
        comps = _comps(D.unit_iso[a])
        c = D.at[a]
        for x in c.objects:
            m = comps.get(x)
            if m is None or m not in c._src or c.src(m) != x or c.dst(m) != D.along[shape.id(a)].obj(x):
                rep.add("unit-iso-endpoint", shape_object=a, object=x)
            elif not c.is_iso(m):
                rep.add("unit-iso-not-invertible", shape_object=a, object=x)
        if rep.ok:
            rep.extend(validate_nat_trans(NatTransData(identity_functor(c), D.along[shape.id(a)],
                                                       comps)), shape_object=a)
    if not rep.ok:
        return rep
    _check_coherence(D, rep)
    return rep


def _check_coherence(D, rep):
    shape = D.shape
    outs = collections.defaultdict(list)
    for m, a, _ in shape.morphisms:
        outs[a].append(m)
    for s, a, b in shape.morphisms:
        Ds = D.along[s]
        for t in outs[b]:
            c = shape.dst(t)
            ts = shape.comp[(s, t)]
            for u in outs[c]:
                d = shape.dst(u)
                ut = shape.comp[(t, u)]
                Du = D.along[u]
                cat = D.at[d]
                for x in D.at[a].objects:
                    p1 = cat.then(D.comp_at(ts, u, x), Du.mor(D.comp_at(s, t, x)))
                    p2 = cat.then(D.comp_at(s, ut, x), D.comp_at(t, u, Ds.obj(x)))
                    if p1 != p2:
                        rep.add("triple-coherence", triple=[s, t, u], object=x)
        ida, idb = shape.id(a), shape.id(b)
        for x in D.at[a].objects:
            if D.comp_at(ida, s, x) != Ds.mor(D.unit_at(a, x)):
                rep.add("unit-coherence", side="source", morphism=s, object=x)
            if D.comp_at(s, idb, x) != D.unit_at(b, Ds.obj(x)):
                rep.add("unit-coherence", side="target", morphism=s, object=x)


# ---------------------------------------------------------------------------
# transformations and modifications


class PseudoTransformation:
    """Components ``τ_a: D(a) → E(a)`` and squares ``E(s)∘τ_a ⇒ τ_b∘D(s)``."""

    def __init__(self, src, dst, component, square):
        self.src = src
        self.dst = dst
        self.component = dict(component)
        self.square = dict(square)

    def sq(self, s, x):
        return _comps(self.square[s])[x]


class Modification:
    """Per shape object a transformation ``τ_a ⇒ υ_a``."""

    def __init__(self, src, dst, component):
        self.src = src
        self.dst = dst
        self.component = dict(component)

    def at(self, a, x):
        return _comps(self.component[a])[x]


def identity_transformation(D):
    shape = D.shape
    comp = {a: identity_functor(D.at[a]) for a in shape.objects}
    square = {}
    for s, a, b in shape.morphisms:
        F = D.along[s]
        square[s] = {x: D.at[b].id(F.obj(x)) for x in D.at[a].objects}
    return PseudoTransformation(D, D, comp, square)


def compose_transformations(t, u):
    """Vertical composite ``u∘t`` of ``t: D ⇒ E`` and ``u: E ⇒ F``."""
    shape = t.src.shape
    comp = {a: compose_functors(t.component[a], u.component[a]) for a in shape.objects}
    square = {}
    for s, a, b in shape.morphisms:
        cat = u.dst.at[b]
        ub = u.component[b]
        square[s] = {x: cat.then(u.sq(s, t.component[a].obj(x)), ub.mor(t.sq(s, x)))
                     for x in t.src.at[a].objects}
    return PseudoTransformation(t.src, u.dst, comp, square)


def identity_modification(t):
    return Modification(t, t, {a: identity_nat(F) for a, F in t.component.items()})


def compose_modifications(m, n):
    """Vertical composite: ``m: τ ⇛ υ`` then ``n: υ ⇛ ω``."""
    comp = {}
    for a, F in m.src.component.items():
        cat = F.dst
        comp[a] = {x: cat.comp[(m.at(a, x), n.at(a, x))] for x in F.src.objects}
    return Modification(m.src, n.dst, comp)


def validate_pseudotransformation(t):
    rep = Report()
    D, E = t.src, t.dst
    shape = D.shape
    for a in shape.objects:
        F = t.component[a]
        if F.src != D.at[a] or F.dst != E.at[a]:
            rep.add("component-endpoints", shape_object=a)
        else:
            rep.extend(validate_functor(F), shape_object=a)
    if not rep.ok:
        return rep
    for s, a, b in shape.morphisms:
        cat = E.at[b]
        sq = _comps(t.square[s])
        for x in D.at[a].objects:
            m = sq.get(x)
            if (m is None or m not in cat._src
                    or cat.src(m) != E.along[s].obj(t.component[a].obj(x))
                    or cat.dst(m) != t.component[b].obj(D.along[s].obj(x))):
                rep.add("square-endpoint", shape_morphism=s, object=x)
            elif not cat.is_iso(m):
                rep.add("square-not-invertible", shape_morphism=s, object=x)
        if rep.ok:
            nat = NatTransData(compose_functors(t.component[a], E.along[s]),
                               compose_functors(D.along[s], t.component[b]), sq)
            rep.extend(validate_nat_trans(nat), shape_morphism=s)
    if not rep.ok:
        return rep
    for (s, u), _ in sorted(shape.comp.items()):
        a, b, c = shape.src(s), shape.dst(s), shape.dst(u)
        us = shape.comp[(s, u)]
        cat = E.at[c]
        ta, tc = t.component[a], t.component[c]
        for x in D.at[a].objects:
            lhs = cat.then(E.comp_at(s, u, ta.obj(x)), E.along[u].mor(t.sq(s, x)),
                           t.sq(u, D.along[s].obj(x)))
            rhs = cat.then(t.sq(us, x), tc.mor(D.comp_at(s, u, x)))
            if lhs != rhs:
                rep.add("square-coherence", pair=[s, u], object=x)
    for a in shape.objects:
        cat = E.at[a]
        ta = t.component[a]
        for x in D.at[a].objects:
            if cat.then(E.unit_at(a, ta.obj(x)), t.sq(shape.id(a), x)) != ta.mor(D.unit_at(a, x)):
                rep.add("square-unit", shape_object=a, object=x)
    return rep


def validate_modification(m):
    rep = Report()
    t, u = m.src, m.dst
    D, E = t.src, t.dst
    for a in D.shape.objects:
        rep.extend(validate_nat_trans(NatTransData(t.component[a], u.component[a],
                                                   _comps(m.component[a]))), shape_object=a)
    if not rep.ok:
        return rep
    for s, a, b in D.shape.morphisms:
        cat = E.at[b]
        for x in D.at[a].objects:
            lhs = cat.then(E.along[s].mor(m.at(a, x)), u.sq(s, x))
            rhs = cat.then(t.sq(s, x), m.at(b, D.along[s].obj(x)))
            if lhs != rhs:
                rep.add("modification-square", shape_morphism=s, object=x)
    return rep


# ---------------------------------------------------------------------------
# descent categories


class DescentCat(FinCat):
    """Descent category of a pseudofunctor, with the family behind every id.

    ``families[obj] = (xs, phis)`` lists ``x_a`` in shape-object order and
    ``φ_s`` in shape-morphism order; ``mor_families[mor]`` lists ``m_a``.
    """

    def __init__(self, diagram, families, mor_families, objects, morphisms, identity, comp):
        super().__init__(objects, morphisms, identity, comp)
        self.diagram = diagram
        self.families = families
        self.mor_families = mor_families
        self.family_index = {v: k for k, v in families.items()}
        self.mor_index = {(s, d, v): k for (k, s, d), v in
                          ((m, mor_families[m[0]]) for m in self.morphisms)}
        shape = diagram.shape
        self.obj_pos = {a: i for i, a in enumerate(shape.objects)}
        self.mor_pos = {m: i for i, (m, _, _) in enumerate(shape.morphisms)}

    def x(self, obj, a):
        return self.families[obj][0][self.obj_pos[a]]

    def phi(self, obj, s):
        return self.families[obj][1][self.mor_pos[s]]

    def m(self, mor, a):
        return self.mor_families[mor][self.obj_pos[a]]

    def lookup(self, xs, phis):
        return self.family_index.get((tuple(xs), tuple(phis)))

    def lookup_mor(self, src, dst, comps):
        return self.mor_index.get((src, dst, tuple(comps)))

    def object_from_generators(self, xs, gen_phis):
        """Complete φ from values on a generating set by pasting; return the id.

        ``xs`` maps shape objects to objects, ``gen_phis`` maps some shape
        morphisms to arrows; identities come from the unit isomorphisms and
        every other morphism from a factorization through assigned ones.
        """
        D = self.diagram
        shape = D.shape
        phis = dict(gen_phis)
        for a in shape.objects:
            i = shape.id(a)
            if i not in phis:
                phis[i] = D.at[a].inverse(D.unit_at(a, xs[a]))
        pending = [m for m, _, _ in shape.morphisms if m not in phis]
        while pending:
            progress = False
            for u in list(pending):
                for (s, t), v in shape.comp.items():
                    if v == u and s in phis and t in phis and s != shape.id(shape.src(s)):
                        a = shape.src(s)
                        cat = D.at[shape.dst(t)]
                        phis[u] = cat.then(D.comp_at(s, t, xs[a]), D.along[t].mor(phis[s]), phis[t])
                        pending.remove(u)
                        progress = True
                        break
            if not progress:
                raise InvalidData("generators do not determine every φ", {"missing": pending})
        key_x = tuple(xs[a] for a in shape.objects)
        key_p = tuple(phis[m] for m, _, _ in shape.morphisms)
        found = self.lookup(key_x, key_p)
        if found is None:
            raise InvalidData("completed family violates the descent conditions")
        return found


def validate_descent_object(D, xs, phis):
    """Independent post-hoc check of the unit and cocycle conditions."""
    rep = Report()
    shape = D.shape
    for s, a, b in shape.morphisms:
        cat = D.at[b]
        m = phis[s]
        if (m not in cat._src or cat.src(m) != D.along[s].obj(xs[a]) or cat.dst(m) != xs[b]
                or not cat.is_iso(m)):
            rep.add("phi-endpoint", shape_morphism=s)
    if not rep.ok:
        return rep
    for a in shape.objects:
        if D.at[a].then(D.unit_at(a, xs[a]), phis[shape.id(a)]) != D.at[a].id(xs[a]):
            rep.add("unit", shape_object=a)
    for (s, t), u in sorted(shape.comp.items()):
        a, c = shape.src(s), shape.dst(t)
        cat = D.at[c]
        if phis[u] != cat.then(D.comp_at(s, t, xs[a]), D.along[t].mor(phis[s]), phis[t]):
            rep.add("cocycle", pair=[s, t])
    return rep


_cache = collections.OrderedDict()
_CACHE_SIZE = 2048


def descent_category(D):
    """All descent families of ``D`` with their morphisms, in canonical order."""
    key = D.fingerprint()
    hit = _cache.get(key)
    lim = current()
    if hit is not None:
        _cache.move_to_end(key)
        if (len(hit.objects) <= lim.max_objects and len(hit.morphisms) <= lim.max_morphisms
                and hit.candidates <= lim.max_families):
            return hit
    result = _build_descent(D, lim)
    _cache[key] = result
    if len(_cache) > _CACHE_SIZE:
        _cache.popitem(last=False)
    return result


def _plan(D):
    """Search steps: each shape object, then its identity and new morphisms."""
    shape = D.shape
    objs = shape.objects
    pos = {a: i for i, a in enumerate(objs)}
    step_mors = [[] for _ in objs]
    for m, a, b in shape.morphisms:
        if m != shape.id(a):
            step_mors[max(pos[a], pos[b])].append(m)
    steps = []
    order = []
    for i, a in enumerate(objs):
        steps.append(("obj", a, None))
        for m in [shape.id(a)] + step_mors[i]:
            steps.append(("mor", m, len(order)))
            order.append(m)
    where = {m: k for k, m in enumerate(order)}
    checks = [[] for _ in order]
    forced = [[] for _ in order]
    for (s, t), u in sorted(shape.comp.items()):
        checks[max(where[s], where[t], where[u])].append((s, t, u))
        if where[s] < where[u] and where[t] < where[u]:
            forced[where[u]].append((s, t))
    return objs, steps, checks, forced


def _enumerate_families(D, prefix_choices, cap):
    """Depth-first search; ``prefix_choices`` restricts the first object."""
    shape = D.shape
    objs, steps, checks, forced = _plan(D)
    xs = {}
    phis = {}
    out = []
    count = [0]

    def ok_checks(k):
        for s, t, u in checks[k]:
            a = shape.src(s)
            cat = D.at[shape.dst(t)]
            if phis[u] != cat.then(D.comp_at(s, t, xs[a]), D.along[t].mor(phis[s]), phis[t]):
                return False
        return True

    def tick():
        count[0] += 1
        if count[0] > cap:
            raise SizeCapExceeded("descent enumeration passed the candidate cap",
                                  {"bound": cap, "stage": "families"})

    def rec(i):
        if i == len(steps):
            out.append((tuple(xs[a] for a in objs), tuple(phis[m] for m, _, _ in shape.morphisms)))
            return
        kind, name, k = steps[i]
        if kind == "obj":
            cands = D.at[name].objects
            if i == 0 and prefix_choices is not None:
                cands = prefix_choices
            for x in cands:
                tick()
                xs[name] = x
                rec(i + 1)
            xs.pop(name, None)
            return
        u = name
        a, b = shape.src(u), shape.dst(u)
        cat = D.at[b]
        if u == shape.id(a):
            cands = (cat.inverse(D.unit_at(a, xs[a])),)
        elif forced[k]:
            s, t = forced[k][0]
            cands = (cat.then(D.comp_at(s, t, xs[a]), D.along[t].mor(phis[s]), phis[t]),)
        else:
            cands = cat.isos(D.along[u].obj(xs[a]), xs[b])
        for f in cands:
            tick()
            phis[u] = f
            if ok_checks(k):
                rec(i + 1)
        phis.pop(u, None)

    rec(0)
    return out, count[0]


def _build_descent(D, lim):
    shape = D.shape
    cap = lim.max_families
    if lim.workers > 1 and shape.objects and len(D.at[shape.objects[0]].objects) > 1:
        first = D.at[shape.objects[0]].objects
        with concurrent.futures.ThreadPoolExecutor(max_workers=lim.workers) as pool:
            parts = list(pool.map(lambda x: _guarded(D, (x,), cap), first))
        total = sum(n for _, n, _ in parts)
        errs = [e for _, _, e in parts if e is not None]
        if errs or total > cap:
            raise SizeCapExceeded("descent enumeration passed the candidate cap",
                                  {"bound": cap, "stage": "families"})
        fams = [f for p, _, _ in parts for f in p]
    else:
        fams, total = _enumerate_families(D, None, cap)
    opos = [{o: i for i, o in enumerate(D.at[a].objects)} for a in shape.objects]
    mpos = [{m: i for i, (m, _, _) in enumerate(D.at[b].morphisms)} for _, _, b in shape.morphisms]

    def sort_key(fam):
        xs, ps = fam
        return (tuple(opos[i][x] for i, x in enumerate(xs)),
                tuple(mpos[i][p] for i, p in enumerate(ps)))

    fams.sort(key=sort_key)
    if len(fams) > lim.max_objects:
        raise SizeCapExceeded(f"descent category has {len(fams)} objects",
                              {"objects": len(fams), "bound": lim.max_objects, "stage": "objects"})
    w = _width(len(fams))
    ids = [f"x{i:0{w}d}" for i in range(len(fams))]
    families = dict(zip(ids, fams))
    mors = _descent_morphisms(D, ids, families, lim)
    w2 = _width(len(mors))
    mids = [f"m{i:0{w2}d}" for i in range(len(mors))]
    mor_families = {mid: comps for mid, (_, _, comps) in zip(mids, mors)}
    index = {(s, d, comps): mid for mid, (s, d, comps) in zip(mids, mors)}
    objs = shape.objects
    identity = {}
    for oid, (xs, _) in families.items():
        identity[oid] = index[(oid, oid, tuple(D.at[a].id(x) for a, x in zip(objs, xs)))]
    comp = {}
    by_src = collections.defaultdict(list)
    for mid, (s, d, comps) in zip(mids, mors):
        by_src[s].append((mid, d, comps))
    cats = [D.at[a] for a in objs]
    for mid, (s, d, comps) in zip(mids, mors):
        for mid2, e, comps2 in by_src[d]:
            comp[(mid, mid2)] = index[(s, e, tuple(c.comp[(f, g)] for c, f, g in
                                                   zip(cats, comps, comps2)))]
    out = DescentCat(D, families, mor_families, ids,
                     [(mid, s, d) for mid, (s, d, _) in zip(mids, mors)], identity, comp)
    # a cached result is reused only under a family cap it would also pass
    out.candidates = total
    return out


def _guarded(D, prefix, cap):
    try:
        fams, n = _enumerate_families(D, prefix, cap)
        return fams, n, None
    except SizeCapExceeded as e:
        return [], cap + 1, e


def _descent_morphisms(D, ids, families, lim):
    shape = D.shape
    objs = shape.objects
    pos = {a: i for i, a in enumerate(objs)}
    checks = [[] for _ in objs]
    for s, a, b in shape.morphisms:
        if s != shape.id(a):
            checks[max(pos[a], pos[b])].append((s, pos[a], pos[b]))
    mpos = {m: i for i, (m, _, _) in enumerate(shape.morphisms)}
    out = []
    cap = lim.max_morphisms
    for src in ids:
        xs, ps = families[src]
        for dst in ids:
            ys, qs = families[dst]
            homs = [D.at[a].hom(xs[i], ys[i]) for i, a in enumerate(objs)]
            if not all(homs):
                continue
            choice = [None] * len(objs)

            def rec(i):
                if i == len(objs):
                    out.append((src, dst, tuple(choice)))
                    if len(out) > cap:
                        raise SizeCapExceeded("descent category has too many morphisms",
                                              {"bound": cap, "stage": "morphisms"})
                    return
                for f in homs[i]:
                    choice[i] = f
                    good = True
                    for s, ia, ib in checks[i]:
                        cat = D.at[objs[ib]]
                        j = mpos[s]
                        if (cat.then(D.along[s].mor(choice[ia]), qs[j])
                                != cat.then(ps[j], choice[ib])):
                            good = False
                            break
                    if good:
                        rec(i + 1)

            rec(0)
    return out


def descent_object_count(D):
    return len(descent_category(D).objects)


# ---------------------------------------------------------------------------
# projections, induced functors, mediators


def projection(dc, a):
    """``π_a``: the ``a``-component of families."""
    D = dc.diagram
    if a not in dc.obj_pos:
        raise UnknownIdentifier(f"unknown shape object {a!r}", {"object": a})
    i = dc.obj_pos[a]
    return FunctorData(dc, D.at[a], {o: f[0][i] for o, f in dc.families.items()},
                       {m: c[i] for m, c in dc.mor_families.items()})


def projection_iso(dc, s):
    """``p_s: D(s)∘π_a ⇒ π_b``, components read off the stored φ_s."""
    D = dc.diagram
    shape = D.shape
    a, b = shape.src(s), shape.dst(s)
    j = dc.mor_pos[s]
    return NatTransData(compose_functors(projection(dc, a), D.along[s]), projection(dc, b),
                        {o: f[1][j] for o, f in dc.families.items()}, iso=True)


def descent_projection(D, a):
    dc = descent_category(D)
    pi = projection(dc, a)
    ps = {s: projection_iso(dc, s) for s, src, _ in D.shape.morphisms if src == a}
    return pi, ps


def induced_on_descent(t, src_desc=None, dst_desc=None):
    """Functor between descent categories induced by ``t: D ⇒ E``."""
    D, E = t.src, t.dst
    A = src_desc or descent_category(D)
    B = dst_desc or descent_category(E)
    shape = D.shape
    objs = shape.objects
    on_obj = {}
    for o, (xs, ps) in A.families.items():
        ys = tuple(t.component[a].obj(x) for a, x in zip(objs, xs))
        qs = []
        for (s, a, b), p in zip(shape.morphisms, ps):
            cat = E.at[b]
            qs.append(cat.then(t.sq(s, xs[A.obj_pos[a]]), t.component[b].mor(p)))
        found = B.lookup(ys, qs)
        if found is None:
            raise InvalidData("image family is not a descent object", {"object": o})
        on_obj[o] = found
    on_mor = {}
    for m, s, d in A.morphisms:
        comps = tuple(t.component[a].mor(f) for a, f in zip(objs, A.mor_families[m]))
        on_mor[m] = B.lookup_mor(on_obj[s], on_obj[d], comps)
        if on_mor[m] is None:
            raise InvalidData("image morphism family not found", {"morphism": m})
    return FunctorData(A, B, on_obj, on_mor)


def induced_on_descent_2(mod, src_desc=None, dst_desc=None):
    """Natural transformation between induced functors of ``τ`` and ``υ``."""
    t, u = mod.src, mod.dst
    Ft = induced_on_descent(t, src_desc, dst_desc)
    Fu = induced_on_descent(u, src_desc, dst_desc)
    A, B = Ft.src, Ft.dst
    objs = t.src.shape.objects
    comps = {}
    for o, (xs, _) in A.families.items():
        fam = tuple(mod.at(a, x) for a, x in zip(objs, xs))
        found = B.lookup_mor(Ft.obj(o), Fu.obj(o), fam)
        if found is None:
            raise InvalidData("modification components do not form a family", {"object": o})
        comps[o] = found
    return NatTransData(Ft, Fu, comps)


def complete_cone(D, legs, leg_isos):
    """Fill identity and composite leg isomorphisms from the generating ones.

    ``leg_isos[s]`` holds components of ``D(s)∘L_a ⇒ L_b``.  Identities take
    the inverse unit; composites take the first factorization through
    already-known morphisms.
    """
    shape = D.shape
    out = {s: _comps(v) for s, v in leg_isos.items()}
    for a in shape.objects:
        i = shape.id(a)
        if i not in out:
            cat = D.at[a]
            L = legs[a]
            out[i] = {x: cat.inverse(D.unit_at(a, L.obj(x))) for x in L.src.objects}
    pending = [m for m, _, _ in shape.morphisms if m not in out]
    while pending:
        progress = False
        for u in list(pending):
            for (s, t), v in sorted(shape.comp.items()):
                if v == u and s in out and t in out and s != shape.id(shape.src(s)) \
                        and t != shape.id(shape.dst(t)):
                    a = shape.src(s)
                    cat = D.at[shape.dst(t)]
                    L = legs[a]
                    Dt = D.along[t]
                    out[u] = {x: cat.then(D.comp_at(s, t, L.obj(x)), Dt.mor(out[s][x]), out[t][x])
                              for x in L.src.objects}
                    pending.remove(u)
                    progress = True
                    break
        if not progress:
            raise ConeIncoherent("leg isomorphisms do not determine every morphism",
                                 {"missing": pending})
    return out


def check_cone(D, legs, isos):
    """Report unit and cocycle failures of a completed cone."""
    rep = Report()
    shape = D.shape
    for a in shape.objects:
        cat = D.at[a]
        L = legs[a]
        for x in L.src.objects:
            if cat.then(D.unit_at(a, L.obj(x)), isos[shape.id(a)][x]) != cat.id(L.obj(x)):
                rep.add("cone-unit", shape_object=a, object=x)
    for (s, t), u in sorted(shape.comp.items()):
        a = shape.src(s)
        cat = D.at[shape.dst(t)]
        L = legs[a]
        for x in L.src.objects:
            if isos[u][x] != cat.then(D.comp_at(s, t, L.obj(x)), D.along[t].mor(isos[s][x]),
                                      isos[t][x]):
                rep.add("cone-cocycle", pair=[s, t], object=x)
                break
    return rep


def mediator(D, apex, legs, leg_isos, desc=None):
    """Functor ``apex → descent(D)`` with ``π_a ∘ mediator = legs[a]`` exactly."""
    dc = desc or descent_category(D)
    shape = D.shape
    for a in shape.objects:
        if a not in legs:
            raise UnknownIdentifier(f"no leg at {a!r}", {"object": a})
    isos = complete_cone(D, legs, leg_isos)
    rep = check_cone(D, legs, isos)
    if not rep.ok:
        raise ConeIncoherent("cone isomorphisms are not coherent", rep.first())
    objs = shape.objects
    on_obj = {}
    for x in apex.objects:
        xs = tuple(legs[a].obj(x) for a in objs)
        ps = tuple(isos[m][x] for m, _, _ in shape.morphisms)
        found = dc.lookup(xs, ps)
        if found is None:
            raise ConeIncoherent("cone does not produce a descent object", {"object": x})
        on_obj[x] = found
    on_mor = {}
    for f, s, d in apex.morphisms:
        found = dc.lookup_mor(on_obj[s], on_obj[d], tuple(legs[a].mor(f) for a in objs))
        if found is None:
            raise ConeIncoherent("leg isomorphisms are not natural", {"morphism": f})
        on_mor[f] = found
    return FunctorData(apex, dc, on_obj, on_mor)
