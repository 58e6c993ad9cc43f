"""Stacks on finite stratified posets.

A stack on a poset ``X`` is a pseudofunctor on ``X`` viewed as a category,
covariant on ``≤``: the value at ``x`` plays the part of sections over the
smallest open set containing ``x``.  Pushforward along an inclusion
``S ⊆ X`` is descent over up-sets, ``(i_*C)(x) = 2lim_{s ∈ S, s ≥ x} C(s)``.
"""
import itertools

from strata.errors import InvalidData, NonMonotoneMap, NotUpClosed, UnknownIdentifier
from strata.fincat import FunctorData, is_equivalence, poset_category
from strata.pseudo import (Modification, PseudoFunctor, PseudoTransformation, descent_category,
                           induced_on_descent, induced_on_descent_2, mediator, projection,
                           validate_pseudofunctor)
from strata.report import Report


class StratPoset:
    """Finite poset with a monotone level map.

    ``leq`` may be any generating set of pairs; its reflexive-transitive
    closure is stored.
    """

    def __init__(self, elements, leq, level):
        self.elements = tuple(sorted(elements))
        rel = {(x, x) for x in self.elements} | {tuple(p) for p in leq}
        changed = True
        while changed:
            changed = False
            for (a, b), (c, d) in itertools.product(list(rel), repeat=2):
                if b == c and (a, d) not in rel:
                    rel.add((a, d))
                    changed = True
        self.leq = frozenset(rel)
        self.level = dict(level)
        self._cat = None

    def __repr__(self):
        return f"StratPoset({list(self.elements)})"

    def __eq__(self, other):
        return (isinstance(other, StratPoset) and self.elements == other.elements
                and self.leq == other.leq and self.level == other.level)

    def __hash__(self):
        return hash((self.elements, self.leq))

    @staticmethod
    def mor(x, y):
        return f"{x}<={y}"

    def le(self, x, y):
        return (x, y) in self.leq

    def category(self):
        if self._cat is None:
            self._cat = poset_category(self.elements, self.leq, self.mor)
        return self._cat

    def up(self, x, within=None):
        pool = self.elements if within is None else within
        return tuple(y for y in pool if (x, y) in self.leq)

    @property
    def levels(self):
        return sorted(set(self.level.values()))

    @property
    def top_level(self):
        return max(self.level.values()) if self.level else -1

    def stratum(self, k):
        return tuple(x for x in self.elements if self.level[x] == k)

    def sub(self, elements):
        keep = set(elements)
        return StratPoset([x for x in self.elements if x in keep],
                          [(a, b) for a, b in self.leq if a in keep and b in keep],
                          {x: self.level[x] for x in self.elements if x in keep})

    def is_up_closed(self, subset):
        s = set(subset)
        return all(y in s for x in s for y in self.up(x))


def validate_strat_poset(P):
    rep = Report()
    for x in P.elements:
        if x not in P.level:
            rep.add("level-missing", element=x)
    for a, b in sorted(P.leq):
        if a not in P.elements or b not in P.elements:
            rep.add("unknown-element", pair=[a, b])
        elif a != b and (b, a) in P.leq:
            rep.add("antisymmetry", pair=[a, b])
        elif a in P.level and b in P.level and P.level[a] > P.level[b]:
            rep.add("level-not-monotone", pair=[a, b])
    if rep.ok and P.elements:
        for k in range(0, P.top_level + 1):
            if not P.stratum(k):
                rep.add("empty-level", level=k)
    return rep


class PosetStack(PseudoFunctor):
    """A pseudofunctor whose shape is ``base.category()``."""

    def __init__(self, base, at, along, comp_iso=None, unit_iso=None):
        self.base = base
        super().__init__(base.category(), at, along, comp_iso, unit_iso)

    def value(self, x):
        return self.at[x]

    def transition(self, x, y):
        return self.along[self.base.mor(x, y)]


def validate_poset_stack(C):
    rep = validate_strat_poset(C.base)
    if rep.ok:
        rep.extend(validate_pseudofunctor(C))
    return rep


def stack_from_pseudofunctor(base, D):
    return PosetStack(base, D.at, D.along, D.comp_iso, D.unit_iso)


# ---------------------------------------------------------------------------
# pullback


def pullback_stack(f, source, C):
    """``(f⁻¹C)(x) = C(f(x))`` for a monotone ``f: source → C.base``."""
    Q = C.base
    for x in source.elements:
        if f.get(x) not in Q.elements:
            raise UnknownIdentifier(f"map has no valid image for {x!r}", {"element": x})
    for a, b in source.leq:
        if not Q.le(f[a], f[b]):
            raise NonMonotoneMap(f"{a}≤{b} is not preserved", {"pair": [a, b]})
    mor = Q.mor
    at = {x: C.at[f[x]] for x in source.elements}
    along = {source.mor(a, b): C.along[mor(f[a], f[b])] for a, b in source.leq}
    comp_iso = {}
    for a, b in source.leq:
        for b2, c in source.leq:
            if b == b2:
                comp_iso[(source.mor(a, b), source.mor(b, c))] = C.comp_iso[
                    (mor(f[a], f[b]), mor(f[b], f[c]))]
    unit_iso = {x: C.unit_iso[f[x]] for x in source.elements}
    return PosetStack(source, at, along, comp_iso, unit_iso)


def restrict_stack(C, elements):
    """Pullback along the inclusion of a sub-poset."""
    S = C.base.sub(elements)
    return pullback_stack({x: x for x in S.elements}, S, C)


def restrict_transformation(t, src, dst):
    """Restrict ``t`` to the base of the already-restricted stacks ``src``, ``dst``."""
    P = src.base
    comp = {x: t.component[x] for x in P.elements}
    square = {P.mor(a, b): t.square[P.mor(a, b)] for a, b in P.leq}
    return PseudoTransformation(src, dst, comp, square)


def restrict_modification(m, src, dst):
    return Modification(src, dst, {x: m.component[x] for x in src.src.base.elements})


# ---------------------------------------------------------------------------
# pushforward


class Pushforward(PosetStack):
    """``i_*C`` together with the sub-poset it came from."""

    def __init__(self, base, at, along, inner, sub):
        self.inner = inner
        self.sub_elements = tuple(sub)
        super().__init__(base, at, along)

    def up_diagram(self, x):
        return self.inner.restrict(self.base.up(x, self.sub_elements))


def _restriction(big, small):
    """Restriction of families from a larger up-set descent to a smaller one."""
    bpos = big.obj_pos
    spos_objs = small.diagram.shape.objects
    smors = [m for m, _, _ in small.diagram.shape.morphisms]
    on_obj = {}
    for o, (xs, ps) in big.families.items():
        ys = tuple(xs[bpos[a]] for a in spos_objs)
        qs = tuple(ps[big.mor_pos[m]] for m in smors)
        on_obj[o] = small.lookup(ys, qs)
    on_mor = {}
    for m, s, d in big.morphisms:
        comps = tuple(big.mor_families[m][bpos[a]] for a in spos_objs)
        on_mor[m] = small.lookup_mor(on_obj[s], on_obj[d], comps)
    return FunctorData(big, small, on_obj, on_mor)


def pushforward_stack(X, sub, C):
    """``i_*C`` on ``X`` for ``C`` a stack on the full sub-poset ``sub``."""
    sub = tuple(x for x in X.elements if x in set(sub))
    if tuple(C.base.elements) != sub:
        raise InvalidData("stack base differs from the given sub-poset")
    at = {x: descent_category(C.restrict(X.up(x, sub))) for x in X.elements}
    along = {X.mor(a, b): _restriction(at[a], at[b]) for a, b in X.leq}
    return Pushforward(X, at, along, C, sub)


def push_transformation(t, src_push, dst_push):
    """``i_*t: i_*C ⇒ i_*D`` between two pushforwards along the same inclusion."""
    X = src_push.base
    comp = {}
    for x in X.elements:
        up = X.up(x, src_push.sub_elements)
        local = _restrict_to(t, up, src_push.inner, dst_push.inner)
        comp[x] = induced_on_descent(local, src_push.at[x], dst_push.at[x])
    square = {}
    for a, b in X.leq:
        E = dst_push.at[b]
        square[X.mor(a, b)] = {o: E.id(comp[b].obj(src_push.transition(a, b).obj(o)))
                               for o in src_push.at[a].objects}
    return PseudoTransformation(src_push, dst_push, comp, square)


def _restrict_to(t, elements, src, dst):
    Dsub, Esub = src.restrict(elements), dst.restrict(elements)
    shape = Dsub.shape
    return PseudoTransformation(Dsub, Esub, {a: t.component[a] for a in shape.objects},
                                {m: t.square[m] for m, _, _ in shape.morphisms})


def push_modification(m, src_t, dst_t):
    """``i_*m`` between ``src_t = i_*τ`` and ``dst_t = i_*υ``."""
    src_push, dst_push = src_t.src, src_t.dst
    X = src_push.base
    comp = {}
    for x in X.elements:
        up = X.up(x, src_push.sub_elements)
        lt = _restrict_to(m.src, up, src_push.inner, dst_push.inner)
        lu = _restrict_to(m.dst, up, src_push.inner, dst_push.inner)
        local = Modification(lt, lu, {a: m.component[a] for a in up})
        comp[x] = induced_on_descent_2(local, src_push.at[x], dst_push.at[x]).components
    return Modification(src_t, dst_t, comp)


# ---------------------------------------------------------------------------
# unit, counit, base change


def _cone_isos(G, x, up):
    """Leg isomorphisms ``G(s≤s')∘G(x≤s) ⇒ G(x≤s')`` for the unit cone at ``x``."""
    X = G.base
    isos = {}
    for s in up:
        for s2 in up:
            if s != s2 and X.le(s, s2):
                cat = G.at[s2]
                raw = G.comp_iso[(X.mor(x, s), X.mor(s, s2))]
                comps = raw.components if hasattr(raw, "components") else raw
                isos[X.mor(s, s2)] = {y: cat.inverse(f) for y, f in comps.items()}
    return isos


def unit_eta(G, sub, push=None):
    """``η: G ⇒ i_* i⁻¹ G`` for the inclusion of ``sub`` into ``G.base``."""
    X = G.base
    push = push or pushforward_stack(X, sub, restrict_stack(G, sub))
    comp = {}
    for x in X.elements:
        up = X.up(x, push.sub_elements)
        D = push.up_diagram(x)
        legs = {s: G.transition(x, s) for s in up}
        comp[x] = mediator(D, G.at[x], legs, _cone_isos(G, x, up), desc=push.at[x])
    square = {}
    for a, b in X.leq:
        target = push.at[b]
        up = X.up(b, push.sub_elements)
        rel = push.transition(a, b)
        sq = {}
        for y in G.at[a].objects:
            src_o = rel.obj(comp[a].obj(y))
            dst_o = comp[b].obj(G.transition(a, b).obj(y))
            fam = tuple(G.comp_at(X.mor(a, b), X.mor(b, s), y) for s in up)
            found = target.lookup_mor(src_o, dst_o, fam)
            if found is None:
                raise InvalidData("unit square does not lift to descent", {"pair": [a, b]})
            sq[y] = found
        square[X.mor(a, b)] = sq
    return PseudoTransformation(G, push, comp, square)


def eta_naturality(T, eta_src, eta_dst, push_T):
    """Modification ``(i_*i⁻¹T)∘η ⇒ η'∘T`` for ``T: G ⇒ G'``.

    ``push_T`` is ``i_*i⁻¹T`` between the two pushforwards.
    """
    from strata.pseudo import compose_transformations
    G, G2 = T.src, T.dst
    X = G.base
    push2 = eta_dst.dst
    left = compose_transformations(eta_src, push_T)
    right = compose_transformations(T, eta_dst)
    comp = {}
    for x in X.elements:
        up = X.up(x, push2.sub_elements)
        target = push2.at[x]
        c = {}
        for y in G.at[x].objects:
            fam = []
            for s in up:
                cat = G2.at[s]
                fam.append(cat.inverse(T.sq(X.mor(x, s), y)))
            found = target.lookup_mor(left.component[x].obj(y), right.component[x].obj(y),
                                      tuple(fam))
            if found is None:
                raise InvalidData("unit naturality does not lift to descent", {"element": x})
            c[y] = found
        comp[x] = c
    return Modification(left, right, comp)


def counit_eps(C, X, push=None):
    """``ε: i⁻¹ i_* C ⇒ C`` on the base of ``C``; components are projections."""
    S = C.base
    push = push or pushforward_stack(X, S.elements, C)
    src = restrict_stack(push, S.elements)
    comp = {}
    for s in S.elements:
        comp[s] = projection(push.at[s], s)
    square = {}
    for a, b in S.leq:
        dc = push.at[a]
        m = S.mor(a, b)
        square[m] = {o: dc.phi(o, m) for o in dc.objects}
    return PseudoTransformation(src, C, comp, square)


def check_base_change(X, V, F, C):
    """Certify ``i_V⁻¹ i_{F*} C ≃ j_{F*} j_V⁻¹ C`` pointwise on ``V``."""
    if not X.is_up_closed(V):
        raise NotUpClosed("V is not up-closed", {"V": sorted(V)})
    V = tuple(x for x in X.elements if x in set(V))
    FV = tuple(x for x in F if x in set(V))
    left = restrict_stack(pushforward_stack(X, F, C), V)
    right = pushforward_stack(X.sub(V), FV, restrict_stack(C, FV))
    rep = Report()
    comparisons = {}
    for v in V:
        up = X.up(v, FV)
        D = right.up_diagram(v)
        big = left.at[v]
        legs = {s: projection(big, s) for s in up}
        isos = {}
        for a, b in X.leq:
            if a in up and b in up and a != b:
                m = X.mor(a, b)
                isos[m] = {o: big.phi(o, m) for o in big.objects}
        G = mediator(D, big, legs, isos, desc=right.at[v])
        comparisons[v] = G
        eq = is_equivalence(G, quasi_inverse=False)
        if not eq.ok:
            rep.add("not-equivalence", element=v, detail=eq.to_dict())
    rep.info["comparisons"] = len(comparisons)
    return rep


def global_sections_stack(C):
    return descent_category(C)

