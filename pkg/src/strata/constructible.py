"""Constructible data on a stratified space given by link presentations.

Each stratum ``k`` has a presentation ``P_k``.  For ``k < l`` a link ``L_kl``
comes with a map ``incl: L_kl → P_l`` and a bundle ``L_kl → P_k``; the tube
functor is ``p_kl = p_* ∘ incl⁻¹`` on representations.  For ``k < l < m`` a
:class:`TripleDatum` reindexes the ``km`` link through the ``kl`` and ``lm``
links, which yields a comparison ``p_km ⇒ p_kl p_lm``.
"""
import dataclasses
import itertools

from strata.errors import EndpointMismatch, IllTypedWord, InvalidData, UnknownIdentifier
from strata.fincat import (FunctorData, NatTransData, compose_functors, find_nat_iso,
                           identity_functor, is_equivalence, validate_functor,
                           validate_nat_trans)
from strata.gluing import build_index_J, chain_id, chains, index_morphism, _canonical_mid
from strata.monodromy import (BundleDatum, Presentation2, PresentationMap,
                              _fiber_rep, _word_transport, global_sections_nu, pullback_rep,
                              pushforward_rep, validate_map, validate_transport, validate_two_rep, word)
from strata.pseudo import PseudoFunctor, descent_category
from strata.report import Report


@dataclasses.dataclass
class Link:
    presentation: Presentation2
    incl: PresentationMap
    bundle: BundleDatum


@dataclasses.dataclass
class TripleDatum:
    """Reindexing of the ``km`` link through ``kl`` then ``lm``.

    ``points[(y, z)]`` is a basepoint of ``L_km`` for ``y`` in ``L_kl`` and
    ``z`` in the ``lm`` fiber over ``incl(y)``; ``fiber_words[(y, δ)]`` and
    ``lift_words[(g, z)]`` are ``L_km`` words over the same base point, for
    ``δ`` a fiber generator of the ``lm`` bundle and ``g`` one of the ``kl``
    bundle.  Their images under ``incl_km`` must equal the ``incl_lm`` images
    of ``δ`` and of the transport path of ``z`` along ``incl_kl(g)``.
    """

    points: dict
    fiber_words: dict = dataclasses.field(default_factory=dict)
    lift_words: dict = dataclasses.field(default_factory=dict)


@dataclasses.dataclass
class TMStratDatum:
    strata: dict
    links: dict
    triples: dict = dataclasses.field(default_factory=dict)

    @property
    def n(self):
        return max(self.strata)


def _fiber_of(bd, y):
    for b, F in bd.fibers.items():
        if y in F.basepoints:
            return b, F
    raise UnknownIdentifier(f"{y!r} lies in no fiber", {"point": y})


def _fiber_gen(bd, g):
    for b, F in bd.fibers.items():
        if any(h == g for h, _, _ in F.gen1):
            return b, F
    return None, None


def validate_tm(t):
    rep = Report()
    levels = sorted(t.strata)
    if levels != list(range(len(levels))):
        rep.add("level-mismatch", levels=levels)
        return rep
    for k, l in itertools.combinations(levels, 2):
        link = t.links.get((k, l))
        if link is None:
            rep.add("missing-link", pair=[k, l])
            continue
        if link.incl.src is not link.presentation or link.incl.dst is not t.strata[l]:
            rep.add("ill-typed", pair=[k, l], reason="inclusion endpoints")
        rep.extend(validate_map(link.incl), pair=[k, l])
        bd = link.bundle
        if bd.total is not link.presentation or bd.base is not t.strata[k]:
            rep.add("ill-typed", pair=[k, l], reason="bundle endpoints")
            continue
        covered = sorted(y for F in bd.fibers.values() for y in F.basepoints)
        if covered != sorted(link.presentation.basepoints):
            rep.add("ill-typed", pair=[k, l], reason="fibers do not partition the link")
        for g, td in bd.transports.items():
            rep.extend(validate_transport(td, bd.total), pair=[k, l], generator=g)
    if not rep.ok:
        return rep
    for k, l, m in itertools.combinations(levels, 3):
        tr = t.triples.get((k, l, m))
        if tr is None:
            rep.add("missing-triple", triple=[k, l, m])
            continue
        rep.extend(_validate_triple(t, k, l, m, tr), triple=[k, l, m])
    return rep


def _validate_triple(t, k, l, m, tr):
    rep = Report()
    kl, lm, km = t.links[(k, l)], t.links[(l, m)], t.links[(k, m)]
    Pkm = km.presentation
    for y in kl.presentation.basepoints:
        b, _ = _fiber_of(kl.bundle, y)
        Fz = lm.bundle.fibers[kl.incl.on_points[y]]
        for z in Fz.basepoints:
            c = tr.points.get((y, z))
            if c is None or c not in Pkm.basepoints:
                rep.add("triple-point", point=[y, z], reason="missing")
                continue
            if _fiber_of(km.bundle, c)[0] != b or km.incl.on_points[c] != lm.incl.on_points[z]:
                rep.add("triple-point", point=[y, z], reason="not over the same points")
        for d, s, e in Fz.gen1:
            w = tr.fiber_words.get((y, d))
            rep.extend(_check_word(t, k, m, w, tr.points.get((y, s)), tr.points.get((y, e)),
                                   lm.incl.word(word(s, d)), b), fiber_word=[y, d])
    for g, y, y2 in kl.presentation.gen1:
        b, F = _fiber_gen(kl.bundle, g)
        if F is None:
            continue
        target = kl.incl.word(word(y, g))
        td = _word_transport(lm.bundle, target)
        Fz = lm.bundle.fibers[kl.incl.on_points[y]]
        for z in Fz.basepoints:
            w = tr.lift_words.get((g, z))
            rep.extend(_check_word(t, k, m, w, tr.points.get((y, z)),
                                   tr.points.get((y2, td.points[z])),
                                   lm.incl.word(td.paths[z]), b), lift_word=[g, z])
    return rep


def _check_word(t, k, m, w, start, end, image, b):
    rep = Report()
    km = t.links[(k, m)]
    if w is None:
        rep.add("triple-word", reason="missing")
        return rep
    try:
        here = km.presentation.word_end(w)
    except (IllTypedWord, UnknownIdentifier) as e:
        rep.add("triple-word", reason="ill-typed", **e.witness)
        return rep
    if w.start != start or here != end:
        rep.add("triple-word", reason="wrong endpoints")
    elif any(_fiber_gen(km.bundle, g)[0] != b for g, _ in w.letters):
        rep.add("triple-word", reason="leaves the fiber")
    elif km.incl.word(w) != image:
        rep.add("triple-word", reason="image differs")
    return rep


# ---------------------------------------------------------------------------
# morphisms of representations


class RepMorphism:
    """Functors per basepoint and squares ``β'(g)∘Φ_a ⇒ Φ_b∘β(g)`` per generator."""

    def __init__(self, src, dst, components, squares=None):
        self.src = src
        self.dst = dst
        self.components = dict(components)
        self.squares = {g: dict(v) for g, v in (squares or {}).items()}

    def word_square(self, w, x):
        """Square of a word at ``x``: ``β'(w)(Φ x) → Φ(β(w) x)``."""
        P = self.src.presentation
        here = w.start
        out = self.dst.at[here].id(self.components[here].obj(x))
        for g, e in w.letters:
            s, d = P.gen_ends(g)
            nxt = d if e > 0 else s
            L_src, L_dst = self.src.letter(g, e), self.dst.letter(g, e)
            cat = self.dst.at[nxt]
            if e > 0:
                step = self.squares[g][x]
            else:
                u = L_src.obj(x)
                step = cat.inverse(L_dst.mor(self.squares[g][u]))
            out = cat.then(L_dst.mor(out), step)
            x = L_src.obj(x)
            here = nxt
        return out


def complete_rep_morphism(src, dst, components):
    """Fill the squares of a morphism with the first natural isomorphisms found."""
    squares = {}
    for g, s, d in src.presentation.gen1:
        left = compose_functors(components[s], dst.along1[g])
        right = compose_functors(src.along1[g], components[d])
        nat = find_nat_iso(left, right)
        if nat is None:
            raise InvalidData("no natural square along a generator", {"generator": g})
        squares[g] = nat.components
    return RepMorphism(src, dst, components, squares)


def validate_rep_morphism(phi):
    rep = Report()
    P = phi.src.presentation
    for b in P.basepoints:
        F = phi.components.get(b)
        if F is None or F.src != phi.src.at[b] or F.dst != phi.dst.at[b]:
            rep.add("component-endpoints", basepoint=b)
            continue
        rep.extend(validate_functor(F), basepoint=b)
    if not rep.ok:
        return rep
    for g, s, d in P.gen1:
        sq = phi.squares.get(g, {})
        left = compose_functors(phi.components[s], phi.dst.along1[g])
        right = compose_functors(phi.src.along1[g], phi.components[d])
        sub = validate_nat_trans(NatTransData(left, right, sq))
        rep.extend(sub, generator=g)
        if sub.ok and not all(phi.dst.at[d].is_iso(f) for f in sq.values()):
            rep.add("square-not-invertible", generator=g)
    if not rep.ok:
        return rep
    for c, s, d in P.gen2:
        b = P.word_end(s)
        cat = phi.dst.at[b]
        for x in phi.src.at[s.start].objects:
            y = phi.components[s.start].obj(x)
            lhs = cat.then(phi.dst.cell(c, 1, y), phi.word_square(d, x))
            rhs = cat.then(phi.word_square(s, x), phi.components[b].mor(phi.src.cell(c, 1, x)))
            if lhs != rhs:
                rep.add("cell-compatibility", cell=c, object=x)
                break
    return rep


def pullback_morphism(f, phi, src, dst):
    """``f⁻¹Φ`` between the pulled-back representations ``src`` and ``dst``."""
    comps = {b: phi.components[f.on_points[b]] for b in f.src.basepoints}
    squares = {}
    for g, _, _ in f.src.gen1:
        w = f.on_gen1[g]
        squares[g] = {x: phi.word_square(w, x) for x in src.at[f.src.gen_ends(g)[0]].objects}
    return RepMorphism(src, dst, comps, squares)


def _sections_functor(phi, A, B, fiber_points, fiber_gens):
    """Functor on section categories induced pointwise by ``Φ``."""
    on_obj = {}
    for o in A.objects:
        xs = dict(zip(fiber_points, A.families[o][0]))
        ys = tuple(phi.components[b].obj(xs[b]) for b in fiber_points)
        qs = []
        for (g, s, d), p in zip(fiber_gens, A.families[o][1]):
            cat = phi.dst.at[d]
            qs.append(cat.then(phi.squares[g][xs[s]], phi.components[d].mor(p)))
        found = B.lookup(ys, qs)
        if found is None:
            raise InvalidData("image of a section is not a section", {"object": o})
        on_obj[o] = found
    on_mor = {}
    for mm, s, d in A.morphisms:
        comps = tuple(phi.components[b].mor(f) for b, f in zip(fiber_points, A.mor_families[mm]))
        on_mor[mm] = B.lookup_mor(on_obj[s], on_obj[d], comps)
        if on_mor[mm] is None:
            raise InvalidData("image of a section morphism is missing", {"morphism": mm})
    return FunctorData(A, B, on_obj, on_mor)


def nu_functor(phi, A=None, B=None):
    """``ν(Φ)``: the induced functor on global sections."""
    A = A or global_sections_nu(phi.src)
    B = B or global_sections_nu(phi.dst)
    P = phi.src.presentation
    return _sections_functor(phi, A, B, P.basepoints, P.gen1)


def nu_nat(components, F, G):
    """``ν`` of a modification given by per-basepoint components, between ``F`` and ``G``."""
    A, B = F.src, F.dst
    P = A.rep.presentation
    out = {}
    for o in A.objects:
        xs = A.families[o][0]
        fam = tuple(components[b][x] for b, x in zip(P.basepoints, xs))
        found = B.lookup_mor(F.obj(o), G.obj(o), fam)
        if found is None:
            raise InvalidData("modification components do not form a section morphism",
                              {"object": o})
        out[o] = found
    return NatTransData(F, G, out)


def pushforward_morphism(bd, phi, src_push, dst_push):
    """``p_*Φ`` along a bundle, between the pushed-forward representations."""
    comps = {}
    for b, F in bd.fibers.items():
        local = RepMorphism(_fiber_rep(phi.src, F), _fiber_rep(phi.dst, F),
                            {y: phi.components[y] for y in F.basepoints},
                            {g: phi.squares[g] for g, _, _ in F.gen1})
        comps[b] = _sections_functor(local, src_push.at[b], dst_push.at[b],
                                     F.basepoints, F.gen1)
    squares = {}
    for g, b0, b1 in bd.base.gen1:
        td = bd.transports[g]
        back = {v: k for k, v in td.points.items()}
        A = src_push.at[b0]
        B = dst_push.at[b1]
        sq = {}
        for o in A.objects:
            left = dst_push.along1[g].obj(comps[b0].obj(o))
            right = comps[b1].obj(src_push.along1[g].obj(o))
            fam = []
            for z in bd.fibers[b1].basepoints:
                y = back[z]
                fam.append(phi.word_square(td.paths[y], A.x(o, y)))
            found = B.lookup_mor(left, right, tuple(fam))
            if found is None:
                raise InvalidData("pushed square is not a section morphism", {"generator": g})
            sq[o] = found
        squares[g] = sq
    return RepMorphism(src_push, dst_push, comps, squares)


# ---------------------------------------------------------------------------
# tube functors, memoized


class Tubes:
    """Memoized tube functors on representations and their morphisms.

    Representation keys: ``("rep", name)`` (registered), ``("p", k, l, key)``.
    Morphism keys: ``("mor", name)`` (registered), ``("p", k, l, key)``,
    ``("cmp", k, l, m, key)``.
    """

    def __init__(self, t):
        self.t = t
        self._reps = {}
        self._pulled = {}
        self._mors = {}
        self._nu = {}

    def register(self, name, alpha):
        self._reps[("rep", name)] = alpha
        return ("rep", name)

    def register_morphism(self, name, phi, src_key, dst_key):
        self._mors[("mor", name)] = (phi, src_key, dst_key)
        return ("mor", name)

    def rep(self, key):
        if key not in self._reps:
            _, k, l, inner = key
            link = self.t.links[(k, l)]
            self._pulled[key] = pullback_rep(link.incl, self.rep(inner))
            self._reps[key] = pushforward_rep(link.bundle, self._pulled[key])
        return self._reps[key]

    def pulled(self, key):
        self.rep(key)
        return self._pulled[key]

    def nu(self, key):
        if key not in self._nu:
            self._nu[key] = global_sections_nu(self.rep(key))
        return self._nu[key]

    def mor(self, key):
        if key in self._mors:
            return self._mors[key]
        if key[0] == "p":
            _, k, l, inner = key
            phi, s, d = self.mor(inner)
            ps, pd = ("p", k, l, s), ("p", k, l, d)
            link = self.t.links[(k, l)]
            pulled = pullback_morphism(link.incl, phi, self.pulled(ps), self.pulled(pd))
            val = (pushforward_morphism(link.bundle, pulled, self.rep(ps), self.rep(pd)), ps, pd)
        elif key[0] == "cmp":
            _, k, l, m, inner = key
            val = (comparison(self, k, l, m, inner), ("p", k, m, inner),
                   ("p", k, l, ("p", l, m, inner)))
        else:
            raise KeyError(key)
        self._mors[key] = val
        return val

    def nu_mor(self, key):
        phi, s, d = self.mor(key)
        return nu_functor(phi, self.nu(s), self.nu(d))

    def restrict_to_link(self, k, l, key):
        """``ν_{P_l}(β) → ν_{P_k}(p_kl β)``: restrict a global section to the link."""
        S = self.nu(key)
        pk = ("p", k, l, key)
        push = self.rep(pk)
        target = self.nu(pk)
        link = self.t.links[(k, l)]
        bd, incl = link.bundle, link.incl
        Pk = self.t.strata[k]
        inner_obj = {}
        for o in S.objects:
            per_b = {}
            for b, F in bd.fibers.items():
                cat = push.at[b]
                xs = tuple(S.x(o, incl.on_points[y]) for y in F.basepoints)
                qs = tuple(S.phi_word(o, incl.word(word(s, g))) for g, s, _ in F.gen1)
                found = cat.lookup(xs, qs)
                if found is None:
                    raise InvalidData("restricted section is not a fiber section", {"object": o})
                per_b[b] = found
            inner_obj[o] = per_b
        on_obj = {}
        for o in S.objects:
            xs = tuple(inner_obj[o][b] for b in Pk.basepoints)
            qs = []
            for g, b0, b1 in Pk.gen1:
                td = bd.transports[g]
                back = {v: u for u, v in td.points.items()}
                fam = tuple(S.phi_word(o, incl.word(td.paths[back[z]]))
                            for z in bd.fibers[b1].basepoints)
                src_obj = push.along1[g].obj(inner_obj[o][b0])
                found = push.at[b1].lookup_mor(src_obj, inner_obj[o][b1], fam)
                if found is None:
                    raise InvalidData("restricted section has no transport arrow",
                                      {"object": o, "generator": g})
                qs.append(found)
            found = target.lookup(xs, tuple(qs))
            if found is None:
                raise InvalidData("restricted family is not a section", {"object": o})
            on_obj[o] = found
        on_mor = {}
        pos = S.point_pos
        for mm, s, d in S.morphisms:
            comps = []
            for b in Pk.basepoints:
                F = bd.fibers[b]
                fam = tuple(S.mor_families[mm][pos[incl.on_points[y]]] for y in F.basepoints)
                comps.append(push.at[b].lookup_mor(inner_obj[s][b], inner_obj[d][b], fam))
            on_mor[mm] = target.lookup_mor(on_obj[s], on_obj[d], tuple(comps))
            if on_mor[mm] is None:
                raise InvalidData("restricted morphism is not a section morphism",
                                  {"morphism": mm})
        return FunctorData(S, target, on_obj, on_mor)


def p_kl(t, k, l, alpha):
    """``p_kl α = p_* incl⁻¹ α`` on ``P_k``."""
    link = t.links[(k, l)]
    return pushforward_rep(link.bundle, pullback_rep(link.incl, alpha))


def comparison(tubes, k, l, m, key):
    """``p_km β ⇒ p_kl p_lm β`` reindexing sections through the triple datum.

    Squares along base generators of ``P_k`` are the first natural
    isomorphisms found between the two composites.
    """
    t = tubes.t
    tr = t.triples[(k, l, m)]
    A_key, B_key = ("p", k, m, key), ("p", k, l, ("p", l, m, key))
    A, B = tubes.rep(A_key), tubes.rep(B_key)
    inner = tubes.rep(("p", l, m, key))
    kl, lm = t.links[(k, l)], t.links[(l, m)]
    comps = {}
    for b in t.strata[k].basepoints:
        Fkl = kl.bundle.fibers[b]
        src, dst = A.at[b], B.at[b]
        inner_of = {}
        on_obj = {}
        for o in src.objects:
            per_y = []
            for y in Fkl.basepoints:
                yb = kl.incl.on_points[y]
                Fz = lm.bundle.fibers[yb]
                cat = inner.at[yb]
                xs = tuple(src.x(o, tr.points[(y, z)]) for z in Fz.basepoints)
                qs = tuple(src.phi_word(o, tr.fiber_words[(y, d)]) for d, _, _ in Fz.gen1)
                found = cat.lookup(xs, qs)
                if found is None:
                    raise EndpointMismatch("reindexed family is not a section",
                                           {"object": o, "link_point": y})
                per_y.append(found)
            inner_of[o] = dict(zip(Fkl.basepoints, per_y))
            qs = []
            for g, y, y2 in Fkl.gen1:
                yb2 = kl.incl.on_points[y2]
                wtd = _word_transport(lm.bundle, kl.incl.word(word(y, g)))
                back = {v: u for u, v in wtd.points.items()}
                fam = tuple(src.phi_word(o, tr.lift_words[(g, back[z2])])
                            for z2 in lm.bundle.fibers[yb2].basepoints)
                beta_g = tubes.pulled(B_key).along1[g]
                found = inner.at[yb2].lookup_mor(beta_g.obj(inner_of[o][y]), inner_of[o][y2], fam)
                if found is None:
                    raise EndpointMismatch("reindexed transport arrow is not a section morphism",
                                           {"object": o, "generator": g})
                qs.append(found)
            found = dst.lookup(tuple(per_y), tuple(qs))
            if found is None:
                raise EndpointMismatch("reindexed family is not a section", {"object": o})
            on_obj[o] = found
        on_mor = {}
        for mm, s, d in src.morphisms:
            fam = []
            for y in Fkl.basepoints:
                yb = kl.incl.on_points[y]
                Fz = lm.bundle.fibers[yb]
                pos = src.point_pos
                inner_fam = tuple(src.mor_families[mm][pos[tr.points[(y, z)]]]
                                  for z in Fz.basepoints)
                fam.append(inner.at[yb].lookup_mor(inner_of[s][y], inner_of[d][y], inner_fam))
            on_mor[mm] = dst.lookup_mor(on_obj[s], on_obj[d], tuple(fam))
            if on_mor[mm] is None:
                raise EndpointMismatch("reindexed morphism is missing", {"morphism": mm})
        comps[b] = FunctorData(src, dst, on_obj, on_mor)
    squares = {}
    for g, b0, b1 in t.strata[k].gen1:
        left = compose_functors(comps[b0], B.along1[g])
        right = compose_functors(A.along1[g], comps[b1])
        nat = find_nat_iso(left, right)
        if nat is None:
            raise EndpointMismatch("comparison is not natural along a base generator",
                                   {"generator": g})
        squares[g] = nat.components
    return RepMorphism(A, B, comps, squares)


def check_composites(t, reps):
    """Certify ``p_km β ≃ p_kl p_lm β`` for every triple and test representation.

    ``reps`` maps a level ``m`` to a list of representations of ``P_m``.
    """
    rep = validate_tm(t)
    if not rep.ok:
        return rep
    certified = 0
    for k, l, m in itertools.combinations(sorted(t.strata), 3):
        for i, alpha in enumerate(reps.get(m, [])):
            valid = validate_two_rep(alpha)
            if not valid.ok:
                rep.add("invalid-rep", level=m, rep=i, detail=valid.first())
                continue
            tubes = Tubes(t)
            key = tubes.register(f"test{i}", alpha)
            try:
                phi, _, _ = tubes.mor(("cmp", k, l, m, key))
            except EndpointMismatch as e:
                rep.add("comparison-failed", triple=[k, l, m], rep=i, detail=e.witness)
                continue
            bad = False
            for b, F in sorted(phi.components.items()):
                eq = is_equivalence(F, quasi_inverse=False)
                if not eq.ok:
                    rep.add("not-equivalence", triple=[k, l, m], rep=i, basepoint=b,
                            detail=eq.to_dict())
                    bad = True
            if not bad:
                certified += 1
    rep.info["certified"] = certified
    return rep


# ---------------------------------------------------------------------------
# constructible data


class ConstructibleDatum:
    """``α_k`` per stratum, ``F_kl: α_k ⇒ p_kl α_l`` and ``f_klm`` components.

    ``f[(k, l, m)][b][x]`` is a morphism from ``(p_kl F_lm ∘ F_kl)(x)`` to
    ``(cmp ∘ F_km)(x)`` in ``p_kl p_lm α_m`` at ``b``.
    """

    def __init__(self, tm, reps, F=None, f=None, test_reps=None):
        self.tm = tm
        self.reps = dict(reps)
        self.F = dict(F or {})
        self.f = dict(f or {})
        self.test_reps = dict(test_reps or {})
        self._tubes = None

    @property
    def n(self):
        return self.tm.n

    def tubes(self):
        if self._tubes is None:
            tubes = Tubes(self.tm)
            for k, alpha in self.reps.items():
                tubes.register(k, alpha)
            for (k, l), phi in self.F.items():
                tubes.register_morphism((k, l), phi, ("rep", k), ("p", k, l, ("rep", l)))
            self._tubes = tubes
        return self._tubes


def complete_constructible(d):
    """Fill missing ``f_klm`` with the first natural isomorphisms found."""
    for k, l, m in itertools.combinations(sorted(d.tm.strata), 3):
        if (k, l, m) in d.f:
            continue
        Fkl, pFlm, Fkm, cmp = _f_functors(d, k, l, m)
        comps = {}
        for b in d.tm.strata[k].basepoints:
            nat = find_nat_iso(compose_functors(Fkl.components[b], pFlm.components[b]),
                               compose_functors(Fkm.components[b], cmp.components[b]))
            if nat is None:
                raise InvalidData("no invertible filler for a triple",
                                  {"triple": [k, l, m], "basepoint": b})
            comps[b] = nat.components
        d.f[(k, l, m)] = comps
    return d


def _rep_key(chain):
    key = ("rep", chain[-1])
    for k in reversed(chain[:-1]):
        key = ("p", k, chain[chain.index(k) + 1], key)
    return key


def _f_functors(d, k, l, m):
    tubes = d.tubes()
    Fkl = tubes.mor(("mor", (k, l)))[0]
    pFlm = tubes.mor(("p", k, l, ("mor", (l, m))))[0]
    Fkm = tubes.mor(("mor", (k, m)))[0]
    cmp = tubes.mor(("cmp", k, l, m, ("rep", m)))[0]
    return Fkl, pFlm, Fkm, cmp


def check_constructible(d):
    """Validity of every ``F_kl``, naturality of ``f_klm`` and the cube."""
    rep = validate_tm(d.tm)
    if not rep.ok:
        return rep
    tubes = d.tubes()
    levels = sorted(d.tm.strata)
    for k, l in itertools.combinations(levels, 2):
        phi = d.F.get((k, l))
        if phi is None:
            rep.add("missing-F", pair=[k, l])
            continue
        target = tubes.rep(("p", k, l, ("rep", l)))
        if any(phi.src.at[b] != d.reps[k].at[b] or phi.dst.at[b] != target.at[b]
               for b in d.tm.strata[k].basepoints):
            rep.add("F-type", pair=[k, l])
            continue
        rep.extend(validate_rep_morphism(phi), pair=[k, l])
    if not rep.ok:
        return rep
    for k, l, m in itertools.combinations(levels, 3):
        Fkl, pFlm, Fkm, cmp = _f_functors(d, k, l, m)
        comps = d.f.get((k, l, m))
        if comps is None:
            rep.add("missing-f", triple=[k, l, m])
            continue
        for b in d.tm.strata[k].basepoints:
            left = compose_functors(Fkl.components[b], pFlm.components[b])
            right = compose_functors(Fkm.components[b], cmp.components[b])
            nat = NatTransData(left, right, comps.get(b, {}))
            sub = validate_nat_trans(nat)
            rep.extend(sub, triple=[k, l, m], basepoint=b)
            if sub.ok and not all(right.dst.is_iso(f) for f in comps[b].values()):
                rep.add("f-not-invertible", triple=[k, l, m], basepoint=b)
    if not rep.ok:
        return rep
    for k, l, m, p in itertools.combinations(levels, 4):
        rep.extend(_cube(d, k, l, m, p))
    return rep


def _cube(d, k, l, m, p):
    """The cube with the comparison naturality cells taken as identities."""
    rep = Report()
    tubes = d.tubes()
    A1 = tubes.mor(("mor", (k, l)))[0]
    A3 = tubes.mor(("p", k, l, ("p", l, m, ("mor", (m, p)))))[0]
    E_lmp = tubes.mor(("cmp", k, l, m, ("p", m, p, ("rep", p))))[0]
    E_mp = tubes.mor(("p", k, l, ("cmp", l, m, p, ("rep", p))))[0]
    lifted = _push_mod(d, k, l, m, p)
    for b in d.tm.strata[k].basepoints:
        cat = A3.components[b].dst
        for x in d.reps[k].at[b].objects:
            seq1 = _then(cat, A3.components[b].mor(d.f[(k, l, m)][b][x]),
                         E_lmp.components[b].mor(d.f[(k, m, p)][b][x]))
            seq2 = _then(cat, lifted[b][A1.components[b].obj(x)],
                         E_mp.components[b].mor(d.f[(k, l, p)][b][x]))
            if seq1 is None or seq2 is None or cat.src(seq1) != cat.src(seq2) \
                    or cat.dst(seq1) != cat.dst(seq2):
                rep.add("cube-endpoints", levels=[k, l, m, p], basepoint=b, object=x)
            elif seq1 != seq2:
                rep.add("cube", levels=[k, l, m, p], basepoint=b, object=x)
    return rep


def _then(cat, f, g):
    return cat.then(f, g) if cat.dst(f) == cat.src(g) else None


def _push_mod(d, k, l, m, p):
    """``p_kl f_lmp`` as components over ``(p_kl α_l)`` at each basepoint of ``P_k``."""
    tubes = d.tubes()
    link = d.tm.links[(k, l)]
    src_rep = tubes.rep(("p", k, l, ("rep", l)))
    dst_rep = tubes.rep(("p", k, l, ("p", l, m, ("p", m, p, ("rep", p)))))
    pFlm = tubes.mor(("p", k, l, ("mor", (l, m))))[0]
    ppFmp = tubes.mor(("p", k, l, ("p", l, m, ("mor", (m, p)))))[0]
    pFlp = tubes.mor(("p", k, l, ("mor", (l, p))))[0]
    pcmp = tubes.mor(("p", k, l, ("cmp", l, m, p, ("rep", p))))[0]
    comps = d.f[(l, m, p)]
    out = {}
    for b, F in link.bundle.fibers.items():
        A, B = src_rep.at[b], dst_rep.at[b]
        left = compose_functors(pFlm.components[b], ppFmp.components[b])
        right = compose_functors(pFlp.components[b], pcmp.components[b])
        c = {}
        for o in A.objects:
            fam = tuple(comps[link.incl.on_points[y]][A.x(o, y)] for y in F.basepoints)
            found = B.lookup_mor(left.obj(o), right.obj(o), fam)
            if found is None:
                raise InvalidData("pushed modification is not a section morphism",
                                  {"basepoint": b, "object": o})
            c[o] = found
        out[b] = c
    return out


# ---------------------------------------------------------------------------
# gluing


def constructible_diagram(d):
    """The pseudofunctor over the index category whose 2-limit is the glued category."""
    tubes = d.tubes()
    n = d.n
    J = build_index_J(n)
    at = {chain_id(c): tubes.nu(_rep_key(c)) for c in chains(n)}
    along = {}
    for c in chains(n):
        along[index_morphism(c, c)] = identity_functor(at[chain_id(c)])
    gens = {}
    for k, l in itertools.combinations(range(n + 1), 2):
        gens[((k,), (k, l))] = tubes.nu_mor(("mor", (k, l)))
        gens[((l,), (k, l))] = tubes.restrict_to_link(k, l, ("rep", l))
    for k, l, m in itertools.combinations(range(n + 1), 3):
        gens[((k, l), (k, l, m))] = tubes.nu_mor(("p", k, l, ("mor", (l, m))))
        gens[((l, m), (k, l, m))] = tubes.restrict_to_link(k, l, ("p", l, m, ("rep", m)))
        gens[((k, m), (k, l, m))] = tubes.nu_mor(("cmp", k, l, m, ("rep", m)))
    for (a, b), F in gens.items():
        along[index_morphism(a, b)] = F
    comp_iso = {}
    for c in [c for c in chains(n) if len(c) == 3]:
        for a in itertools.combinations(c, 1):
            mid = _canonical_mid(a, c)
            along[index_morphism(a, c)] = compose_functors(gens[(a, mid)], gens[(mid, c)])
        k, l, m = c
        other = (k, m)
        canon = compose_functors(gens[((k,), (k, l))], gens[((k, l), c)])
        alt = compose_functors(gens[((k,), other)], gens[(other, c)])
        comp_iso[(index_morphism((k,), other), index_morphism(other, c))] = \
            nu_nat(d.f[c], canon, alt).components
    try:
        return PseudoFunctor(J, at, along, comp_iso)
    except InvalidData as e:
        raise InvalidData("strict coherence of the constructible diagram fails", e.witness)


def glue_constructible(d):
    """Global constructible objects: the 2-limit of the constructible diagram."""
    return descent_category(constructible_diagram(d))


__all__ = [
    "ConstructibleDatum", "Link", "RepMorphism", "TMStratDatum", "TripleDatum", "Tubes",
    "check_composites", "check_constructible", "comparison", "complete_constructible",
    "complete_rep_morphism", "constructible_diagram",
    "glue_constructible", "nu_functor", "p_kl", "pullback_morphism", "pushforward_morphism",
    "validate_rep_morphism", "validate_tm",
]
