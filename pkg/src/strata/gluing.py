"""Gluing stacks along a stratification.

Notation: ``S_k`` is level ``k`` of the base ``X``; ``i_k: S_k ⊆ X``;
``i_kl = i_k⁻¹ i_l*``.  A gluing datum is a family of stacks ``C_k`` on
``S_k``, morphisms ``F_kl: C_k ⇒ i_kl C_l`` for ``k < l`` and invertible
modifications ``f_klm: (i_kl F_lm)∘F_kl ⇛ (i_k⁻¹ η_l i_m*)∘F_km``.

Derived stacks are named by chains of levels: ``tower((k, l, m))`` is
``i_kl i_lm C_m`` on ``S_k`` and ``pushed(chain)`` is ``i_{chain[0]*}``
of the tower.  Transformations between them are named by small expression
keys (see :class:`Towers`) and memoized, so equal expressions give the same
objects.
"""
import itertools

from strata.errors import ConeIncoherent, InvalidData, LevelMismatch
from strata.fincat import (FunctorData, compose_functors, find_nat_iso, identity_functor,
                           is_equivalence, poset_category)
from strata.posetstack import (PosetStack, _cone_isos, eta_naturality, push_modification,
                               push_transformation, pushforward_stack,
                               restrict_stack, restrict_transformation, unit_eta,
                               validate_strat_poset)
from strata.pseudo import (Modification, PseudoFunctor, PseudoTransformation,
                           compose_transformations, descent_category, induced_on_descent,
                           mediator, projection, validate_modification,
                           validate_pseudotransformation)
from strata.report import Report


# ---------------------------------------------------------------------------
# index category


def chain_id(chain):
    return f"{len(chain)}:" + ",".join(str(k) for k in chain)


def chains(n):
    levels = range(n + 1)
    return [c for r in (1, 2, 3) for c in itertools.combinations(levels, r)]


def build_index_J(n):
    """Chains of size 1..3 in ``{0..n}`` ordered by inclusion."""
    cs = chains(n)
    rel = [(chain_id(a), chain_id(b)) for a in cs for b in cs if set(a) < set(b)]
    return poset_category([chain_id(c) for c in cs], rel)


def index_morphism(a, b):
    return f"{chain_id(a)}<={chain_id(b)}"


# ---------------------------------------------------------------------------
# data types


class GluingDatum:
    """``({C_k}, {F_kl}, {f_klm})`` over a stratified poset.

    ``F[(k, l)]`` is a :class:`PseudoTransformation` ``C_k ⇒ i_kl C_l`` and
    ``f[(k, l, m)]`` maps base elements of ``S_k`` to component dicts.
    """

    def __init__(self, base, stacks, F=None, f=None, ambient=None):
        self.base = base
        self.stacks = dict(stacks)
        self.F = dict(F or {})
        self.f = dict(f or {})
        self.ambient = ambient
        self._towers = None

    @property
    def n(self):
        return self.base.top_level

    def towers(self):
        if self._towers is None:
            self._towers = Towers(self)
        return self._towers


class GluingMorphism:
    """``({G_k}, {g_kl})`` with ``g_kl: F'_kl∘G_k ⇛ i_kl G_l∘F_kl`` as components."""

    def __init__(self, src, dst, G, g):
        self.src = src
        self.dst = dst
        self.G = dict(G)
        self.g = dict(g)


class GluingModification:
    """``φ_k: G_k ⇛ G'_k`` as component dicts per level."""

    def __init__(self, src, dst, phi):
        self.src = src
        self.dst = dst
        self.phi = dict(phi)


# ---------------------------------------------------------------------------
# derived stacks and transformations


def _c(t):
    return t if isinstance(t, dict) else t.components


class Towers:
    """Memoized derived stacks, transformations and modifications of a datum.

    Transformation keys:

    * ``("F", k, l)``: the datum's ``F_kl``, between towers;
    * ``("P", key)``: pushforward of a tower transformation to ``X``;
    * ``("R", k, key)``: restriction to ``S_k`` of a transformation on ``X``;
    * ``("eta", l, chain)``: ``η_l`` at ``pushed(chain)``;
    * ``("comp", key1, key2)``: vertical composite, ``key1`` first.

    Modification keys: ``("f", k, l, m)``, ``("Pm", key)``, ``("Rm", k, key)``,
    ``("etanat", l, key)`` (naturality of ``η_l`` at a transformation on ``X``)
    and ``("inv", key)``.
    """

    def __init__(self, datum):
        self.d = datum
        self.X = datum.base
        self.S = {k: datum.base.stratum(k) for k in range(datum.n + 1)}
        self._tower = {}
        self._pushed = {}
        self._t = {}
        self._m = {}

    # stacks
    def tower(self, chain):
        chain = tuple(chain)
        if chain not in self._tower:
            if len(chain) == 1:
                self._tower[chain] = self.d.stacks[chain[0]]
            else:
                self._tower[chain] = restrict_stack(self.pushed(chain[1:]), self.S[chain[0]])
        return self._tower[chain]

    def pushed(self, chain):
        chain = tuple(chain)
        if chain not in self._pushed:
            if not chain:
                if self.d.ambient is None:
                    raise InvalidData("no ambient stack for the empty chain")
                self._pushed[chain] = self.d.ambient
            else:
                self._pushed[chain] = pushforward_stack(self.X, self.S[chain[0]], self.tower(chain))
        return self._pushed[chain]

    # transformations: each entry is (transformation, source chain, target chain, on X?)
    def t(self, key):
        if key in self._t:
            return self._t[key]
        kind = key[0]
        if kind == "F":
            _, k, l = key
            val = (self.d.F[(k, l)], (k,), (k, l), False)
        elif kind == "P":
            inner, c1, c2, on_x = self.t(key[1])
            assert not on_x
            val = (push_transformation(inner, self.pushed(c1), self.pushed(c2)), c1, c2, True)
        elif kind == "R":
            _, k, sub = key
            inner, c1, c2, on_x = self.t(sub)
            assert on_x
            k1, k2 = (k,) + c1, (k,) + c2
            val = (restrict_transformation(inner, self.tower(k1), self.tower(k2)), k1, k2, False)
        elif kind == "eta":
            _, l, chain = key
            G = self.pushed(chain)
            val = (unit_eta(G, self.S[l], push=self.pushed((l,) + chain)), chain, (l,) + chain,
                   True)
        elif kind == "comp":
            a, c1, _, on_x = self.t(key[1])
            b, _, c3, _ = self.t(key[2])
            val = (compose_transformations(a, b), c1, c3, on_x)
        else:
            raise KeyError(key)
        self._t[key] = val
        return val

    def T(self, key):
        return self.t(key)[0]

    def lift(self, k, key):
        """``i_k⁻¹ i_* (key)``: lift a tower transformation to level ``k``."""
        return ("R", k, ("P", key))

    def F_lift(self, prefix, l, m):
        key = ("F", l, m)
        for k in reversed(prefix):
            key = self.lift(k, key)
        return key

    def eta_lift(self, prefix, l, chain):
        key = ("R", prefix[-1], ("eta", l, tuple(chain)))
        for k in reversed(prefix[:-1]):
            key = self.lift(k, key)
        return key

    # modifications: (components by base element, source key, target key)
    def m(self, key):
        if key in self._m:
            return self._m[key]
        kind = key[0]
        if kind == "f":
            _, k, l, m = key
            src = ("comp", ("F", k, l), self.F_lift((k,), l, m))
            dst = ("comp", ("F", k, m), self.eta_lift((k,), l, (m,)))
            val = (self.d.f[(k, l, m)], src, dst)
        elif kind == "Pm":
            comps, s, d = self.m(key[1])
            src, dst = ("P", s), ("P", d)
            mod = Modification(self.T(s), self.T(d), comps)
            val = (push_modification(mod, self.T(src), self.T(dst)).component, src, dst)
        elif kind == "Rm":
            _, k, sub = key
            comps, s, d = self.m(sub)
            src, dst = ("R", k, s), ("R", k, d)
            elems = self.S[k]
            val = ({x: comps[x] for x in elems}, src, dst)
        elif kind == "etanat":
            _, l, tkey = key
            T, c1, c2, on_x = self.t(tkey)
            assert on_x
            e1, e2 = ("eta", l, c1), ("eta", l, c2)
            pk = ("P", ("R", l, tkey))
            mod = eta_naturality(T, self.T(e1), self.T(e2), self.T(pk))
            val = (mod.component, ("comp", e1, pk), ("comp", tkey, e2))
        elif kind == "inv":
            comps, s, d = self.m(key[1])
            T = self.T(d)
            inv = {}
            for x, cx in comps.items():
                cat = T.component[x].dst
                inv[x] = {y: cat.inverse(f) for y, f in _c(cx).items()}
            val = (inv, d, s)
        else:
            raise KeyError(key)
        self._m[key] = val
        return val

    def M(self, key):
        return self.m(key)[0]

    def mod_at(self, key, x, y):
        return _c(self.M(key)[x])[y]

    def lift_mod(self, k, key):
        return ("Rm", k, ("Pm", key))


# ---------------------------------------------------------------------------
# checks


def _all_terminal(stack):
    return all(len(stack.at[x].objects) == 1 and len(stack.at[x].morphisms) == 1
               for x in stack.base.elements)


def _fill_absent(d):
    """Levels without incidences: terminal ``F`` and identity ``f`` where omitted."""
    tw = d.towers()
    for k, l in itertools.combinations(range(d.n + 1), 2):
        if (k, l) not in d.F and _all_terminal(tw.tower((k, l))):
            src, dst = tw.tower((k,)), tw.tower((k, l))
            comp = {x: _terminal_leg(src.at[x], dst.at[x]) for x in src.base.elements}
            square = {}
            for a, b in src.base.leq:
                cat = dst.at[b]
                square[src.base.mor(a, b)] = {y: cat.id(cat.objects[0]) for y in src.at[a].objects}
            d.F[(k, l)] = PseudoTransformation(src, dst, comp, square)
    for k, l, m in itertools.combinations(range(d.n + 1), 3):
        if (k, l, m) not in d.f and _all_terminal(tw.tower((k, l, m))):
            target = tw.tower((k, l, m))
            d.f[(k, l, m)] = {x: {y: target.at[x].id(target.at[x].objects[0])
                                  for y in d.stacks[k].at[x].objects}
                              for x in tw.S[k]}


def _level_check(d):
    X = d.base
    rep = validate_strat_poset(X)
    if not rep.ok:
        raise LevelMismatch("base is not a valid stratified poset", rep.first())
    for k in range(d.n + 1):
        C = d.stacks.get(k)
        if C is None or tuple(C.base.elements) != X.stratum(k):
            raise LevelMismatch(f"stack at level {k} does not live on S_{k}", {"level": k})
    _fill_absent(d)
    for k, l in itertools.combinations(range(d.n + 1), 2):
        if (k, l) not in d.F:
            raise LevelMismatch(f"missing F for levels ({k}, {l})", {"pair": [k, l]})
    for k, l, m in itertools.combinations(range(d.n + 1), 3):
        if (k, l, m) not in d.f:
            raise LevelMismatch(f"missing f for levels ({k}, {l}, {m})", {"triple": [k, l, m]})


def _same_stack(A, B):
    return A is B or A.fingerprint() == B.fingerprint()


def check_components(d):
    """Typing, naturality and invertibility of every ``F_kl`` and ``f_klm``."""
    _level_check(d)
    tw = d.towers()
    rep = Report()
    for (k, l), F in sorted(d.F.items()):
        if not (_same_stack(F.src, tw.tower((k,))) and _same_stack(F.dst, tw.tower((k, l)))):
            rep.add("F-type", pair=[k, l])
            continue
        rep.extend(validate_pseudotransformation(F), pair=[k, l])
    if not rep.ok:
        return rep
    for (k, l, m) in sorted(d.f):
        comps, s, t = tw.m(("f", k, l, m))
        src, dst = tw.T(s), tw.T(t)
        mod = Modification(src, dst, comps)
        sub = validate_modification(mod)
        rep.extend(sub, triple=[k, l, m])
        for x in tw.S[k]:
            cat = src.component[x].dst
            for y, f in _c(comps[x]).items():
                if not cat.is_iso(f):
                    rep.add("f-not-invertible", triple=[k, l, m], element=x, object=y)
    return rep


def check_gluing_datum(d):
    """Cube condition on every quadruple ``k<l<m<p``; witnesses are located."""
    rep = check_components(d)
    if not rep.ok:
        return rep
    tw = d.towers()
    for k, l, m, p in itertools.combinations(range(d.n + 1), 4):
        A1 = tw.T(("F", k, l))
        A3 = tw.T(tw.F_lift((k, l), m, p))
        Fkm = tw.T(("F", k, m))
        Fkp = tw.T(("F", k, p))
        E_lmp = tw.T(tw.eta_lift((k,), l, (m, p)))
        E_mp = tw.eta_lift((k, l), m, (p,))
        n1_key = ("Rm", k, ("etanat", l, ("P", ("F", m, p))))
        n2_key = ("Rm", k, ("etanat", l, ("eta", m, (p,))))
        f_lmp_lift = tw.lift_mod(k, ("f", l, m, p))
        for x in tw.S[k]:
            cat = A3.component[x].dst
            for y in d.stacks[k].at[x].objects:
                seq1 = cat.then(
                    A3.component[x].mor(tw.mod_at(("f", k, l, m), x, y)),
                    tw.mod_at(n1_key, x, Fkm.component[x].obj(y)),
                    E_lmp.component[x].mor(tw.mod_at(("f", k, m, p), x, y)))
                seq2 = cat.then(
                    tw.mod_at(f_lmp_lift, x, A1.component[x].obj(y)),
                    tw.T(E_mp).component[x].mor(tw.mod_at(("f", k, l, p), x, y)),
                    tw.mod_at(n2_key, x, Fkp.component[x].obj(y)))
                if seq1 != seq2:
                    rep.add("cube", levels=[k, l, m, p], element=x, object=y)
    return rep


class _Between:
    """Pushes and restrictions of level morphisms ``G_k`` between two data."""

    def __init__(self, mor):
        self.mor = mor
        self.A = mor.src.towers()
        self.B = mor.dst.towers()
        self._t = {}
        self._m = {}

    def t(self, key):
        """``("G", k)``, ``("P", key)`` or ``("R", k, key)`` between the two data."""
        if key in self._t:
            return self._t[key]
        if key[0] == "G":
            val = (self.mor.G[key[1]], (key[1],), False)
        elif key[0] == "P":
            inner, c, on_x = self.t(key[1])
            val = (push_transformation(inner, self.A.pushed(c), self.B.pushed(c)), c, True)
        else:
            _, k, sub = key
            inner, c, on_x = self.t(sub)
            kc = (k,) + c
            val = (restrict_transformation(inner, self.A.tower(kc), self.B.tower(kc)), kc, False)
        self._t[key] = val
        return val

    def T(self, key):
        return self.t(key)[0]

    def lift(self, k, key):
        return ("R", k, ("P", key))

    def eta_nat(self, l, key):
        """Naturality of ``η_l`` at the pushed transformation ``key`` (on ``X``)."""
        if ("etanat", l, key) in self._m:
            return self._m[("etanat", l, key)]
        T, c, on_x = self.t(key)
        pk = self.T(("P", ("R", l, key)))
        mod = eta_naturality(T, self.A.T(("eta", l, c)), self.B.T(("eta", l, c)), pk)
        self._m[("etanat", l, key)] = mod
        return mod


def _g_mod(mor, k, l, btw):
    """``g_kl`` as a modification between composite transformations."""
    A, B = btw.A, btw.B
    src = compose_transformations(mor.G[k], B.T(("F", k, l)))
    dst = compose_transformations(A.T(("F", k, l)), btw.T(btw.lift(k, ("G", l))))
    return Modification(src, dst, mor.g[(k, l)])


def check_gluing_morphism(mor):
    """Hexagon for every ``k<l<m`` plus naturality of each ``g_kl``."""
    d, e = mor.src, mor.dst
    rep = Report()
    btw = _Between(mor)
    A, B = btw.A, btw.B
    for k in range(d.n + 1):
        G = mor.G[k]
        if not (_same_stack(G.src, d.stacks[k]) and _same_stack(G.dst, e.stacks[k])):
            rep.add("G-type", level=k)
            continue
        rep.extend(validate_pseudotransformation(G), level=k)
    if not rep.ok:
        return rep
    for k, l in itertools.combinations(range(d.n + 1), 2):
        rep.extend(validate_modification(_g_mod(mor, k, l, btw)), pair=[k, l])
        for x, comps in mor.g[(k, l)].items():
            for y, f in _c(comps).items():
                if not B.T(("F", k, l)).component[x].dst.is_iso(f):
                    rep.add("g-not-invertible", pair=[k, l], element=x, object=y)
    if not rep.ok:
        return rep
    for k, l, m in itertools.combinations(range(d.n + 1), 3):
        Fp_lift = B.T(B.F_lift((k,), l, m))
        LLG = btw.T(btw.lift(k, btw.lift(l, ("G", m))))
        gl = btw.lift(l, ("G", m))
        g_lm = _g_mod(mor, l, m, btw)
        g_lm_lifted = _lift_modification(btw, k, g_lm, ("G", l), gl, l, m)
        Fkl, Fkm = A.T(("F", k, l)), A.T(("F", k, m))
        Gk = mor.G[k]
        eta_p = B.T(B.eta_lift((k,), l, (m,)))
        nat = btw.eta_nat(l, ("P", ("G", m)))
        for x in A.S[k]:
            cat = Fp_lift.component[x].dst
            for y in d.stacks[k].at[x].objects:
                path_a = cat.then(
                    Fp_lift.component[x].mor(_c(mor.g[(k, l)][x])[y]),
                    _c(g_lm_lifted[x])[Fkl.component[x].obj(y)],
                    LLG.component[x].mor(A.mod_at(("f", k, l, m), x, y)))
                w = Fkm.component[x].obj(y)
                path_b = cat.then(
                    B.mod_at(("f", k, l, m), x, Gk.component[x].obj(y)),
                    eta_p.component[x].mor(_c(mor.g[(k, m)][x])[y]),
                    cat.inverse(_c(nat.component[x])[w]))
                if path_a != path_b:
                    rep.add("hexagon", levels=[k, l, m], element=x, object=y)
    return rep


def _lift_modification(btw, k, mod, g_key, gl_key, l, m):
    """``i_k⁻¹ i_l* g_lm`` components on ``S_k``."""
    A, B = btw.A, btw.B
    src_push = compose_transformations(btw.T(("P", g_key)), B.T(("P", ("F", l, m))))
    dst_push = compose_transformations(A.T(("P", ("F", l, m))), btw.T(("P", gl_key)))
    pm = push_modification(mod, src_push, dst_push)
    return {x: pm.component[x] for x in A.S[k]}


def check_gluing_modification(phi):
    """``g'_kl ∘ F'_kl φ_k = (i_kl φ_l F_kl) ∘ g_kl`` componentwise."""
    G0, G1 = phi.src, phi.dst
    d = G0.src
    rep = Report()
    btw = _Between(G0)
    A, B = btw.A, btw.B
    for k in range(d.n + 1):
        mod = Modification(G0.G[k], G1.G[k], phi.phi[k])
        rep.extend(validate_modification(mod), level=k)
    if not rep.ok:
        return rep
    for k, l in itertools.combinations(range(d.n + 1), 2):
        Fp = B.T(("F", k, l))
        F = A.T(("F", k, l))
        mod_l = Modification(G0.G[l], G1.G[l], phi.phi[l])
        btw1 = _Between(G1)
        pm = push_modification(mod_l, btw.T(("P", ("G", l))), btw1.T(("P", ("G", l))))
        for x in A.S[k]:
            cat = Fp.component[x].dst
            for y in d.stacks[k].at[x].objects:
                lhs = cat.then(Fp.component[x].mor(_c(phi.phi[k][x])[y]), _c(G1.g[(k, l)][x])[y])
                rhs = cat.then(_c(G0.g[(k, l)][x])[y], _c(pm.component[x])[F.component[x].obj(y)])
                if lhs != rhs:
                    rep.add("modification-square", pair=[k, l], element=x, object=y)
    return rep


# ---------------------------------------------------------------------------
# restriction R


def restrict_R(G):
    """Restrictions to strata, with ``F_kl = i_k⁻¹ η_l`` and ``f_klm = λ_klm``."""
    X = G.base
    n = X.top_level
    stacks = {k: restrict_stack(G, X.stratum(k)) for k in range(n + 1)}
    d = GluingDatum(X, stacks, ambient=G)
    tw = d.towers()
    for k, l in itertools.combinations(range(n + 1), 2):
        d.F[(k, l)] = tw.T(("R", k, ("eta", l, ())))
    for k, l, m in itertools.combinations(range(n + 1), 3):
        d.f[(k, l, m)] = tw.M(("Rm", k, ("etanat", l, ("eta", m, ()))))
    return d


def restrict_R_morphism(T, src_datum, dst_datum):
    """Image of a stack morphism ``T: G ⇒ G'`` as a gluing morphism."""
    X = T.src.base
    n = X.top_level
    G = {k: restrict_transformation(T, src_datum.stacks[k], dst_datum.stacks[k])
         for k in range(n + 1)}
    mor = GluingMorphism(src_datum, dst_datum, G, {})
    btw = _Between(mor)
    for k, l in itertools.combinations(range(n + 1), 2):
        # naturality of η_l at T, restricted to S_k and inverted
        pk = btw.T(("P", ("G", l)))
        mod = eta_naturality(T, src_datum.towers().T(("eta", l, ())),
                             dst_datum.towers().T(("eta", l, ())), pk)
        comps = {}
        for x in X.stratum(k):
            cx = _c(mod.component[x])
            cat = pk.dst.at[x]
            comps[x] = {y: cat.inverse(f) for y, f in cx.items()}
        mor.g[(k, l)] = comps
    return mor


# ---------------------------------------------------------------------------
# the diagram over the index category


def _generator_keys(tw, n):
    out = {}
    for j, k in itertools.combinations(range(n + 1), 2):
        out[((j,), (j, k))] = ("P", ("F", j, k))
        out[((k,), (j, k))] = ("eta", j, (k,))
    for j, k, l in itertools.combinations(range(n + 1), 3):
        out[((j, k), (j, k, l))] = ("P", tw.F_lift((j,), k, l))
        out[((k, l), (j, k, l))] = ("eta", j, (k, l))
        out[((j, l), (j, k, l))] = ("P", tw.eta_lift((j,), k, (l,)))
    return out


def _coherence_keys(tw, n):
    """2-cells from the canonical to the other factorization of singleton → triple."""
    out = {}
    for j, k, l in itertools.combinations(range(n + 1), 3):
        out[((j,), (j, l), (j, k, l))] = ("Pm", ("f", j, k, l))
        out[((k,), (k, l), (j, k, l))] = ("etanat", j, ("P", ("F", k, l)))
        out[((l,), (k, l), (j, k, l))] = ("etanat", j, ("eta", k, (l,)))
    return out


def _canonical_mid(a, c):
    """First intermediate pair for a singleton ``a`` inside triple ``c``."""
    return min((p for p in itertools.combinations(c, 2) if set(a) < set(p)), key=chain_id)


class Diagram:
    """The index-category diagram of a datum as stack-level transformations."""

    def __init__(self, d):
        self.d = d
        self.tw = d.towers()
        self.n = d.n
        self.J = build_index_J(self.n)
        self.gen = _generator_keys(self.tw, self.n)
        self.coh = _coherence_keys(self.tw, self.n)
        self.trans = {}
        for (a, b), key in self.gen.items():
            self.trans[(a, b)] = self.tw.T(key)
        for c in [c for c in chains(self.n) if len(c) == 3]:
            for a in itertools.combinations(c, 1):
                mid = _canonical_mid(a, c)
                self.trans[(a, c)] = compose_transformations(self.trans[(a, mid)],
                                                             self.trans[(mid, c)])

    def value(self, chain):
        return self.tw.pushed(chain)

    def at(self, x):
        """The pseudofunctor over the index category at base element ``x``."""
        J = self.J
        cs = chains(self.n)
        at = {chain_id(c): self.value(c).at[x] for c in cs}
        along = {}
        for c in cs:
            along[index_morphism(c, c)] = identity_functor(at[chain_id(c)])
        for (a, b), t in self.trans.items():
            along[index_morphism(a, b)] = t.component[x]
        comp_iso = {}
        for (a, mid, c), key in self.coh.items():
            comps = self.tw.M(key)[x]
            comp_iso[(index_morphism(a, mid), index_morphism(mid, c))] = _c(comps)
        return PseudoFunctor(J, at, along, comp_iso)

    def transition(self, x, y, Dx, Dy):
        """Transformation ``D_x ⇒ D_y`` from the stacks' transition functors."""
        X = self.d.base
        cs = chains(self.n)
        comp = {chain_id(c): self.value(c).transition(x, y) for c in cs}
        square = {}
        rel = X.mor(x, y)
        for c in cs:
            V = self.value(c)
            square[index_morphism(c, c)] = {o: V.at[y].id(V.transition(x, y).obj(o))
                                            for o in V.at[x].objects}
        for (a, b), t in self.trans.items():
            cat = self.value(b).at[y]
            sq = _c(t.square[rel])
            square[index_morphism(a, b)] = {o: cat.inverse(f) for o, f in sq.items()}
        return PseudoTransformation(Dx, Dy, comp, square)


def build_diagram(d):
    """Per base element, the pseudofunctor over the index category."""
    diag = Diagram(d)
    return {x: diag.at(x) for x in d.base.elements}


def glue_G(d, diagram=None):
    """Pointwise descent over the index category; a strict stack on ``X``."""
    diag = diagram or Diagram(d)
    X = d.base
    Ds = {x: diag.at(x) for x in X.elements}
    at = {x: descent_category(Ds[x]) for x in X.elements}
    along = {}
    for a, b in sorted(X.leq):
        if a == b:
            along[X.mor(a, b)] = identity_functor(at[a])
        else:
            t = diag.transition(a, b, Ds[a], Ds[b])
            along[X.mor(a, b)] = induced_on_descent(t, at[a], at[b])
    return PosetStack(X, at, along)


def glue_morphism(mor, src_glued=None, dst_glued=None):
    """Functors between glued values induced by a gluing morphism, per base element."""
    d, e = mor.src, mor.dst
    dd, de = Diagram(d), Diagram(e)
    btw = _Between(mor)
    n = d.n
    keys = {}
    for c in chains(n):
        key = ("G", c[-1])
        for k in reversed(c[:-1]):
            key = btw.lift(k, key)
        keys[c] = ("P", key)
    sq_cells = {}
    for k, l in itertools.combinations(range(n + 1), 2):
        g = _g_mod(mor, k, l, btw)
        src = compose_transformations(btw.T(keys[(k,)]), de.trans[((k,), (k, l))])
        dst = compose_transformations(dd.trans[((k,), (k, l))], btw.T(keys[(k, l)]))
        sq_cells[((k,), (k, l))] = ("direct", push_modification(g, src, dst).component)
        sq_cells[((l,), (k, l))] = ("inverse", btw.eta_nat(k, keys[(l,)]).component)
    for k, l, m in itertools.combinations(range(n + 1), 3):
        g = _g_mod(mor, l, m, btw)
        lifted = _lift_modification(btw, k, g, ("G", l), btw.lift(l, ("G", m)), l, m)
        src_t = compose_transformations(btw.T(keys[(k, l)]), de.trans[((k, l), (k, l, m))])
        dst_t = compose_transformations(dd.trans[((k, l), (k, l, m))], btw.T(keys[(k, l, m)]))
        mod = Modification(compose_transformations(btw.T(("R", k, keys[(l,)])),
                                                   e.towers().T(e.towers().F_lift((k,), l, m))),
                           compose_transformations(d.towers().T(d.towers().F_lift((k,), l, m)),
                                                   btw.T(("R", k, keys[(l, m)]))),
                           lifted)
        sq_cells[((k, l), (k, l, m))] = ("direct", push_modification(mod, src_t, dst_t).component)
        sq_cells[((l, m), (k, l, m))] = ("inverse", btw.eta_nat(k, keys[(l, m)]).component)
        nat = btw.eta_nat(l, keys[(m,)])
        inv = {}
        for x in d.base.stratum(k):
            cat = nat.dst.component[x].dst
            inv[x] = {y: cat.inverse(f) for y, f in _c(nat.component[x]).items()}
        src_k = compose_transformations(btw.T(("R", k, keys[(m,)])),
                                        e.towers().T(e.towers().eta_lift((k,), l, (m,))))
        dst_k = compose_transformations(d.towers().T(d.towers().eta_lift((k,), l, (m,))),
                                        btw.T(("R", k, keys[(l, m)])))
        src_p = compose_transformations(btw.T(keys[(k, m)]), de.trans[((k, m), (k, l, m))])
        dst_p = compose_transformations(dd.trans[((k, m), (k, l, m))], btw.T(keys[(k, l, m)]))
        pm = push_modification(Modification(src_k, dst_k, inv), src_p, dst_p)
        sq_cells[((k, m), (k, l, m))] = ("direct", pm.component)
    A = src_glued or glue_G(d, dd)
    B = dst_glued or glue_G(e, de)
    out = {}
    for x in d.base.elements:
        Dx, Ex = dd.at(x), de.at(x)
        comp = {chain_id(c): btw.T(keys[c]).component[x] for c in chains(n)}
        square = {}
        for c in chains(n):
            V = de.value(c).at[x]
            square[index_morphism(c, c)] = {o: V.id(comp[chain_id(c)].obj(o))
                                            for o in Dx.at[chain_id(c)].objects}
        for (a, b), (mode, cells) in sq_cells.items():
            cat = de.value(b).at[x]
            cx = _c(cells[x])
            if mode == "inverse":
                cx = {o: cat.inverse(f) for o, f in cx.items()}
            square[index_morphism(a, b)] = cx
        for c in [c for c in chains(n) if len(c) == 3]:
            for a in itertools.combinations(c, 1):
                mid = _canonical_mid(a, c)
                s1, s2 = index_morphism(a, mid), index_morphism(mid, c)
                cat = de.value(c).at[x]
                F2 = de.trans[(mid, c)].component[x]
                D1 = dd.trans[(a, mid)].component[x]
                square[index_morphism(a, c)] = {
                    o: cat.then(F2.mor(square[s1][o]), square[s2][D1.obj(o)])
                    for o in Dx.at[chain_id(a)].objects}
        t = PseudoTransformation(Dx, Ex, comp, square)
        out[x] = (t, induced_on_descent(t, A.at[x], B.at[x]))
    return out


# ---------------------------------------------------------------------------
# round trips


def _terminal_leg(apex, target):
    (only,) = target.objects
    return FunctorData(apex, target, {o: only for o in apex.objects},
                       {m: target.id(only) for m, _, _ in apex.morphisms})


def _unit_component(G, push, x):
    """``η`` at a single base element, as a mediator into ``push.at[x]``."""
    up = push.base.up(x, push.sub_elements)
    legs = {s: G.transition(x, s) for s in up}
    return mediator(push.up_diagram(x), G.at[x], legs, _cone_isos(G, x, up), desc=push.at[x])


def _eta_nat_family(T, x, y, target, src_obj, dst_obj, up):
    """Family ``T_s(C(x≤s)y) → C'(x≤s)(T_x y)`` inverted squares, looked up."""
    X = T.src.base
    fam = tuple(T.dst.at[s].inverse(T.sq(X.mor(x, s), y)) for s in up)
    found = target.lookup_mor(src_obj, dst_obj, fam)
    if found is None:
        raise ConeIncoherent("naturality family is not a descent morphism", {"element": x})
    return found


def _cone_generators(n):
    gens = []
    for k, l in itertools.combinations(range(n + 1), 2):
        gens.append(((k,), (k, l)))
        gens.append(((l,), (k, l)))
    for k, l, m in itertools.combinations(range(n + 1), 3):
        gens.append(((k, l), (k, l, m)))
        gens.append(((l, m), (k, l, m)))
        gens.append(((k, m), (k, l, m)))
    return gens


def phi_cone(d, j, x, diag):
    """Legs and generating leg isomorphisms of the cone defining ``Φ_j`` at ``x``."""
    tw = diag.tw
    apex = d.stacks[j].at[x]
    legs = {}
    for c in chains(d.n):
        target = diag.value(c).at[x]
        if c[0] < j:
            legs[c] = _terminal_leg(apex, target)
        elif len(c) == 1:
            k = c[0]
            legs[c] = (_unit_component(d.stacks[j], tw.pushed((j,)), x) if k == j
                       else tw.T(("F", j, k)).component[x])
        elif len(c) == 2:
            k, l = c
            legs[c] = compose_functors(tw.T(("F", j, l)).component[x],
                                       tw.T(("eta", k, (l,))).component[x])
        else:
            k, l, m = c
            legs[c] = compose_functors(tw.T(("F", j, m)).component[x],
                                       tw.T(("eta", l, (m,))).component[x],
                                       tw.T(("eta", k, (l, m))).component[x])
    isos = {}
    for a, b in _cone_generators(d.n):
        target = diag.value(b).at[x]
        Db = diag.trans[(a, b)].component[x]
        La, Lb = legs[a], legs[b]
        if b[0] < j:
            isos[(a, b)] = {y: target.id(Lb.obj(y)) for y in apex.objects}
            continue
        comps = {}
        for y in apex.objects:
            src_obj, dst_obj = Db.obj(La.obj(y)), Lb.obj(y)
            if len(a) == 1 and len(b) == 2 and a[0] == b[0]:
                k, l = b
                if k > j:
                    comps[y] = tw.mod_at(("f", j, k, l), x, y)
                else:
                    F = tw.T(("F", j, l))
                    up = d.base.up(x, tw.S[j])
                    comps[y] = _eta_nat_family(F, x, y, target, src_obj, dst_obj, up)
            elif len(a) == 2 and b[:2] == a:
                k, l, m = b
                w = tw.T(("F", j, l)).component[x].obj(y)
                first = tw.mod_at(("etanat", k, ("P", ("F", l, m))), x, w)
                E = tw.T(("eta", k, (l, m))).component[x]
                comps[y] = target.then(first, E.mor(tw.mod_at(("f", j, l, m), x, y)))
            elif len(a) == 2 and a == (b[0], b[2]):
                k, l, m = b
                w = tw.T(("F", j, m)).component[x].obj(y)
                comps[y] = tw.mod_at(("etanat", k, ("eta", l, (m,))), x, w)
            else:
                comps[y] = target.id(dst_obj)
            if target.src(comps[y]) != src_obj or target.dst(comps[y]) != dst_obj:
                raise ConeIncoherent("leg isomorphism has the wrong endpoints",
                                     {"morphism": [chain_id(a), chain_id(b)], "object": y})
        isos[(a, b)] = comps
    return apex, legs, isos


def _mediate(diag, x, apex, legs, isos, desc):
    D = diag.at(x)
    legs_j = {chain_id(c): L for c, L in legs.items()}
    isos_j = {index_morphism(a, b): v for (a, b), v in isos.items()}
    return mediator(D, apex, legs_j, isos_j, desc=desc)


def roundtrip_counit(d, glued=None):
    """Certify ``Ψ_j∘Φ_j ≅ Id`` and ``Φ_j∘Ψ_j ≅ Id`` on every level and element.

    The cube for ``k<l<m<p`` is the cocycle condition of the cone of ``Φ_k``
    at ``{l} ⊆ {l,m,p}``, so a failing cube is reported as an incoherent cone
    before anything is glued.
    """
    rep = Report()
    cube = check_gluing_datum(d)
    if not cube.ok:
        for v in cube.violations:
            if v.get("kind") == "cube":
                rep.add("cone-incoherent", level=v["levels"][0], element=v["element"],
                        detail=v)
            else:
                rep.add(v.get("kind", "invalid-datum"), detail=v)
        rep.info["certified"] = 0
        return rep
    diag = Diagram(d)
    G = glued or glue_G(d, diag)
    tw = diag.tw
    certified = 0
    for j in range(d.n + 1):
        for x in tw.S[j]:
            try:
                apex, legs, isos = phi_cone(d, j, x, diag)
                Phi = _mediate(diag, x, apex, legs, isos, G.at[x])
            except ConeIncoherent as e:
                rep.add("cone-incoherent", level=j, element=x, detail=e.witness)
                continue
            pi = projection(G.at[x], chain_id((j,)))
            eps = projection(tw.pushed((j,)).at[x], x)
            Psi = compose_functors(pi, eps)
            if find_nat_iso(compose_functors(Phi, Psi), identity_functor(apex)) is None:
                rep.add("psi-phi-not-identity", level=j, element=x)
            elif find_nat_iso(compose_functors(Psi, Phi), identity_functor(G.at[x])) is None:
                rep.add("phi-psi-not-identity", level=j, element=x)
            else:
                certified += 1
    rep.info["certified"] = certified
    return rep


def xi_cone(G, d, x, diag):
    """Legs and generating isomorphisms of the cone defining ``Ξ`` at ``x``."""
    tw = diag.tw
    apex = G.at[x]
    eta = {k: tw.T(("eta", k, ())).component[x] for k in range(d.n + 1)}
    PF = {(k, l): tw.T(("P", ("F", k, l))).component[x]
          for k, l in itertools.combinations(range(d.n + 1), 2)}
    legs = {}
    for c in chains(d.n):
        if len(c) == 1:
            legs[c] = eta[c[0]]
        elif len(c) == 2:
            legs[c] = compose_functors(eta[c[0]], PF[c])
        else:
            k, l, m = c
            legs[c] = compose_functors(eta[k], PF[(k, l)],
                                       tw.T(("P", tw.F_lift((k,), l, m))).component[x])
    isos = {}
    for a, b in _cone_generators(d.n):
        target = diag.value(b).at[x]
        Db = diag.trans[(a, b)].component[x]
        comps = {}
        for y in apex.objects:
            src_obj, dst_obj = Db.obj(legs[a].obj(y)), legs[b].obj(y)
            if len(a) == 1 and a[0] == b[1] and len(b) == 2:
                k, l = b
                f = tw.mod_at(("etanat", k, ("eta", l, ())), x, y)
                comps[y] = target.inverse(f)
            elif len(a) == 2 and len(b) == 3 and a == b[1:]:
                k, l, m = b
                H = compose_transformations(tw.T(("eta", l, ())), tw.T(("P", ("F", l, m))))
                up = d.base.up(x, tw.S[k])
                comps[y] = target.inverse(
                    _eta_nat_family(H, x, y, target, dst_obj, src_obj, up))
            elif len(a) == 2 and len(b) == 3 and a == (b[0], b[2]):
                k, l, m = b
                f = tw.mod_at(("Pm", ("f", k, l, m)), x, eta[k].obj(y))
                comps[y] = target.inverse(f)
            else:
                comps[y] = target.id(dst_obj)
            if target.src(comps[y]) != src_obj or target.dst(comps[y]) != dst_obj:
                raise ConeIncoherent("leg isomorphism has the wrong endpoints",
                                     {"morphism": [chain_id(a), chain_id(b)], "object": y})
        isos[(a, b)] = comps
    return apex, legs, isos


def roundtrip_unit(G, datum=None, glued=None):
    """Certify the comparison ``Ξ: G ⇒ G_Σ R_Σ G`` is a pointwise equivalence."""
    d = datum or restrict_R(G)
    diag = Diagram(d)
    glued = glued or glue_G(d, diag)
    rep = Report()
    xi = {}
    for x in G.base.elements:
        try:
            apex, legs, isos = xi_cone(G, d, x, diag)
            xi[x] = _mediate(diag, x, apex, legs, isos, glued.at[x])
        except ConeIncoherent as e:
            rep.add("cone-incoherent", element=x, detail=e.witness)
            continue
        eq = is_equivalence(xi[x], quasi_inverse=False)
        if not eq.ok:
            rep.add("not-equivalence", element=x, detail=eq.to_dict())
    rep.info["certified"] = len(xi) - len(rep.violations)
    rep.info["components"] = xi
    return rep


def glued_object_counts(d):
    G = glue_G(d)
    return {x: len(G.at[x].objects) for x in d.base.elements}


__all__ = [
    "GluingDatum", "GluingMorphism", "GluingModification", "build_index_J",
    "build_diagram", "check_gluing_datum", "check_gluing_morphism",
    "check_gluing_modification", "glue_G", "glue_morphism", "restrict_R",
    "restrict_R_morphism", "roundtrip_counit", "roundtrip_unit",
]
