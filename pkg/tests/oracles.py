"""Independent re-implementations used to cross-check the library.

Each oracle is written from the definitions, iterates in a different order
from the library, and shares no helpers with it beyond plain data access.
"""
import itertools

from strata.fincat import FinCat


# ---------------------------------------------------------------------------
# category axioms, checked in reverse iteration order


def category_violations(c):
    """Set of ``(kind, locator)`` pairs for every broken category axiom."""
    found = set()
    src = {m: s for m, s, _ in c.morphisms}
    dst = {m: d for m, _, d in c.morphisms}
    objs = set(c.objects)
    mors = list(reversed(c.morphisms))
    for m, s, d in mors:
        if s not in objs or d not in objs:
            found.add(("unknown-endpoint", m))
    for o in reversed(c.objects):
        i = c.identity.get(o)
        if i not in src:
            found.add(("identity-missing", o))
            continue
        if src[i] != o or dst[i] != o:
            found.add(("identity-endpoints", o))
            continue
        for m, s, d in mors:
            if s == o and c.comp.get((i, m)) != m:
                found.add(("unit-left", (o, m)))
            if d == o and c.comp.get((m, i)) != m:
                found.add(("unit-right", (o, m)))
    for (f, g), h in c.comp.items():
        if f not in dst or g not in src or dst[f] != src[g]:
            found.add(("comp-extra", (f, g)))
        elif h not in src or src[h] != src[f] or dst[h] != dst[g]:
            found.add(("comp-endpoints", (f, g)))
    for h, _, _ in mors:
        for g, _, _ in mors:
            if src[g] != dst.get(h, object()):
                continue
            if (h, g) not in c.comp:
                found.add(("comp-missing", (h, g)))
    known = set(src)

    def table(f, g):
        h = c.comp.get((f, g))
        return h if (f in known and g in known and h in known) else None

    for h, _, _ in mors:
        for g, _, _ in mors:
            if src[h] != dst[g]:
                continue
            hg = table(g, h)
            if hg is None:
                continue
            for f, _, _ in mors:
                if dst[f] != src[g]:
                    continue
                gf = table(f, g)
                if gf is None:
                    continue
                if table(gf, h) != table(f, hg):
                    found.add(("associativity", (f, g, h)))
    return found


def report_as_set(rep):
    """Map a validation report onto the oracle's ``(kind, locator)`` shape."""
    out = set()
    for v in rep.violations:
        kind = v["kind"]
        if kind == "associativity":
            out.add((kind, tuple(v["triple"])))
        elif kind in ("comp-missing", "comp-extra", "comp-endpoints"):
            out.add((kind, tuple(v["pair"])))
        elif kind in ("unit-left", "unit-right"):
            out.add((kind, (v["object"], v["morphism"])))
        elif kind == "unknown-endpoint":
            out.add((kind, v["morphism"]))
        else:
            out.add((kind, v["object"]))
    return out


# ---------------------------------------------------------------------------
# descent families, enumerated with the shape objects in reverse order


def descent_families(D):
    """All ``(xs, phis)`` descent families of a pseudofunctor, as dicts.

    Objects are chosen last-shape-object first; a morphism's ``φ`` is chosen
    as soon as both endpoints are fixed, and every unit or cocycle condition
    is tested once all of its arrows are fixed.
    """
    shape = D.shape
    order = list(reversed(shape.objects))
    steps = []
    placed = set()
    for a in order:
        steps.append(("obj", a))
        placed.add(a)
        for s, x, y in shape.morphisms:
            if x in placed and y in placed and ("mor", s) not in steps:
                steps.append(("mor", s))
    pos = {st: i for i, st in enumerate(steps)}
    checks = {i: [] for i in range(len(steps))}
    for a in shape.objects:
        checks[pos[("mor", shape.id(a))]].append(("unit", a))
    for (s, t), u in shape.comp.items():
        last = max(pos[("mor", s)], pos[("mor", t)], pos[("mor", u)])
        checks[last].append(("cocycle", (s, t, u)))

    xs, phis, out = {}, {}, []

    def holds(check):
        kind, data = check
        if kind == "unit":
            a = data
            cat = D.at[a]
            unit = D.unit_at(a, xs[a])
            return cat.comp.get((unit, phis[shape.id(a)])) == cat.identity[xs[a]]
        s, t, u = data
        a, c = shape.src(s), shape.dst(t)
        cat = D.at[c]
        lhs = phis[u]
        step1 = D.comp_at(s, t, xs[a])
        step2 = D.along[t].on_mor[phis[s]]
        rhs = cat.comp[(cat.comp[(step1, step2)], phis[t])]
        return lhs == rhs

    def isos(cat, a, b):
        out = []
        for f, s, d in cat.morphisms:
            if s != a or d != b:
                continue
            if any(cat.comp.get((f, g)) == cat.identity[a] and cat.comp.get((g, f)) == cat.identity[b]
                   for g, s2, d2 in cat.morphisms if s2 == b and d2 == a):
                out.append(f)
        return out

    def rec(i):
        if i == len(steps):
            out.append((dict(xs), dict(phis)))
            return
        kind, key = steps[i]
        if kind == "obj":
            for x in D.at[key].objects:
                xs[key] = x
                if all(holds(ch) for ch in checks[i]):
                    rec(i + 1)
            xs.pop(key, None)
        else:
            a, b = shape.src(key), shape.dst(key)
            for f in isos(D.at[b], D.along[key].on_obj[xs[a]], xs[b]):
                phis[key] = f
                if all(holds(ch) for ch in checks[i]):
                    rec(i + 1)
            phis.pop(key, None)

    rec(0)
    return out


# ---------------------------------------------------------------------------
# sections of a two-representation, by plain product enumeration


def section_families(alpha):
    """``(xs, phis)`` with ``φ_g: α(g)(x_src) ≅ x_dst`` meeting every 2-cell.

    Only positive 1-words are supported, which covers every fixture.
    """
    P = alpha.presentation
    points = list(P.basepoints)
    gens = list(P.gen1)
    out = []
    for choice in itertools.product(*(alpha.at[b].objects for b in points)):
        xs = dict(zip(points, choice))
        pools = []
        for g, s, d in gens:
            cat = alpha.at[d]
            a = alpha.along1[g].on_obj[xs[s]]
            pools.append([f for f, s2, d2 in cat.morphisms
                          if s2 == a and d2 == xs[d] and _invertible(cat, f)])
        for arrows in itertools.product(*pools):
            phis = dict(zip([g for g, _, _ in gens], arrows))
            if all(_cell_holds(alpha, xs, phis, c) for c, _, _ in P.gen2):
                out.append((xs, phis))
    return out


def _invertible(cat, f):
    s, d = cat.src(f), cat.dst(f)
    return any(cat.comp.get((f, g)) == cat.identity[s] and cat.comp.get((g, f)) == cat.identity[d]
               for g, s2, d2 in cat.morphisms if s2 == d and d2 == s)


def _word_phi(alpha, xs, phis, w):
    """``φ_w`` for a positive word, built letter by letter."""
    P = alpha.presentation
    here = w.start
    arrow_ = alpha.at[here].identity[xs[here]]
    for g, e in w.letters:
        assert e > 0
        d = dict((h, dd) for h, _, dd in P.gen1)[g]
        cat = alpha.at[d]
        arrow_ = cat.comp[(alpha.along1[g].on_mor[arrow_], phis[g])]
        here = d
    return arrow_


def _cell_holds(alpha, xs, phis, c):
    P = alpha.presentation
    (src_w, dst_w), = [(s, d) for name, s, d in P.gen2 if name == c]
    x = xs[src_w.start]
    end = P.word_end(src_w)
    cat = alpha.at[end]
    lhs = _word_phi(alpha, xs, phis, src_w)
    rhs = cat.comp[(alpha.along2[c][x], _word_phi(alpha, xs, phis, dst_w))]
    return lhs == rhs


# ---------------------------------------------------------------------------
# cone over a circle: tuples (A, x, φ, θ)


def pairs_category(c, T):
    """Objects ``(x, φ: T(x) ≅ x)``; morphisms ``m: x → x'`` with ``φ'∘T(m) = m∘φ``."""
    objs = [(x, f) for x in c.objects for f, s, d in c.morphisms
            if s == T.on_obj[x] and d == x and _invertible(c, f)]
    mors = []
    for (x, f), (y, g) in itertools.product(objs, repeat=2):
        for m, s, d in c.morphisms:
            if s == x and d == y and c.comp[(T.on_mor[m], g)] == c.comp[(f, m)]:
                mors.append((m, (x, f), (y, g)))
    return objs, mors


def cone_tuples(alpha0, c, T, F_obj):
    """Tuple category ``(A, x, φ, θ)`` as a :class:`FinCat`.

    ``A`` is an object of ``alpha0``, ``(x, φ)`` a pair, and ``θ: F(A) → x``
    an isomorphism of pairs, where ``F_obj`` sends ``A`` to its pair.
    Morphisms are ``(a, m)`` with ``m∘θ = θ'∘F(a)`` in ``c``.  Because every
    ``F`` in the cone fixtures is constant on one pair and sends all
    arrows to its identity, ``F(a)`` is that identity.
    """
    pobjs, pmors = pairs_category(c, T)
    pm = {(s, d): [m for m, s2, d2 in pmors if (s2, d2) == (s, d)] for s in pobjs for d in pobjs}
    objects = []
    for A in alpha0.objects:
        FA = F_obj[A]
        for p in pobjs:
            for th in pm[(FA, p)]:
                if _invertible(c, th):
                    objects.append((A, p, th))
    names = {o: f"{o[0]}|{o[1][0]}|{o[1][1]}|{o[2]}" for o in objects}
    morphisms, parts = [], {}
    for o1, o2 in itertools.product(objects, repeat=2):
        (A, p, th), (B, q, th2) = o1, o2
        for a, s, d in alpha0.morphisms:
            if s != A or d != B:
                continue
            for m in pm[(p, q)]:
                # F(a) is the identity of the common pair
                if c.comp[(th, m)] == th2:
                    mid = f"{a};{m}:{names[o1]}>{names[o2]}"
                    morphisms.append((mid, names[o1], names[o2]))
                    parts[mid] = (a, m, o1, o2)
    identity = {}
    for o in objects:
        A, p, _ = o
        ida, idx = alpha0.identity[A], c.identity[p[0]]
        identity[names[o]] = f"{ida};{idx}:{names[o]}>{names[o]}"
    comp = {}
    for f, s, d in morphisms:
        for g, s2, d2 in morphisms:
            if d != s2:
                continue
            a, m, o1, _ = parts[f]
            b, n, _, o3 = parts[g]
            comp[(f, g)] = f"{alpha0.comp[(a, b)]};{c.comp[(m, n)]}:{names[o1]}>{names[o3]}"
    return FinCat(list(names.values()), morphisms, identity, comp)


def iso_classes(c):
    """Number of isomorphism classes of objects."""
    seen, count = set(), 0
    for o in c.objects:
        if o in seen:
            continue
        count += 1
        for p in c.objects:
            if any(_invertible(c, f) for f, s, d in c.morphisms if s == o and d == p):
                seen.add(p)
    return count


# ---------------------------------------------------------------------------
# coherence of a cone over a pseudofunctor, from the definitions


def cone_is_coherent(D, legs, gen_isos):
    """Whether generator leg isos extend to a coherent, natural cone.

    Identities get the inverse unit, every composite of two generators is
    pasted, and then every composable pair and every apex morphism is
    re-checked.  Returns ``(ok, reason)``.
    """
    shape = D.shape
    isos = {s: dict(v) for s, v in gen_isos.items()}
    ids = {shape.identity[a] for a in shape.objects}
    for a in shape.objects:
        cat = D.at[a]
        L = legs[a]
        isos[shape.identity[a]] = {y: _inverse(cat, D.unit_at(a, L.on_obj[y])) for y in L.src.objects}
    for (s, t), u in sorted(shape.comp.items()):
        if s in ids or t in ids or u in isos:
            continue
        if s in gen_isos and t in gen_isos:
            isos[u] = _pasted(D, legs, isos, s, t)
    for (s, t), u in sorted(shape.comp.items()):
        if s not in isos or t not in isos or u not in isos:
            return False, ("undetermined", u)
        if _pasted(D, legs, isos, s, t) != isos[u]:
            return False, ("cocycle", s, t)
    for s, a, b in shape.morphisms:
        cat = D.at[b]
        La, Lb, F = legs[a], legs[b], D.along[s]
        for h, y, y2 in La.src.morphisms:
            lhs = cat.comp[(F.on_mor[La.on_mor[h]], isos[s][y2])]
            rhs = cat.comp[(isos[s][y], Lb.on_mor[h])]
            if lhs != rhs:
                return False, ("naturality", s, h)
    return True, None


def _inverse(cat, f):
    s, d = cat.src(f), cat.dst(f)
    for g, s2, d2 in cat.morphisms:
        if s2 == d and d2 == s and cat.comp.get((f, g)) == cat.identity[s] \
                and cat.comp.get((g, f)) == cat.identity[d]:
            return g
    raise AssertionError(f"{f} is not invertible")


def _pasted(D, legs, isos, s, t):
    shape = D.shape
    a = shape.src(s)
    cat = D.at[shape.dst(t)]
    out = {}
    for y in legs[a].src.objects:
        x = legs[a].on_obj[y]
        first = cat.comp[(D.comp_at(s, t, x), D.along[t].on_mor[isos[s][y]])]
        out[y] = cat.comp[(first, isos[t][y])]
    return out
