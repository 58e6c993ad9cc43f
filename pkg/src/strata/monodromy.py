"""2-representations of finitely presented 2-groupoids.

A presentation has basepoints, 1-generators and 2-generators between
parallel 1-words, plus relations between pastings of 2-generators.  Words are
``(start, letters)`` with letters ``(gen, +1)`` or ``(gen, -1)`` and are read
in path order.  A pasting is a source word and a list of whiskered steps
``(prefix, cell, sign, suffix)`` composed vertically.

A 2-representation sends words to functors strictly: a word evaluates to the
composite of its letters, and an inverse letter is only allowed when the
generator acts by an isomorphism of categories.
"""
import concurrent.futures
import dataclasses
import itertools

from strata.errors import (BundleIncoherent, EndpointMismatch, IllTypedWord, InvalidData,
                           SizeCapExceeded, UnknownIdentifier)
from strata.fincat import (FinCat, FunctorData, NatTransData, _width, compose_functors,
                           identity_functor, validate_category, validate_functor,
                           validate_nat_trans)
from strata.limits import current
from strata.report import Report


# ---------------------------------------------------------------------------
# words and pastings


@dataclasses.dataclass(frozen=True)
class Word:
    start: str
    letters: tuple = ()

    def __post_init__(self):
        object.__setattr__(self, "letters", tuple((g, int(e)) for g, e in self.letters))

    def __add__(self, other):
        return Word(self.start, self.letters + other.letters)

    def inverse(self, end):
        return Word(end, tuple((g, -e) for g, e in reversed(self.letters)))


def word(start, *letters):
    """``word("b", "s", "t^-1")`` builds a word from letter strings."""
    out = []
    for letter in letters:
        if isinstance(letter, tuple):
            out.append(letter)
        elif letter.endswith("^-1"):
            out.append((letter[:-3], -1))
        else:
            out.append((letter, 1))
    return Word(start, tuple(out))


@dataclasses.dataclass(frozen=True)
class Step:
    prefix: Word
    cell: str
    sign: int
    suffix: Word


@dataclasses.dataclass(frozen=True)
class Pasting:
    """Vertical composite of whiskered cells starting at ``source``."""

    source: Word
    steps: tuple = ()

    def __post_init__(self):
        object.__setattr__(self, "steps", tuple(self.steps))


def cell(P, name, sign=1, prefix=None, suffix=None):
    """A pasting consisting of one (whiskered) generating cell."""
    src_w, dst_w = P.cell_words(name)
    if sign < 0:
        src_w, dst_w = dst_w, src_w
    prefix = prefix if prefix is not None else Word(src_w.start)
    suffix = suffix if suffix is not None else Word(P.word_end(src_w))
    return Pasting(prefix + src_w + suffix, (Step(prefix, name, sign, suffix),))


# ---------------------------------------------------------------------------
# presentations


class Presentation2:
    """Basepoints, 1-generators ``(id, src, dst)``, 2-generators and relations.

    ``gen2`` entries are ``(id, source word, target word)``; ``rel2`` entries
    are ``(id, lhs pasting, rhs pasting)``.
    """

    def __init__(self, basepoints, gen1=(), gen2=(), rel2=()):
        self.basepoints = tuple(basepoints)
        self.gen1 = tuple((g, s, d) for g, s, d in gen1)
        self.gen2 = tuple((c, s, d) for c, s, d in gen2)
        self.rel2 = tuple((r, a, b) for r, a, b in rel2)
        self._g1 = {g: (s, d) for g, s, d in self.gen1}
        self._g2 = {c: (s, d) for c, s, d in self.gen2}

    def __repr__(self):
        return (f"Presentation2({len(self.basepoints)} basepoints, {len(self.gen1)} 1-cells, "
                f"{len(self.gen2)} 2-cells)")

    def gen_ends(self, g):
        if g not in self._g1:
            raise UnknownIdentifier(f"unknown 1-generator {g!r}", {"generator": g})
        return self._g1[g]

    def cell_words(self, c):
        if c not in self._g2:
            raise UnknownIdentifier(f"unknown 2-generator {c!r}", {"cell": c})
        return self._g2[c]

    def word_end(self, w):
        """Endpoint of ``w``; raises :class:`IllTypedWord` on a mismatch."""
        if w.start not in self.basepoints:
            raise IllTypedWord(f"word starts at unknown basepoint {w.start!r}",
                               {"start": w.start})
        here = w.start
        for i, (g, e) in enumerate(w.letters):
            s, d = self.gen_ends(g)
            if e < 0:
                s, d = d, s
            if s != here:
                raise IllTypedWord("letters are not composable",
                                   {"word": _show(w), "position": i, "expected": here, "found": s})
            here = d
        return here

    def pasting_ends(self, p):
        """Source and target word of a pasting, checking each step."""
        self.word_end(p.source)
        cur = p.source
        for i, st in enumerate(p.steps):
            s, d = self.cell_words(st.cell)
            if st.sign < 0:
                s, d = d, s
            if st.prefix.start != cur.start:
                raise IllTypedWord("step prefix starts elsewhere", {"step": i})
            src = st.prefix + s + st.suffix
            if src != cur:
                raise IllTypedWord("step does not start at the current word",
                                   {"step": i, "expected": _show(cur), "found": _show(src)})
            # whiskers must be composable with the cell
            self.word_end(st.prefix)
            if self.word_end(st.prefix) != s.start or self.word_end(s) != st.suffix.start:
                raise IllTypedWord("whiskers do not meet the cell", {"step": i})
            cur = st.prefix + d + st.suffix
        return p.source, cur

    def sub(self, basepoints, gen1=None, gen2=None):
        """Sub-presentation on the given basepoints and generators."""
        bs = set(basepoints)
        g1 = [g for g in self.gen1 if (gen1 is None and g[1] in bs and g[2] in bs)
              or (gen1 is not None and g[0] in gen1)]
        names = {g for g, _, _ in g1}
        if gen2 is None:
            g2 = [c for c in self.gen2 if all(x in names for x, _ in c[1].letters + c[2].letters)
                  and c[1].start in bs]
        else:
            g2 = [c for c in self.gen2 if c[0] in gen2]
        cells = {c for c, _, _ in g2}
        r2 = [r for r in self.rel2 if all(st.cell in cells for side in r[1:] for st in side.steps)
              and r[1].source.start in bs
              and all(x in names for x, _ in r[1].source.letters)]
        return Presentation2([b for b in self.basepoints if b in bs], g1, g2, r2)


def _show(w):
    return {"start": w.start, "letters": [g if e > 0 else f"{g}^-1" for g, e in w.letters]}


def validate_presentation(P):
    rep = Report()
    seen = set()
    for b in P.basepoints:
        if b in seen:
            rep.add("duplicate-basepoint", basepoint=b)
        seen.add(b)
    for g, s, d in P.gen1:
        for end in (s, d):
            if end not in seen:
                rep.add("ill-typed-word", generator=g, endpoint=end)
    if not rep.ok:
        return rep
    for c, s, d in P.gen2:
        try:
            if s.start != d.start or P.word_end(s) != P.word_end(d):
                rep.add("ill-typed-word", cell=c, source=_show(s), target=_show(d))
        except (IllTypedWord, UnknownIdentifier) as e:
            rep.add("ill-typed-word", cell=c, **e.witness)
    for r, a, b in P.rel2:
        try:
            if P.pasting_ends(a) != P.pasting_ends(b):
                rep.add("ill-typed-word", relation=r, reason="sides are not parallel")
        except (IllTypedWord, UnknownIdentifier) as e:
            rep.add("ill-typed-word", relation=r, **e.witness)
    return rep


# ---------------------------------------------------------------------------
# maps of presentations


class PresentationMap:
    """Basepoints to basepoints, 1-generators to words, 2-generators to pastings."""

    def __init__(self, src, dst, on_points, on_gen1, on_gen2=None):
        self.src = src
        self.dst = dst
        self.on_points = dict(on_points)
        self.on_gen1 = dict(on_gen1)
        self.on_gen2 = dict(on_gen2 or {})

    def word(self, w):
        out = Word(self.on_points[w.start])
        for g, e in w.letters:
            _, d = self.src.gen_ends(g)
            image = self.on_gen1[g]
            out = out + (image if e > 0 else image.inverse(self.on_points[d]))
        return out

    def pasting(self, p):
        steps = []
        for st in p.steps:
            inner = self.on_gen2[st.cell]
            pre, suf = self.word(st.prefix), self.word(st.suffix)
            inner_steps = inner.steps if st.sign > 0 else _reverse_steps(self.dst, inner)
            for s in inner_steps:
                steps.append(Step(pre + s.prefix, s.cell, s.sign, s.suffix + suf))
        return Pasting(self.word(p.source), tuple(steps))


def _reverse_steps(P, p):
    return tuple(Step(s.prefix, s.cell, -s.sign, s.suffix) for s in reversed(p.steps))


def identity_map(P):
    return PresentationMap(P, P, {b: b for b in P.basepoints},
                           {g: word(s, g) for g, s, _ in P.gen1},
                           {c: cell(P, c) for c, _, _ in P.gen2})


def compose_maps(f, g):
    """``f`` then ``g``."""
    return PresentationMap(f.src, g.dst, {b: g.on_points[f.on_points[b]] for b in f.src.basepoints},
                           {x: g.word(w) for x, w in f.on_gen1.items()},
                           {c: g.pasting(p) for c, p in f.on_gen2.items()})


def validate_map(f):
    rep = Report()
    for g, s, d in f.src.gen1:
        w = f.on_gen1.get(g)
        if w is None:
            rep.add("ill-typed-word", generator=g, reason="no image")
            continue
        try:
            end = f.dst.word_end(w)
        except (IllTypedWord, UnknownIdentifier) as e:
            rep.add("ill-typed-word", generator=g, **e.witness)
            continue
        if w.start != f.on_points[s] or end != f.on_points[d]:
            rep.add("ill-typed-word", generator=g, reason="image endpoints differ")
    if not rep.ok:
        return rep
    for c, s, d in f.src.gen2:
        p = f.on_gen2.get(c)
        if p is None:
            rep.add("ill-typed-word", cell=c, reason="no image")
            continue
        try:
            ends = f.dst.pasting_ends(p)
        except (IllTypedWord, UnknownIdentifier) as e:
            rep.add("ill-typed-word", cell=c, **e.witness)
            continue
        if ends != (f.word(s), f.word(d)):
            rep.add("ill-typed-word", cell=c, reason="image pasting has the wrong boundary")
    return rep


# ---------------------------------------------------------------------------
# 2-representations


class TwoRep:
    """Categories at basepoints, functors on 1-generators, isos on 2-generators.

    ``along2[c]`` maps each object ``x`` of the start category to a morphism
    ``α(source)(x) → α(target)(x)``.  Unit and composite comparison isos are
    identities because words are evaluated strictly.
    """

    def __init__(self, presentation, at, along1, along2=None):
        self.presentation = presentation
        self.at = dict(at)
        self.along1 = dict(along1)
        self.along2 = {c: dict(getattr(v, "components", v)) for c, v in (along2 or {}).items()}
        self._inv = {}
        self._memo = {}

    def _inverse_functor(self, g):
        if g not in self._inv:
            F = self.along1[g]
            objs = {v: k for k, v in F.on_obj.items()}
            mors = {v: k for k, v in F.on_mor.items()}
            if len(objs) != len(F.src.objects) or len(objs) != len(F.dst.objects) \
                    or len(mors) != len(F.dst.morphisms) or len(mors) != len(F.src.morphisms):
                raise IllTypedWord("inverse letter on a generator that is not an isomorphism",
                                   {"generator": g})
            self._inv[g] = FunctorData(F.dst, F.src, objs, mors)
        return self._inv[g]

    def letter(self, g, e):
        return self.along1[g] if e > 0 else self._inverse_functor(g)

    def word(self, w):
        """The functor of a word (identity for the empty word)."""
        if w not in self._memo:
            P = self.presentation
            P.word_end(w)
            F = identity_functor(self.at[w.start])
            for g, e in w.letters:
                F = compose_functors(F, self.letter(g, e))
            self._memo[w] = F
        return self._memo[w]

    def cell(self, c, sign, x):
        comps = self.along2[c]
        if sign > 0:
            return comps[x]
        src_w, _ = self.presentation.cell_words(c)
        cat = self.at[self.presentation.word_end(src_w)]
        return cat.inverse(comps[x])

    def pasting(self, p, x):
        """Component at ``x`` of the 2-cell of a pasting."""
        P = self.presentation
        src, dst = P.pasting_ends(p)
        cat = self.at[P.word_end(src)]
        out = cat.id(self.word(src).obj(x))
        for st in p.steps:
            y = self.word(st.prefix).obj(x)
            f = self.word(st.suffix).mor(self.cell(st.cell, st.sign, y))
            out = cat.then(out, f)
        return out

    def pasting_components(self, p):
        return {x: self.pasting(p, x) for x in self.at[p.source.start].objects}


def validate_two_rep(alpha):
    P = alpha.presentation
    rep = validate_presentation(P)
    if not rep.ok:
        return rep
    for b in P.basepoints:
        if b not in alpha.at:
            rep.add("missing-category", basepoint=b)
        else:
            rep.extend(validate_category(alpha.at[b]), basepoint=b)
    for g, s, d in P.gen1:
        F = alpha.along1.get(g)
        if F is None:
            rep.add("missing-functor", generator=g)
            continue
        if F.src != alpha.at.get(s) or F.dst != alpha.at.get(d):
            rep.add("functor-endpoints", generator=g)
            continue
        rep.extend(validate_functor(F), generator=g)
    if not rep.ok:
        return rep
    for c, s, d in P.gen2:
        comps = alpha.along2.get(c)
        if comps is None:
            rep.add("missing-cell", cell=c)
            continue
        try:
            Fs, Fd = alpha.word(s), alpha.word(d)
        except IllTypedWord as e:
            rep.add("ill-typed-word", cell=c, **e.witness)
            continue
        sub = validate_nat_trans(NatTransData(Fs, Fd, comps))
        rep.extend(sub, cell=c)
        if sub.ok:
            for x, f in comps.items():
                if not Fs.dst.is_iso(f):
                    rep.add("cell-not-invertible", cell=c, object=x)
    if not rep.ok:
        return rep
    for r, a, b in P.rel2:
        for x in alpha.at[a.source.start].objects:
            if alpha.pasting(a, x) != alpha.pasting(b, x):
                rep.add("relation", relation=r, object=x)
                break
    return rep


def pullback_rep(f, alpha):
    """``x ↦ α(f(x))``, generators to the functors and cells of their images."""
    rep = validate_map(f)
    if not rep.ok:
        raise IllTypedWord("map of presentations is ill-typed", rep.first())
    P = f.src
    at = {b: alpha.at[f.on_points[b]] for b in P.basepoints}
    along1 = {g: alpha.word(f.on_gen1[g]) for g, _, _ in P.gen1}
    along2 = {c: alpha.pasting_components(f.on_gen2[c]) for c, _, _ in P.gen2}
    return TwoRep(P, at, along1, along2)


# ---------------------------------------------------------------------------
# global sections


class SectionCat(FinCat):
    """Sections ``(x_b, φ_g: α(g)(x_src) → x_dst)`` of a 2-representation."""

    def __init__(self, rep, families, mor_families, objects, morphisms, identity, comp):
        super().__init__(objects, morphisms, identity, comp)
        self.rep = rep
        self.families = families
        self.mor_families = mor_families
        P = rep.presentation
        self.point_pos = {b: i for i, b in enumerate(P.basepoints)}
        self.gen_pos = {g: i for i, (g, _, _) in enumerate(P.gen1)}
        self.family_index = {fam: o for o, fam in families.items()}
        self.mor_index = {}
        for m, s, d in self.morphisms:
            self.mor_index[(s, d, mor_families[m])] = m

    def x(self, obj, b):
        return self.families[obj][0][self.point_pos[b]]

    def phi(self, obj, g):
        return self.families[obj][1][self.gen_pos[g]]

    def phi_word(self, obj, w):
        """``φ_w: α(w)(x_start) → x_end`` for any word."""
        return _phi_word(self.rep, dict(zip(self.rep.presentation.basepoints,
                                            self.families[obj][0])),
                         dict(zip([g for g, _, _ in self.rep.presentation.gen1],
                                  self.families[obj][1])), w)

    def lookup(self, xs, phis):
        return self.family_index.get((tuple(xs), tuple(phis)))

    def lookup_mor(self, src, dst, comps):
        return self.mor_index.get((src, dst, tuple(comps)))


def _phi_word(alpha, xs, phis, w):
    P = alpha.presentation
    here = w.start
    cat = alpha.at[here]
    out = cat.id(xs[here])
    for g, e in w.letters:
        s, d = P.gen_ends(g)
        L = alpha.letter(g, e)
        nxt = d if e > 0 else s
        tgt = alpha.at[nxt]
        if e > 0:
            step = phis[g]
        else:
            step = tgt.inverse(L.mor(phis[g]))
        out = tgt.then(L.mor(out), step)
        here = nxt
    return out


def _cell_plan(P):
    """For each 1-generator position, the cells whose letters are all assigned then."""
    pos = {g: i for i, (g, _, _) in enumerate(P.gen1)}
    plan = [[] for _ in P.gen1]
    free = []
    for c, s, d in P.gen2:
        used = [pos[g] for g, _ in s.letters + d.letters]
        if used:
            plan[max(used)].append(c)
        else:
            free.append(c)
    return plan, free


def _enumerate_sections(alpha, prefix, cap):
    P = alpha.presentation
    points = P.basepoints
    gens = P.gen1
    plan, free = _cell_plan(P)
    xs, phis, out = {}, {}, []
    count = [0]

    def tick():
        count[0] += 1
        if count[0] > cap:
            raise SizeCapExceeded("section enumeration passed the candidate cap",
                                  {"bound": cap, "stage": "families"})

    def cells_ok(cells):
        for c in cells:
            s, d = P.cell_words(c)
            x = xs[s.start]
            lhs = _phi_word(alpha, xs, phis, s)
            rhs = alpha.at[P.word_end(s)].then(alpha.cell(c, 1, x), _phi_word(alpha, xs, phis, d))
            if lhs != rhs:
                return False
        return True

    def rec_gen(i):
        if i == len(gens):
            out.append((tuple(xs[b] for b in points), tuple(phis[g] for g, _, _ in gens)))
            return
        g, s, d = gens[i]
        cat = alpha.at[d]
        for f in cat.isos(alpha.along1[g].obj(xs[s]), xs[d]):
            tick()
            phis[g] = f
            if cells_ok(plan[i]):
                rec_gen(i + 1)
        phis.pop(g, None)

    def rec_point(i):
        if i == len(points):
            if cells_ok(free):
                rec_gen(0)
            return
        b = points[i]
        cands = prefix if (i == 0 and prefix is not None) else alpha.at[b].objects
        for x in cands:
            tick()
            xs[b] = x
            rec_point(i + 1)
        xs.pop(b, None)

    rec_point(0)
    return out, count[0]


def global_sections_nu(alpha):
    """The category of sections: the 2-limit of ``α`` over its presentation."""
    lim = current()
    P = alpha.presentation
    cap = lim.max_families
    if lim.workers > 1 and P.basepoints and len(alpha.at[P.basepoints[0]].objects) > 1:
        first = alpha.at[P.basepoints[0]].objects
        with concurrent.futures.ThreadPoolExecutor(max_workers=lim.workers) as pool:
            parts = list(pool.map(lambda x: _enumerate_sections(alpha, (x,), cap), first))
        if sum(n for _, n in parts) > cap:
            raise SizeCapExceeded("section enumeration passed the candidate cap",
                                  {"bound": cap, "stage": "families"})
        fams = [f for p, _ in parts for f in p]
    else:
        fams, _ = _enumerate_sections(alpha, None, cap)
    opos = {b: {o: i for i, o in enumerate(alpha.at[b].objects)} for b in P.basepoints}
    mpos = {d: {m: i for i, (m, _, _) in enumerate(alpha.at[d].morphisms)} for _, _, d in P.gen1}
    fams.sort(key=lambda f: (tuple(opos[b][x] for b, x in zip(P.basepoints, f[0])),
                             tuple(mpos[d][p] for (_, _, d), p in zip(P.gen1, f[1]))))
    if len(fams) > lim.max_objects:
        raise SizeCapExceeded(f"section category has {len(fams)} objects",
                              {"objects": len(fams), "bound": lim.max_objects, "stage": "objects"})
    w = _width(len(fams))
    ids = [f"s{i:0{w}d}" for i in range(len(fams))]
    families = dict(zip(ids, fams))
    morphisms, mor_families = [], {}
    count = 0
    raw = []
    for a in ids:
        xa, pa = families[a]
        for b in ids:
            xb, pb = families[b]
            homs = [alpha.at[p].hom(x, y) for p, x, y in zip(P.basepoints, xa, xb)]
            for comps in itertools.product(*homs):
                m = dict(zip(P.basepoints, comps))
                good = True
                for (g, s, d), fa, fb in zip(P.gen1, pa, pb):
                    cat = alpha.at[d]
                    if cat.then(alpha.along1[g].mor(m[s]), fb) != cat.then(fa, m[d]):
                        good = False
                        break
                if good:
                    raw.append((a, b, tuple(comps)))
                    count += 1
                    if count > lim.max_morphisms:
                        raise SizeCapExceeded("section category has too many morphisms",
                                              {"bound": lim.max_morphisms, "stage": "morphisms"})
    w2 = _width(len(raw))
    index = {}
    for i, (a, b, comps) in enumerate(raw):
        m = f"u{i:0{w2}d}"
        morphisms.append((m, a, b))
        mor_families[m] = comps
        index[(a, b, comps)] = m
    identity = {a: index[(a, a, tuple(alpha.at[p].id(x) for p, x in zip(P.basepoints,
                                                                          families[a][0])))]
                for a in ids}
    comp = {}
    by_src = {}
    for m, a, b in morphisms:
        by_src.setdefault(a, []).append((m, b))
    for m, a, b in morphisms:
        for m2, c in by_src.get(b, []):
            comps = tuple(alpha.at[p].then(f, g) for p, f, g in
                          zip(P.basepoints, mor_families[m], mor_families[m2]))
            comp[(m, m2)] = index[(a, c, comps)]
    return SectionCat(alpha, families, mor_families, ids, morphisms, identity, comp)


def section_projection(nu, b):
    """Evaluation of sections at a basepoint."""
    alpha = nu.rep
    pos = nu.point_pos[b]
    return FunctorData(nu, alpha.at[b], {o: nu.families[o][0][pos] for o in nu.objects},
                       {m: nu.mor_families[m][pos] for m, _, _ in nu.morphisms})


# ---------------------------------------------------------------------------
# bundles and transport


@dataclasses.dataclass
class TransportDatum:
    """Transport along a base 1-generator between fibers of a bundle.

    ``points`` maps fiber basepoints, ``gens`` maps fiber 1-generators
    bijectively; ``paths[x]`` is a word in the total presentation from ``x``
    to its image; ``fillers[δ]`` is a pasting ``paths[x]·T(δ) ⇒ δ·paths[y]``.
    """

    src_fiber: Presentation2
    dst_fiber: Presentation2
    points: dict
    gens: dict
    paths: dict
    fillers: dict = dataclasses.field(default_factory=dict)


@dataclasses.dataclass
class HomotopyDatum:
    """``betas[x]``: fiber word ``T0(x) → T1(x)``; ``fillers[x]``: ``w0_x·β_x ⇒ w1_x``."""

    src: TransportDatum
    dst: TransportDatum
    betas: dict
    fillers: dict


@dataclasses.dataclass
class BundleDatum:
    base: Presentation2
    total: Presentation2
    fibers: dict
    transports: dict
    homotopies: dict = dataclasses.field(default_factory=dict)


def _fiber_rep(alpha, F):
    return TwoRep(F, {b: alpha.at[b] for b in F.basepoints},
                  {g: alpha.along1[g] for g, _, _ in F.gen1},
                  {c: alpha.along2[c] for c, _, _ in F.gen2})


def validate_transport(td, total):
    rep = Report()
    F0, F1 = td.src_fiber, td.dst_fiber
    if sorted(td.points.values()) != sorted(F1.basepoints) or set(td.points) != set(F0.basepoints):
        rep.add("endpoint-mismatch", reason="points are not a bijection of fiber basepoints")
    if sorted(td.gens.values()) != sorted(g for g, _, _ in F1.gen1) \
            or set(td.gens) != {g for g, _, _ in F0.gen1}:
        rep.add("endpoint-mismatch", reason="generators are not a bijection")
    if not rep.ok:
        return rep
    for g, s, d in F0.gen1:
        if F1.gen_ends(td.gens[g]) != (td.points[s], td.points[d]):
            rep.add("endpoint-mismatch", generator=g, reason="generator image endpoints")
    for x in F0.basepoints:
        w = td.paths.get(x)
        try:
            ok = w is not None and w.start == x and total.word_end(w) == td.points[x]
        except (IllTypedWord, UnknownIdentifier):
            ok = False
        if not ok:
            rep.add("endpoint-mismatch", point=x, reason="path does not run from x to T(x)")
    if not rep.ok:
        return rep
    for g, s, d in F0.gen1:
        p = td.fillers.get(g)
        want = (td.paths[s] + word(td.points[s], td.gens[g]), word(s, g) + td.paths[d])
        try:
            ends = total.pasting_ends(p) if p is not None else None
        except (IllTypedWord, UnknownIdentifier) as e:
            rep.add("endpoint-mismatch", generator=g, **e.witness)
            continue
        if ends != want:
            rep.add("endpoint-mismatch", generator=g, reason="filler has the wrong boundary")
    return rep


def _require(rep, exc, message):
    if not rep.ok:
        raise exc(message, rep.first())


def transport_functor(td, alpha, src_nu=None, dst_nu=None):
    """``ν_{F_0}(α) → ν_{F_1}(α)``: move each component along its path."""
    _require(validate_transport(td, alpha.presentation), EndpointMismatch,
             "transport datum does not type-check")
    A = src_nu or global_sections_nu(_fiber_rep(alpha, td.src_fiber))
    B = dst_nu or global_sections_nu(_fiber_rep(alpha, td.dst_fiber))
    F0, F1 = td.src_fiber, td.dst_fiber
    back = {v: k for k, v in td.points.items()}
    gback = {v: k for k, v in td.gens.items()}
    on_obj = {}
    for o in A.objects:
        xs = {b: A.x(o, b) for b in F0.basepoints}
        ys = tuple(alpha.word(td.paths[back[c]]).obj(xs[back[c]]) for c in F1.basepoints)
        qs = []
        for g1, _, _ in F1.gen1:
            g = gback[g1]
            s, d = F0.gen_ends(g)
            cat = alpha.at[td.points[d]]
            qs.append(cat.then(alpha.pasting(td.fillers[g], xs[s]),
                               alpha.word(td.paths[d]).mor(A.phi(o, g))))
        found = B.lookup(ys, qs)
        if found is None:
            raise EndpointMismatch("transported family is not a section", {"object": o})
        on_obj[o] = found
    on_mor = {}
    for m, s, d in A.morphisms:
        comps = A.mor_families[m]
        pos = {b: i for i, b in enumerate(F0.basepoints)}
        image = tuple(alpha.word(td.paths[back[c]]).mor(comps[pos[back[c]]])
                      for c in F1.basepoints)
        on_mor[m] = B.lookup_mor(on_obj[s], on_obj[d], image)
        if on_mor[m] is None:
            raise EndpointMismatch("transported morphism is not a section morphism",
                                   {"morphism": m})
    return FunctorData(A, B, on_obj, on_mor)


def compose_transports(t1, t2):
    """Concatenated datum: paths ``w1_x·w2_{T1 x}``, fillers pasted."""
    points = {x: t2.points[y] for x, y in t1.points.items()}
    gens = {g: t2.gens[h] for g, h in t1.gens.items()}
    paths = {x: t1.paths[x] + t2.paths[t1.points[x]] for x in t1.points}
    fillers = {}
    for g, s, d in t1.src_fiber.gen1:
        h = t1.gens[g]
        f2 = t2.fillers[h]
        f1 = t1.fillers[g]
        pre = t1.paths[s]
        post = t2.paths[t1.points[d]]
        steps = [Step(pre + st.prefix, st.cell, st.sign, st.suffix) for st in f2.steps]
        steps += [Step(st.prefix, st.cell, st.sign, st.suffix + post) for st in f1.steps]
        fillers[g] = Pasting(paths[s] + word(points[s], gens[g]), tuple(steps))
    return TransportDatum(t1.src_fiber, t2.dst_fiber, points, gens, paths, fillers)


def identity_transport(F):
    return TransportDatum(F, F, {b: b for b in F.basepoints}, {g: g for g, _, _ in F.gen1},
                          {b: Word(b) for b in F.basepoints},
                          {g: Pasting(word(s, g)) for g, s, _ in F.gen1})


def validate_homotopy(hd, total):
    rep = Report()
    t0, t1 = hd.src, hd.dst
    for x in t0.src_fiber.basepoints:
        b = hd.betas.get(x)
        try:
            ok = (b is not None and b.start == t0.points[x]
                  and t0.dst_fiber.word_end(b) == t1.points[x]
                  and all(g in {h for h, _, _ in t0.dst_fiber.gen1} for g, _ in b.letters))
        except (IllTypedWord, UnknownIdentifier):
            ok = False
        if not ok:
            rep.add("endpoint-mismatch", point=x, reason="beta is not a fiber word T0(x) → T1(x)")
            continue
        p = hd.fillers.get(x)
        want = (t0.paths[x] + b, t1.paths[x])
        try:
            ends = total.pasting_ends(p) if p is not None else None
        except (IllTypedWord, UnknownIdentifier) as e:
            rep.add("endpoint-mismatch", point=x, **e.witness)
            continue
        if ends != want:
            rep.add("endpoint-mismatch", point=x, reason="filler has the wrong boundary")
    return rep


def transport_iso(hd, alpha, src_fun=None, dst_fun=None):
    """Isomorphism between the transport functors of ``hd.src`` and ``hd.dst``."""
    _require(validate_homotopy(hd, alpha.presentation), EndpointMismatch,
             "homotopy datum does not type-check")
    G0 = src_fun or transport_functor(hd.src, alpha)
    G1 = dst_fun or transport_functor(hd.dst, alpha, src_nu=G0.src, dst_nu=G0.dst)
    A, B = G0.src, G0.dst
    t1 = hd.dst
    F1 = t1.dst_fiber
    back1 = {v: k for k, v in t1.points.items()}
    comps = {}
    for o in A.objects:
        s0, s1 = G0.obj(o), G1.obj(o)
        fam = []
        for z in F1.basepoints:
            x = back1[z]
            cat = alpha.at[z]
            phi_beta = B.phi_word(s0, hd.betas[x])
            fam.append(cat.then(cat.inverse(phi_beta), alpha.pasting(hd.fillers[x], A.x(o, x))))
        m = B.lookup_mor(s0, s1, tuple(fam))
        if m is None:
            raise EndpointMismatch("homotopy components are not a section morphism",
                                   {"object": o})
        comps[o] = m
    return NatTransData(G0, G1, comps, iso=True)


def compose_homotopies(h01, h12):
    """Vertical composite: ``β = β01·β12``, filler ``h01·β12`` then ``h12``."""
    betas = {x: h01.betas[x] + h12.betas[x] for x in h01.betas}
    fillers = {}
    for x in h01.betas:
        f01, f12 = h01.fillers[x], h12.fillers[x]
        steps = [Step(st.prefix, st.cell, st.sign, st.suffix + h12.betas[x]) for st in f01.steps]
        steps += list(f12.steps)
        fillers[x] = Pasting(h01.src.paths[x] + betas[x], tuple(steps))
    return HomotopyDatum(h01.src, h12.dst, betas, fillers)


def _word_transport(bd, w):
    """Transport datum of a positive base word by concatenation."""
    td = identity_transport(bd.fibers[w.start])
    for g, e in w.letters:
        if e < 0:
            raise IllTypedWord("base 2-cells must use positive words", {"generator": g})
        td = compose_transports(td, bd.transports[g])
    return td


def pushforward_rep(bd, alpha):
    """Sections over each fiber, transported along the base."""
    base = bd.base
    _require(validate_two_rep(alpha), InvalidData, "representation on the total space is invalid")
    nus = {b: global_sections_nu(_fiber_rep(alpha, bd.fibers[b])) for b in base.basepoints}
    along1 = {}
    for g, s, d in base.gen1:
        along1[g] = transport_functor(bd.transports[g], alpha, nus[s], nus[d])
    out = TwoRep(base, nus, along1)
    along2 = {}
    for c, s, d in base.gen2:
        hd = bd.homotopies[c]
        G0, G1 = out.word(s), out.word(d)
        along2[c] = transport_iso(hd, alpha, G0, G1).components
    out.along2 = along2
    rep = validate_two_rep(out)
    if not rep.ok:
        raise BundleIncoherent("pushforward violates a base relation", rep.first())
    return out


def product_bundle(base, fiber):
    """``base × fiber`` with transport along ``γ`` by the paths ``γ.x``.

    Total basepoints are ``b.x``; fiber generators ``b.δ``; base generators
    lifted to ``γ.x``; squares ``γ.δ: γ.x·b1.δ ⇒ b0.δ·γ.y`` close each pair.
    Base 2-cells ``ε: u ⇒ v`` lift to ``ε.x`` between the lifted words.
    """
    pts, g1, g2 = [], [], []
    for b in base.basepoints:
        pts += [f"{b}.{x}" for x in fiber.basepoints]
        g1 += [(f"{b}.{d}", f"{b}.{s}", f"{b}.{t}") for d, s, t in fiber.gen1]
    for g, b0, b1 in base.gen1:
        g1 += [(f"{g}.{x}", f"{b0}.{x}", f"{b1}.{x}") for x in fiber.basepoints]
        for d, s, t in fiber.gen1:
            g2.append((f"{g}.{d}", word(f"{b0}.{s}", f"{g}.{s}", f"{b1}.{d}"),
                       word(f"{b0}.{s}", f"{b0}.{d}", f"{g}.{t}")))

    def lift_fiber(b, w):
        return Word(f"{b}.{w.start}", tuple((f"{b}.{g}", e) for g, e in w.letters))

    def lift_base(w, x):
        return Word(f"{w.start}.{x}", tuple((f"{g}.{x}", e) for g, e in w.letters))

    for b in base.basepoints:
        for c, s, d in fiber.gen2:
            g2.append((f"{b}.{c}", lift_fiber(b, s), lift_fiber(b, d)))
    for c, s, d in base.gen2:
        for x in fiber.basepoints:
            g2.append((f"{c}.{x}", lift_base(s, x), lift_base(d, x)))
    total = Presentation2(pts, g1, g2)
    fibers = {}
    for b in base.basepoints:
        fibers[b] = Presentation2([f"{b}.{x}" for x in fiber.basepoints],
                                  [(f"{b}.{d}", f"{b}.{s}", f"{b}.{t}") for d, s, t in fiber.gen1],
                                  [(f"{b}.{c}", lift_fiber(b, s), lift_fiber(b, d))
                                   for c, s, d in fiber.gen2])
    transports = {}
    for g, b0, b1 in base.gen1:
        fillers = {}
        for d, s, t in fiber.gen1:
            fillers[f"{b0}.{d}"] = cell(total, f"{g}.{d}")
        transports[g] = TransportDatum(
            fibers[b0], fibers[b1], {f"{b0}.{x}": f"{b1}.{x}" for x in fiber.basepoints},
            {f"{b0}.{d}": f"{b1}.{d}" for d, _, _ in fiber.gen1},
            {f"{b0}.{x}": word(f"{b0}.{x}", f"{g}.{x}") for x in fiber.basepoints}, fillers)
    bd = BundleDatum(base, total, fibers, transports, {})
    for c, s, d in base.gen2:
        t0, t1 = _word_transport(bd, s), _word_transport(bd, d)
        end = base.word_end(s)
        bd.homotopies[c] = HomotopyDatum(
            t0, t1, {f"{s.start}.{x}": Word(f"{end}.{x}") for x in fiber.basepoints},
            {f"{s.start}.{x}": cell(total, f"{c}.{x}") for x in fiber.basepoints})
    return bd


def identity_bundle(P):
    """The identity map of ``P`` as a bundle with one-point fibers."""
    fibers = {b: Presentation2([b]) for b in P.basepoints}
    transports = {g: TransportDatum(fibers[s], fibers[d], {s: d}, {}, {s: word(s, g)})
                  for g, s, d in P.gen1}
    bd = BundleDatum(P, P, fibers, transports, {})
    for c, s, d in P.gen2:
        end = P.word_end(s)
        bd.homotopies[c] = HomotopyDatum(_word_transport(bd, s), _word_transport(bd, d),
                                         {s.start: Word(end)}, {s.start: cell(P, c)})
    return bd


__all__ = [
    "BundleDatum", "HomotopyDatum", "Pasting", "Presentation2", "PresentationMap", "SectionCat",
    "Step", "TransportDatum", "TwoRep", "Word", "cell", "compose_homotopies", "compose_maps",
    "compose_transports", "global_sections_nu", "identity_bundle", "identity_map", "identity_transport",
    "product_bundle", "pullback_rep", "pushforward_rep", "section_projection", "transport_functor",
    "transport_iso", "validate_homotopy", "validate_map", "validate_presentation",
    "validate_transport", "validate_two_rep", "word",
]
