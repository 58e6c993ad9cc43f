"""Named example data and a seeded generator of small stratified stacks."""
import itertools
import random

from strata.constructible import (ConstructibleDatum, Link, RepMorphism, TMStratDatum,
                                  TripleDatum, complete_constructible, complete_rep_morphism,
                                  p_kl)
from strata.errors import InvalidData, SizeCapExceeded
from strata.fincat import (FunctorData, arrow, compose_functors, cyclic_group, discrete, empty,
                           find_equivalence, identity_functor, indiscrete, iter_functors,
                           poset_category, terminal)
from strata.monodromy import (BundleDatum, Presentation2, PresentationMap, TwoRep, identity_map,
                              product_bundle, word)
from strata.gluing import glue_G, restrict_R
from strata.posetstack import PosetStack, StratPoset, restrict_stack


def iso2():
    return indiscrete(["p", "q"])


def swap(c):
    """The automorphism of ``Iso₂`` or of the discrete ``{p, q}`` exchanging ``p`` and ``q``."""
    flip = {"p": "q", "q": "p"}
    on_mor = {}
    for m, s, d in c.morphisms:
        target = [n for n, s2, d2 in c.morphisms if s2 == flip[s] and d2 == flip[d]]
        on_mor[m] = target[0]
    return FunctorData(c, c, flip, on_mor)


def chain3():
    return poset_category(["a", "b", "c"], [("a", "b"), ("b", "c"), ("a", "c")])


def strict_stack(X, at, along):
    """A strict stack from values and functors on the generating pairs ``x<y``.

    Identities are added; missing composite pairs are filled by composing
    along the first available intermediate element.
    """
    full = {X.mor(x, x): identity_functor(at[x]) for x in X.elements}
    full.update({X.mor(a, b): F for (a, b), F in along.items()})
    pairs = sorted((a, b) for a, b in X.leq if a != b)
    changed = True
    while changed:
        changed = False
        for a, b in pairs:
            if X.mor(a, b) in full:
                continue
            for y in X.elements:
                if y not in (a, b) and X.le(a, y) and X.le(y, b) \
                        and X.mor(a, y) in full and X.mor(y, b) in full:
                    full[X.mor(a, b)] = compose_functors(full[X.mor(a, y)], full[X.mor(y, b)])
                    changed = True
                    break
    return PosetStack(X, at, full)


def two_level_chain():
    """Closed point ``c`` below open point ``o``; ``𝟚 → Iso₂``."""
    X = StratPoset(["c", "o"], [("c", "o")], {"c": 0, "o": 1})
    two, iso = arrow(), iso2()
    T = FunctorData(two, iso, {"a": "p", "b": "q"}, {"f": "p>q", "id_a": "p>p", "id_b": "q>q"})
    return strict_stack(X, {"c": two, "o": iso}, {("c", "o"): T})


def arrow_chain(levels):
    """A chain ``x0 < x1 < …`` of ``levels`` elements, all values ``𝟚``, identity functors."""
    xs = [f"x{i}" for i in range(levels)]
    X = StratPoset(xs, list(zip(xs, xs[1:])), {x: i for i, x in enumerate(xs)})
    two = arrow()
    return strict_stack(X, {x: two for x in xs},
                        {(a, b): identity_functor(two) for a, b in zip(xs, xs[1:])})


def antichain():
    """Two open points over one closed point: ``c < o1``, ``c < o2``."""
    X = StratPoset(["c", "o1", "o2"], [("c", "o1"), ("c", "o2")], {"c": 0, "o1": 1, "o2": 1})
    two, one = arrow(), terminal()
    to_one = FunctorData(two, one, {"a": "*", "b": "*"}, {m: "id_*" for m, _, _ in two.morphisms})
    return strict_stack(X, {"c": two, "o1": two, "o2": one},
                        {("c", "o1"): identity_functor(two), ("c", "o2"): to_one})


def z2_top_chain(levels=4):
    """A chain with ``Z/2`` at the top level and ``𝟙`` below; constant transitions."""
    xs = [f"x{i}" for i in range(levels)]
    X = StratPoset(xs, list(zip(xs, xs[1:])), {x: i for i, x in enumerate(xs)})
    one, z2 = terminal(), cyclic_group(2)
    at = {x: one for x in xs[:-1]}
    at[xs[-1]] = z2
    along = {}
    for a, b in zip(xs, xs[1:]):
        along[(a, b)] = FunctorData(one, at[b], {"*": "*"}, {"id_*": at[b].id("*")})
    return strict_stack(X, at, along)


# ---------------------------------------------------------------------------
# random fixtures


_LIBRARY = (
    ("one", terminal, 4),
    ("two", arrow, 4),
    ("disc2", lambda: discrete(["p", "q"]), 2),
    ("chain3", chain3, 1),
    ("iso2", iso2, 1),
    ("z2", lambda: cyclic_group(2), 2),
)


def random_strat_poset(rng, max_elements=5, max_levels=4):
    n = rng.randint(1, max_elements)
    top = max(0, min(max_levels, n) - 1 - rng.randint(0, 1))
    levels = list(range(top + 1)) + [rng.randint(0, top) for _ in range(n - top - 1)]
    rng.shuffle(levels)
    names = [f"e{i}" for i in range(n)]
    level = dict(zip(names, levels))
    leq = [(a, b) for a in names for b in names if level[a] < level[b] and rng.random() < 0.6]
    return StratPoset(names, leq, level)


def _covers(X):
    out = []
    for a, b in sorted(X.leq):
        if a != b and not any(y not in (a, b) and X.le(a, y) and X.le(y, b) for y in X.elements):
            out.append((a, b))
    return out


def random_stack(seed, max_elements=5, max_levels=4, attempts=200):
    """A strict stack with values drawn from a small library of categories.

    Functors on covering pairs are drawn at random until every pair of paths
    between two elements composes to the same functor.
    """
    rng = random.Random(seed)
    X = random_strat_poset(rng, max_elements, max_levels)
    covers = _covers(X)
    names = [n for n, _, w in _LIBRARY for _ in range(w)]
    makers = {n: f for n, f, _ in _LIBRARY}
    for _ in range(attempts):
        at = {x: makers[rng.choice(names)]() for x in X.elements}
        along = {}
        for a, b in covers:
            options = list(iter_functors(at[a], at[b]))
            if not options:
                break
            along[(a, b)] = rng.choice(options)
        else:
            try:
                return strict_stack(X, at, along)
            except InvalidData:
                continue
    at = {x: terminal() for x in X.elements}
    one = identity_functor(terminal())
    return strict_stack(X, at, {p: one for p in covers})


def _glues_within_caps(G):
    try:
        glue_G(restrict_R(G))
    except SizeCapExceeded:
        return False
    return True


def fixture_suite(count=24):
    """Named stacks for the round-trip and counting checks.

    Random stacks whose glued values would exceed the default size caps are
    skipped, so the seeds in the names are not always consecutive.
    """
    named = [("two_level_chain", two_level_chain()), ("arrow_chain3", arrow_chain(3)),
             ("arrow_chain4", arrow_chain(4)), ("antichain", antichain())]
    seeded = []
    seed = 0
    while len(named) + len(seeded) < count:
        G = random_stack(seed)
        if _glues_within_caps(G):
            seeded.append((f"random_{seed}", G))
        seed += 1
    return named + seeded


def random_base_change(seed):
    """``(X, V, F, C)`` with ``V`` up-closed, ``F`` an arbitrary subset and ``C`` on ``F``."""
    rng = random.Random(10_000 + seed)
    full = random_stack(rng.randrange(1 << 30))
    X = full.base
    gens = [x for x in X.elements if rng.random() < 0.5] or [X.elements[-1]]
    V = sorted({y for x in gens for y in X.up(x)})
    F = sorted(x for x in X.elements if rng.random() < 0.6) or [X.elements[0]]
    return X, V, F, restrict_stack(full, F)


# ---------------------------------------------------------------------------
# presentations and constructible data


def point(name="b"):
    return Presentation2([name])


def circle(base="o", gen="s"):
    return Presentation2([base], [(gen, base, base)])


def circle_rep(c, T, P=None):
    P = P or circle()
    (g, b, _), = P.gen1
    return TwoRep(P, {b: c}, {g: T})


def _over_point(base, P):
    return BundleDatum(base, P, {base.basepoints[0]: P}, {})


def cone_disk_tm():
    """Point stratum with a circle link into the circle stratum."""
    pt, P1 = point(), circle()
    link = Link(P1, identity_map(P1), _over_point(pt, P1))
    return TMStratDatum({0: pt, 1: P1}, {(0, 1): link})


def cone_disk(c, T, alpha0=None, choice=0):
    """Constructible datum on the cone: ``α_1 = (c, T)``, ``F_01`` hitting pair ``choice``.

    With no pairs ``α_0`` must be empty; it defaults to ``𝟙`` otherwise.
    """
    tm = cone_disk_tm()
    a1 = circle_rep(c, T)
    target = p_kl(tm, 0, 1, a1)
    pairs = target.at["b"]
    if alpha0 is None:
        alpha0 = terminal() if pairs.objects else empty()
    a0 = TwoRep(tm.strata[0], {"b": alpha0}, {})
    if alpha0.objects:
        obj = pairs.objects[choice]
        F = FunctorData(alpha0, pairs, {x: obj for x in alpha0.objects},
                        {m: pairs.id(obj) for m, _, _ in alpha0.morphisms})
    else:
        F = FunctorData(alpha0, pairs, {}, {})
    return ConstructibleDatum(tm, {0: a0, 1: a1}, {(0, 1): RepMorphism(a0, target, {"b": F})})


def nested_cone_tm():
    """Point, circle and torus strata; the torus is the product bundle over the circle."""
    pt, P1 = point(), circle()
    bd12 = product_bundle(P1, circle("t", "a"))
    P2 = bd12.total
    links = {(0, 1): Link(P1, identity_map(P1), _over_point(pt, P1)),
             (0, 2): Link(P2, identity_map(P2), _over_point(pt, P2)),
             (1, 2): Link(P2, identity_map(P2), bd12)}
    triple = TripleDatum({("o", "o.t"): "o.t"}, {("o", "o.a"): word("o.t", "o.a")},
                         {("s", "o.t"): word("o.t", "s.t")})
    return TMStratDatum({0: pt, 1: P1, 2: P2}, links, {(0, 1, 2): triple})


def torus_rep(c, Ta, Ts, cell=None):
    """A representation of the torus stratum: ``Ta`` along the fiber, ``Ts`` along the base."""
    P2 = nested_cone_tm().strata[2]
    if cell is None:
        cell = {x: c.id(Ta.obj(Ts.obj(x))) for x in c.objects}
    return TwoRep(P2, {"o.t": c}, {"o.a": Ta, "s.t": Ts}, {"s.a": cell})


def nested_cone_test_reps():
    iso, two = iso2(), arrow()
    return [torus_rep(iso, swap(iso), swap(iso)),
            torus_rep(iso, swap(iso), identity_functor(iso)),
            torus_rep(two, identity_functor(two), identity_functor(two))]


def equivalence_datum(tm, reps):
    """Constructible datum whose ``F_kl`` are the first equivalences found."""
    F = {}
    for k, l in itertools.combinations(sorted(tm.strata), 2):
        target = p_kl(tm, k, l, reps[l])
        comps = {}
        for b in tm.strata[k].basepoints:
            comps[b] = find_equivalence(reps[k].at[b], target.at[b])
            if comps[b] is None:
                raise ValueError(f"no equivalence for F_{k}{l} at {b}")
        F[(k, l)] = complete_rep_morphism(reps[k], target, comps)
    return complete_constructible(ConstructibleDatum(tm, reps, F))


def nested_cone_datum():
    tm = nested_cone_tm()
    two = arrow()
    reps = {0: TwoRep(tm.strata[0], {"b": two}, {}),
            1: circle_rep(two, identity_functor(two)),
            2: torus_rep(two, identity_functor(two), identity_functor(two))}
    d = equivalence_datum(tm, reps)
    d.test_reps = {2: nested_cone_test_reps()}
    return d


def point_chain_tm(n):
    """Strata and links that are all single points."""
    strata = {k: point(f"b{k}") for k in range(n + 1)}
    links = {}
    for k, l in itertools.combinations(range(n + 1), 2):
        L = point(f"y{k}{l}")
        links[(k, l)] = Link(L, PresentationMap(L, strata[l], {f"y{k}{l}": f"b{l}"}, {}),
                             BundleDatum(strata[k], L, {f"b{k}": L}, {}))
    triples = {(k, l, m): TripleDatum({(f"y{k}{l}", f"y{l}{m}"): f"y{k}{m}"})
               for k, l, m in itertools.combinations(range(n + 1), 3)}
    return TMStratDatum(strata, links, triples)


def point_chain_datum(n=3):
    """``𝟙`` below and ``Z/2`` at the top; ``F`` the unique functors."""
    tm = point_chain_tm(n)
    reps = {k: TwoRep(tm.strata[k], {f"b{k}": terminal() if k < n else cyclic_group(2)}, {})
            for k in range(n + 1)}
    F = {}
    for k, l in itertools.combinations(range(n + 1), 2):
        target = p_kl(tm, k, l, reps[l])
        b = f"b{k}"
        comp = next(iter_functors(reps[k].at[b], target.at[b]))
        F[(k, l)] = RepMorphism(reps[k], target, {b: comp})
    return complete_constructible(ConstructibleDatum(tm, reps, F))
