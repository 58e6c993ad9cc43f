"""One test per acceptance criterion; each prints a single PASS/FAIL line."""
import os
import time

import pytest

import oracles
from strata import fixtures as fx
from strata.constructible import check_composites, constructible_diagram, glue_constructible
from strata.fincat import (
    arrow, compose_functors, discrete, find_equivalence, find_nat_iso, identity_functor, is_equivalence,
)
from strata.gluing import build_diagram, check_gluing_datum, glue_G, restrict_R, roundtrip_counit, roundtrip_unit
from strata.io import Workspace
from strata.monodromy import (
    BundleDatum, Presentation2, TransportDatum, TwoRep, compose_transports, global_sections_nu,
    identity_bundle, product_bundle, pushforward_rep, section_projection, transport_functor, word,
)
from strata.posetstack import check_base_change
from test_cli import COMMANDS, run
from test_gluing import automorphism_mutations, cones_coherent_by_oracle


@pytest.fixture
def report(capsys):
    def emit(name, ok, detail):
        with capsys.disabled():
            print(f"\n[{'PASS' if ok else 'FAIL'}] {name}: {detail}")
        assert ok, detail
    return emit


def test_gluing_round_trip(suite, report):
    start = time.perf_counter()
    bad = []
    for name, G in suite:
        d = restrict_R(G)
        glued = glue_G(d)
        if not (roundtrip_counit(d, glued).ok and roundtrip_unit(G, d, glued).ok):
            bad.append(name)
    took = time.perf_counter() - start
    report("gluing round trip", len(suite) >= 20 and not bad and took < 60,
           f"{len(suite) - len(bad)}/{len(suite)} fixtures certified in {took:.1f}s {bad or ''}")


def test_glued_object_counts(suite, report):
    start = time.perf_counter()
    bad, checked = [], 0
    for name, G in suite:
        d = restrict_R(G)
        glued = glue_G(d)
        for x, D in build_diagram(d).items():
            checked += 1
            if len(glued.at[x].objects) != len(oracles.descent_families(D)):
                bad.append((name, x))
    took = time.perf_counter() - start
    report("glued object counts", not bad and took < 30,
           f"{checked - len(bad)}/{checked} base elements match the enumerator in {took:.1f}s {bad or ''}")


def _mutation_pool(suite):
    return list(suite) + [("z2_top_chain", fx.z2_top_chain(4))]


def test_cube_condition_soundness(suite, report):
    pool = _mutation_pool(suite)
    failing_restrictions = [n for n, G in pool if not check_gluing_datum(restrict_R(G)).ok]
    total, missed = 0, []
    for name, G in pool:
        d = restrict_R(G)
        for key in sorted(d.f):
            first = next(automorphism_mutations(d, key), None)
            if first is None:
                continue
            e, (x, _) = first
            total += 1
            rep = check_gluing_datum(e)
            w = rep.first()
            located = (not rep.ok and w["kind"] == "cube" and set(key) <= set(w["levels"])
                       and d.base.le(w["element"], x))
            if not located:
                missed.append(f"{name}{key}@{x}")
    report("cube condition soundness", not failing_restrictions and total > 0 and not missed,
           f"restrictions pass on {len(pool) - len(failing_restrictions)}/{len(pool)}; "
           f"{total - len(missed)}/{total} mutations rejected and located; missed {missed}")


def test_cube_checker_agrees_with_cone_oracle(suite, report):
    agree, total = 0, 0
    for name, G in _mutation_pool(suite):
        d = restrict_R(G)
        for key in sorted(d.f):
            for e, _ in automorphism_mutations(d, key):
                total += 1
                agree += check_gluing_datum(e).ok == cones_coherent_by_oracle(e)
    report("cube checker agrees with cone oracle", total > 0 and agree == total,
           f"{agree}/{total} mutations classified alike")


def test_base_change(report):
    start = time.perf_counter()
    bad = [s for s in range(50) if not check_base_change(*fx.random_base_change(s)).ok]
    took = time.perf_counter() - start
    report("base change", not bad and took < 30, f"{50 - len(bad)}/50 seeds certified in {took:.1f}s {bad or ''}")


def test_monodromy_sections(report):
    iso, two = fx.iso2(), arrow()
    counts = []
    for c, T in ((iso, fx.swap(iso)), (two, identity_functor(two))):
        alpha = fx.circle_rep(c, T)
        counts.append((len(global_sections_nu(alpha).objects), len(oracles.section_families(alpha))))
    report("monodromy sections", counts == [(2, 2), (2, 2)],
           f"(Iso2, swap) and (2, Id) give (computed, oracle) = {counts}")


def _bundle_fixtures():
    """(name, bundle, representation on the total space)."""
    out = []
    ws = Workspace.load(os.path.join(os.path.dirname(__file__), "data", "constructible.json"))
    tm = ws.get("nested_cone")
    torus_rep = ws.get("torus_swap")
    out.append(("torus_over_circle", tm.links[(1, 2)].bundle, torus_rep))
    circle = fx.circle("t", "a")
    bd = product_bundle(fx.circle(), circle)
    two = arrow()
    alpha = TwoRep(bd.total, {"o.t": two}, {"o.a": identity_functor(two), "s.t": identity_functor(two)},
                   {"s.a": {x: two.id(x) for x in two.objects}})
    out.append(("circle_times_circle", bd, alpha))
    total = Presentation2(["p", "q"], [("tp", "p", "q"), ("tq", "q", "p")])
    fiber = Presentation2(["p", "q"])
    td = TransportDatum(fiber, fiber, {"p": "q", "q": "p"}, {},
                        {"p": word("p", "tp"), "q": word("q", "tq")})
    alpha = TwoRep(total, {"p": two, "q": two}, {"tp": identity_functor(two), "tq": identity_functor(two)})
    out.append(("two_point_swap", BundleDatum(fx.circle(), total, {"o": fiber}, {"s": td}), alpha))
    return out


def test_pushforward_coherence(report):
    notes, ok = [], True
    iso = fx.iso2()
    fiber_rep = fx.circle_rep(iso, fx.swap(iso))
    over_point = product_bundle(fx.point(), fx.circle("t", "a"))
    alpha = TwoRep(over_point.total, {"b.t": iso}, {"b.a": fx.swap(iso)})
    trivial = find_equivalence(pushforward_rep(over_point, alpha).at["b"], global_sections_nu(fiber_rep))
    ok &= trivial is not None
    out = pushforward_rep(identity_bundle(fiber_rep.presentation), fiber_rep)
    ok &= is_equivalence(section_projection(out.at["o"], "o"), quasi_inverse=False).ok
    notes.append("trivial bundles certified" if ok else "trivial bundle not certified")
    pairs = 0
    for name, bd, rep in _bundle_fixtures():
        base = bd.base
        nus = pushforward_rep(bd, rep).at
        for g1, s1, d1 in base.gen1:
            for g2, s2, d2 in base.gen1:
                if s2 != d1:
                    continue
                pairs += 1
                t1, t2 = bd.transports[g1], bd.transports[g2]
                G1 = transport_functor(t1, rep, nus[s1], nus[d1])
                G2 = transport_functor(t2, rep, nus[s2], nus[d2])
                both = transport_functor(compose_transports(t1, t2), rep, nus[s1], nus[d2])
                if find_nat_iso(compose_functors(G1, G2), both) is None:
                    ok = False
                    notes.append(f"{name} {g1}.{g2} not isomorphic")
    report("pushforward coherence", ok and pairs > 0,
           f"{'; '.join(notes)}; {pairs} composable transport pairs checked")


def test_tube_composites(report):
    reps = fx.nested_cone_test_reps()
    rep = check_composites(fx.nested_cone_tm(), {2: reps})
    report("tube composites", rep.ok and rep.info["certified"] == len(reps),
           f"{rep.info.get('certified', 0)}/{len(reps)} test representations certified")


def _tuple_category(d, c, T):
    pairs = d.F[(0, 1)].dst.at["b"]
    F = d.F[(0, 1)].components["b"]
    alpha0 = d.reps[0].at["b"]
    F_obj = {A: (pairs.x(F.obj(A), "o"), pairs.phi(F.obj(A), "s")) for A in alpha0.objects}
    return oracles.cone_tuples(alpha0, c, T, F_obj)


def test_constructible_gluing(report):
    iso, disc = fx.iso2(), discrete(["p", "q"])
    details, ok = [], True
    for label, c in (("Iso2", iso), ("discrete", disc)):
        T = fx.swap(c)
        d = fx.cone_disk(c, T)
        glued = glue_constructible(d)
        tuples = _tuple_category(d, c, T)
        same = (len(glued.objects) == len(tuples.objects) == 0 or
                find_equivalence(glued, tuples) is not None)
        same &= len(glued.objects) == len(oracles.descent_families(constructible_diagram(d)))
        ok &= same
        details.append(f"{label}: glued {len(glued.objects)} vs tuples {len(tuples.objects)}")
    ok &= len(glue_constructible(fx.cone_disk(disc, fx.swap(disc))).objects) == 0
    report("constructible gluing", ok, "; ".join(details))


def test_determinism(report):
    bad = []
    for args in COMMANDS:
        runs = [run(*args) for _ in range(3)] + [run("--workers", "4", *args)]
        if not all(r == runs[0] for r in runs) or runs[0][0] != 0:
            bad.append(args[0])
    report("determinism", not bad, f"{len(COMMANDS) - len(bad)}/{len(COMMANDS)} commands byte-identical "
                                   f"over 3 runs and 4 workers {bad or ''}")
