import copy

import pytest

import oracles
from strata import fixtures as fx
from strata.constructible import (
    ConstructibleDatum, Link, RepMorphism, TMStratDatum, Tubes, _f_functors, check_composites,
    check_constructible, constructible_diagram, glue_constructible, p_kl, validate_tm,
)
from strata.fincat import (
    FunctorData, arrow, compose_functors, cyclic_group, discrete, find_equivalence, identity_functor,
    is_equivalence,
)
from strata.monodromy import (
    TwoRep, global_sections_nu, identity_bundle, identity_map, section_projection, word,
)
from strata.pseudo import projection, validate_pseudofunctor


def _cone_tuple_category(d, c, T):
    pairs = d.F[(0, 1)].dst.at["b"]
    F = d.F[(0, 1)].components["b"]
    alpha0 = d.reps[0].at["b"]
    F_obj = {A: (pairs.x(F.obj(A), "o"), pairs.phi(F.obj(A), "s")) for A in alpha0.objects}
    return oracles.cone_tuples(alpha0, c, T, F_obj)


# Thom-Mather data


def test_cone_and_nested_cone_data_are_valid():
    assert validate_tm(fx.cone_disk_tm()).ok
    assert validate_tm(fx.nested_cone_tm()).ok
    assert validate_tm(fx.point_chain_tm(3)).ok


@pytest.mark.parametrize("field, key, value, kind", [
    ("lift_words", ("s", "o.t"), word("o.t", "s.t", "o.a"), "triple-word"),
    ("fiber_words", ("o", "o.a"), word("o.t", "o.a", "o.a"), "triple-word"),
    ("points", ("o", "o.t"), "nowhere", "triple-point"),
])
def test_broken_triple_data_is_located(field, key, value, kind):
    tm = copy.deepcopy(fx.nested_cone_tm())
    getattr(tm.triples[(0, 1, 2)], field)[key] = value
    rep = validate_tm(tm)
    assert not rep.ok
    w = rep.first()
    assert w["kind"] == kind and w["triple"] == [0, 1, 2]


def test_missing_link_is_reported():
    tm = fx.cone_disk_tm()
    broken = TMStratDatum(tm.strata, {})
    assert validate_tm(broken).first()["kind"] == "missing-link"


# tube functors


def test_cone_tube_functor_gives_the_pairs():
    iso = fx.iso2()
    T = fx.swap(iso)
    out = p_kl(fx.cone_disk_tm(), 0, 1, fx.circle_rep(iso, T))
    pairs = out.at["b"]
    expected = global_sections_nu(fx.circle_rep(iso, T))
    objs, _ = oracles.pairs_category(iso, T)
    assert len(pairs.objects) == len(expected.objects) == len(objs) == 2


def test_tube_functor_with_identity_on_the_arrow_counts_two():
    two = arrow()
    out = p_kl(fx.cone_disk_tm(), 0, 1, fx.circle_rep(two, identity_functor(two)))
    assert len(out.at["b"].objects) == 2


def test_identity_link_gives_an_equivalent_representation():
    P = fx.circle()
    tm = TMStratDatum({0: P, 1: P}, {(0, 1): Link(P, identity_map(P), identity_bundle(P))})
    iso = fx.iso2()
    alpha = fx.circle_rep(iso, fx.swap(iso))
    out = p_kl(tm, 0, 1, alpha)
    proj = section_projection(out.at["o"], "o")
    assert is_equivalence(proj, quasi_inverse=False).ok
    assert compose_functors(out.along1["s"], proj) == compose_functors(proj, alpha.along1["s"])


# composites


def test_nested_cone_composites_are_certified():
    reps = fx.nested_cone_test_reps()
    rep = check_composites(fx.nested_cone_tm(), {2: reps})
    assert rep.ok and rep.info["certified"] == len(reps)


def test_point_chain_comparison_is_an_isomorphism():
    tm = fx.point_chain_tm(2)
    alpha = TwoRep(tm.strata[2], {"b2": cyclic_group(2)}, {})
    rep = check_composites(tm, {2: [alpha]})
    assert rep.ok and rep.info["certified"] == 1
    tubes = Tubes(tm)
    key = tubes.register("a", alpha)
    phi, _, _ = tubes.mor(("cmp", 0, 1, 2, key))
    F = phi.components["b0"]
    assert sorted(F.on_obj.values()) == sorted(F.dst.objects)
    assert sorted(F.on_mor.values()) == sorted(m for m, _, _ in F.dst.morphisms)


def test_composites_on_broken_triple_data_are_reported():
    tm = copy.deepcopy(fx.nested_cone_tm())
    tm.triples[(0, 1, 2)].lift_words[("s", "o.t")] = word("o.t", "s.t", "o.a")
    rep = check_composites(tm, {2: fx.nested_cone_test_reps()})
    assert not rep.ok and rep.first()["triple"] == [0, 1, 2]


def test_composites_refuse_an_invalid_test_representation():
    iso = fx.iso2()
    bad = fx.torus_rep(iso, fx.swap(iso), identity_functor(iso),
                       cell={x: iso.id(x) for x in iso.objects})
    rep = check_composites(fx.nested_cone_tm(), {2: [bad]})
    assert not rep.ok and rep.first()["kind"] == "invalid-rep"


# constructible data


def test_cube_is_vacuous_below_four_strata():
    for d in (fx.cone_disk(fx.iso2(), fx.swap(fx.iso2())), fx.nested_cone_datum(),
              fx.point_chain_datum(2)):
        assert check_constructible(d).ok


def test_four_strata_cube_holds():
    assert check_constructible(fx.point_chain_datum(3)).ok


def _f_mutations(d):
    for key in sorted(d.f):
        cmp = _f_functors(d, *key)[3]
        for b, comps in sorted(d.f[key].items()):
            cat = cmp.components[b].dst
            for x, m in sorted(comps.items()):
                tgt = cat.dst(m)
                for a in cat.hom(tgt, tgt):
                    if a != cat.id(tgt):
                        f = dict(d.f)
                        f[key] = {**d.f[key], b: {**comps, x: cat.then(m, a)}}
                        yield ConstructibleDatum(d.tm, d.reps, d.F, f), key


def test_every_f_mutation_fails_the_cube():
    d = fx.point_chain_datum(3)
    seen = 0
    for bad, key in _f_mutations(d):
        rep = check_constructible(bad)
        assert not rep.ok
        w = rep.first()
        assert w["kind"] == "cube" and set(key) <= set(w["levels"])
        seen += 1
    assert seen == 3


def test_corrupted_F_is_detected():
    d = fx.point_chain_datum(3)
    phi = d.F[(0, 3)]
    comp = phi.components["b0"]
    cat = comp.dst
    y = comp.obj("*")
    g = [m for m in cat.hom(y, y) if m != cat.id(y)][0]
    broken = FunctorData(comp.src, cat, comp.on_obj, {m: g for m in comp.on_mor})
    F = dict(d.F)
    F[(0, 3)] = RepMorphism(phi.src, phi.dst, {"b0": broken}, phi.squares)
    rep = check_constructible(ConstructibleDatum(d.tm, d.reps, F, d.f))
    assert not rep.ok and rep.first()["pair"] == [0, 3]


def test_f_that_is_not_natural_is_detected():
    d = fx.nested_cone_datum()
    key = (0, 1, 2)
    cmp = _f_functors(d, *key)[3]
    comps = d.f[key]["b"]
    cat = cmp.components["b"].dst
    x = sorted(comps)[0]
    f = dict(d.f)
    # replace one component with a non-parallel arrow
    other = [m for m, s, t in cat.morphisms if (s, t) != (cat.src(comps[x]), cat.dst(comps[x]))][0]
    f[key] = {"b": {**comps, x: other}}
    rep = check_constructible(ConstructibleDatum(d.tm, d.reps, d.F, f))
    assert not rep.ok and rep.first()["triple"] == [0, 1, 2]


# gluing


def test_single_stratum_glues_to_its_sections():
    P = fx.circle()
    iso = fx.iso2()
    alpha = fx.circle_rep(iso, fx.swap(iso))
    d = ConstructibleDatum(TMStratDatum({0: P}, {}), {0: alpha})
    glued = glue_constructible(d)
    nu = global_sections_nu(alpha)
    assert len(glued.objects) == len(nu.objects)
    assert is_equivalence(projection(glued, "1:0"), quasi_inverse=False).ok


def test_cone_disk_glue_matches_the_tuple_enumeration():
    iso = fx.iso2()
    T = fx.swap(iso)
    for choice in (0, 1):
        d = fx.cone_disk(iso, T, choice=choice)
        glued = glue_constructible(d)
        tuples = _cone_tuple_category(d, iso, T)
        assert len(tuples.objects) == 2
        assert oracles.iso_classes(glued) == oracles.iso_classes(tuples) == 1
        assert find_equivalence(glued, tuples) is not None
        assert len(glued.objects) == len(oracles.descent_families(constructible_diagram(d)))


def test_cone_disk_with_no_fixed_pairs_is_empty():
    disc = discrete(["p", "q"])
    d = fx.cone_disk(disc, fx.swap(disc))
    assert check_constructible(d).ok
    assert len(glue_constructible(d).objects) == 0
    assert oracles.section_families(fx.circle_rep(disc, fx.swap(disc))) == []


def test_glued_counts_match_the_family_enumerator():
    for d in (fx.cone_disk(fx.iso2(), fx.swap(fx.iso2())), fx.nested_cone_datum(),
              fx.point_chain_datum(2)):
        D = constructible_diagram(d)
        assert validate_pseudofunctor(D).ok
        assert len(glue_constructible(d).objects) == len(oracles.descent_families(D))
