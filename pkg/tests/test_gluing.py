import pytest

import oracles
from strata import fixtures as fx
from strata.errors import ConeIncoherent
from strata.fincat import compose_functors, identity_functor, is_equivalence
from strata.gluing import (
    Diagram, GluingDatum, GluingModification, GluingMorphism, _c, build_diagram,
    build_index_J, chain_id, chains, check_gluing_datum, check_gluing_modification,
    check_gluing_morphism, glue_G, glue_morphism, index_morphism, phi_cone, restrict_R,
    restrict_R_morphism, roundtrip_counit, roundtrip_unit,
)
from strata.posetstack import StratPoset
from strata.pseudo import (
    PseudoTransformation, identity_transformation, projection, validate_pseudofunctor,
    validate_pseudotransformation,
)


def automorphism_mutations(d, key):
    """Copies of ``d`` with one component of ``f[key]`` post-composed by a nontrivial automorphism."""
    tw = d.towers()
    comps, s, _ = tw.m(("f",) + key)
    for x in sorted(comps):
        cat = tw.T(s).component[x].dst
        for y, m in sorted(_c(comps[x]).items()):
            b = cat.dst(m)
            for a in cat.hom(b, b):
                if a == cat.id(b) or not cat.is_iso(a):
                    continue
                f = dict(d.f)
                fk = {z: dict(_c(v)) for z, v in f[key].items()}
                fk[x][y] = cat.then(m, a)
                f[key] = fk
                yield GluingDatum(d.base, d.stacks, d.F, f, d.ambient), (x, y)


def cones_coherent_by_oracle(d):
    diag = Diagram(d)
    for j in range(d.n + 1):
        for x in diag.tw.S[j]:
            try:
                _, legs, isos = phi_cone(d, j, x, diag)
            except ConeIncoherent:
                return False
            L = {chain_id(c): v for c, v in legs.items()}
            I = {index_morphism(a, b): v for (a, b), v in isos.items()}
            if not oracles.cone_is_coherent(diag.at(x), L, I)[0]:
                return False
    return True


def twisted_identity(G, top):
    """Identity components with the nontrivial ``Z/2`` element on every square into ``top``."""
    comp = {a: identity_functor(G.at[a]) for a in G.shape.objects}
    square = {}
    for s, a, b in G.shape.morphisms:
        cat = G.at[b]
        gens = [m for m in cat.hom("*", "*") if m != cat.id("*")] if (b == top and a != b) else []
        square[s] = {y: gens[0] if gens else cat.id(G.along[s].obj(y)) for y in G.at[a].objects}
    return PseudoTransformation(G, G, comp, square)


# index category


def test_index_category_sizes():
    J1, J2 = build_index_J(1), build_index_J(2)
    nonid = lambda J: sum(1 for m, a, b in J.morphisms if a != b)
    assert len(J1.objects) == 3 and nonid(J1) == 2
    assert len(J2.objects) == 7 and nonid(J2) == 12
    assert sorted(J1.objects) == ["1:0", "1:1", "2:0,1"]


@pytest.mark.parametrize("n", range(5))
def test_index_category_counts_chain_inclusions(n):
    J = build_index_J(n)
    cs = chains(n)
    from math import comb
    assert len(J.objects) == sum(comb(n + 1, r) for r in (1, 2, 3))
    strict = sum(1 for a in cs for b in cs if set(a) < set(b))
    assert sum(1 for _, a, b in J.morphisms if a != b) == strict


# cube condition


def test_cube_is_vacuous_below_four_levels(suite):
    for name, G in suite:
        d = restrict_R(G)
        if d.n <= 2:
            assert check_gluing_datum(d).ok, name


def test_restriction_of_every_fixture_passes_the_cube(suite):
    for name, G in list(suite) + [("z2_top_chain", fx.z2_top_chain(4))]:
        assert check_gluing_datum(restrict_R(G)).ok, name


def test_four_level_chain_cube_certified():
    d = restrict_R(fx.arrow_chain(4))
    assert d.n == 3 and check_gluing_datum(d).ok


def test_automorphism_mutation_on_the_z2_chain_is_located():
    d = restrict_R(fx.z2_top_chain(4))
    seen = 0
    for key in sorted(d.f):
        for e, (x, _) in automorphism_mutations(d, key):
            rep = check_gluing_datum(e)
            assert not rep.ok
            w = rep.violations[0]
            assert w["kind"] == "cube"
            assert set(key) <= set(w["levels"])
            assert d.base.le(w["element"], x)
            seen += 1
    assert seen == 3


def test_checker_agrees_with_the_cone_oracle_on_mutations(suite):
    pool = list(suite) + [("z2_top_chain", fx.z2_top_chain(4))]
    tally = {}
    for name, G in pool:
        d = restrict_R(G)
        assert cones_coherent_by_oracle(d), name
        for key in sorted(d.f):
            for e, where in automorphism_mutations(d, key):
                got = (check_gluing_datum(e).ok, cones_coherent_by_oracle(e))
                assert got[0] == got[1], (name, key, where)
                tally[got] = tally.get(got, 0) + 1
    assert tally.get((False, False), 0) >= 3


def test_mutation_through_a_non_faithful_unit_is_not_detectable():
    # the mutated component is erased by the whiskering, so the datum stays coherent
    G = dict(fx.fixture_suite(24))["random_10"]
    d = restrict_R(G)
    mutants = [(e, w) for e, w in automorphism_mutations(d, (0, 1, 3))]
    assert mutants
    for e, _ in mutants:
        assert check_gluing_datum(e).ok
        assert cones_coherent_by_oracle(e)


# morphisms and modifications


def test_identity_gluing_morphism_is_valid(suite):
    for name, G in suite[:8]:
        d = restrict_R(G)
        mor = restrict_R_morphism(identity_transformation(G), d, d)
        assert check_gluing_morphism(mor).ok, name


def test_restriction_of_a_nontrivial_stack_morphism():
    G = fx.z2_top_chain(4)
    t = twisted_identity(G, "x3")
    assert validate_pseudotransformation(t).ok
    d = restrict_R(G)
    mor = restrict_R_morphism(t, d, d)
    assert check_gluing_morphism(mor).ok
    assert any(f != "m0" for comps in mor.g.values() for v in comps.values() for f in _c(v).values())


def _mutated_g(mor):
    for key in sorted(mor.g):
        cat_of = mor.dst.towers().T(("F",) + key).component
        for x, comps in sorted(mor.g[key].items()):
            cat = cat_of[x].dst
            for y, f in sorted(_c(comps).items()):
                b = cat.dst(f)
                for a in cat.hom(b, b):
                    if a != cat.id(b):
                        g = dict(mor.g)
                        gk = {z: dict(_c(v)) for z, v in g[key].items()}
                        gk[x][y] = cat.then(f, a)
                        g[key] = gk
                        yield GluingMorphism(mor.src, mor.dst, mor.G, g), key, x


def test_mutated_g_is_rejected_with_a_hexagon_witness():
    G = fx.z2_top_chain(3)
    d = restrict_R(G)
    mor = restrict_R_morphism(twisted_identity(G, "x2"), d, d)
    found = 0
    for bad, key, x in _mutated_g(mor):
        rep = check_gluing_morphism(bad)
        assert not rep.ok
        w = rep.violations[0]
        assert w["kind"] == "hexagon" and set(key) <= set(w["levels"])
        found += 1
    assert found == 2


def _identity_phi(mor):
    phi = {}
    for k, Gk in mor.G.items():
        phi[k] = {x: {y: Gk.dst.at[x].id(Gk.component[x].obj(y)) for y in Gk.src.at[x].objects}
                  for x in Gk.src.base.elements}
    return phi


def test_identity_modification_is_valid():
    G = fx.z2_top_chain(3)
    d = restrict_R(G)
    mor = restrict_R_morphism(twisted_identity(G, "x2"), d, d)
    assert check_gluing_modification(GluingModification(mor, mor, _identity_phi(mor))).ok


def test_modification_with_a_twisted_top_level_is_rejected():
    G = fx.z2_top_chain(3)
    d = restrict_R(G)
    mor = restrict_R_morphism(identity_transformation(G), d, d)
    phi = _identity_phi(mor)
    top = d.stacks[2].at["x2"]
    phi[2] = {"x2": {"*": [m for m in top.hom("*", "*") if m != top.id("*")][0]}}
    rep = check_gluing_modification(GluingModification(mor, mor, phi))
    assert not rep.ok and rep.violations[0]["kind"] == "modification-square"


def test_glued_morphism_commutes_with_projections():
    G = fx.z2_top_chain(3)
    d = restrict_R(G)
    mor = restrict_R_morphism(twisted_identity(G, "x2"), d, d)
    A = glue_G(d)
    for x, (pt, functor) in glue_morphism(mor, A, A).items():
        for c in pt.component:
            pi = projection(A.at[x], c)
            assert compose_functors(functor, pi) == compose_functors(pi, pt.component[c])


# restriction and the diagram


def test_single_level_restriction_has_no_gluing_data():
    X = StratPoset(["p"], [], {"p": 0})
    G = fx.strict_stack(X, {"p": fx.iso2()}, {})
    d = restrict_R(G)
    assert d.n == 0 and d.F == {} and d.f == {}
    assert len(glue_G(d).at["p"].objects) == 2


def test_two_chain_restriction_is_the_transition_functor():
    G = fx.two_level_chain()
    d = restrict_R(G)
    F = d.F[(0, 1)].component["c"]
    pushed = d.towers().pushed((1,))
    via_o = compose_functors(F, projection(pushed.at["c"], "o"))
    assert via_o == G.transition("c", "o")


def test_diagram_is_a_pseudofunctor(suite):
    for name, G in suite[:10]:
        for x, D in build_diagram(restrict_R(G)).items():
            assert validate_pseudofunctor(D).ok, (name, x)


def test_three_level_diagram_uses_each_f_once():
    d = restrict_R(fx.arrow_chain(3))
    diag = Diagram(d)
    uses = [key for key in diag.coh.values() if key[0] == "Pm"]
    assert uses == [("Pm", ("f", 0, 1, 2))]


def test_two_level_constant_datum_glues_to_the_value():
    G = fx.arrow_chain(2)
    d = restrict_R(G)
    glued = glue_G(d)
    for x in G.base.elements:
        level = 0 if x == "x0" else 1
        eq = is_equivalence(projection(glued.at[x], chain_id((level,))), quasi_inverse=False)
        assert eq.ok


# glued object counts


def test_two_chain_glued_objects_are_the_triples():
    G = fx.two_level_chain()
    glued = glue_G(restrict_R(G))
    c0, c1 = G.at["c"], G.at["o"]
    T = G.transition("c", "o")
    triples = [(s0, s1, g) for s0 in c0.objects for s1 in c1.objects
               for g in c1.hom(T.obj(s0), s1) if c1.is_iso(g)]
    assert len(triples) == 4
    # the descent also carries the redundant pair component, so compare up to equivalence
    cat = glued.at["c"]
    assert len(cat.objects) == 2 * len(triples)
    assert oracles.iso_classes(cat) == len({s0 for s0, _, _ in triples})


def test_glued_counts_match_the_family_enumerator(suite):
    for name, G in suite:
        d = restrict_R(G)
        glued = glue_G(d)
        for x, D in build_diagram(d).items():
            assert len(glued.at[x].objects) == len(oracles.descent_families(D)), (name, x)


def test_antichain_closed_point_is_the_iso_triple_category():
    G = fx.antichain()
    glued = glue_G(restrict_R(G))
    # S_c in 𝟚, S_o1 iso to it, S_o2 forced: two iso classes of two objects each
    cat = glued.at["c"]
    assert oracles.iso_classes(cat) == 2
    assert roundtrip_unit(G).ok


# round trips


def test_roundtrip_certifies_every_fixture(suite):
    for name, G in suite:
        d = restrict_R(G)
        glued = glue_G(d)
        counit = roundtrip_counit(d, glued)
        unit = roundtrip_unit(G, d, glued)
        assert counit.ok and unit.ok, name
        assert counit.info["certified"] == len(G.base.elements)
        assert unit.info["certified"] == len(G.base.elements)


def test_counit_reports_an_incoherent_cone():
    d = restrict_R(fx.z2_top_chain(4))
    bad, _ = next(e for key in sorted(d.f) for e in automorphism_mutations(d, key))
    rep = roundtrip_counit(bad)
    assert not rep.ok
    assert rep.violations[0]["kind"] == "cone-incoherent"
    assert rep.info["certified"] == 0


def test_chain_roundtrips():
    for G in (fx.two_level_chain(), fx.arrow_chain(3)):
        assert roundtrip_unit(G).ok
        assert roundtrip_counit(restrict_R(G)).ok
