import json
import os

import pytest
from click.testing import CliRunner

from strata import fixtures as fx
from strata.cli import main
from strata.gluing import GluingDatum, _c, restrict_R
from strata.io import Workspace, canonical_dumps, document, gluing_datum_payload, poset_stack_payload
from strata.posetstack import StratPoset

DATA = os.path.join(os.path.dirname(__file__), "data")
WS = os.path.join(DATA, "workspace.json")
TWO = os.path.join(DATA, "two_level.json")
CONS = os.path.join(DATA, "constructible.json")


def run(*args, env=None):
    # stderr is kept apart so stdout holds only the payload
    result = CliRunner().invoke(main, list(args), env=env, catch_exceptions=False)
    return result.exit_code, result.stdout, result.stderr


def write_ws(path, docs):
    path.write_text(canonical_dumps({"documents": docs}), encoding="utf-8")
    return str(path)


def mutated_datum():
    d = restrict_R(fx.z2_top_chain(4))
    tw = d.towers()
    for key in sorted(d.f):
        comps, s, _ = tw.m(("f",) + key)
        for x in sorted(comps):
            cat = tw.T(s).component[x].dst
            for y, m in sorted(_c(comps[x]).items()):
                b = cat.dst(m)
                autos = [a for a in cat.hom(b, b) if a != cat.id(b)]
                if autos:
                    f = dict(d.f)
                    fk = {z: dict(_c(v)) for z, v in f[key].items()}
                    fk[x][y] = cat.then(m, autos[0])
                    f[key] = fk
                    return GluingDatum(d.base, d.stacks, d.F, f, d.ambient)
    raise AssertionError("no automorphism to mutate with")


# exit code 0


def test_validate_ok():
    code, out, _ = run("validate", WS)
    assert code == 0 and json.loads(out)["ok"] is True


def test_roundtrip_on_committed_fixtures():
    assert run("roundtrip", WS, "chain2")[0] == 0
    for name in json.load(open(os.path.join(DATA, "golden_glue_counts.json"))):
        code, out, _ = run("roundtrip", TWO, name)
        assert code == 0, name
        assert json.loads(out)["info"]["certified"] >= 1


def test_glue_matches_the_golden_counts():
    golden = json.load(open(os.path.join(DATA, "golden_glue_counts.json")))
    for name, counts in golden.items():
        code, out, _ = run("glue", TWO, name)
        assert code == 0
        doc = json.loads(out)
        assert {x: len(v["objects"]) for x, v in doc["at"].items()} == counts, name


def test_single_level_glue_returns_the_input_bytes(tmp_path):
    X = StratPoset(["u", "v"], [], {"u": 0, "v": 0})
    G = fx.strict_stack(X, {"u": fx.iso2(), "v": fx.chain3()}, {})
    d = restrict_R(G)
    doc = document("gluing_datum", "one", gluing_datum_payload(d))
    path = write_ws(tmp_path / "one.json", [doc])
    code, out, _ = run("glue", path, "one")
    assert code == 0
    level0 = Workspace.load(path).get("one").stacks[0]
    assert out == canonical_dumps(document("poset_stack", "one", poset_stack_payload(level0)))


def test_glue_sections_flag():
    code, out, _ = run("glue", TWO, "two_level_chain", "--sections")
    assert code == 0 and json.loads(out)["kind"] == "descent_result"


def test_pushforward_of_the_trivial_bundle_equals_the_sections():
    code, pushed, _ = run("pushforward", WS, "circle_over_point", "circle_swap")
    assert code == 0
    code, sections, _ = run("sections", WS, "circle_swap")
    assert code == 0
    assert json.loads(pushed)["at"]["b"] == json.loads(sections)["category"]


def test_check_constructible_on_the_cone():
    code, out, _ = run("check-constructible", CONS, "cone_disk")
    assert code == 0 and json.loads(out)["info"]["glued_objects"] == 4


def test_fixture_depends_on_the_seed():
    a = run("--seed", "1", "fixture", "stack")[1]
    b = run("--seed", "2", "fixture", "stack")[1]
    assert a != b and a == run("--seed", "1", "fixture", "stack")[1]


def test_text_format():
    code, out, _ = run("--format", "text", "validate", WS)
    assert code == 0 and "chain2: ok" in out


# exit code 1


def test_broken_associativity_is_invalid():
    code, out, _ = run("validate", os.path.join(DATA, "broken.json"))
    assert code == 1
    w = json.loads(out)["witness"]
    assert w["document"] == "broken"
    assert any(len(v.get("triple", [])) == 3 for v in json.loads(out)["documents"]["broken"]["violations"])


def test_failing_cube_refuses_to_glue(tmp_path):
    path = write_ws(tmp_path / "bad.json",
                    [document("gluing_datum", "bad", gluing_datum_payload(mutated_datum()))])
    code, out, _ = run("glue", path, "bad")
    assert code == 1 and json.loads(out)["witness"]["kind"] == "cube"


# exit code 2


def test_no_equivalence_between_arrow_and_iso():
    code, out, _ = run("equiv", WS, "two", "iso2")
    assert code == 2
    assert json.loads(out)["witness"]["kind"] == "no equivalence"


def test_roundtrip_reports_an_incoherent_cone(tmp_path):
    path = write_ws(tmp_path / "bad.json",
                    [document("gluing_datum", "bad", gluing_datum_payload(mutated_datum()))])
    code, out, _ = run("roundtrip", path, "bad")
    assert code == 2 and json.loads(out)["witness"]["kind"] == "cone-incoherent"


# exit code 3


def test_family_cap_gives_exit_three_without_output():
    code, out, err = run("--max-families", "10", "glue", TWO, "two_level_chain")
    assert code == 3 and out == ""
    assert json.loads(err)["error"] == "size-cap-exceeded"


def test_environment_overrides_the_family_cap():
    code, out, _ = run("glue", TWO, "two_level_chain", env={"STRATA_MAX_FAMILIES": "10"})
    assert code == 3 and out == ""


def test_explicit_flag_beats_the_environment():
    code, out, _ = run("--max-families", "1000000", "glue", TWO, "two_level_chain",
                       env={"STRATA_MAX_FAMILIES": "10"})
    assert code == 0 and out


def test_object_cap():
    code, out, _ = run("--max-objects", "2", "glue", TWO, "two_level_chain")
    assert code == 3 and out == ""


# exit code 4


def test_dangling_reference():
    code, _, err = run("validate", os.path.join(DATA, "dangling.json"))
    assert code == 4 and json.loads(err)["error"] == "dangling-reference"


def test_unreadable_and_malformed_input(tmp_path):
    code, _, err = run("validate", str(tmp_path / "missing.json"))
    assert code == 4 and json.loads(err)["error"] == "unreadable-input"
    bad = tmp_path / "bad.json"
    bad.write_text("{not json", encoding="utf-8")
    code, _, err = run("validate", str(bad))
    assert code == 4 and json.loads(err)["error"] == "parse-error"


def test_wrong_kind_is_a_parse_error():
    assert run("glue", WS, "chain2")[0] == 4


def test_unknown_document_name():
    assert run("sections", WS, "nothing")[0] == 4


# determinism

COMMANDS = [
    ("validate", WS),
    ("descent", WS, "chain2"),
    ("restrict", WS, "chain2"),
    ("roundtrip", WS, "chain2"),
    ("sections", WS, "circle_swap"),
    ("equiv", WS, "iso2", "iso2"),
    ("pushforward", WS, "circle_over_point", "circle_swap"),
    ("glue", TWO, "two_level_chain"),
    ("glue", TWO, "random_16", "--sections"),
    ("check-constructible", CONS, "cone_disk"),
    ("fixture", "gluing"),
]


@pytest.mark.parametrize("args", COMMANDS, ids=lambda a: "-".join(os.path.basename(x) for x in a))
def test_output_is_byte_identical(args):
    runs = [run(*args) for _ in range(3)]
    runs.append(run("--workers", "4", *args))
    assert all(r == runs[0] for r in runs)
    assert runs[0][0] == 0
