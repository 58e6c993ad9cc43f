"""Command-line front end.

Every command reads a single-file workspace, writes one canonical JSON
document (or its text rendering) to stdout and exits with

* 0 success, 1 invalid input data, 2 checked property failed,
* 3 size cap exceeded, 4 parse or reference error.

Nothing is written to stdout unless the command succeeds or reports a
property; errors go to stderr.
"""
import sys

import click

from strata import constructible, gluing, limits as limits_mod, monodromy, posetstack, pseudo
from strata.errors import (BundleIncoherent, ConeIncoherent, DanglingReference, ParseError,
                           SizeCapExceeded, StrataError, UnknownIdentifier)
from strata.fincat import (find_equivalence, validate_category, validate_functor,
                           validate_nat_trans)
from strata.io import (Workspace, canonical_dumps, descent_payload, document, functor_payload,
                       gluing_datum_payload, poset_stack_payload, report_payload,
                       sections_payload, two_rep_payload)
from strata.report import Report

EXIT_OK, EXIT_INVALID, EXIT_PROPERTY, EXIT_CAP, EXIT_PARSE = 0, 1, 2, 3, 4


class Outcome(Exception):
    """Carries a finished payload and exit code out of a command body."""

    def __init__(self, payload, code):
        super().__init__(code)
        self.payload = payload
        self.code = code


def _exit_code(err):
    if isinstance(err, SizeCapExceeded):
        return EXIT_CAP
    if isinstance(err, (ParseError, DanglingReference, UnknownIdentifier)):
        return EXIT_PARSE
    if isinstance(err, (ConeIncoherent, BundleIncoherent)):
        return EXIT_PROPERTY
    return EXIT_INVALID


def _render(payload, fmt):
    if fmt == "json":
        return canonical_dumps(payload)
    if "text" in payload:
        return payload["text"] + "\n"
    if "documents" in payload:
        return "".join(f"{name}: {r['text']}\n" for name, r in payload["documents"].items())
    kind = payload.get("kind", "document")
    if "category" in payload:
        cat = payload["category"]
        return (f"{kind} {payload.get('name', '')}: {len(cat['objects'])} objects, "
                f"{len(cat['morphisms'])} morphisms\n")
    if "at" in payload:
        sizes = ", ".join(f"{k}: {len(v['objects'])}" for k, v in sorted(payload["at"].items()))
        return f"{kind} {payload.get('name', '')}: objects per point {{{sizes}}}\n"
    return canonical_dumps(payload)


def _run(ctx, body):
    opts = ctx.obj
    try:
        with limits_mod.limits(**opts["limits"]):
            try:
                payload = body()
                code = EXIT_OK
            except Outcome as out:
                payload, code = out.payload, out.code
    except StrataError as err:
        msg = {"error": err.code, "message": str(err), "witness": err.witness}
        click.echo(canonical_dumps(msg), err=True, nl=False)
        ctx.exit(_exit_code(err))
        return
    except OSError as err:
        msg = {"error": "unreadable-input", "message": f"cannot read input: {err.strerror}",
               "witness": {"path": err.filename}}
        click.echo(canonical_dumps(msg), err=True, nl=False)
        ctx.exit(EXIT_PARSE)
        return
    click.echo(_render(payload, opts["format"]), nl=False)
    ctx.exit(code)


def _require(rep, command):
    if not rep.ok:
        raise Outcome(report_payload(command, rep), EXIT_INVALID)


def _property(command, rep, info=None):
    payload = report_payload(command, rep, info)
    if not rep.ok:
        raise Outcome(payload, EXIT_PROPERTY)
    return payload


@click.group()
@click.option("--max-objects", type=int, default=64, show_default=True)
@click.option("--max-families", type=int, default=1_000_000, show_default=True,
              envvar="STRATA_MAX_FAMILIES")
@click.option("--format", "fmt", type=click.Choice(["json", "text"]), default="json",
              show_default=True)
@click.option("--seed", type=int, default=0, show_default=True,
              help="Seed for the fixture generator.")
@click.option("--workers", type=int, default=1, show_default=True,
              help="Threads for candidate enumeration; output does not depend on it.")
@click.pass_context
def main(ctx, max_objects, max_families, fmt, seed, workers):
    """Gluing of stacks on finite stratified posets."""
    ctx.obj = {"limits": {"max_objects": max_objects, "max_families": max_families,
                          "workers": workers},
               "format": fmt, "seed": seed}


def validate_value(kind, value):
    """The validator for a parsed value of a document kind."""
    if kind == "fincat":
        return validate_category(value)
    if kind == "functor":
        return validate_functor(value)
    if kind == "nattrans":
        return validate_nat_trans(value)
    if kind == "pseudofunctor":
        return pseudo.validate_pseudofunctor(value)
    if kind == "pseudotransformation":
        return pseudo.validate_pseudotransformation(value)
    if kind == "modification":
        return pseudo.validate_modification(value)
    if kind == "strat_poset":
        return posetstack.validate_strat_poset(value)
    if kind == "poset_stack":
        return posetstack.validate_poset_stack(value)
    if kind == "gluing_datum":
        return gluing.check_gluing_datum(value)
    if kind == "presentation":
        return monodromy.validate_presentation(value)
    if kind == "presentation_map":
        return monodromy.validate_map(value)
    if kind == "two_rep":
        return monodromy.validate_two_rep(value)
    if kind == "bundle":
        return _validate_bundle(value)
    if kind == "tm_datum":
        return constructible.validate_tm(value)
    if kind == "constructible_datum":
        return constructible.check_constructible(value)
    rep = Report()
    rep.info["note"] = "checked inside the bundles that use it"
    return rep


def _validate_bundle(bd):
    rep = Report()
    for g, td in sorted(bd.transports.items()):
        rep.extend(monodromy.validate_transport(td, bd.total), generator=g)
    for c, hd in sorted(bd.homotopies.items()):
        rep.extend(monodromy.validate_homotopy(hd, bd.total), cell=c)
    return rep


@main.command()
@click.argument("file", type=click.Path())
@click.argument("names", nargs=-1)
@click.pass_context
def validate(ctx, file, names):
    """Run the validator of every document (or of NAMES)."""
    def body():
        ws = Workspace.load(file)
        selected = list(names) or ws.names()
        reports = {}
        for name in selected:
            kind = ws.kind(name)
            reports[name] = validate_value(kind, ws.get(name))
        payload = {"command": "validate",
                   "documents": {n: report_payload("validate", r) for n, r in reports.items()},
                   "ok": all(r.ok for r in reports.values())}
        if not payload["ok"]:
            bad = next(n for n, r in reports.items() if not r.ok)
            payload["witness"] = {"document": bad, **reports[bad].first()}
            raise Outcome(payload, EXIT_INVALID)
        return payload
    _run(ctx, body)


def _pseudofunctor(ws, name):
    kind = ws.kind(name)
    if kind not in ("pseudofunctor", "poset_stack"):
        raise ParseError(f"{name!r} is a {kind}, expected a pseudofunctor", {"name": name})
    return ws.get(name)


@main.command()
@click.argument("file", type=click.Path())
@click.argument("name")
@click.pass_context
def descent(ctx, file, name):
    """Descent category (2-limit) of a pseudofunctor or stack."""
    def body():
        ws = Workspace.load(file)
        D = _pseudofunctor(ws, name)
        _require(pseudo.validate_pseudofunctor(D), "descent")
        return document("descent_result", name, descent_payload(pseudo.descent_category(D)))
    _run(ctx, body)


def _positional_iso(a, b):
    """Match a relabelled copy `a` to `b` by position; None unless it is an isomorphism."""
    if len(a.objects) != len(b.objects) or len(a.morphisms) != len(b.morphisms):
        return None
    ob = dict(zip(a.objects, b.objects))
    mo = {m: n for (m, _, _), (n, _, _) in zip(a.morphisms, b.morphisms)}
    for (m, s, t), (n, s2, t2) in zip(a.morphisms, b.morphisms):
        if (ob[s], ob[t]) != (s2, t2):
            return None
    for (f, g), h in a.comp.items():
        if b.then(mo[f], mo[g]) != mo[h]:
            return None
    return ob, mo


def _single_level(d, glued):
    """For one level the glued stack is the input, via the projections."""
    src = d.stacks[0]
    if tuple(src.base.elements) != tuple(d.base.elements):
        return None
    proj = {}
    for x in d.base.elements:
        P = pseudo.projection(glued.at[x], gluing.chain_id((0,)))
        match = _positional_iso(P.dst, src.at[x])
        if match is None:
            return None
        ob, mo = match
        if sorted(ob[o] for o in P.on_obj.values()) != sorted(src.at[x].objects) or \
                sorted(mo[m] for m in P.on_mor.values()) != sorted(m for m, _, _ in src.at[x].morphisms):
            return None
        proj[x] = lambda o, P=P, ob=ob: ob[P.obj(o)]
    for a, b in d.base.leq:
        m = d.base.mor(a, b)
        left = [proj[b](glued.along[m].obj(o)) for o in glued.at[a].objects]
        right = [src.along[m].obj(proj[a](o)) for o in glued.at[a].objects]
        if left != right:
            return None
    return src


@main.command()
@click.argument("file", type=click.Path())
@click.argument("name")
@click.option("--sections", is_flag=True, help="Emit the global sections instead.")
@click.pass_context
def glue(ctx, file, name, sections):
    """Glue a gluing datum into a stack on the whole poset."""
    def body():
        ws = Workspace.load(file)
        d = ws.get(name, "gluing_datum")
        _require(gluing.check_gluing_datum(d), "glue")
        glued = gluing.glue_G(d)
        if sections:
            top = posetstack.global_sections_stack(glued)
            return document("descent_result", name, descent_payload(top))
        if d.n == 0:
            glued = _single_level(d, glued) or glued
        return document("poset_stack", name, poset_stack_payload(glued))
    _run(ctx, body)


@main.command()
@click.argument("file", type=click.Path())
@click.argument("name")
@click.pass_context
def restrict(ctx, file, name):
    """Restrict a stack to its strata, producing a gluing datum."""
    def body():
        ws = Workspace.load(file)
        C = ws.get(name, "poset_stack")
        _require(posetstack.validate_poset_stack(C), "restrict")
        return document("gluing_datum", name, gluing_datum_payload(gluing.restrict_R(C)))
    _run(ctx, body)


@main.command()
@click.argument("file", type=click.Path())
@click.argument("name")
@click.pass_context
def roundtrip(ctx, file, name):
    """Certify the round trip: counit for a gluing datum, unit for a stack."""
    def body():
        ws = Workspace.load(file)
        if ws.kind(name) == "poset_stack":
            C = ws.get(name)
            _require(posetstack.validate_poset_stack(C), "roundtrip")
            rep = gluing.roundtrip_unit(C)
        else:
            d = ws.get(name, "gluing_datum")
            _require(gluing.check_components(d), "roundtrip")
            rep = gluing.roundtrip_counit(d)
        return _property("roundtrip", rep, {"certified": rep.info.get("certified")})
    _run(ctx, body)


@main.command()
@click.argument("file", type=click.Path())
@click.argument("name")
@click.pass_context
def sections(ctx, file, name):
    """Global sections of a 2-representation."""
    def body():
        ws = Workspace.load(file)
        alpha = ws.get(name, "two_rep")
        _require(monodromy.validate_two_rep(alpha), "sections")
        return document("sections_result", name,
                        sections_payload(monodromy.global_sections_nu(alpha)))
    _run(ctx, body)


@main.command()
@click.argument("file", type=click.Path())
@click.argument("first")
@click.argument("second")
@click.pass_context
def equiv(ctx, file, first, second):
    """Search for an equivalence between two finite categories."""
    def body():
        ws = Workspace.load(file)
        c, d = ws.get(first, "fincat"), ws.get(second, "fincat")
        _require(validate_category(c), "equiv")
        _require(validate_category(d), "equiv")
        F = find_equivalence(c, d)
        rep = Report()
        if F is None:
            rep.add("no equivalence", source=first, target=second)
            return _property("equiv", rep)
        return _property("equiv", rep, {"functor": functor_payload(F)})
    _run(ctx, body)


@main.command()
@click.argument("file", type=click.Path())
@click.argument("bundle")
@click.argument("rep")
@click.pass_context
def pushforward(ctx, file, bundle, rep):
    """Push a 2-representation of the total space forward along a bundle."""
    def body():
        ws = Workspace.load(file)
        bd = ws.get(bundle, "bundle")
        alpha = ws.get(rep, "two_rep")
        _require(_validate_bundle(bd), "pushforward")
        _require(monodromy.validate_two_rep(alpha), "pushforward")
        out = monodromy.pushforward_rep(bd, alpha)
        return document("two_rep", f"{bundle}.{rep}", two_rep_payload(out))
    _run(ctx, body)


@main.command("check-constructible")
@click.argument("file", type=click.Path())
@click.argument("name")
@click.option("--test-rep", "test_reps", multiple=True,
              help="Representation of the top stratum for the tube-composite check.")
@click.pass_context
def check_constructible(ctx, file, name, test_reps):
    """Check a constructible datum, or the tube composites of a Thom-Mather datum."""
    def body():
        ws = Workspace.load(file)
        if ws.kind(name) == "tm_datum":
            t = ws.get(name)
            _require(constructible.validate_tm(t), "check-constructible")
            reps = [ws.get(r, "two_rep") for r in test_reps]
            rep = constructible.check_composites(t, {t.n: reps})
            return _property("check-constructible", rep,
                             {"composites_certified": rep.info.get("certified", 0)})
        d = ws.get(name, "constructible_datum")
        _require(constructible.validate_tm(d.tm), "check-constructible")
        rep = constructible.check_constructible(d)
        info = {}
        if rep.ok and d.test_reps:
            comp = constructible.check_composites(d.tm, d.test_reps)
            rep.extend(comp)
            info["composites_certified"] = comp.info.get("certified", 0)
        if rep.ok:
            info["glued_objects"] = len(constructible.glue_constructible(d).objects)
        return _property("check-constructible", rep, info)
    _run(ctx, body)


@main.command()
@click.argument("kind", type=click.Choice(["stack", "gluing"]))
@click.pass_context
def fixture(ctx, kind):
    """Emit a seeded random stack (or its gluing datum) as a workspace."""
    from strata.fixtures import random_stack

    def body():
        C = random_stack(ctx.obj["seed"])
        if kind == "stack":
            return {"documents": [document("poset_stack", "stack", poset_stack_payload(C))]}
        d = gluing.restrict_R(C)
        return {"documents": [document("gluing_datum", "datum", gluing_datum_payload(d))]}
    _run(ctx, body)


if __name__ == "__main__":
    sys.exit(main())
