import os
import subprocess
import sys

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import random_table
from strata import _kernels_py as py
from strata import fincat as fc
from strata import fixtures as fx

compiled = pytest.importorskip("strata._kernels")


def _table_args(c):
    ix = c.index()
    return ix.table, ix.out_offsets, ix.out_items, ix.dst


def test_backends_are_labelled():
    assert py.BACKEND == "python" and compiled.BACKEND == "cython"


def test_environment_forces_the_fallback():
    code = "from strata import kernels; print(kernels.BACKEND)"
    env = dict(os.environ, STRATA_PURE_PYTHON="1")
    out = subprocess.run([sys.executable, "-c", code], env=env, capture_output=True, text=True)
    assert out.stdout.strip() == "python"


@settings(max_examples=150, deadline=None)
@given(st.integers(min_value=0, max_value=10**6))
def test_associativity_kernels_agree(seed):
    c = random_table(seed)
    args = _table_args(c)
    assert sorted(py.assoc_violations(*args)) == sorted(compiled.assoc_violations(*args))


def test_associativity_kernels_agree_on_larger_categories():
    for c in (fc.cyclic_group(12), fc.indiscrete([f"o{i}" for i in range(6)]),
              fc.poset_category(list("abcdef"), [(x, y) for x in "abcdef" for y in "abcdef" if x < y])):
        args = _table_args(c)
        assert py.assoc_violations(*args) == compiled.assoc_violations(*args) == []


def _random_functor(rng, c, d):
    """Object map at random, each morphism sent to a random parallel arrow when one exists."""
    on_obj = {o: d.objects[rng.integers(len(d.objects))] for o in c.objects}
    on_mor = {}
    for m, s, t in c.morphisms:
        options = d.hom(on_obj[s], on_obj[t]) or [m2 for m2, _, _ in d.morphisms]
        on_mor[m] = options[rng.integers(len(options))]
    return fc.FunctorData(c, d, on_obj, on_mor)


@settings(max_examples=100, deadline=None)
@given(st.integers(min_value=0, max_value=10**6))
def test_functor_kernels_agree(seed):
    rng = np.random.default_rng(seed)
    c = [fc.arrow(), fc.cyclic_group(3), fx.chain3(), fx.iso2()][seed % 4]
    d = [fc.cyclic_group(2), fc.indiscrete(["p", "q"]), fx.chain3()][(seed // 4) % 3]
    F = _random_functor(rng, c, d)
    ci, di = c.index(), d.index()
    fmor = np.array([di.mi[F.on_mor[m]] for m, _, _ in c.morphisms], dtype=np.int32)
    args = (ci.table, ci.out_offsets, ci.out_items, ci.dst, fmor, di.table)
    assert sorted(py.functor_violations(*args)) == sorted(compiled.functor_violations(*args))


@settings(max_examples=100, deadline=None)
@given(st.integers(min_value=0, max_value=10**6))
def test_naturality_kernels_agree(seed):
    rng = np.random.default_rng(seed)
    c, d = fx.chain3(), fc.cyclic_group(3)
    ci, di = c.index(), d.index()
    n, k = len(c.morphisms), len(d.morphisms)
    fmor = rng.integers(k, size=n).astype(np.int32)
    gmor = rng.integers(k, size=n).astype(np.int32)
    comps = rng.integers(k, size=len(c.objects)).astype(np.int32)
    args = (ci.src, ci.dst, fmor, gmor, comps, di.table)
    assert py.naturality_violations(*args) == compiled.naturality_violations(*args)


def test_validation_reports_do_not_depend_on_the_backend():
    code = ("import sys; sys.path.insert(0, 'tests'); from conftest import random_table; "
            "from strata.fincat import validate_category; "
            "print([validate_category(random_table(s)).violations for s in range(60)])")
    root = os.path.dirname(os.path.dirname(os.path.abspath(__file__)))
    outs = []
    for pure in (False, True):
        env = {k: v for k, v in os.environ.items() if k != "STRATA_PURE_PYTHON"}
        if pure:
            env["STRATA_PURE_PYTHON"] = "1"
        done = subprocess.run([sys.executable, "-c", code], env=env, capture_output=True,
                              text=True, cwd=root)
        assert done.returncode == 0, done.stderr
        outs.append(done.stdout)
    assert outs[0] == outs[1]
