import functools
import random

import pytest

from strata import fixtures as fx
from strata.fincat import FinCat, arrow, cyclic_group, discrete, indiscrete, poset_category, terminal


@functools.lru_cache(maxsize=None)
def _suite():
    return tuple(fx.fixture_suite(24))


@pytest.fixture(scope="session")
def suite():
    return _suite()


def random_table(seed):
    """A small category table, valid or carrying one to two corruptions."""
    rng = random.Random(seed)
    base = rng.choice([
        lambda: terminal(), lambda: arrow(), lambda: indiscrete(["p", "q"]),
        lambda: cyclic_group(rng.randint(2, 4)), lambda: discrete(["u", "v", "w"]),
        lambda: poset_category(["a", "b", "c"], [("a", "b"), ("b", "c"), ("a", "c")]),
    ])()
    morphisms = list(base.morphisms)
    identity = dict(base.identity)
    comp = dict(base.comp)
    names = [m for m, _, _ in morphisms]
    for _ in range(rng.randint(0, 2)):
        move = rng.choice(["redirect", "drop", "extra", "identity"])
        if move == "redirect" and comp:
            key = rng.choice(sorted(comp))
            comp[key] = rng.choice(names)
        elif move == "drop" and comp:
            del comp[rng.choice(sorted(comp))]
        elif move == "extra":
            comp[(rng.choice(names), rng.choice(names))] = rng.choice(names)
        elif move == "identity":
            o = rng.choice(list(base.objects))
            identity[o] = rng.choice(names)
    return FinCat(base.objects, morphisms, identity, comp)
