"""Regenerate two_level.json and golden_glue_counts.json.

Counts come from the brute-force family enumerator in tests/oracles.py, not
from glue_G.  Run from the repository root: ``python3 tests/data/regen_golden.py``.
"""
import os
import sys

HERE = os.path.dirname(os.path.abspath(__file__))
sys.path.insert(0, os.path.dirname(HERE))

import oracles  # noqa: E402
from strata import fixtures as fx  # noqa: E402
from strata.gluing import build_diagram, restrict_R  # noqa: E402
from strata.io import canonical_dumps, document, gluing_datum_payload  # noqa: E402


def two_level_stacks():
    yield "two_level_chain", fx.two_level_chain()
    yield "antichain", fx.antichain()
    yield "arrow_chain2", fx.arrow_chain(2)
    for name, G in fx.fixture_suite(24):
        if name.startswith("random_") and G.base.top_level == 1:
            yield name, G


def main():
    docs, golden = [], {}
    for name, G in two_level_stacks():
        d = restrict_R(G)
        docs.append(document("gluing_datum", name, gluing_datum_payload(d)))
        golden[name] = {x: len(oracles.descent_families(D)) for x, D in build_diagram(d).items()}
    with open(os.path.join(HERE, "two_level.json"), "w", encoding="utf-8") as fh:
        fh.write(canonical_dumps({"documents": docs}))
    with open(os.path.join(HERE, "golden_glue_counts.json"), "w", encoding="utf-8") as fh:
        fh.write(canonical_dumps(golden))


if __name__ == "__main__":
    main()
