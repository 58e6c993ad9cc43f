"""Executable gluing of stacks on finite stratified posets.

Stacks are pseudofunctors on finite posets, locally constant stacks are
2-representations of finitely presented 2-groupoids, and every 2-limit is a
descent category computed by exhaustive enumeration.

Modules
-------
fincat
    Finite categories, functors, natural transformations, equivalence oracle.
pseudo
    Pseudofunctors, pseudonatural transformations, descent categories.
posetstack
    Stacks on stratified posets: pullback, pushforward, unit and counit.
gluing
    The index category of chains, gluing data, restriction and gluing.
monodromy
    Presentations, 2-representations, sections, pullback and pushforward.
constructible
    Combinatorial Thom-Mather data and constructible gluing.
"""
from strata.kernels import BACKEND

__version__ = "0.1.0"
__all__ = ["BACKEND", "__version__"]
