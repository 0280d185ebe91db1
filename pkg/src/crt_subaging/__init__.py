"""Fragmentation-coagulation dynamics on random forests and their continuum limit.

The package simulates a mark/unmark Markov chain on uniform random labeled
trees, the matching marked-CRT limit process on reduced trees, and the
two-urn toy model that exhibits the same two-time-scale behaviour.  A small
statistics toolbox and a reproducible experiment harness tie the discrete
and continuum sides together.
"""

__version__ = "0.1.0"
