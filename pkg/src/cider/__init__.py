"""Contextual influence-diagram expected-cost reasoner.

Pairs a lightweight description-logic ontology whose axioms hold only
in stated contexts with an influence diagram over the same Boolean
variables.  Answers contextual subsumption queries, computes expected
and conditional expected costs under strategies, and finds optimal pure
and arbitrary strategies (the latter via a sequence-form linear
program).
"""

from . import contextual, diagram, el, evidence, fixtures, kbfile, optimizer, simplex

__all__ = [
    "contextual",
    "diagram",
    "el",
    "evidence",
    "fixtures",
    "kbfile",
    "optimizer",
    "simplex",
]

__version__ = "0.1.0"
