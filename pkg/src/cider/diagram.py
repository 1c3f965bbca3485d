"""Influence diagrams over Boolean variables with a single cost node.

A diagram is a DAG of chance and decision variables plus one cost node.
Chance variables carry conditional probability tables; decision
variables are resolved by strategies supplied separately.  Table rows
are keyed by the parent values concatenated as '0'/'1' characters in
declared parent order (the root row key is the empty string).

Worlds (total valuations) are plain ``{variable: bool}`` mappings and
are always enumerated in binary counting order over the declared
variable order, so outputs are deterministic.
"""

import itertools
from dataclasses import dataclass

CHANCE = "chance"
DECISION = "decision"
COST_NODE = "cost"  # reserved id; variables may not use or reference it

__all__ = [
    "CHANCE",
    "DECISION",
    "InfluenceDiagram",
    "LocalStrategy",
    "GlobalStrategy",
    "Violation",
    "rowkey",
    "bits_of",
    "world_from_bits",
    "validate",
    "validate_strategy",
    "influence_set",
    "strategy_scope",
    "joint_probability",
    "cost_of_valuation",
    "cost_distribution",
    "expected_cost",
]


def rowkey(world, variables):
    """Restriction of a world to some variables, as a '0'/'1' row key."""
    return "".join("1" if world[v] else "0" for v in variables)


def bits_of(world, variables):
    return rowkey(world, variables)


def world_from_bits(bits, variables):
    if len(bits) != len(variables) or set(bits) - {"0", "1"}:
        raise ValueError(f"world {bits!r} does not match variables {variables}")
    return {v: b == "1" for v, b in zip(variables, bits)}


def _all_rowkeys(n):
    return ["".join(bits) for bits in itertools.product("01", repeat=n)]


@dataclass(frozen=True)
class InfluenceDiagram:
    """DAG of Boolean chance/decision variables plus one cost node.

    cpt maps each chance variable to {rowkey over its parents: P(v=true)}.
    cost_table maps every rowkey over cost_parents to a real cost.
    """

    variables: tuple
    kinds: dict
    parents: dict
    cpt: dict
    cost_parents: tuple
    cost_table: dict

    @property
    def chance_nodes(self):
        return tuple(v for v in self.variables if self.kinds.get(v) == CHANCE)

    @property
    def decision_nodes(self):
        return tuple(v for v in self.variables if self.kinds.get(v) == DECISION)

    @property
    def cost_values(self):
        return tuple(sorted(set(self.cost_table.values())))

    def worlds(self):
        """All total valuations, in binary counting order."""
        n = len(self.variables)
        for bits in itertools.product((False, True), repeat=n):
            yield dict(zip(self.variables, bits))

    def bits(self, world):
        return rowkey(world, self.variables)

    def world(self, bits):
        return world_from_bits(bits, self.variables)


@dataclass(frozen=True)
class Violation:
    node: str
    message: str

    def __str__(self):
        return f"{self.node}: {self.message}"


def validate(diagram):
    """Every violated structural invariant, with the offending node.

    An empty list means the diagram is well-formed.
    """
    out = []
    seen = set()
    for v in diagram.variables:
        if v in seen:
            out.append(Violation(v, "duplicate variable"))
        seen.add(v)
        if v == COST_NODE:
            out.append(Violation(v, "variable name 'cost' is reserved"))
        kind = diagram.kinds.get(v)
        if kind not in (CHANCE, DECISION):
            out.append(Violation(v, f"unknown kind {kind!r}"))
    for v in diagram.variables:
        for p in diagram.parents.get(v, ()):
            if p == COST_NODE:
                out.append(Violation(COST_NODE, "cost node has outgoing edge"))
            elif p not in seen:
                out.append(Violation(v, f"unknown parent {p!r}"))
    cycle = _find_cycle(diagram)
    if cycle:
        out.append(Violation(cycle, "parent graph has a cycle through this node"))
    for v in diagram.variables:
        kind = diagram.kinds.get(v)
        table = diagram.cpt.get(v)
        if kind == DECISION:
            if table is not None:
                out.append(Violation(v, "decision node has a CPT"))
            continue
        if kind != CHANCE:
            continue
        if table is None:
            out.append(Violation(v, "chance node has no CPT"))
            continue
        expected = _all_rowkeys(len(diagram.parents.get(v, ())))
        for key in expected:
            if key not in table:
                out.append(Violation(v, f"missing CPT row {key!r}"))
        for key, p in table.items():
            if key not in expected:
                out.append(Violation(v, f"unexpected CPT row {key!r}"))
            elif not (isinstance(p, (int, float)) and 0.0 <= p <= 1.0):
                out.append(Violation(v, f"probability out of range in row {key!r}"))
    for p in diagram.cost_parents:
        if p not in seen:
            out.append(Violation(COST_NODE, f"unknown cost parent {p!r}"))
        if p == COST_NODE:
            out.append(Violation(COST_NODE, "cost node cannot be its own parent"))
    expected = _all_rowkeys(len(diagram.cost_parents))
    for key in expected:
        if key not in diagram.cost_table:
            out.append(Violation(COST_NODE, f"missing cost row {key!r}"))
    for key, value in diagram.cost_table.items():
        if key not in expected:
            out.append(Violation(COST_NODE, f"unexpected cost row {key!r}"))
        elif not isinstance(value, (int, float)) or value != value:
            out.append(Violation(COST_NODE, f"cost in row {key!r} is not a number"))
    return out


def _find_cycle(diagram):
    """Name of some node on a parent-graph cycle, or None."""
    state = {}  # 0 visiting, 1 done

    def visit(v):
        if state.get(v) == 0:
            return v
        if state.get(v) == 1:
            return None
        state[v] = 0
        for p in diagram.parents.get(v, ()):
            if p in diagram.kinds:
                hit = visit(p)
                if hit:
                    return hit
        state[v] = 1
        return None

    for v in diagram.variables:
        hit = visit(v)
        if hit:
            return hit
    return None


def _ancestors(diagram, v):
    out = set()
    stack = list(diagram.parents.get(v, ()))
    while stack:
        p = stack.pop()
        if p not in out:
            out.add(p)
            stack.extend(diagram.parents.get(p, ()))
    return out


def influence_set(diagram, decision):
    """Decision ancestors (through any path) plus direct parents."""
    if diagram.kinds.get(decision) != DECISION:
        raise ValueError(f"{decision!r} is not a decision node")
    ancestors = _ancestors(diagram, decision)
    decision_ancestors = {a for a in ancestors if diagram.kinds.get(a) == DECISION}
    return decision_ancestors | set(diagram.parents.get(decision, ()))


def strategy_scope(diagram, decision, forgetful=False):
    """Conditioning variables of a local strategy, in declared order.

    Defaults to the influence set (no-forgetting); with forgetful=True
    only the direct parents condition the choice.
    """
    if forgetful:
        members = set(diagram.parents.get(decision, ()))
        if diagram.kinds.get(decision) != DECISION:
            raise ValueError(f"{decision!r} is not a decision node")
    else:
        members = influence_set(diagram, decision)
    return tuple(v for v in diagram.variables if v in members)


@dataclass(frozen=True)
class LocalStrategy:
    """Conditional table P(decision = true | scope row) for one decision."""

    decision: str
    scope: tuple
    table: dict

    @property
    def is_pure(self):
        return all(p in (0, 1) for p in self.table.values())


@dataclass(frozen=True)
class GlobalStrategy:
    """One local strategy per decision node."""

    locals: dict

    def for_decision(self, decision):
        return self.locals[decision]

    @property
    def is_pure(self):
        return all(ls.is_pure for ls in self.locals.values())


def validate_strategy(diagram, strategy, forgetful=False):
    """Check totality and probability range of a global strategy."""
    out = []
    decisions = set(diagram.decision_nodes)
    if set(strategy.locals) != decisions:
        out.append(
            Violation(
                "strategy",
                f"covers {sorted(strategy.locals)} but decisions are {sorted(decisions)}",
            )
        )
        return out
    for d, local in strategy.locals.items():
        expected_scope = strategy_scope(diagram, d, forgetful=forgetful)
        if tuple(local.scope) != expected_scope:
            out.append(
                Violation(d, f"scope {local.scope} differs from {expected_scope}")
            )
            continue
        for key in _all_rowkeys(len(expected_scope)):
            if key not in local.table:
                out.append(Violation(d, f"missing strategy row {key!r}"))
        for key, p in local.table.items():
            if not (isinstance(p, (int, float)) and 0.0 <= p <= 1.0):
                out.append(Violation(d, f"probability out of range in row {key!r}"))
    return out


def joint_probability(diagram, strategy, world):
    """Chain-rule probability of a total valuation under a strategy.

    Chance factors come from the CPTs, decision factors from the local
    strategy evaluated on its conditioning scope.
    """
    p = 1.0
    for v in diagram.variables:
        if diagram.kinds[v] == CHANCE:
            row = diagram.cpt[v][rowkey(world, diagram.parents.get(v, ()))]
        else:
            local = strategy.locals[v]
            row = local.table[rowkey(world, local.scope)]
        p *= row if world[v] else 1.0 - row
        if p == 0.0:
            return 0.0
    return p


def cost_of_valuation(diagram, world):
    """Cost-table row selected by the world restricted to the cost parents."""
    return diagram.cost_table[rowkey(world, diagram.cost_parents)]


def cost_distribution(diagram, strategy):
    """Probability of paying each cost value under the strategy."""
    dist = {r: 0.0 for r in diagram.cost_values}
    for world in diagram.worlds():
        dist[cost_of_valuation(diagram, world)] += joint_probability(
            diagram, strategy, world
        )
    return dist


def expected_cost(diagram, strategy):
    dist = cost_distribution(diagram, strategy)
    return sum(r * p for r, p in dist.items())
