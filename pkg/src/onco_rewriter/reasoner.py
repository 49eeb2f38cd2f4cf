"""Saturation reasoning over generated EL axiom sets.

classify() computes four relations in polynomial time: the reflexive and
transitively closed named subsumption, the attribute classes each class can
reach through hasAttribute (inherited included), the association edges each
class carries (inherited included, ranges kept as declared), and the
transitive reachability over those edges.

Association ranges stay verbatim on edges; widening a range to one of its
superclasses is handled at the point of matching instead (a reachability or
path query matches a terminal class polymorphically, in either subsumption
direction). Path enumeration is exhaustive over simple paths up to a node
budget, so a query over the transitive association abstraction can be
rewritten into every concrete role chain that realizes it.
"""

from __future__ import annotations

from dataclasses import dataclass

from .ontology import (
    HAS_ASSOCIATION,
    HAS_ATTRIBUTE,
    AxiomSet,
    Conjunction,
    DataExistential,
    Existential,
    Named,
    SubClassOf,
    SubPropertyOf,
    TransitiveProperty,
    el_conformance_report,
)


class ReasonerError(ValueError):
    pass


class UnknownNameError(KeyError):
    def __init__(self, name: str):
        self.name = name
        super().__init__(f"unknown class name '{name}'")


@dataclass(frozen=True)
class AssociationPath:
    """A concrete chain of association steps.

    Each step is (property, declared range class); the chain starts at
    source_class and never revisits a class.
    """

    source_class: str
    steps: tuple[tuple[str, str], ...]

    def __post_init__(self):
        if not self.steps:
            raise ReasonerError("a path needs at least one step")

    @property
    def node_count(self) -> int:
        return 1 + len(self.steps)

    @property
    def nodes(self) -> tuple[str, ...]:
        return (self.source_class,) + tuple(r for _, r in self.steps)

    @property
    def properties(self) -> tuple[str, ...]:
        return tuple(p for p, _ in self.steps)


@dataclass(frozen=True)
class SubsumptionIndex:
    subsumers: dict[str, frozenset[str]]
    attribute_of: dict[str, frozenset[str]]
    assoc_edges: dict[str, frozenset[tuple[str, str]]]
    reach: dict[str, frozenset[str]]

    def known(self, name: str) -> bool:
        return name in self.subsumers


def _decompose(lhs: str, expr, named_out, exist_out) -> None:
    """Split a right-hand side into named subsumers and existential parts."""
    if isinstance(expr, Named):
        named_out.append((lhs, expr.name))
    elif isinstance(expr, Conjunction):
        for part in expr.parts:
            _decompose(lhs, part, named_out, exist_out)
    elif isinstance(expr, Existential):
        exist_out.append((lhs, expr.property_name, expr.filler))
    elif isinstance(expr, DataExistential):
        pass  # datatype restrictions carry no class information
    else:
        raise ReasonerError(f"non-EL expression {type(expr).__name__}")


def classify(axiom_set: AxiomSet) -> SubsumptionIndex:
    """Saturate the axiom set into a SubsumptionIndex."""
    violations = el_conformance_report(axiom_set)
    if violations:
        raise ReasonerError(f"non-EL axiom encountered: {violations[0]}")

    named_subs: list[tuple[str, str]] = []
    existentials: list[tuple[str, str, object]] = []
    prop_parents: dict[str, set[str]] = {}
    names: set[str] = set(axiom_set.class_names())

    for axiom in axiom_set.axioms:
        if isinstance(axiom, SubClassOf):
            if not isinstance(axiom.sub, Named):
                raise ReasonerError("subclass axioms must have a named left-hand side")
            _decompose(axiom.sub.name, axiom.sup, named_subs, existentials)
        elif isinstance(axiom, SubPropertyOf):
            prop_parents.setdefault(axiom.sub, set()).add(axiom.sup)
            prop_parents.setdefault(axiom.sup, set())
        elif isinstance(axiom, TransitiveProperty):
            prop_parents.setdefault(axiom.property_name, set())

    # reflexive-transitive closure of the property hierarchy
    prop_subsumers: dict[str, set[str]] = {}
    for prop in prop_parents:
        closure = {prop}
        frontier = [prop]
        while frontier:
            current = frontier.pop()
            for parent in prop_parents.get(current, ()):
                if parent not in closure:
                    closure.add(parent)
                    frontier.append(parent)
        prop_subsumers[prop] = closure

    def under_association(prop: str) -> bool:
        return HAS_ASSOCIATION in prop_subsumers.get(prop, {prop})

    # direct relations prior to closure
    direct_sup: dict[str, set[str]] = {name: set() for name in names}
    direct_edges: dict[str, set[tuple[str, str]]] = {name: set() for name in names}
    direct_attrs: dict[str, set[str]] = {name: set() for name in names}
    for sub, sup in named_subs:
        direct_sup.setdefault(sub, set()).add(sup)
        direct_sup.setdefault(sup, set())
        names.update((sub, sup))
    for lhs, prop, filler in existentials:
        names.add(lhs)
        direct_sup.setdefault(lhs, set())
        if isinstance(filler, Named):
            names.add(filler.name)
            direct_sup.setdefault(filler.name, set())
            direct_edges.setdefault(filler.name, set())
            direct_attrs.setdefault(filler.name, set())
            if prop == HAS_ATTRIBUTE:
                direct_attrs.setdefault(lhs, set()).add(filler.name)
            elif under_association(prop):
                direct_edges.setdefault(lhs, set()).add((prop, filler.name))
        # compound fillers (noted qualifier lists) contribute no index entries
        direct_edges.setdefault(lhs, set())
        direct_attrs.setdefault(lhs, set())
    for name in names:
        direct_sup.setdefault(name, set())
        direct_edges.setdefault(name, set())
        direct_attrs.setdefault(name, set())

    # reflexive-transitive closure of named subsumption (cycles permitted)
    subsumers: dict[str, frozenset[str]] = {}
    for name in names:
        closure = {name}
        frontier = [name]
        while frontier:
            current = frontier.pop()
            for parent in direct_sup.get(current, ()):
                if parent not in closure:
                    closure.add(parent)
                    frontier.append(parent)
        subsumers[name] = frozenset(closure)

    # inherit edges and attributes down the subsumption hierarchy
    assoc_edges: dict[str, frozenset[tuple[str, str]]] = {}
    attribute_of: dict[str, frozenset[str]] = {}
    for name in names:
        edges: set[tuple[str, str]] = set()
        attrs: set[str] = set()
        for sup in subsumers[name]:
            edges.update(direct_edges.get(sup, ()))
            attrs.update(direct_attrs.get(sup, ()))
        assoc_edges[name] = frozenset(edges)
        attribute_of[name] = frozenset(attrs)

    # transitive reachability over the one-step edge relation
    reach: dict[str, frozenset[str]] = {}
    for name in names:
        reached: set[str] = set()
        frontier = [r for _, r in assoc_edges[name]]
        while frontier:
            current = frontier.pop()
            if current in reached:
                continue
            reached.add(current)
            frontier.extend(r for _, r in assoc_edges.get(current, ()))
        reach[name] = frozenset(reached)

    return SubsumptionIndex(
        subsumers=subsumers,
        attribute_of=attribute_of,
        assoc_edges=assoc_edges,
        reach=reach,
    )


def entails_subclass(index: SubsumptionIndex, sub: str, sup: str) -> bool:
    for name in (sub, sup):
        if not index.known(name):
            raise UnknownNameError(name)
    return sup in index.subsumers[sub]


def _polymorphic_match(index: SubsumptionIndex, reached: str, wanted: str) -> bool:
    return wanted in index.subsumers[reached] or reached in index.subsumers[wanted]


def association_reachable(index: SubsumptionIndex, source: str, target: str) -> bool:
    """True when target is reachable from source through one or more
    association steps, matching the terminal class in either subsumption
    direction.

    Reachability here mirrors path enumeration, which only returns simple
    paths: a class sitting on a cycle does not reach itself.
    """
    for name in (source, target):
        if not index.known(name):
            raise UnknownNameError(name)
    reached_set = index.reach[source]
    if target != source and target in reached_set:
        return True
    return any(
        _polymorphic_match(index, reached, target)
        for reached in reached_set
        if reached != source
    )


def find_paths(
    index: SubsumptionIndex, source: str, target: str, max_nodes: int = 16
) -> list[AssociationPath]:
    """All simple association paths from source to a class matching target.

    Intermediate steps follow declared ranges verbatim; only the final step
    matches target polymorphically. Results are ordered by node count, then
    lexicographically by property and range names.
    """
    if max_nodes < 2:
        raise ValueError("max_nodes must be at least 2")
    for name in (source, target):
        if not index.known(name):
            raise UnknownNameError(name)

    found: list[AssociationPath] = []
    steps: list[tuple[str, str]] = []
    visited: set[str] = {source}

    def walk(current: str) -> None:
        for prop, rng in sorted(index.assoc_edges[current]):
            if rng in visited:
                continue
            steps.append((prop, rng))
            if _polymorphic_match(index, rng, target):
                found.append(AssociationPath(source_class=source, steps=tuple(steps)))
            if len(steps) + 1 < max_nodes:
                visited.add(rng)
                walk(rng)
                visited.discard(rng)
            steps.pop()

    walk(source)
    found.sort(key=lambda p: (p.node_count, p.properties, p.nodes))
    return found
