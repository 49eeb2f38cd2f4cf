"""Concept-level query rewriting into CQL.

The rewriting runs in eight stages: parse, UML extraction, data value
extraction, semantic validation, property path finding, data value
re-addition, translation to a bag-monoid comprehension, and translation of
the comprehension into a CQL query. Every stage is a pure function; the
driver composes them, collects per-stage durations, and keeps a provenance
record of which class choices and which association paths produced each
emitted query.

Query texts use a small class-expression grammar::

    expr    := term ('and' term)*
    term    := NAME
             | 'hasAssociation' 'some' primary
             | 'hasAttribute' 'some' primary
             | 'hasValue' 'value' STRING
             | '(' expr ')'
    primary := NAME | '(' expr ')'

Names are thesaurus concept identifiers and keywords are case-sensitive.
"""

from __future__ import annotations

import itertools
import time
from dataclasses import dataclass, field, replace

from .cql import CqlAssociation, CqlAttribute, CqlGroup, CqlQuery, CqlTarget
from .model import Thesaurus, UMLModel, model_signature
from .module_extraction import ThesaurusAxiomSet, extract_module, strip_disjoints
from .ontology import (
    UML_ATTRIBUTE,
    UML_CLASS,
    AxiomSet,
    ModelNaming,
    generate_ontology,
    merge_axiom_sets,
    model_naming,
)
from .reasoner import (
    AssociationPath,
    SubsumptionIndex,
    association_reachable,
    classify,
    find_paths,
)

STAGES = (
    "parse",
    "umlExtract",
    "valueExtract",
    "validate",
    "pathFind",
    "valueReinsert",
    "mcc",
    "cql",
)


class PipelineError(Exception):
    """Base for stage failures; carries the name of the failing stage."""

    def __init__(self, stage: str, message: str):
        self.stage = stage
        super().__init__(message)


class QuerySyntaxError(PipelineError):
    def __init__(self, message: str, position: int | None = None):
        self.position = position
        if position is not None:
            message = f"{message} (at position {position})"
        super().__init__("parse", message)


class NoUmlCandidateError(PipelineError):
    def __init__(self, concept: str):
        self.concept = concept
        super().__init__("umlExtract", f"no UML candidate for concept '{concept}'")


class ValidationRejectedError(PipelineError):
    def __init__(self, failures: tuple[tuple[str, str, str], ...]):
        self.failures = failures
        details = "; ".join(f"{kind} {a} / {b}" for kind, a, b in failures)
        super().__init__("validate", f"query cannot be satisfied: {details}")


class NoPathError(PipelineError):
    def __init__(self, source: str, target: str):
        self.source = source
        self.target = target
        super().__init__("pathFind", f"no association path from {source} to {target}")


class CandidateLimitError(PipelineError):
    def __init__(self, stage: str, count: int, limit: int):
        super().__init__(stage, f"candidate count {count} exceeds limit {limit}")


class MccError(PipelineError):
    def __init__(self, message: str):
        super().__init__("mcc", message)


# --- query AST -------------------------------------------------------------


class QueryNode:
    __slots__ = ()


@dataclass(frozen=True)
class ConceptRef(QueryNode):
    name: str


@dataclass(frozen=True)
class UmlClassRef(QueryNode):
    name: str


@dataclass(frozen=True)
class UmlAttributeRef(QueryNode):
    name: str


@dataclass(frozen=True)
class And(QueryNode):
    items: tuple[QueryNode, ...]

    def __post_init__(self):
        if len(self.items) < 2:
            raise ValueError("conjunction needs at least two items")


@dataclass(frozen=True)
class HasAssociationSome(QueryNode):
    inner: QueryNode


@dataclass(frozen=True)
class HasAttributeSome(QueryNode):
    inner: QueryNode


@dataclass(frozen=True)
class HasValueEquals(QueryNode):
    literal: str


@dataclass(frozen=True)
class AssocStep(QueryNode):
    """A concrete association step introduced by path expansion."""

    property_name: str
    inner: QueryNode


def _conjoin(items: list[QueryNode]) -> QueryNode:
    flat: list[QueryNode] = []
    for item in items:
        if isinstance(item, And):
            flat.extend(item.items)
        else:
            flat.append(item)
    if len(flat) == 1:
        return flat[0]
    return And(tuple(flat))


def _parts(node: QueryNode) -> tuple[QueryNode, ...]:
    return node.items if isinstance(node, And) else (node,)


# --- parsing ----------------------------------------------------------------

_KEYWORDS = frozenset({"and", "some", "value", "hasAssociation", "hasAttribute", "hasValue"})


@dataclass(frozen=True)
class _Token:
    kind: str  # NAME, KEYWORD, STRING, LPAREN, RPAREN
    text: str
    position: int


def _tokenize(text: str) -> list[_Token]:
    tokens: list[_Token] = []
    i = 0
    while i < len(text):
        ch = text[i]
        if ch.isspace():
            i += 1
            continue
        if ch == "(":
            tokens.append(_Token("LPAREN", "(", i + 1))
            i += 1
        elif ch == ")":
            tokens.append(_Token("RPAREN", ")", i + 1))
            i += 1
        elif ch == '"':
            start = i
            i += 1
            literal = []
            while i < len(text) and text[i] != '"':
                if text[i] == "\\" and i + 1 < len(text) and text[i + 1] in ('"', "\\"):
                    literal.append(text[i + 1])
                    i += 2
                else:
                    literal.append(text[i])
                    i += 1
            if i >= len(text):
                raise QuerySyntaxError("unterminated string literal", start + 1)
            i += 1
            tokens.append(_Token("STRING", "".join(literal), start + 1))
        elif ch.isalpha() or ch == "_":
            start = i
            while i < len(text) and (text[i].isalnum() or text[i] == "_"):
                i += 1
            word = text[start:i]
            kind = "KEYWORD" if word in _KEYWORDS else "NAME"
            tokens.append(_Token(kind, word, start + 1))
        else:
            raise QuerySyntaxError(f"unexpected character '{ch}'", i + 1)
    return tokens


class _Parser:
    def __init__(self, tokens: list[_Token], length: int):
        self.tokens = tokens
        self.pos = 0
        self.end = length + 1

    def peek(self) -> _Token | None:
        return self.tokens[self.pos] if self.pos < len(self.tokens) else None

    def take(self) -> _Token:
        token = self.peek()
        if token is None:
            raise QuerySyntaxError("unexpected end of query", self.end)
        self.pos += 1
        return token

    def expect_keyword(self, word: str) -> None:
        token = self.take()
        if token.kind != "KEYWORD" or token.text != word:
            raise QuerySyntaxError(f"expected '{word}', got '{token.text}'", token.position)

    def at_keyword(self, word: str) -> bool:
        token = self.peek()
        return token is not None and token.kind == "KEYWORD" and token.text == word

    def parse_expr(self) -> QueryNode:
        terms = [self.parse_term()]
        while self.at_keyword("and"):
            self.take()
            terms.append(self.parse_term())
        return _conjoin(terms)

    def parse_term(self) -> QueryNode:
        token = self.peek()
        if token is None:
            raise QuerySyntaxError("unexpected end of query", self.end)
        if token.kind == "LPAREN":
            self.take()
            expr = self.parse_expr()
            closing = self.take()
            if closing.kind != "RPAREN":
                raise QuerySyntaxError("expected ')'", closing.position)
            return expr
        if token.kind == "NAME":
            self.take()
            return ConceptRef(token.text)
        if token.kind == "KEYWORD" and token.text in ("hasAssociation", "hasAttribute"):
            self.take()
            self.expect_keyword("some")
            inner = self.parse_primary()
            if token.text == "hasAssociation":
                return HasAssociationSome(inner)
            return HasAttributeSome(inner)
        if token.kind == "KEYWORD" and token.text == "hasValue":
            self.take()
            self.expect_keyword("value")
            literal = self.take()
            if literal.kind != "STRING":
                raise QuerySyntaxError("expected a quoted string literal", literal.position)
            return HasValueEquals(literal.text)
        raise QuerySyntaxError(f"unexpected keyword '{token.text}'", token.position)

    def parse_primary(self) -> QueryNode:
        token = self.peek()
        if token is None:
            raise QuerySyntaxError("unexpected end of query", self.end)
        if token.kind == "LPAREN":
            self.take()
            expr = self.parse_expr()
            closing = self.take()
            if closing.kind != "RPAREN":
                raise QuerySyntaxError("expected ')'", closing.position)
            return expr
        if token.kind == "NAME":
            self.take()
            return ConceptRef(token.text)
        raise QuerySyntaxError(
            f"expected a concept name or parenthesized expression, got '{token.text}'",
            token.position,
        )


def _check_structure(root: QueryNode) -> None:
    """Shape constraints beyond the grammar: each class context names exactly
    one concept, data values live only under attribute restrictions, and an
    attribute restriction combines one concept with data values only."""

    def class_context(node: QueryNode, where: str) -> None:
        concepts = [p for p in _parts(node) if isinstance(p, ConceptRef)]
        if len(concepts) != 1:
            raise QuerySyntaxError(f"{where} must name exactly one concept")
        for part in _parts(node):
            if isinstance(part, ConceptRef):
                continue
            if isinstance(part, HasAssociationSome):
                class_context(part.inner, "an association target")
            elif isinstance(part, HasAttributeSome):
                attribute_context(part.inner)
            elif isinstance(part, HasValueEquals):
                raise QuerySyntaxError("hasValue is only allowed inside a hasAttribute restriction")
            else:
                raise QuerySyntaxError(f"unexpected {type(part).__name__} in {where}")

    def attribute_context(node: QueryNode) -> None:
        concepts = [p for p in _parts(node) if isinstance(p, ConceptRef)]
        if len(concepts) != 1:
            raise QuerySyntaxError("an attribute restriction must name exactly one concept")
        for part in _parts(node):
            if not isinstance(part, (ConceptRef, HasValueEquals)):
                raise QuerySyntaxError(
                    "an attribute restriction may only combine a concept with data values"
                )

    class_context(root, "the query")


def parse_query(text: str) -> QueryNode:
    """Parse a concept-level query text into its AST."""
    parser = _Parser(_tokenize(text), len(text))
    expr = parser.parse_expr()
    trailing = parser.peek()
    if trailing is not None:
        raise QuerySyntaxError(f"unexpected trailing input '{trailing.text}'", trailing.position)
    _check_structure(expr)
    return expr


# --- UML extraction ---------------------------------------------------------


@dataclass(frozen=True)
class Provenance:
    """Which UML-class choices and which paths produced a candidate."""

    concept_choices: tuple[tuple[str, str], ...] = ()
    path_choices: tuple[tuple[str, str, tuple[str, ...]], ...] = ()


@dataclass(frozen=True)
class CandidateQuery:
    ast: QueryNode
    provenance: Provenance = field(default_factory=Provenance)

    @property
    def order_key(self) -> tuple:
        return (
            tuple(chosen for _, chosen in self.provenance.concept_choices),
            self.provenance.path_choices,
        )


def extract_uml(ast: QueryNode, index: SubsumptionIndex) -> list[CandidateQuery]:
    """Replace every concept reference by each UML class (or attribute class)
    entailed to be subsumed by it; independent choices multiply out and the
    result is ordered lexicographically by the chosen names."""
    class_pool = sorted(
        name
        for name, sups in index.subsumers.items()
        if name.startswith("c:") and UML_CLASS in sups
    )
    attribute_pool = sorted(
        name
        for name, sups in index.subsumers.items()
        if name.startswith("c:") and UML_ATTRIBUTE in sups
    )

    occurrences: list[tuple[str, list[str]]] = []

    def collect(node: QueryNode, attribute_position: bool) -> None:
        if isinstance(node, ConceptRef):
            concept = f"n:{node.name}"
            pool = attribute_pool if attribute_position else class_pool
            matches = [x for x in pool if concept in index.subsumers[x]]
            if not matches:
                raise NoUmlCandidateError(node.name)
            occurrences.append((node.name, matches))
        elif isinstance(node, And):
            for item in node.items:
                collect(item, attribute_position)
        elif isinstance(node, HasAssociationSome):
            collect(node.inner, False)
        elif isinstance(node, HasAttributeSome):
            collect(node.inner, True)

    collect(ast, False)

    results: list[CandidateQuery] = []
    for combo in itertools.product(*(matches for _, matches in occurrences)):
        chosen = iter(combo)

        def rebuild(node: QueryNode, attribute_position: bool) -> QueryNode:
            if isinstance(node, ConceptRef):
                name = next(chosen)
                return UmlAttributeRef(name) if attribute_position else UmlClassRef(name)
            if isinstance(node, And):
                return And(tuple(rebuild(i, attribute_position) for i in node.items))
            if isinstance(node, HasAssociationSome):
                return HasAssociationSome(rebuild(node.inner, False))
            if isinstance(node, HasAttributeSome):
                return HasAttributeSome(rebuild(node.inner, True))
            return node

        ast_resolved = rebuild(ast, False)
        choices = tuple(
            (concept, name) for (concept, _), name in zip(occurrences, combo)
        )
        results.append(CandidateQuery(ast=ast_resolved, provenance=Provenance(concept_choices=choices)))
    results.sort(key=lambda c: c.order_key)
    return results


# --- data value extraction / re-addition -------------------------------------


@dataclass(frozen=True)
class ValueBinding:
    """Where a removed data value belongs.

    ``path`` addresses the removed node in the pre-extraction tree (child
    indices from the root). ``attr_ordinal`` and ``rel_path`` anchor the same
    slot relative to its enclosing attribute restriction, which stays stable
    across path expansion.
    """

    path: tuple[int, ...]
    literal: str
    attr_ordinal: int
    rel_path: tuple[int, ...]


def extract_data_values(ast: QueryNode) -> tuple[QueryNode, list[ValueBinding]]:
    """Remove every data value, collapsing single-child conjunctions, and
    record re-insertion addresses in depth-first order."""
    bindings: list[ValueBinding] = []
    counter = itertools.count()

    def walk(node: QueryNode, path: tuple[int, ...], attr_anchor) -> QueryNode:
        if isinstance(node, And):
            kept: list[QueryNode] = []
            for i, item in enumerate(node.items):
                child_path = path + (i,)
                if isinstance(item, HasValueEquals):
                    if attr_anchor is None:
                        raise PipelineError(
                            "valueExtract", "data value outside an attribute restriction"
                        )
                    ordinal, base = attr_anchor
                    bindings.append(
                        ValueBinding(
                            path=child_path,
                            literal=item.literal,
                            attr_ordinal=ordinal,
                            rel_path=child_path[base:],
                        )
                    )
                else:
                    kept.append(walk(item, child_path, attr_anchor))
            if not kept:
                raise PipelineError("valueExtract", "attribute restriction with values only")
            if len(kept) == 1:
                return kept[0]
            return And(tuple(kept))
        if isinstance(node, HasAttributeSome):
            ordinal = next(counter)
            return HasAttributeSome(walk(node.inner, path + (0,), (ordinal, len(path))))
        if isinstance(node, HasAssociationSome):
            return HasAssociationSome(walk(node.inner, path + (0,), None))
        if isinstance(node, AssocStep):
            return AssocStep(node.property_name, walk(node.inner, path + (0,), None))
        if isinstance(node, HasValueEquals):
            raise PipelineError("valueExtract", "data value must be conjoined with a concept")
        return node

    stripped = walk(ast, (), None)
    return stripped, bindings


def reinsert_data_values(ast: QueryNode, bindings: list[ValueBinding]) -> QueryNode:
    """Restore extracted data values under their original attribute nodes."""
    groups: dict[int, list[ValueBinding]] = {}
    for binding in bindings:
        groups.setdefault(binding.attr_ordinal, []).append(binding)
    counter = itertools.count()

    def walk(node: QueryNode) -> QueryNode:
        if isinstance(node, HasAttributeSome):
            ordinal = next(counter)
            inner = walk(node.inner)
            mine = groups.pop(ordinal, [])
            if mine:
                for binding in mine:
                    if len(binding.rel_path) < 2 or binding.rel_path[:-1] != (0,):
                        raise PipelineError(
                            "valueReinsert",
                            f"binding address unresolvable: {binding.rel_path}",
                        )
                existing = list(inner.items) if isinstance(inner, And) else [inner]
                total = len(existing) + len(mine)
                slots: list[QueryNode | None] = [None] * total
                for binding in mine:
                    index = binding.rel_path[-1]
                    if not 0 <= index < total or slots[index] is not None:
                        raise PipelineError(
                            "valueReinsert",
                            f"binding address unresolvable: {binding.rel_path}",
                        )
                    slots[index] = HasValueEquals(binding.literal)
                rest = iter(existing)
                filled = tuple(slot if slot is not None else next(rest) for slot in slots)
                inner = And(filled)
            return HasAttributeSome(inner)
        if isinstance(node, And):
            return And(tuple(walk(i) for i in node.items))
        if isinstance(node, HasAssociationSome):
            return HasAssociationSome(walk(node.inner))
        if isinstance(node, AssocStep):
            return AssocStep(node.property_name, walk(node.inner))
        return node

    result = walk(ast)
    if groups:
        raise PipelineError(
            "valueReinsert", "binding address unresolvable: no matching attribute restriction"
        )
    return result


# --- semantic validation ------------------------------------------------------


@dataclass(frozen=True)
class ValidationOutcome:
    ok: bool
    failures: tuple[tuple[str, str, str], ...] = ()


def _context_class(node: QueryNode) -> str:
    for part in _parts(node):
        if isinstance(part, UmlClassRef):
            return part.name
    raise PipelineError("validate", "context without a resolved class")


def _context_attribute(node: QueryNode) -> str:
    for part in _parts(node):
        if isinstance(part, UmlAttributeRef):
            return part.name
    raise PipelineError("validate", "attribute restriction without a resolved attribute class")


def validate_semantics(stripped: QueryNode, index: SubsumptionIndex) -> ValidationOutcome:
    """Check that every attribute belongs to its class and every association
    target is reachable from its source."""
    failures: list[tuple[str, str, str]] = []

    def walk(node: QueryNode) -> None:
        cls = _context_class(node)
        for part in _parts(node):
            if isinstance(part, HasAttributeSome):
                attr = _context_attribute(part.inner)
                if attr not in index.attribute_of.get(cls, frozenset()):
                    failures.append(("attribute", cls, attr))
            elif isinstance(part, HasAssociationSome):
                target = _context_class(part.inner)
                if not association_reachable(index, cls, target):
                    failures.append(("association", cls, target))
                walk(part.inner)
            elif isinstance(part, AssocStep):
                walk(part.inner)

    walk(stripped)
    return ValidationOutcome(ok=not failures, failures=tuple(failures))


# --- property path finding ------------------------------------------------------


def _chain_from_path(path: AssociationPath, final_inner: QueryNode) -> QueryNode:
    node = AssocStep(path.steps[-1][0], final_inner)
    for prop, rng in reversed(path.steps[:-1]):
        node = AssocStep(prop, And((UmlClassRef(rng), node)))
    return node


def find_property_paths(
    stripped: QueryNode, index: SubsumptionIndex, max_nodes: int = 16
) -> list[CandidateQuery]:
    """Replace every transitive-association restriction by each concrete role
    chain that realizes it; independent occurrences multiply out in the path
    order of the reasoner."""
    occurrences: list[tuple[str, str, list[AssociationPath]]] = []

    def collect(node: QueryNode) -> None:
        cls = _context_class(node)
        for part in _parts(node):
            if isinstance(part, HasAssociationSome):
                target = _context_class(part.inner)
                paths = find_paths(index, cls, target, max_nodes)
                if not paths:
                    raise NoPathError(cls, target)
                occurrences.append((cls, target, paths))
                collect(part.inner)

    collect(stripped)

    results: list[CandidateQuery] = []
    for combo in itertools.product(*(paths for _, _, paths in occurrences)):
        chosen = iter(combo)

        def rebuild(node: QueryNode) -> QueryNode:
            if isinstance(node, And):
                return And(tuple(rebuild(i) for i in node.items))
            if isinstance(node, HasAssociationSome):
                path = next(chosen)
                return _chain_from_path(path, rebuild(node.inner))
            return node

        expanded = rebuild(stripped)
        path_choices = tuple(
            (source, target, path.properties)
            for (source, target, _), path in zip(occurrences, combo)
        )
        results.append(
            CandidateQuery(ast=expanded, provenance=Provenance(path_choices=path_choices))
        )
    return results


# --- monoid comprehension ---------------------------------------------------------


@dataclass(frozen=True)
class Monoid:
    """A collection monoid: associative accumulator with identity and a unit
    function building singleton collections."""

    accumulator: str
    identity: str
    unit: str


BAG_MONOID = Monoid(accumulator="⊎", identity="empty bag", unit="singleton bag")


@dataclass(frozen=True)
class ExtentGenerator:
    var: str
    class_name: str


@dataclass(frozen=True)
class PathGenerator:
    var: str
    source_var: str
    role_name: str


@dataclass(frozen=True)
class TypeBind:
    var: str
    class_name: str


@dataclass(frozen=True)
class Filter:
    var: str
    attribute_name: str
    predicate: str
    literal: str


Qualifier = ExtentGenerator | PathGenerator | TypeBind | Filter


@dataclass(frozen=True)
class MccComprehension:
    head_var: str
    qualifiers: tuple[Qualifier, ...]
    monoid: Monoid = BAG_MONOID


def _predicate_for(literal: str) -> str:
    return "LIKE" if ("%" in literal or "_" in literal) else "EQUAL_TO"


class _VarAllocator:
    def __init__(self):
        self.used: set[str] = set()

    def fresh(self, basis: str) -> str:
        first = next((ch.lower() for ch in basis if ch.isalpha()), "v")
        if first not in self.used:
            self.used.add(first)
            return first
        suffix = 2
        while f"{first}{suffix}" in self.used:
            suffix += 1
        name = f"{first}{suffix}"
        self.used.add(name)
        return name


def to_mcc(ast: QueryNode, naming: ModelNaming) -> MccComprehension:
    """Translate a fully path-expanded query into a bag comprehension. The
    header variable ranges over the first class; each association step adds a
    path generator plus a type restriction and each data value a filter."""
    qualifiers: list[Qualifier] = []
    alloc = _VarAllocator()

    def visit(node: QueryNode, var: str) -> None:
        for part in _parts(node):
            if isinstance(part, UmlClassRef):
                continue
            if isinstance(part, AssocStep):
                role = naming.role_of(part.property_name)
                target_class = naming.bare_class(_context_class(part.inner))
                child = alloc.fresh(role)
                qualifiers.append(PathGenerator(var=child, source_var=var, role_name=role))
                qualifiers.append(TypeBind(var=child, class_name=target_class))
                visit(part.inner, child)
            elif isinstance(part, HasAttributeSome):
                attr_class = _context_attribute(part.inner)
                attr_name = naming.attribute_of(attr_class)
                for sub in _parts(part.inner):
                    if isinstance(sub, HasValueEquals):
                        qualifiers.append(
                            Filter(
                                var=var,
                                attribute_name=attr_name,
                                predicate=_predicate_for(sub.literal),
                                literal=sub.literal,
                            )
                        )
            elif isinstance(part, HasAssociationSome):
                raise MccError("unexpanded association restriction")
            elif isinstance(part, HasValueEquals):
                raise MccError("data value outside an attribute restriction")

    head_class = naming.bare_class(_context_class(ast))
    head_var = alloc.fresh(head_class)
    qualifiers.insert(0, ExtentGenerator(var=head_var, class_name=head_class))
    visit(ast, head_var)
    return MccComprehension(head_var=head_var, qualifiers=tuple(qualifiers))


def mcc_to_cql(comprehension: MccComprehension, model: UMLModel) -> CqlQuery:
    """Translate a comprehension into CQL: the header variable's type becomes
    the target, each generator pair a nested association, each filter an
    attribute restriction."""
    prefix = model.package_prefix
    known_classes = set(model.class_names())

    def qualified(cls: str) -> str:
        if cls not in known_classes:
            raise MccError(f"class '{cls}' is not part of model '{model.project_name}'")
        return f"{prefix}.{cls}" if prefix else cls

    classes: dict[str, str] = {}
    entries: dict[str, list[tuple]] = {}
    qualifiers = comprehension.qualifiers
    if not qualifiers or not isinstance(qualifiers[0], ExtentGenerator):
        raise MccError("the first qualifier must introduce the header variable")
    head = qualifiers[0]
    if head.var != comprehension.head_var:
        raise MccError("header variable is not introduced by the first qualifier")
    classes[head.var] = head.class_name
    entries[head.var] = []

    pending_bind: str | None = None
    for qualifier in qualifiers[1:]:
        if isinstance(qualifier, ExtentGenerator):
            raise MccError("only the first qualifier may be an extent generator")
        if isinstance(qualifier, PathGenerator):
            if qualifier.source_var not in classes:
                raise MccError(f"variable '{qualifier.source_var}' used before introduction")
            if qualifier.var in classes:
                raise MccError(f"variable '{qualifier.var}' introduced twice")
            entries[qualifier.source_var].append(("assoc", qualifier.var, qualifier.role_name))
            entries[qualifier.var] = []
            classes[qualifier.var] = ""  # type bound next
            pending_bind = qualifier.var
        elif isinstance(qualifier, TypeBind):
            if qualifier.var != pending_bind:
                raise MccError(f"type restriction on '{qualifier.var}' without its generator")
            classes[qualifier.var] = qualifier.class_name
            pending_bind = None
        elif isinstance(qualifier, Filter):
            if qualifier.var not in classes or not classes[qualifier.var]:
                raise MccError(f"filter on unbound variable '{qualifier.var}'")
            entries[qualifier.var].append(("filter", qualifier))
    if pending_bind is not None:
        raise MccError(f"generator '{pending_bind}' lacks a type restriction")

    def assemble(var: str):
        items = []
        for entry in entries[var]:
            if entry[0] == "assoc":
                _, child_var, role = entry
                items.append(
                    CqlAssociation(
                        name=qualified(classes[child_var]),
                        role_name=role,
                        child=assemble(child_var),
                    )
                )
            else:
                f = entry[1]
                items.append(
                    CqlAttribute(name=f.attribute_name, predicate=f.predicate, value=f.literal)
                )
        if not items:
            return None
        if len(items) == 1:
            return items[0]
        return CqlGroup(logical_op="AND", items=tuple(items))

    target = CqlTarget(name=qualified(classes[head.var]), child=assemble(head.var))
    return CqlQuery(target=target)


# --- canonical pretty-printing -----------------------------------------------------


def format_query(node: QueryNode, naming: ModelNaming | None = None) -> str:
    """Canonical one-line rendering of a query AST. Association chains print
    flat; composite existential arguments are parenthesized."""

    def fmt(n: QueryNode) -> str:
        if isinstance(n, (ConceptRef, UmlClassRef, UmlAttributeRef)):
            return n.name
        if isinstance(n, HasValueEquals):
            escaped = n.literal.replace("\\", "\\\\").replace('"', '\\"')
            return f'hasValue value "{escaped}"'
        if isinstance(n, And):
            return " and ".join(fmt(i) for i in n.items)
        if isinstance(n, HasAssociationSome):
            return f"hasAssociation some {arg(n.inner)}"
        if isinstance(n, HasAttributeSome):
            return f"hasAttribute some {arg(n.inner)}"
        if isinstance(n, AssocStep):
            role = naming.role_of(n.property_name) if naming else n.property_name
            inner = n.inner
            if (
                isinstance(inner, And)
                and len(inner.items) == 2
                and isinstance(inner.items[0], UmlClassRef)
                and isinstance(inner.items[1], AssocStep)
            ):
                return (
                    f"hasAssociation({role}) some {inner.items[0].name}"
                    f" and {fmt(inner.items[1])}"
                )
            return f"hasAssociation({role}) some {arg(inner)}"
        raise ValueError(f"cannot format {type(n).__name__}")

    def arg(n: QueryNode) -> str:
        if isinstance(n, (ConceptRef, UmlClassRef, UmlAttributeRef)):
            return fmt(n)
        return f"({fmt(n)})"

    return fmt(node)


def format_comprehension(comprehension: MccComprehension) -> str:
    """Canonical rendering of a comprehension, e.g.
    ``⊎{ s ‖ s ← SNP, g ← s.gene, g ← Gene, g.symbol = "TGFB1" }``."""
    rendered: list[str] = []
    for qualifier in comprehension.qualifiers:
        if isinstance(qualifier, ExtentGenerator):
            rendered.append(f"{qualifier.var} ← {qualifier.class_name}")
        elif isinstance(qualifier, PathGenerator):
            rendered.append(f"{qualifier.var} ← {qualifier.source_var}.{qualifier.role_name}")
        elif isinstance(qualifier, TypeBind):
            rendered.append(f"{qualifier.var} ← {qualifier.class_name}")
        else:
            op = {"EQUAL_TO": "=", "LIKE": "LIKE"}.get(qualifier.predicate, qualifier.predicate)
            escaped = qualifier.literal.replace("\\", "\\\\").replace('"', '\\"')
            rendered.append(f'{qualifier.var}.{qualifier.attribute_name} {op} "{escaped}"')
    body = ", ".join(rendered)
    acc = comprehension.monoid.accumulator
    return f"{acc}{{ {comprehension.head_var} ‖ {body} }}"


# --- the rewrite driver ---------------------------------------------------------------


@dataclass(frozen=True)
class RewriteOptions:
    max_nodes: int = 16
    candidate_limit: int = 64
    selection: str = "all"  # all | first | interactive
    expand_paths: bool = True
    chooser: object = None  # callable(list[str]) -> int, for interactive selection


@dataclass(frozen=True)
class RewriteContext:
    """Everything the per-query stages need, prepared once per model."""

    model: UMLModel
    naming: ModelNaming
    module: ThesaurusAxiomSet
    ontology: AxiomSet
    index: SubsumptionIndex


@dataclass(frozen=True)
class RewriteResult:
    cql: CqlQuery
    provenance: Provenance
    resolved: QueryNode
    stripped: QueryNode
    expanded: QueryNode
    restored: QueryNode
    mcc: MccComprehension


@dataclass(frozen=True)
class RewriteOutcome:
    results: tuple[RewriteResult, ...]
    durations_us: dict[str, float]
    dropped: tuple[tuple[Provenance, str], ...] = ()


def prepare_context(model: UMLModel, thesaurus: Thesaurus) -> RewriteContext:
    """Generate the ontology and thesaurus module for a model and classify
    their union."""
    module = extract_module(strip_disjoints(thesaurus), model_signature(model))
    ontology = generate_ontology(model, module.to_axiom_set())
    merged = merge_axiom_sets(ontology, module.to_axiom_set())
    return RewriteContext(
        model=model,
        naming=model_naming(model),
        module=module,
        ontology=ontology,
        index=classify(merged),
    )


def rewrite_prepared(
    context: RewriteContext, text: str, options: RewriteOptions | None = None
) -> RewriteOutcome:
    """Run the eight rewriting stages over a prepared context."""
    options = options or RewriteOptions()
    durations = {stage: 0.0 for stage in STAGES}

    def timed(stage: str, fn, *args):
        # process CPU clock: monotonic and immune to scheduler preemption,
        # which would dwarf microsecond stages
        start = time.process_time_ns()
        result = fn(*args)
        durations[stage] += (time.process_time_ns() - start) / 1000.0
        return result

    ast = timed("parse", parse_query, text)
    candidates = timed("umlExtract", extract_uml, ast, context.index)
    if len(candidates) > options.candidate_limit:
        raise CandidateLimitError("umlExtract", len(candidates), options.candidate_limit)

    max_nodes = options.max_nodes if options.expand_paths else 2
    results: list[RewriteResult] = []
    dropped: list[tuple[Provenance, str]] = []
    last_error: PipelineError | None = None
    for candidate in candidates:
        stripped, bindings = timed("valueExtract", extract_data_values, candidate.ast)
        outcome = timed("validate", validate_semantics, stripped, context.index)
        if not outcome.ok:
            error = ValidationRejectedError(outcome.failures)
            dropped.append((candidate.provenance, str(error)))
            last_error = error
            continue
        try:
            expansions = timed("pathFind", find_property_paths, stripped, context.index, max_nodes)
        except NoPathError as error:
            dropped.append((candidate.provenance, str(error)))
            last_error = error
            continue
        if len(results) + len(expansions) > options.candidate_limit:
            raise CandidateLimitError(
                "pathFind", len(results) + len(expansions), options.candidate_limit
            )
        for expansion in expansions:
            provenance = replace(
                expansion.provenance, concept_choices=candidate.provenance.concept_choices
            )
            restored = timed("valueReinsert", reinsert_data_values, expansion.ast, bindings)
            comprehension = timed("mcc", to_mcc, restored, context.naming)
            cql_query = timed("cql", mcc_to_cql, comprehension, context.model)
            results.append(
                RewriteResult(
                    cql=cql_query,
                    provenance=provenance,
                    resolved=candidate.ast,
                    stripped=stripped,
                    expanded=expansion.ast,
                    restored=restored,
                    mcc=comprehension,
                )
            )

    if not results:
        if last_error is not None:
            raise last_error
        raise PipelineError("umlExtract", "query produced no candidates")

    if options.selection == "first":
        results = results[:1]
    elif options.selection == "interactive" and len(results) > 1:
        chooser = options.chooser
        if chooser is None:
            raise PipelineError("pathFind", "interactive selection requires a chooser")
        summaries = [_describe_result(r) for r in results]
        choice = chooser(summaries)
        if not 0 <= choice < len(results):
            raise PipelineError("pathFind", f"selection {choice} out of range")
        results = [results[choice]]

    return RewriteOutcome(
        results=tuple(results), durations_us=durations, dropped=tuple(dropped)
    )


def _describe_result(result: RewriteResult) -> str:
    journeys = [
        f"{source} -> {target} via {', '.join(props)}"
        for source, target, props in result.provenance.path_choices
    ]
    if not journeys:
        journeys = ["no association traversal"]
    return "; ".join(journeys)


def rewrite(
    text: str,
    model: UMLModel,
    thesaurus: Thesaurus,
    options: RewriteOptions | None = None,
) -> list[RewriteResult]:
    """Full pipeline: prepare the model context and rewrite the query text
    into ordered CQL candidates with provenance."""
    context = prepare_context(model, thesaurus)
    return list(rewrite_prepared(context, text, options).results)
