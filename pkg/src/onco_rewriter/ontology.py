"""EL-profile ontology generation from annotated UML models.

Generated axiom sets use four namespace prefixes: ``c:`` for model element
classes, ``u:`` for the upper UML vocabulary, ``n:`` for thesaurus concepts
and ``l:`` for the list vocabulary that encodes ordered qualifier
annotations. The class expression language is restricted by construction to
named classes, conjunction, existential restriction and a datatype
existential, so every generated set stays inside the EL profile.

Serialization is a functional-style line format, one axiom per line, with a
prefix-declaration header. Parsing is the exact inverse.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .model import Annotation, UMLModel

CLASS_PREFIX = "c"
UPPER_PREFIX = "u"
CONCEPT_PREFIX = "n"
LIST_PREFIX = "l"

UML_CLASS = "u:UMLClass"
UML_ATTRIBUTE = "u:UMLAttribute"
OWL_LIST = "l:OWLList"
HAS_ASSOCIATION = "u:hasAssociation"
HAS_ATTRIBUTE = "u:hasAttribute"
HAS_CONTENTS = "l:hasContents"
HAS_NEXT = "l:hasNext"
HAS_VALUE = "u:hasValue"

DATATYPE_MAP = {
    "string": "xsd:string",
    "integer": "xsd:integer",
    "float": "xsd:double",
    "boolean": "xsd:boolean",
    "date": "xsd:dateTime",
}

DEFAULT_PREFIXES = {
    CLASS_PREFIX: "http://onco-rewriter.local/model#",
    UPPER_PREFIX: "http://onco-rewriter.local/uml#",
    CONCEPT_PREFIX: "http://onco-rewriter.local/ncit#",
    LIST_PREFIX: "http://onco-rewriter.local/list#",
}


class OntologyError(ValueError):
    pass


class AxiomParseError(ValueError):
    def __init__(self, message: str, line: int):
        self.line = line
        super().__init__(f"line {line}: {message}")


# --- class expressions -------------------------------------------------


class ClassExpr:
    """Base class for EL class expressions. Only the four subclasses below
    are EL-conformant; anything else is flagged by el_conformance_report."""

    __slots__ = ()


@dataclass(frozen=True)
class Named(ClassExpr):
    name: str


@dataclass(frozen=True)
class Conjunction(ClassExpr):
    parts: tuple[ClassExpr, ...]

    def __post_init__(self):
        if len(self.parts) < 2:
            raise OntologyError("conjunction needs at least two parts")


@dataclass(frozen=True)
class Existential(ClassExpr):
    property_name: str
    filler: ClassExpr


@dataclass(frozen=True)
class DataExistential(ClassExpr):
    """Existential over the hasValue data property, filled by a datatype."""

    property_name: str
    datatype: str


# --- axioms -------------------------------------------------------------


class Axiom:
    __slots__ = ()


@dataclass(frozen=True)
class SubClassOf(Axiom):
    sub: ClassExpr
    sup: ClassExpr


@dataclass(frozen=True)
class SubPropertyOf(Axiom):
    sub: str
    sup: str


@dataclass(frozen=True)
class TransitiveProperty(Axiom):
    property_name: str


@dataclass(frozen=True)
class AxiomSet:
    axioms: tuple[Axiom, ...] = ()
    prefixes: dict[str, str] = field(default_factory=lambda: dict(DEFAULT_PREFIXES))

    def __iter__(self):
        return iter(self.axioms)

    def __len__(self) -> int:
        return len(self.axioms)

    def class_names(self) -> frozenset[str]:
        """Every name appearing in class position anywhere in the set."""
        names: set[str] = set()

        def walk(expr: ClassExpr) -> None:
            if isinstance(expr, Named):
                names.add(expr.name)
            elif isinstance(expr, Conjunction):
                for part in expr.parts:
                    walk(part)
            elif isinstance(expr, Existential):
                walk(expr.filler)
            # DataExistential fillers are datatypes, not classes

        for axiom in self.axioms:
            if isinstance(axiom, SubClassOf):
                walk(axiom.sub)
                walk(axiom.sup)
        return frozenset(names)


@dataclass(frozen=True)
class UpperVocabulary:
    """Fixed names shared by every generated ontology."""

    classes: tuple[str, ...] = (UML_CLASS, UML_ATTRIBUTE, OWL_LIST)
    object_properties: tuple[str, ...] = (
        HAS_ASSOCIATION,
        HAS_ATTRIBUTE,
        HAS_CONTENTS,
        HAS_NEXT,
    )
    data_property: str = HAS_VALUE

    def axioms(self) -> tuple[Axiom, ...]:
        return (TransitiveProperty(HAS_ASSOCIATION),)


UPPER_VOCABULARY = UpperVocabulary()


def merge_axiom_sets(*sets: AxiomSet) -> AxiomSet:
    """Concatenate axiom sets, dropping duplicates, keeping first-seen order.
    Prefix maps must agree on shared prefixes."""
    axioms: list[Axiom] = []
    seen: set[Axiom] = set()
    prefixes: dict[str, str] = {}
    for s in sets:
        for prefix, iri in s.prefixes.items():
            if prefix in prefixes and prefixes[prefix] != iri:
                raise OntologyError(f"conflicting IRI for prefix '{prefix}'")
            prefixes[prefix] = iri
        for axiom in s.axioms:
            if axiom not in seen:
                seen.add(axiom)
                axioms.append(axiom)
    return AxiomSet(axioms=tuple(axioms), prefixes=prefixes)


# --- generated-name helpers ----------------------------------------------


def class_name(uml_class: str) -> str:
    return f"c:{uml_class}"


def attribute_class_name(uml_class: str, attribute: str) -> str:
    return f"c:{uml_class}_{attribute}"


def association_property_name(source: str, role: str, target: str) -> str:
    return f"c:{source}_{role}_{target}"


def concept_name(concept: str) -> str:
    return f"n:{concept}"


@dataclass(frozen=True)
class ModelNaming:
    """Reverse lookup from generated names back to model elements.

    Compound names cannot be split reliably (class and role names may
    themselves contain underscores), so the tables are built from the model.
    """

    package_prefix: str
    properties: dict[str, tuple[str, str, str]]  # prop -> (source, role, target)
    attribute_classes: dict[str, tuple[str, str]]  # attr class -> (class, attribute)
    classes: dict[str, str]  # c:X -> X

    def role_of(self, property_name: str) -> str:
        return self.properties[property_name][1]

    def attribute_of(self, attribute_class: str) -> str:
        return self.attribute_classes[attribute_class][1]

    def bare_class(self, name: str) -> str:
        return self.classes[name]


def model_naming(model: UMLModel) -> ModelNaming:
    properties = {
        association_property_name(a.source, a.role_name, a.target): (a.source, a.role_name, a.target)
        for a in model.associations
    }
    attribute_classes = {
        attribute_class_name(c.name, a.name): (c.name, a.name)
        for c in model.classes
        for a in c.attributes
    }
    classes = {class_name(c.name): c.name for c in model.classes}
    return ModelNaming(
        package_prefix=model.package_prefix,
        properties=properties,
        attribute_classes=attribute_classes,
        classes=classes,
    )


# --- generation -----------------------------------------------------------


def _annotation_expr(annotation: Annotation) -> ClassExpr:
    """Encode (primary, qualifiers) as a class expression. Qualifier order is
    kept by nesting one hasNext list cell per additional qualifier."""
    primary = Named(concept_name(annotation.primary))
    if not annotation.qualifiers:
        return primary

    def cell(index: int) -> ClassExpr:
        parts: list[ClassExpr] = [
            Named(OWL_LIST),
            Existential(HAS_CONTENTS, Named(concept_name(annotation.qualifiers[index]))),
        ]
        if index + 1 < len(annotation.qualifiers):
            parts.append(Existential(HAS_NEXT, cell(index + 1)))
        return Conjunction(tuple(parts))

    return Conjunction((primary, cell(0)))


def generate_ontology(model: UMLModel, thesaurus_module: AxiomSet | None = None) -> AxiomSet:
    """Transform an annotated UML model into an EL axiom set.

    Emits, per class: the upper-vocabulary subsumption, the annotation
    encoding, attribute classes with datatype restrictions, association
    properties, generalizations, and explicit copies of every inherited
    association and attribute restriction. When a thesaurus module is
    supplied, every annotation concept must occur in it.
    """
    module_names: frozenset[str] | None = None
    if thesaurus_module is not None:
        module_names = frozenset(
            name[len("n:"):] for name in thesaurus_module.class_names() if name.startswith("n:")
        )

    def check_annotation(annotation: Annotation, owner: str) -> None:
        if module_names is None:
            return
        for concept in annotation.concept_names():
            if concept not in module_names:
                raise OntologyError(
                    f"annotation concept '{concept}' on {owner} is absent from the thesaurus module"
                )

    generated_names: dict[str, str] = {}

    def register(name: str, described_as: str) -> None:
        if name in generated_names:
            raise OntologyError(
                f"generated name collision: '{name}' is both {generated_names[name]} and {described_as}"
            )
        generated_names[name] = described_as

    for cls in model.classes:
        register(class_name(cls.name), f"class {cls.name}")
    for cls in model.classes:
        for attr in cls.attributes:
            register(
                attribute_class_name(cls.name, attr.name),
                f"attribute {cls.name}.{attr.name}",
            )
    for assoc in model.associations:
        register(
            association_property_name(assoc.source, assoc.role_name, assoc.target),
            f"association {assoc.source}.{assoc.role_name}",
        )

    axioms: list[Axiom] = list(UPPER_VOCABULARY.axioms())
    seen: set[Axiom] = set(axioms)

    def emit(axiom: Axiom) -> None:
        if axiom not in seen:
            seen.add(axiom)
            axioms.append(axiom)

    for cls in model.classes:
        c = Named(class_name(cls.name))
        # (a) upper-vocabulary membership and annotation
        emit(SubClassOf(c, Named(UML_CLASS)))
        if cls.annotation is not None:
            check_annotation(cls.annotation, f"class {cls.name}")
            emit(SubClassOf(c, _annotation_expr(cls.annotation)))
        # (b) attribute classes
        for attr in cls.attributes:
            a = Named(attribute_class_name(cls.name, attr.name))
            emit(SubClassOf(a, Named(UML_ATTRIBUTE)))
            emit(SubClassOf(a, DataExistential(HAS_VALUE, DATATYPE_MAP[attr.datatype])))
            if attr.annotation is not None:
                check_annotation(attr.annotation, f"attribute {cls.name}.{attr.name}")
                emit(SubClassOf(a, _annotation_expr(attr.annotation)))
            emit(SubClassOf(c, Existential(HAS_ATTRIBUTE, a)))
        # (c) association properties
        for assoc in model.associations_from(cls.name):
            prop = association_property_name(assoc.source, assoc.role_name, assoc.target)
            emit(SubPropertyOf(prop, HAS_ASSOCIATION))
            emit(SubClassOf(c, Existential(prop, Named(class_name(assoc.target)))))
        # (d) generalizations plus explicit inherited restrictions
        for sup in cls.superclasses:
            emit(SubClassOf(c, Named(class_name(sup))))
        for ancestor in model.ancestors(cls.name):
            for assoc in model.associations_from(ancestor):
                prop = association_property_name(assoc.source, assoc.role_name, assoc.target)
                emit(SubClassOf(c, Existential(prop, Named(class_name(assoc.target)))))
            for attr in model.class_named(ancestor).attributes:
                a = Named(attribute_class_name(ancestor, attr.name))
                emit(SubClassOf(c, Existential(HAS_ATTRIBUTE, a)))

    prefixes = dict(DEFAULT_PREFIXES)
    prefixes[CLASS_PREFIX] = f"http://onco-rewriter.local/model/{model.project_name}#"
    return AxiomSet(axioms=tuple(axioms), prefixes=prefixes)


# --- EL conformance -------------------------------------------------------


def el_conformance_report(axiom_set: AxiomSet) -> list[str]:
    """Structural EL check. Returns a list of violations, empty when the set
    only uses named classes, conjunction and existential restriction."""
    violations: list[str] = []

    def check_expr(expr, where: str) -> None:
        if isinstance(expr, Named):
            return
        if isinstance(expr, Conjunction):
            if len(expr.parts) < 2:
                violations.append(f"{where}: conjunction with fewer than two parts")
            for part in expr.parts:
                check_expr(part, where)
            return
        if isinstance(expr, Existential):
            check_expr(expr.filler, where)
            return
        if isinstance(expr, DataExistential):
            if expr.datatype not in DATATYPE_MAP.values():
                violations.append(f"{where}: unknown datatype '{expr.datatype}'")
            return
        violations.append(f"{where}: non-EL construct {type(expr).__name__}")

    for i, axiom in enumerate(axiom_set.axioms):
        where = f"axiom {i}"
        if isinstance(axiom, SubClassOf):
            check_expr(axiom.sub, where)
            check_expr(axiom.sup, where)
        elif isinstance(axiom, (SubPropertyOf, TransitiveProperty)):
            continue
        else:
            violations.append(f"{where}: unknown axiom kind {type(axiom).__name__}")
    return violations


# --- serialization --------------------------------------------------------


def _render_expr(expr: ClassExpr) -> str:
    if isinstance(expr, Named):
        return expr.name
    if isinstance(expr, Conjunction):
        return "ObjectIntersectionOf(" + " ".join(_render_expr(p) for p in expr.parts) + ")"
    if isinstance(expr, Existential):
        return f"ObjectSomeValuesFrom({expr.property_name} {_render_expr(expr.filler)})"
    if isinstance(expr, DataExistential):
        return f"DataSomeValuesFrom({expr.property_name} {expr.datatype})"
    raise OntologyError(f"cannot serialize {type(expr).__name__}")


def _render_axiom(axiom: Axiom) -> str:
    if isinstance(axiom, SubClassOf):
        return f"SubClassOf({_render_expr(axiom.sub)} {_render_expr(axiom.sup)})"
    if isinstance(axiom, SubPropertyOf):
        return f"SubObjectPropertyOf({axiom.sub} {axiom.sup})"
    if isinstance(axiom, TransitiveProperty):
        return f"TransitiveObjectProperty({axiom.property_name})"
    raise OntologyError(f"cannot serialize {type(axiom).__name__}")


def serialize_axioms(axiom_set: AxiomSet) -> str:
    canonical = (CLASS_PREFIX, UPPER_PREFIX, CONCEPT_PREFIX, LIST_PREFIX)
    extras = sorted(set(axiom_set.prefixes) - set(canonical))
    lines = [
        f"Prefix({prefix}:=<{axiom_set.prefixes[prefix]}>)"
        for prefix in (*canonical, *extras)
        if prefix in axiom_set.prefixes
    ]
    lines.append("")
    lines.extend(_render_axiom(a) for a in axiom_set.axioms)
    return "\n".join(lines) + "\n"


def _tokenize(line: str, lineno: int) -> list[str]:
    tokens: list[str] = []
    current = ""
    for ch in line:
        if ch in "()":
            if current:
                tokens.append(current)
                current = ""
            tokens.append(ch)
        elif ch.isspace():
            if current:
                tokens.append(current)
                current = ""
        else:
            current += ch
    if current:
        tokens.append(current)
    if not tokens:
        raise AxiomParseError("empty axiom line", lineno)
    return tokens


class _TokenReader:
    def __init__(self, tokens: list[str], lineno: int):
        self.tokens = tokens
        self.pos = 0
        self.lineno = lineno

    def peek(self) -> str | None:
        return self.tokens[self.pos] if self.pos < len(self.tokens) else None

    def take(self) -> str:
        token = self.peek()
        if token is None:
            raise AxiomParseError("unexpected end of line", self.lineno)
        self.pos += 1
        return token

    def expect(self, token: str) -> None:
        got = self.take()
        if got != token:
            raise AxiomParseError(f"expected '{token}', got '{got}'", self.lineno)


def _parse_expr(reader: _TokenReader) -> ClassExpr:
    head = reader.take()
    if head == "ObjectIntersectionOf":
        reader.expect("(")
        parts: list[ClassExpr] = []
        while reader.peek() != ")":
            parts.append(_parse_expr(reader))
        reader.expect(")")
        if len(parts) < 2:
            raise AxiomParseError("ObjectIntersectionOf needs at least two parts", reader.lineno)
        return Conjunction(tuple(parts))
    if head == "ObjectSomeValuesFrom":
        reader.expect("(")
        prop = reader.take()
        filler = _parse_expr(reader)
        reader.expect(")")
        return Existential(prop, filler)
    if head == "DataSomeValuesFrom":
        reader.expect("(")
        prop = reader.take()
        datatype = reader.take()
        reader.expect(")")
        return DataExistential(prop, datatype)
    if head in ("(", ")"):
        raise AxiomParseError(f"unexpected '{head}'", reader.lineno)
    return Named(head)


def _parse_axiom_line(line: str, lineno: int) -> Axiom:
    reader = _TokenReader(_tokenize(line, lineno), lineno)
    head = reader.take()
    if head == "SubClassOf":
        reader.expect("(")
        sub = _parse_expr(reader)
        sup = _parse_expr(reader)
        reader.expect(")")
        axiom: Axiom = SubClassOf(sub, sup)
    elif head == "SubObjectPropertyOf":
        reader.expect("(")
        sub_p = reader.take()
        sup_p = reader.take()
        reader.expect(")")
        axiom = SubPropertyOf(sub_p, sup_p)
    elif head == "TransitiveObjectProperty":
        reader.expect("(")
        prop = reader.take()
        reader.expect(")")
        axiom = TransitiveProperty(prop)
    else:
        raise AxiomParseError(f"unknown axiom kind '{head}'", lineno)
    if reader.peek() is not None:
        raise AxiomParseError(f"trailing tokens after axiom: '{reader.peek()}'", lineno)
    return axiom


def parse_axioms(document: str) -> AxiomSet:
    """Inverse of serialize_axioms: parse_axioms(serialize_axioms(x)) == x."""
    prefixes: dict[str, str] = {}
    axioms: list[Axiom] = []
    seen: set[Axiom] = set()
    for lineno, raw_line in enumerate(document.splitlines(), start=1):
        line = raw_line.strip()
        if not line or line.startswith("#"):
            continue
        if line.startswith("Prefix("):
            if not line.endswith(")"):
                raise AxiomParseError("malformed prefix declaration", lineno)
            body = line[len("Prefix(") : -1]
            if ":=" not in body:
                raise AxiomParseError("malformed prefix declaration", lineno)
            prefix, iri = body.split(":=", 1)
            prefix = prefix.rstrip(":")
            if not (iri.startswith("<") and iri.endswith(">")):
                raise AxiomParseError("prefix IRI must be enclosed in <>", lineno)
            prefixes[prefix] = iri[1:-1]
            continue
        axiom = _parse_axiom_line(line, lineno)
        if axiom in seen:
            raise AxiomParseError(f"duplicate axiom: {line}", lineno)
        seen.add(axiom)
        axioms.append(axiom)
    return AxiomSet(axioms=tuple(axioms), prefixes=prefixes)
