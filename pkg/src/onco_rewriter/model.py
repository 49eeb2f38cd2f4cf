"""Domain model for annotated UML information models and thesaurus fixtures.

The two document formats handled here are deliberately plain so fixtures stay
deterministic and diffable:

* model files are JSON documents with top-level fields ``project``,
  ``version``, ``packagePrefix``, ``classes[]`` and ``associations[]``;
* thesaurus files are UTF-8 line formats with one axiom per line:
  ``CONCEPT <name>``, ``SUB <child> <parent>``, ``DISJOINT <a> <b>`` and
  ``#`` comments.

All types are immutable after construction; loading validates every declared
invariant and reports violations with an element location instead of
silently repairing anything.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

DATATYPES = ("string", "integer", "float", "boolean", "date")


class ModelLoadError(ValueError):
    """Raised when a model document is malformed or violates an invariant."""

    def __init__(self, message: str, location: str = ""):
        self.location = location
        super().__init__(f"{location}: {message}" if location else message)


class ThesaurusLoadError(ValueError):
    """Raised when a thesaurus document is malformed or cyclic."""

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        super().__init__(f"line {line}: {message}" if line is not None else message)


@dataclass(frozen=True)
class Annotation:
    """Semantic annotation: one primary concept plus an ordered qualifier list."""

    primary: str
    qualifiers: tuple[str, ...] = ()

    def concept_names(self) -> tuple[str, ...]:
        return (self.primary,) + self.qualifiers


@dataclass(frozen=True)
class UMLAttribute:
    name: str
    datatype: str
    annotation: Annotation | None = None


@dataclass(frozen=True)
class UMLClass:
    name: str
    superclasses: tuple[str, ...] = ()
    attributes: tuple[UMLAttribute, ...] = ()
    annotation: Annotation | None = None


@dataclass(frozen=True)
class UMLAssociation:
    """A directed navigable association end identified by its role name."""

    source: str
    role_name: str
    target: str


@dataclass(frozen=True)
class UMLModel:
    project_name: str
    version: str
    package_prefix: str
    classes: tuple[UMLClass, ...] = ()
    associations: tuple[UMLAssociation, ...] = ()

    def class_named(self, name: str) -> UMLClass:
        for cls in self.classes:
            if cls.name == name:
                return cls
        raise KeyError(name)

    def class_names(self) -> tuple[str, ...]:
        return tuple(c.name for c in self.classes)

    def associations_from(self, class_name: str) -> tuple[UMLAssociation, ...]:
        return tuple(a for a in self.associations if a.source == class_name)

    def ancestors(self, class_name: str) -> tuple[str, ...]:
        """Proper ancestors in deterministic order: depth-first over the
        declared superclass lists, each ancestor reported once."""
        seen: list[str] = []

        def visit(name: str) -> None:
            for sup in self.class_named(name).superclasses:
                if sup not in seen:
                    seen.append(sup)
                    visit(sup)

        visit(class_name)
        return tuple(seen)


@dataclass(frozen=True)
class Thesaurus:
    """Named concepts with subsumption and disjointness axioms.

    Declaration order is preserved (it drives deterministic serialization);
    membership is still set-like via the frozenset views.
    """

    concepts: tuple[str, ...]
    subsumptions: tuple[tuple[str, str], ...]
    disjointness: tuple[tuple[str, str], ...]

    @property
    def concept_set(self) -> frozenset[str]:
        return frozenset(self.concepts)

    def parents_of(self, concept: str) -> tuple[str, ...]:
        return tuple(p for c, p in self.subsumptions if c == concept)


@dataclass(frozen=True)
class Signature:
    """The set of concept names a model's annotations refer to."""

    concept_names: frozenset[str] = field(default_factory=frozenset)

    def __contains__(self, name: str) -> bool:
        return name in self.concept_names

    def __iter__(self):
        return iter(sorted(self.concept_names))

    def __len__(self) -> int:
        return len(self.concept_names)


def _require(mapping: dict, key: str, kind: type, location: str):
    if key not in mapping:
        raise ModelLoadError(f"missing field '{key}'", location)
    value = mapping[key]
    if not isinstance(value, kind):
        raise ModelLoadError(
            f"field '{key}' must be {kind.__name__}, got {type(value).__name__}",
            location,
        )
    return value


def _reject_unknown(mapping: dict, allowed: set[str], location: str) -> None:
    unknown = set(mapping) - allowed
    if unknown:
        raise ModelLoadError(f"unknown field(s) {sorted(unknown)}", location)


def _parse_annotation(raw, location: str) -> Annotation | None:
    if raw is None:
        return None
    if not isinstance(raw, dict):
        raise ModelLoadError("annotation must be an object", location)
    _reject_unknown(raw, {"primary", "qualifiers"}, location)
    primary = _require(raw, "primary", str, location)
    qualifiers = raw.get("qualifiers", [])
    if not isinstance(qualifiers, list) or not all(isinstance(q, str) for q in qualifiers):
        raise ModelLoadError("qualifiers must be a list of names", location)
    return Annotation(primary=primary, qualifiers=tuple(qualifiers))


def load_model(document: str) -> UMLModel:
    """Parse and validate a model document, returning an immutable UMLModel."""
    try:
        raw = json.loads(document)
    except json.JSONDecodeError as exc:
        raise ModelLoadError(f"malformed document: {exc}") from None
    if not isinstance(raw, dict):
        raise ModelLoadError("malformed document: top level must be an object")
    _reject_unknown(
        raw, {"project", "version", "packagePrefix", "classes", "associations"}, "document"
    )
    project = _require(raw, "project", str, "document")
    version = _require(raw, "version", str, "document")
    prefix = _require(raw, "packagePrefix", str, "document")
    raw_classes = _require(raw, "classes", list, "document")
    raw_assocs = raw.get("associations", [])
    if not isinstance(raw_assocs, list):
        raise ModelLoadError("field 'associations' must be a list", "document")

    classes: list[UMLClass] = []
    for i, raw_cls in enumerate(raw_classes):
        loc = f"classes[{i}]"
        if not isinstance(raw_cls, dict):
            raise ModelLoadError("class entry must be an object", loc)
        _reject_unknown(raw_cls, {"name", "superclasses", "annotation", "attributes"}, loc)
        name = _require(raw_cls, "name", str, loc)
        supers = raw_cls.get("superclasses", [])
        if not isinstance(supers, list) or not all(isinstance(s, str) for s in supers):
            raise ModelLoadError("superclasses must be a list of names", loc)
        attributes: list[UMLAttribute] = []
        for j, raw_attr in enumerate(raw_cls.get("attributes", [])):
            aloc = f"{loc}.attributes[{j}]"
            if not isinstance(raw_attr, dict):
                raise ModelLoadError("attribute entry must be an object", aloc)
            _reject_unknown(raw_attr, {"name", "datatype", "annotation"}, aloc)
            attr_name = _require(raw_attr, "name", str, aloc)
            datatype = _require(raw_attr, "datatype", str, aloc)
            if datatype not in DATATYPES:
                raise ModelLoadError(
                    f"unknown datatype '{datatype}' (expected one of {', '.join(DATATYPES)})",
                    aloc,
                )
            attributes.append(
                UMLAttribute(
                    name=attr_name,
                    datatype=datatype,
                    annotation=_parse_annotation(raw_attr.get("annotation"), aloc),
                )
            )
        attr_names = [a.name for a in attributes]
        for attr_name in attr_names:
            if attr_names.count(attr_name) > 1:
                raise ModelLoadError(f"duplicate attribute name '{attr_name}'", loc)
        classes.append(
            UMLClass(
                name=name,
                superclasses=tuple(supers),
                attributes=tuple(attributes),
                annotation=_parse_annotation(raw_cls.get("annotation"), loc),
            )
        )

    names = [c.name for c in classes]
    for i, name in enumerate(names):
        if names.count(name) > 1:
            raise ModelLoadError(f"duplicate class name '{name}'", f"classes[{i}]")
    name_set = set(names)

    for i, cls in enumerate(classes):
        for sup in cls.superclasses:
            if sup not in name_set:
                raise ModelLoadError(f"unknown superclass '{sup}'", f"classes[{i}]")

    associations: list[UMLAssociation] = []
    seen_roles: set[tuple[str, str]] = set()
    for i, raw_assoc in enumerate(raw_assocs):
        loc = f"associations[{i}]"
        if not isinstance(raw_assoc, dict):
            raise ModelLoadError("association entry must be an object", loc)
        _reject_unknown(raw_assoc, {"source", "roleName", "target"}, loc)
        source = _require(raw_assoc, "source", str, loc)
        role = _require(raw_assoc, "roleName", str, loc)
        target = _require(raw_assoc, "target", str, loc)
        for endpoint in (source, target):
            if endpoint not in name_set:
                raise ModelLoadError(f"association endpoint '{endpoint}' is not a declared class", loc)
        if (source, role) in seen_roles:
            raise ModelLoadError(f"duplicate role name '{role}' on class '{source}'", loc)
        seen_roles.add((source, role))
        associations.append(UMLAssociation(source=source, role_name=role, target=target))

    _check_generalization_acyclic(classes)

    return UMLModel(
        project_name=project,
        version=version,
        package_prefix=prefix,
        classes=tuple(classes),
        associations=tuple(associations),
    )


def _check_generalization_acyclic(classes: list[UMLClass]) -> None:
    supers = {c.name: c.superclasses for c in classes}
    # iterative DFS with colouring; a grey revisit is a cycle
    WHITE, GREY, BLACK = 0, 1, 2
    colour = {name: WHITE for name in supers}
    for start in supers:
        if colour[start] != WHITE:
            continue
        stack: list[tuple[str, int]] = [(start, 0)]
        colour[start] = GREY
        path = [start]
        while stack:
            name, idx = stack[-1]
            if idx < len(supers[name]):
                stack[-1] = (name, idx + 1)
                nxt = supers[name][idx]
                if colour[nxt] == GREY:
                    cycle = " -> ".join(path + [nxt])
                    raise ModelLoadError(f"generalization cycle: {cycle}", f"class '{nxt}'")
                if colour[nxt] == WHITE:
                    colour[nxt] = GREY
                    stack.append((nxt, 0))
                    path.append(nxt)
            else:
                colour[name] = BLACK
                stack.pop()
                path.pop()


def load_thesaurus(document: str) -> Thesaurus:
    """Parse and validate a thesaurus document (line format, see module docs)."""
    concepts: list[str] = []
    concept_set: set[str] = set()
    subsumptions: list[tuple[str, str]] = []
    sub_set: set[tuple[str, str]] = set()
    disjoints: list[tuple[str, str]] = []
    disjoint_set: set[frozenset[str]] = set()

    for lineno, raw_line in enumerate(document.splitlines(), start=1):
        line = raw_line.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split()
        keyword = parts[0]
        if keyword == "CONCEPT":
            if len(parts) != 2:
                raise ThesaurusLoadError("CONCEPT expects one name", lineno)
            if parts[1] not in concept_set:
                concept_set.add(parts[1])
                concepts.append(parts[1])
        elif keyword in ("SUB", "DISJOINT"):
            if len(parts) != 3:
                raise ThesaurusLoadError(f"{keyword} expects two names", lineno)
            a, b = parts[1], parts[2]
            for name in (a, b):
                if name not in concept_set:
                    raise ThesaurusLoadError(f"undeclared concept '{name}'", lineno)
            if keyword == "SUB":
                if a == b:
                    continue  # reflexive pairs carry no information
                if (a, b) not in sub_set:
                    sub_set.add((a, b))
                    subsumptions.append((a, b))
            else:
                key = frozenset((a, b))
                if key not in disjoint_set:
                    disjoint_set.add(key)
                    disjoints.append((a, b))
        else:
            raise ThesaurusLoadError(f"unknown keyword '{keyword}'", lineno)

    _check_subsumption_acyclic(subsumptions)
    return Thesaurus(
        concepts=tuple(concepts),
        subsumptions=tuple(subsumptions),
        disjointness=tuple(disjoints),
    )


def _check_subsumption_acyclic(subsumptions: list[tuple[str, str]]) -> None:
    parents: dict[str, list[str]] = {}
    for child, parent in subsumptions:
        parents.setdefault(child, []).append(parent)
        parents.setdefault(parent, [])
    WHITE, GREY, BLACK = 0, 1, 2
    colour = {name: WHITE for name in parents}
    for start in parents:
        if colour[start] != WHITE:
            continue
        stack = [(start, 0)]
        colour[start] = GREY
        path = [start]
        while stack:
            name, idx = stack[-1]
            if idx < len(parents[name]):
                stack[-1] = (name, idx + 1)
                nxt = parents[name][idx]
                if colour[nxt] == GREY:
                    cycle = " -> ".join(path + [nxt])
                    raise ThesaurusLoadError(f"subsumption cycle: {cycle}")
                if colour[nxt] == WHITE:
                    colour[nxt] = GREY
                    stack.append((nxt, 0))
                    path.append(nxt)
            else:
                colour[name] = BLACK
                stack.pop()
                path.pop()


def model_signature(model: UMLModel) -> Signature:
    """All primary and qualifier concept names used by any annotation."""
    names: set[str] = set()
    for cls in model.classes:
        if cls.annotation is not None:
            names.update(cls.annotation.concept_names())
        for attr in cls.attributes:
            if attr.annotation is not None:
                names.update(attr.annotation.concept_names())
    return Signature(concept_names=frozenset(names))
