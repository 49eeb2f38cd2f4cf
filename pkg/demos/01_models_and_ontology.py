"""Load an annotated model and turn it into an EL axiom set.

The model is a fragment of a genomics information model: classes, typed
attributes, directed associations and generalizations, each element
optionally annotated with a thesaurus concept (a primary concept plus an
ordered qualifier list). The generated ontology makes the model's implicit
semantics explicit: every class and attribute is placed under the upper UML
vocabulary, associations become sub-properties of a single transitive
property, and inherited associations and attributes are materialized on
every subclass.
"""

from pathlib import Path

from onco_rewriter import (
    el_conformance_report,
    generate_ontology,
    load_model,
    load_thesaurus,
    model_signature,
    serialize_axioms,
)

FIXTURES = Path(__file__).resolve().parent.parent / "fixtures"

model = load_model((FIXTURES / "cabio_fragment.model.json").read_text(encoding="utf-8"))
thesaurus = load_thesaurus((FIXTURES / "ncit_fragment.thesaurus.txt").read_text(encoding="utf-8"))

print(f"model: {model.project_name} v{model.version}, prefix {model.package_prefix}")
print(f"classes: {', '.join(model.class_names())}")
print()

signature = model_signature(model)
print("annotation signature (the concepts the model refers to):")
for name in signature:
    print(f"  {name}")
print()

ontology = generate_ontology(model)
print(f"generated {len(ontology)} axioms; EL violations: {el_conformance_report(ontology)}")
print()

text = serialize_axioms(ontology)
print("a few generated axioms:")
for line in text.splitlines():
    if "CytogeneticLocation" in line or "Chromosome_number" in line:
        print(f"  {line}")
