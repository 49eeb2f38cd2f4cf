"""Rewrite concept-level queries into CQL, showing every stage.

A query is written purely in thesaurus concepts; the user never sees the
model's classes, roles or attributes. The pipeline resolves concepts to
model elements, strips data values, validates satisfiability, replaces the
transitive association abstraction with concrete role chains, restores the
values, builds a bag comprehension, and finally emits CQL XML.
"""

from pathlib import Path

from onco_rewriter import format_comprehension, format_query, load_model, load_thesaurus, to_xml
from onco_rewriter.pipeline import prepare_context, rewrite_prepared

FIXTURES = Path(__file__).resolve().parent.parent / "fixtures"

model = load_model((FIXTURES / "cabio_fragment.model.json").read_text(encoding="utf-8"))
thesaurus = load_thesaurus((FIXTURES / "ncit_fragment.thesaurus.txt").read_text(encoding="utf-8"))
context = prepare_context(model, thesaurus)

QUERIES = [
    'Gene and hasAttribute some (Gene_Symbol and hasValue value "BRCA%")',
    "Single_Nucleotide_Polymorphism and hasAssociation some "
    '(Gene and hasAttribute some (Gene_Symbol and hasValue value "TGFB1"))',
]

for query in QUERIES:
    print("=" * 72)
    print(f"query: {query}")
    outcome = rewrite_prepared(context, query)
    for i, result in enumerate(outcome.results, start=1):
        naming = context.naming
        print(f"\ncandidate {i}")
        print(f"  resolved: {format_query(result.resolved, naming)}")
        print(f"  stripped: {format_query(result.stripped, naming)}")
        print(f"  expanded: {format_query(result.expanded, naming)}")
        print(f"  restored: {format_query(result.restored, naming)}")
        print(f"  mcc:      {format_comprehension(result.mcc)}")
        print()
        print(to_xml(result.cql))
