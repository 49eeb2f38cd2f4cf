"""Signature-driven module extraction from thesaurus axiom sets.

The thesaurus fragment handled here is acyclic named-to-named subsumption
only, so locality-based extraction reduces to upward closure from the
signature: keep every axiom whose left-hand side is already relevant and let
its right-hand side become relevant too, until nothing changes. The module
then preserves exactly the subsumptions expressible over the signature.

Disjointness is stripped before extraction: concept-to-class mappings use
subsumption, and a class annotated from two disjoint thesaurus branches must
not make the generated ontology inconsistent.
"""

from __future__ import annotations

from dataclasses import dataclass

from .model import Signature, Thesaurus
from .ontology import DEFAULT_PREFIXES, AxiomSet, Named, SubClassOf, concept_name


@dataclass(frozen=True)
class ThesaurusAxiomSet:
    """Thesaurus rendered as named-to-named subsumption axioms."""

    axioms: tuple[SubClassOf, ...]
    disjoints_removed: bool = False

    def __iter__(self):
        return iter(self.axioms)

    def __len__(self) -> int:
        return len(self.axioms)

    def to_axiom_set(self) -> AxiomSet:
        prefixes = {"n": DEFAULT_PREFIXES["n"]}
        return AxiomSet(axioms=tuple(self.axioms), prefixes=prefixes)


def strip_disjoints(thesaurus: Thesaurus) -> ThesaurusAxiomSet:
    """Render the thesaurus as subsumption axioms, discarding disjointness."""
    axioms = tuple(
        SubClassOf(Named(concept_name(child)), Named(concept_name(parent)))
        for child, parent in thesaurus.subsumptions
    )
    return ThesaurusAxiomSet(axioms=axioms, disjoints_removed=True)


def extract_module(thesaurus_axioms: ThesaurusAxiomSet, sigma: Signature) -> ThesaurusAxiomSet:
    """Upward-closure module for the signature sigma.

    Iterates to fixpoint: any axiom whose left-hand side is in the current
    relevant-name set is kept, and its right-hand side joins the set.
    """
    if not thesaurus_axioms.disjoints_removed:
        raise ValueError("strip_disjoints must run before module extraction")
    relevant: set[str] = {concept_name(name) for name in sigma.concept_names}
    kept: list[SubClassOf] = []
    kept_idx: set[int] = set()
    changed = True
    while changed:
        changed = False
        for i, axiom in enumerate(thesaurus_axioms.axioms):
            if i in kept_idx:
                continue
            assert isinstance(axiom.sub, Named) and isinstance(axiom.sup, Named)
            if axiom.sub.name in relevant:
                kept_idx.add(i)
                kept.append(axiom)
                if axiom.sup.name not in relevant:
                    relevant.add(axiom.sup.name)
                changed = True
    # preserve the source ordering of the kept axioms
    ordered = tuple(a for a in thesaurus_axioms.axioms if a in set(kept))
    return ThesaurusAxiomSet(axioms=ordered, disjoints_removed=True)
