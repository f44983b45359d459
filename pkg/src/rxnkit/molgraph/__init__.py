"""Molecular graph core: parsing, canonicalization, formulas, serialization."""

from .canon import (
    Verdict,
    canonical_ranks,
    canonical_smiles,
    molecular_formula,
    to_graph_record,
    validate,
)
from .model import (
    Atom,
    Bond,
    ChemistryError,
    GraphRecord,
    Molecule,
    SmilesSyntaxError,
)
from .perception import parse_smiles

__all__ = [
    "Atom",
    "Bond",
    "ChemistryError",
    "GraphRecord",
    "Molecule",
    "SmilesSyntaxError",
    "Verdict",
    "canonical_ranks",
    "canonical_smiles",
    "canonicalize",
    "molecular_formula",
    "parse_smiles",
    "to_graph_record",
    "validate",
]


def canonicalize(text: str) -> str:
    """Parse SMILES text and return its canonical form."""
    return canonical_smiles(parse_smiles(text))
