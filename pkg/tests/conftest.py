"""Shared fixtures: a deterministic generator of drug-like test molecules."""

from __future__ import annotations

import random

import pytest

from rxnkit.molgraph import Molecule, canonical_smiles, parse_smiles
from rxnkit.molgraph.model import Atom, Bond

# (atomic number, max valence, weight)
_ELEMENTS = (
    (6, 4, 60),
    (7, 3, 10),
    (8, 2, 12),
    (16, 2, 4),
    (9, 1, 5),
    (17, 1, 4),
    (35, 1, 2),
    (15, 3, 1),
)
_ZS = [e[0] for e in _ELEMENTS]
_MAXV = {e[0]: e[1] for e in _ELEMENTS}
_WEIGHTS = [e[2] for e in _ELEMENTS]


def build_random_molecule(rng: random.Random, n_min: int = 5, n_max: int = 32) -> Molecule:
    """Connected kekule molecule with rings, multiple bonds, valid valences."""
    n = rng.randint(n_min, n_max)
    zs = [6] + rng.choices(_ZS, weights=_WEIGHTS, k=n - 1)
    free = [_MAXV[z] for z in zs]
    bonds: list[Bond] = []
    adjacent: set[tuple[int, int]] = set()

    for i in range(1, n):
        parents = [j for j in range(i) if free[j] >= 1]
        if not parents:
            continue  # saturated so far; atom stays a fully hydrogenated fragment
        j = rng.choice(parents[-6:]) if rng.random() < 0.7 else rng.choice(parents)
        order = 1
        if free[i] >= 2 and free[j] >= 2 and rng.random() < 0.15:
            order = 2
        if free[i] >= 3 and free[j] >= 3 and rng.random() < 0.02:
            order = 3
        bonds.append(Bond(j, i, order))
        adjacent.add((j, i))
        free[i] -= order
        free[j] -= order

    for _ in range(rng.randint(0, 3)):
        open_atoms = [k for k in range(n) if free[k] >= 1]
        rng.shuffle(open_atoms)
        made = False
        for a in open_atoms:
            for b in open_atoms:
                if b <= a or (a, b) in adjacent:
                    continue
                bonds.append(Bond(a, b, 1))
                adjacent.add((a, b))
                free[a] -= 1
                free[b] -= 1
                made = True
                break
            if made:
                break

    atoms = tuple(
        Atom(atomic_number=z, implicit_hydrogens=f) for z, f in zip(zs, free)
    )
    return Molecule(atoms, tuple(bonds))


def random_smiles(rng: random.Random, n_min: int = 5, n_max: int = 32) -> str:
    """Canonical SMILES of a random molecule.

    The directly-built graph never went through perception, so its first
    serialization is kekule; one parse round applies aromaticity and yields
    the stable canonical form.
    """
    raw = canonical_smiles(build_random_molecule(rng, n_min, n_max))
    return canonical_smiles(parse_smiles(raw))


def shuffled(mol: Molecule, rng: random.Random) -> Molecule:
    perm = list(range(len(mol)))
    rng.shuffle(perm)
    return mol.renumbered(perm)


CURATED_SMILES = [
    "C",
    "CCO",
    "c1ccccc1",
    "Cc1ccccc1",
    "c1ccncc1",
    "c1cc[nH]c1",
    "c1ccoc1",
    "c1ccsc1",
    "Cn1cccc1",
    "c1ccc2ccccc2c1",
    "c1ccc2[nH]ccc2c1",
    "O=c1cccc[nH]1",
    "CN1C=NC2=C1C(=O)N(C(=O)N2C)C",
    "CC(=O)OC1=CC=CC=C1C(=O)O",
    "CC(C)Cc1ccc(cc1)C(C)C(=O)O",
    "[Na+].[Cl-]",
    "CC(=O)[O-].[NH4+]",
    "O=C=O",
    "N#Cc1ccccc1",
    "OC[C@@H](O)[C@@H](O)[C@H](O)[C@H](O)CO",
    "N[C@@H](C)C(=O)O",
    "F/C=C/F",
    "C/C=C\\C",
    "C1CC2CCC1CC2",
    "O=C1C=CC(=O)C=C1",
    "C1CCCCC1",
    "[2H]OC",
    "[H][H]",
    "S=C=S",
    "O=S(=O)(O)O",
    "CCOP(=O)(OCC)OCC",
]


@pytest.fixture(scope="session")
def corpus() -> list[str]:
    """Mixed fixture corpus: curated cases plus 120 generated molecules."""
    rng = random.Random(20240613)
    generated = [random_smiles(rng) for _ in range(120)]
    return [canonical_smiles(parse_smiles(s)) for s in CURATED_SMILES] + generated
