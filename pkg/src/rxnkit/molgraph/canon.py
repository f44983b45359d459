"""Canonical ranking, canonical SMILES output, formula, graph records.

The ranking is Morgan-style iterative refinement over the initial invariant
(atomic number, degree, formal charge, implicit hydrogens, ring membership,
isotope), refined by sorted multisets of (bond code, neighbor rank) pairs;
remaining ties are broken by lowering the rank of the smallest-index tied
atom and re-refining. Stereo annotations never participate in ranking and
are re-emitted in their input-declared sense.

Known stereo limitation: meso compounds whose tied stereocenters are swapped
by a mirror automorphism may serialize to either of two geometry-equal
strings depending on input numbering (tetrahedral tags cannot be flip-
normalized without merging true enantiomers). Cis/trans direction symbols
are flip-normalized per fragment and fully invariant.
"""

from __future__ import annotations

import heapq
from collections import Counter, defaultdict
from dataclasses import dataclass

from .elements import ORGANIC_SUBSET, allowed_valences, fill_hydrogens
from .model import AROMATIC_CODE, ChemistryError, GraphRecord, H_SLOT, Molecule, SmilesSyntaxError

_AROMATIC_BARE = {"b", "c", "n", "o", "p", "s"}
_FLIP = {"@": "@@", "@@": "@", "/": "\\", "\\": "/"}


def _bond_code(bond) -> int:
    return AROMATIC_CODE if bond.is_aromatic else bond.order


def canonical_ranks(mol: Molecule) -> list[int]:
    """Dense 0..n-1 ranks, invariant under any renumbering of the input."""
    n = len(mol.atoms)
    if n == 0:
        return []
    ring = mol.ring_membership
    degrees = mol.degrees
    adj: list[list[tuple[int, int]]] = [[] for _ in range(n)]
    for bond in mol.bonds:
        code = _bond_code(bond)
        adj[bond.a].append((code, bond.b))
        adj[bond.b].append((code, bond.a))

    seed = [
        (
            a.atomic_number,
            degrees[i],
            a.formal_charge,
            a.implicit_hydrogens,
            ring[i],
            a.isotope or 0,
        )
        for i, a in enumerate(mol.atoms)
    ]
    ranks = _dense(seed)

    def refine(ranks: list[int]) -> list[int]:
        classes = len(set(ranks))
        while classes < n:
            keys = [
                (ranks[i], tuple(sorted((code, ranks[j]) for code, j in adj[i])))
                for i in range(n)
            ]
            new = _dense(keys)
            new_classes = len(set(new))
            if new_classes == classes:
                return new
            ranks, classes = new, new_classes
        return ranks

    ranks = refine(ranks)
    while len(set(ranks)) < n:
        counts = Counter(ranks)
        tied_rank = min(r for r, c in counts.items() if c > 1)
        chosen = min(i for i in range(n) if ranks[i] == tied_rank)
        ranks = [
            r + 1 if (r > tied_rank or (r == tied_rank and i != chosen)) else r
            for i, r in enumerate(ranks)
        ]
        ranks = refine(ranks)
    return ranks


def _dense(keys: list) -> list[int]:
    rank_of = {k: r for r, k in enumerate(sorted(set(keys)))}
    return [rank_of[k] for k in keys]


def canonical_smiles(mol: Molecule) -> str:
    """Deterministic SMILES: renumbering-invariant and idempotent.

    Multi-fragment output lists fragment strings sorted lexicographically,
    joined by '.'.
    """
    if len(mol) == 0:
        raise ChemistryError("cannot write SMILES for an empty molecule")
    ranks = canonical_ranks(mol)
    return ".".join(sorted(_normalize_directions(_write_fragment(mol, ranks, frag))
                           for frag in mol.fragments))


_FLIP_TABLE = str.maketrans("/\\", "\\/")


def _normalize_directions(fragment: str) -> str:
    """Pick a fixed representative among direction-flip equivalent strings.

    Flipping every '/' and '\\' in a fragment preserves each double bond's
    cis/trans sense, so symmetric molecules whose stereo-blind ranking ties
    either way still serialize identically.
    """
    if "/" not in fragment and "\\" not in fragment:
        return fragment
    return min(fragment, fragment.translate(_FLIP_TABLE))


def _write_fragment(mol: Molecule, ranks: list[int], frag: tuple[int, ...]) -> str:
    root = min(frag, key=lambda i: ranks[i])

    # Structure pass: deterministic DFS with children ordered by rank.
    disc = {root: 0}
    parent: dict[int, int | None] = {root: None}
    children: dict[int, list[int]] = defaultdict(list)
    openings: dict[int, list[int]] = defaultdict(list)  # earlier atom -> later partners
    closings: dict[int, list[int]] = defaultdict(list)  # later atom -> earlier partners
    edge_used: set[tuple[int, int]] = set()
    iters = {root: iter(sorted(mol.neighbors[root], key=lambda x: ranks[x]))}
    stack = [root]
    while stack:
        v = stack[-1]
        descended = False
        for w in iters[v]:
            if w == parent[v]:
                continue
            key = (v, w) if v < w else (w, v)
            if w in disc:
                if key in edge_used:
                    continue
                edge_used.add(key)
                openings[w].append(v)
                closings[v].append(w)
                continue
            edge_used.add(key)
            disc[w] = len(disc)
            parent[w] = v
            children[v].append(w)
            iters[w] = iter(sorted(mol.neighbors[w], key=lambda x: ranks[x]))
            stack.append(w)
            descended = True
            break
        if not descended:
            stack.pop()

    # Emission pass.
    out: list[str] = []
    digit_of: dict[tuple[int, int], int] = {}
    freed: list[int] = []
    next_digit = 1

    def alloc() -> int:
        nonlocal next_digit
        if freed:
            return heapq.heappop(freed)
        d = next_digit
        next_digit += 1
        return d

    def fmt(d: int) -> str:
        return str(d) if d <= 9 else f"%{d:02d}"

    work: list[tuple] = [("atom", root, None)]
    while work:
        item = work.pop()
        if item[0] == "text":
            out.append(item[1])
            continue
        _, v, par = item
        token = "" if par is None else _bond_str(mol, par, v)
        token += _atom_token(mol, v, par, openings, closings, children)
        for u in closings[v]:
            d = digit_of.pop((u, v) if u < v else (v, u))
            token += fmt(d)
            heapq.heappush(freed, d)
        for w in openings[v]:
            d = alloc()
            digit_of[(v, w) if v < w else (w, v)] = d
            token += _bond_str(mol, v, w) + fmt(d)
        out.append(token)
        kids = children[v]
        for i in reversed(range(len(kids))):
            if i == len(kids) - 1:
                work.append(("atom", kids[i], v))
            else:
                work.append(("text", ")"))
                work.append(("atom", kids[i], v))
                work.append(("text", "("))
    return "".join(out)


def _bond_str(mol: Molecule, u: int, v: int) -> str:
    bond = mol.bond_between(u, v)
    if bond.stereo is not None:
        return bond.stereo if bond.stereo_from == u else _FLIP[bond.stereo]
    if bond.is_aromatic:
        return ""
    if bond.order == 1:
        if mol.atoms[u].is_aromatic and mol.atoms[v].is_aromatic:
            return "-"
        return ""
    return "=" if bond.order == 2 else "#"


def _inferred_bare_h(mol: Molecule, v: int) -> int:
    """Hydrogens a re-parse would infer if this atom were written bare."""
    a = mol.atoms[v]
    sigma = 0
    explicit_multiple = False
    for w in mol.neighbors[v]:
        bond = mol.bond_between(v, w)
        if bond.is_aromatic:
            sigma += 1
        else:
            sigma += bond.order
            if bond.order >= 2:
                explicit_multiple = True
    if a.is_aromatic:
        z = a.atomic_number
        if z == 6:
            takes_double = not explicit_multiple
        elif z in (7, 15):
            allowed = allowed_valences(z, 0) or ()
            takes_double = sigma not in allowed and sigma + 1 in allowed
        else:
            takes_double = False
        if takes_double:
            sigma += 1
    return fill_hydrogens(a.atomic_number, 0, sigma)


def _atom_token(
    mol: Molecule,
    v: int,
    par: int | None,
    openings: dict[int, list[int]],
    closings: dict[int, list[int]],
    children: dict[int, list[int]],
) -> str:
    a = mol.atoms[v]
    sym = a.symbol.lower() if a.is_aromatic else a.symbol
    tag = mol.chiral_tags[v]
    bare_ok = (
        a.formal_charge == 0
        and a.isotope is None
        and tag is None
        and a.atomic_number != 1
        and (sym in _AROMATIC_BARE if a.is_aromatic else sym in ORGANIC_SUBSET)
        and a.implicit_hydrogens == _inferred_bare_h(mol, v)
    )
    if bare_ok:
        return sym

    if tag is not None:
        tag = _adjusted_tag(mol, v, par, openings, closings, children)

    parts = ["["]
    if a.isotope is not None:
        parts.append(str(a.isotope))
    parts.append(sym)
    if tag:
        parts.append(tag)
    if a.implicit_hydrogens == 1:
        parts.append("H")
    elif a.implicit_hydrogens > 1:
        parts.append(f"H{a.implicit_hydrogens}")
    q = a.formal_charge
    if q == 1:
        parts.append("+")
    elif q == -1:
        parts.append("-")
    elif q > 1:
        parts.append(f"+{q}")
    elif q < -1:
        parts.append(f"-{-q}")
    parts.append("]")
    return "".join(parts)


def _adjusted_tag(
    mol: Molecule,
    v: int,
    par: int | None,
    openings: dict[int, list[int]],
    closings: dict[int, list[int]],
    children: dict[int, list[int]],
) -> str | None:
    """Chiral tag re-expressed for the writer's neighbor order.

    The tag's sense depends on the order neighbors are listed; an odd
    permutation between the input-declared order and the written order flips
    it. Unresolvable annotations (e.g. >1 implicit H) are dropped.
    """
    stored = mol.stereo_order[v]
    tag = mol.chiral_tags[v]
    if stored is None:
        return None
    a = mol.atoms[v]
    out: list[int] = []
    if par is not None:
        out.append(par)
    if a.implicit_hydrogens == 1:
        out.append(H_SLOT)
    elif a.implicit_hydrogens > 1:
        return None
    out.extend(closings[v])
    out.extend(openings[v])
    out.extend(children[v])
    if sorted(out) != sorted(stored):
        return None
    return tag if _perm_parity(list(stored), out) == 0 else _FLIP[tag]


def _perm_parity(src: list[int], dst: list[int]) -> int:
    perm = []
    used = [False] * len(dst)
    for x in src:
        for j, y in enumerate(dst):
            if not used[j] and y == x:
                used[j] = True
                perm.append(j)
                break
    inversions = sum(
        1
        for i in range(len(perm))
        for j in range(i + 1, len(perm))
        if perm[i] > perm[j]
    )
    return inversions % 2


def molecular_formula(mol: Molecule) -> str:
    """Hill-order formula: C first, H second, the rest alphabetical.

    Without carbon every element sorts alphabetically (H included).
    Disconnected fragments merge into one formula.
    """
    counts: Counter[str] = Counter()
    hydrogens = 0
    for a in mol.atoms:
        if a.atomic_number == 1:
            hydrogens += 1
        else:
            counts[a.symbol] += 1
        hydrogens += a.implicit_hydrogens
    if hydrogens:
        counts["H"] += hydrogens

    def part(sym: str) -> str:
        c = counts[sym]
        return f"{sym}{c}" if c > 1 else sym

    ordered: list[str] = []
    if counts.get("C"):
        ordered.append(part("C"))
        if counts.get("H"):
            ordered.append(part("H"))
        ordered.extend(part(s) for s in sorted(counts) if s not in ("C", "H"))
    else:
        ordered.extend(part(s) for s in sorted(counts))
    return "".join(ordered)


def to_graph_record(mol: Molecule) -> GraphRecord:
    """Serialize in canonical rank order; byte-identical across renumberings."""
    ranks = canonical_ranks(mol)
    degrees = mol.degrees
    nodes: list[tuple[int, int, int, bool, int]] = [None] * len(mol.atoms)  # type: ignore
    for i, a in enumerate(mol.atoms):
        nodes[ranks[i]] = (
            a.atomic_number,
            a.formal_charge,
            a.implicit_hydrogens,
            a.is_aromatic,
            degrees[i],
        )
    edges = sorted(
        (min(ranks[b.a], ranks[b.b]), max(ranks[b.a], ranks[b.b]), _bond_code(b))
        for b in mol.bonds
    )
    return GraphRecord(nodes=tuple(nodes), edges=tuple(edges))


@dataclass(frozen=True)
class Verdict:
    """Validity verdict: valid | syntax_error(detail) | chemistry_error(detail)."""

    status: str
    detail: str = ""

    @property
    def is_valid(self) -> bool:
        return self.status == "valid"


def validate(text: str) -> Verdict:
    """Classify SMILES text without raising."""
    from .perception import parse_smiles as _parse

    try:
        _parse(text)
    except SmilesSyntaxError as exc:
        return Verdict("syntax_error", str(exc))
    except ChemistryError as exc:
        return Verdict("chemistry_error", str(exc))
    return Verdict("valid")
