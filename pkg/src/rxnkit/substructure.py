"""Mini substructure-query language and subgraph matcher.

The query grammar covers what the shipped key table needs: element atoms
([#6], C, c, Cl, ...), aromatic/aliphatic by symbol case, [R] / [R0] ring
membership, [Dn] degree, [Hn] hydrogen count, charges, '~' any-bond, ':'
aromatic bond, and '!', '&', ',' logic inside brackets. Matching is
subgraph monomorphism with candidate ordering by rarest predicate first;
match counting collapses embeddings sharing the same atom set.
"""

from __future__ import annotations

from dataclasses import dataclass

from .molgraph.elements import AROMATIC_SYMBOLS, ATOMIC_NUMBER
from .molgraph.model import Molecule

_BARE_TWO = ("Cl", "Br")
_BARE_ONE = set("BCNOPSFI")
_BOND_KINDS = {"-": "single", "=": "double", "#": "triple", ":": "aromatic", "~": "any"}


class PatternSyntaxError(ValueError):
    """The query text is not in the supported grammar."""


@dataclass(frozen=True)
class Pattern:
    """A parsed query: predicate atoms plus bond constraints."""

    text: str
    atoms: tuple[tuple, ...]
    bonds: tuple[tuple[int, int, str], ...]

    def __len__(self) -> int:
        return len(self.atoms)


def parse_pattern(text: str) -> Pattern:
    """Parse a query string, or raise PatternSyntaxError."""
    if not text or not text.strip():
        raise PatternSyntaxError("empty pattern")
    s = text.strip()
    atoms: list[tuple] = []
    bonds: list[tuple[int, int, str]] = []
    bond_keys: set[tuple[int, int]] = set()
    prev: int | None = None
    pending: str | None = None
    stack: list[int] = []
    open_rings: dict[int, tuple[int, str | None]] = {}
    i, n = 0, len(s)

    def add_bond(a: int, b: int, kind: str) -> None:
        key = (a, b) if a < b else (b, a)
        if a == b or key in bond_keys:
            raise PatternSyntaxError(f"bad ring bond in pattern {s!r}")
        bond_keys.add(key)
        bonds.append((a, b, kind))

    def attach(idx: int) -> None:
        nonlocal pending
        if prev is not None:
            add_bond(prev, idx, pending or "default")
        elif pending is not None:
            raise PatternSyntaxError(f"dangling bond in pattern {s!r}")
        pending = None

    while i < n:
        ch = s[i]
        if ch == "(":
            if prev is None:
                raise PatternSyntaxError(f"branch with no atom in {s!r}")
            stack.append(prev)
            i += 1
        elif ch == ")":
            if not stack:
                raise PatternSyntaxError(f"unbalanced ')' in {s!r}")
            prev = stack.pop()
            i += 1
        elif ch in _BOND_KINDS:
            if pending is not None:
                raise PatternSyntaxError(f"doubled bond symbol in {s!r}")
            pending = _BOND_KINDS[ch]
            i += 1
        elif ch.isdigit() or ch == "%":
            if ch == "%":
                if i + 2 >= n or not s[i + 1 : i + 3].isdigit():
                    raise PatternSyntaxError(f"bad %NN ring number in {s!r}")
                digit = int(s[i + 1 : i + 3])
                i += 3
            else:
                digit = int(ch)
                i += 1
            if prev is None:
                raise PatternSyntaxError(f"ring digit before any atom in {s!r}")
            if digit in open_rings:
                other, okind = open_rings.pop(digit)
                kind = okind or pending or "default"
                if okind and pending and okind != pending:
                    raise PatternSyntaxError(f"conflicting ring bond in {s!r}")
                add_bond(other, prev, kind)
            else:
                open_rings[digit] = (prev, pending)
            pending = None
        elif ch == "[":
            end = s.find("]", i)
            if end == -1:
                raise PatternSyntaxError(f"unclosed '[' in {s!r}")
            pred = _parse_expression(s[i + 1 : end])
            atoms.append(pred)
            attach(len(atoms) - 1)
            prev = len(atoms) - 1
            i = end + 1
        elif ch.isalpha():
            i, pred = _parse_bare_atom(s, i)
            atoms.append(pred)
            attach(len(atoms) - 1)
            prev = len(atoms) - 1
        else:
            raise PatternSyntaxError(f"unsupported token {ch!r} in pattern {s!r}")

    if stack:
        raise PatternSyntaxError(f"unbalanced '(' in {s!r}")
    if open_rings:
        raise PatternSyntaxError(f"unclosed ring bond in {s!r}")
    if pending is not None:
        raise PatternSyntaxError(f"dangling bond at end of {s!r}")
    if not atoms:
        raise PatternSyntaxError(f"pattern {s!r} has no atoms")
    return Pattern(text=s, atoms=tuple(atoms), bonds=tuple(bonds))


def _parse_bare_atom(s: str, i: int) -> tuple[int, tuple]:
    two = s[i : i + 2]
    if two in _BARE_TWO:
        return i + 2, ("and", (("elem", ATOMIC_NUMBER[two]), ("arom", False)))
    ch = s[i]
    if ch in _BARE_ONE:
        return i + 1, ("and", (("elem", ATOMIC_NUMBER[ch]), ("arom", False)))
    if ch in AROMATIC_SYMBOLS:
        return i + 1, ("and", (("elem", AROMATIC_SYMBOLS[ch]), ("arom", True)))
    raise PatternSyntaxError(f"unknown atom symbol {ch!r} in pattern {s!r}")


def _parse_expression(body: str) -> tuple:
    """Bracket expression: ',' (or) over '&' (and, also implicit) over '!'."""
    if not body:
        raise PatternSyntaxError("empty bracket expression")
    pos = 0

    def parse_or() -> tuple:
        nonlocal pos
        terms = [parse_and()]
        while pos < len(body) and body[pos] == ",":
            pos += 1
            terms.append(parse_and())
        return terms[0] if len(terms) == 1 else ("or", tuple(terms))

    def parse_and() -> tuple:
        nonlocal pos
        terms = [parse_unary()]
        while pos < len(body) and body[pos] not in ",":
            if body[pos] == "&":
                pos += 1
            terms.append(parse_unary())
        return terms[0] if len(terms) == 1 else ("and", tuple(terms))

    def parse_unary() -> tuple:
        nonlocal pos
        if pos < len(body) and body[pos] == "!":
            pos += 1
            return ("not", parse_unary())
        return parse_primitive()

    def read_digits(default: int) -> int:
        nonlocal pos
        start = pos
        while pos < len(body) and body[pos].isdigit():
            pos += 1
        return int(body[start:pos]) if pos > start else default

    def parse_primitive() -> tuple:
        nonlocal pos
        if pos >= len(body):
            raise PatternSyntaxError(f"truncated expression in [{body}]")
        ch = body[pos]
        if ch == "#":
            pos += 1
            z = read_digits(-1)
            if z < 1 or z > 118:
                raise PatternSyntaxError(f"bad element number in [{body}]")
            return ("elem", z)
        if ch == "R":
            pos += 1
            count = read_digits(1)
            if count == 0:
                return ("not", ("ring",))
            if count == 1:
                return ("ring",)
            raise PatternSyntaxError(f"unsupported ring count R{count} in [{body}]")
        if ch == "D":
            pos += 1
            return ("deg", read_digits(1))
        if ch == "H":
            pos += 1
            return ("h", read_digits(1))
        if ch in "+-":
            sign = 1 if ch == "+" else -1
            pos += 1
            if pos < len(body) and body[pos].isdigit():
                return ("charge", sign * read_digits(1))
            count = 1
            while pos < len(body) and body[pos] == ch:
                count += 1
                pos += 1
            return ("charge", sign * count)
        two = body[pos : pos + 2]
        if two in _BARE_TWO:
            pos += 2
            return ("and", (("elem", ATOMIC_NUMBER[two]), ("arom", False)))
        if ch.isupper() and ch in _BARE_ONE:
            pos += 1
            return ("and", (("elem", ATOMIC_NUMBER[ch]), ("arom", False)))
        if ch in AROMATIC_SYMBOLS:
            pos += 1
            return ("and", (("elem", AROMATIC_SYMBOLS[ch]), ("arom", True)))
        raise PatternSyntaxError(f"unsupported token {ch!r} in [{body}]")

    tree = parse_or()
    if pos != len(body):
        raise PatternSyntaxError(f"trailing {body[pos:]!r} in [{body}]")
    return tree


def _total_h(mol: Molecule, idx: int) -> int:
    explicit = sum(1 for w in mol.neighbors[idx] if mol.atoms[w].atomic_number == 1)
    return mol.atoms[idx].implicit_hydrogens + explicit


def _atom_matches(pred: tuple, mol: Molecule, idx: int) -> bool:
    kind = pred[0]
    if kind == "elem":
        return mol.atoms[idx].atomic_number == pred[1]
    if kind == "arom":
        return mol.atoms[idx].is_aromatic == pred[1]
    if kind == "ring":
        return mol.ring_membership[idx]
    if kind == "deg":
        return mol.degrees[idx] == pred[1]
    if kind == "h":
        return _total_h(mol, idx) == pred[1]
    if kind == "charge":
        return mol.atoms[idx].formal_charge == pred[1]
    if kind == "not":
        return not _atom_matches(pred[1], mol, idx)
    if kind == "and":
        return all(_atom_matches(p, mol, idx) for p in pred[1])
    if kind == "or":
        return any(_atom_matches(p, mol, idx) for p in pred[1])
    raise AssertionError(f"unknown predicate {pred!r}")


def _bond_matches(kind: str, bond) -> bool:
    if kind == "any":
        return True
    if kind == "aromatic":
        return bond.is_aromatic
    if kind == "default":
        return bond.is_aromatic or bond.order == 1
    if kind == "single":
        return bond.order == 1 and not bond.is_aromatic
    if kind == "double":
        return bond.order == 2 and not bond.is_aromatic
    return bond.order == 3 and not bond.is_aromatic  # triple


def find_matches(
    pattern: Pattern, mol: Molecule, max_matches: int | None = None
) -> list[tuple[int, ...]]:
    """Embeddings in pattern-atom order, one per distinct molecule atom set."""
    np = len(pattern.atoms)
    candidates = [
        [i for i in range(len(mol.atoms)) if _atom_matches(pred, mol, i)]
        for pred in pattern.atoms
    ]
    if any(not c for c in candidates):
        return []

    p_adj: dict[int, list[tuple[int, str]]] = {i: [] for i in range(np)}
    for a, b, kind in pattern.bonds:
        p_adj[a].append((b, kind))
        p_adj[b].append((a, kind))

    # Rarest predicate first, then grow along pattern adjacency.
    order: list[int] = []
    placed: set[int] = set()
    while len(order) < np:
        frontier = [
            i for i in range(np)
            if i not in placed and any(j in placed for j, _ in p_adj[i])
        ]
        pool = frontier or [i for i in range(np) if i not in placed]
        nxt = min(pool, key=lambda i: (len(candidates[i]), i))
        order.append(nxt)
        placed.add(nxt)

    candidate_sets = [set(c) for c in candidates]
    results: list[tuple[int, ...]] = []
    seen_sets: set[frozenset[int]] = set()
    mapping: dict[int, int] = {}

    def backtrack(depth: int) -> bool:
        if depth == np:
            key = frozenset(mapping.values())
            if key not in seen_sets:
                seen_sets.add(key)
                results.append(tuple(mapping[i] for i in range(np)))
            return max_matches is not None and len(results) >= max_matches
        p = order[depth]
        anchored = [(j, kind) for j, kind in p_adj[p] if j in mapping]
        if anchored:
            j0, kind0 = anchored[0]
            pool = [
                w for w in mol.neighbors[mapping[j0]]
                if _bond_matches(kind0, mol.bond_between(mapping[j0], w))
            ]
        else:
            pool = candidates[p]
        used = set(mapping.values())
        for m in pool:
            if m in used or m not in candidate_sets[p]:
                continue
            ok = True
            for j, kind in anchored:
                bond = mol.bond_between(mapping[j], m)
                if bond is None or not _bond_matches(kind, bond):
                    ok = False
                    break
            if not ok:
                continue
            mapping[p] = m
            if backtrack(depth + 1):
                return True
            del mapping[p]
        return False

    backtrack(0)
    return results


def has_match(pattern: Pattern, mol: Molecule) -> bool:
    """True when at least one embedding exists."""
    return bool(find_matches(pattern, mol, max_matches=1))


def count_matches(pattern: Pattern, mol: Molecule) -> int:
    """Number of distinct atom-set embeddings."""
    return len(find_matches(pattern, mol))
