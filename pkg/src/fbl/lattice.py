"""Finite lattices and linear orders.

Elements are dense integer indices 0..n-1.  The order relation is kept as a
full boolean matrix and the meet/join tables are precomputed at validation
time; every later module reads the tables and never recomputes bounds.
Instances are immutable (arrays are marked read-only) and safe to share.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Literal, Optional, Sequence

import numpy as np

from .errors import NotALattice, NotAPartialOrder, ParseError


@dataclass(frozen=True, eq=False)
class FiniteLattice:
    """A validated finite lattice.

    kind is "chain" when the order is total; chain_positions then maps each
    element index to its rank in the order (0 = bottom).
    """

    size: int
    leq: np.ndarray   # bool (n, n); leq[a, b] iff a <= b
    meet: np.ndarray  # int (n, n); greatest lower bound
    join: np.ndarray  # int (n, n); least upper bound
    kind: Literal["chain", "general"]
    chain_positions: Optional[tuple[int, ...]] = None

    def chain_elements(self) -> tuple[int, ...]:
        """Element indices sorted ascending in the order (chains only)."""
        if self.kind != "chain" or self.chain_positions is None:
            raise ValueError("not a chain")
        order = sorted(range(self.size), key=lambda e: self.chain_positions[e])
        return tuple(order)

    def __repr__(self) -> str:
        return f"FiniteLattice(size={self.size}, kind={self.kind!r})"


@dataclass(frozen=True)
class SubsetHandle:
    """A duplicate-free, sorted index subset of a parent lattice."""

    parent: FiniteLattice
    members: tuple[int, ...]

    def __post_init__(self):
        mem = tuple(sorted(set(int(m) for m in self.members)))
        for m in mem:
            if not 0 <= m < self.parent.size:
                raise IndexError(f"subset member {m} out of range")
        object.__setattr__(self, "members", mem)

    def __len__(self) -> int:
        return len(self.members)


def validate_lattice(leq) -> FiniteLattice:
    """Validate an order relation and build the meet/join tables.

    Raises NotAPartialOrder or NotALattice; each error names a witness pair.
    """
    rel = np.asarray(leq, dtype=bool)
    if rel.ndim != 2 or rel.shape[0] != rel.shape[1]:
        raise ValueError("relation must be a square matrix")
    n = rel.shape[0]
    if n == 0:
        raise ValueError("lattice must have at least one element")

    for a in range(n):
        if not rel[a, a]:
            raise NotAPartialOrder("reflexivity fails", (a, a))
    for a in range(n):
        for b in range(n):
            if a != b and rel[a, b] and rel[b, a]:
                raise NotAPartialOrder("antisymmetry fails", (a, b))
    for a in range(n):
        for b in range(n):
            if rel[a, b]:
                for c in range(n):
                    if rel[b, c] and not rel[a, c]:
                        raise NotAPartialOrder("transitivity fails", (a, c))

    meet = np.empty((n, n), dtype=np.int64)
    join = np.empty((n, n), dtype=np.int64)
    for a in range(n):
        for b in range(n):
            lowers = [c for c in range(n) if rel[c, a] and rel[c, b]]
            glb = [c for c in lowers if all(rel[d, c] for d in lowers)]
            if len(glb) != 1:
                raise NotALattice("no greatest lower bound", (a, b))
            meet[a, b] = glb[0]
            uppers = [c for c in range(n) if rel[a, c] and rel[b, c]]
            lub = [c for c in uppers if all(rel[c, d] for d in uppers)]
            if len(lub) != 1:
                raise NotALattice("no least upper bound", (a, b))
            join[a, b] = lub[0]

    total = all(rel[a, b] or rel[b, a] for a in range(n) for b in range(n))
    positions: Optional[tuple[int, ...]] = None
    if total:
        # rank = number of elements strictly below
        positions = tuple(int(rel[:, a].sum()) - 1 for a in range(n))

    for arr in (rel, meet, join):
        arr.setflags(write=False)
    return FiniteLattice(
        size=n,
        leq=rel,
        meet=meet,
        join=join,
        kind="chain" if total else "general",
        chain_positions=positions,
    )


def chain(n: int) -> FiniteLattice:
    """The n-element chain 0 < 1 < ... < n-1."""
    if n < 1:
        raise ValueError("chain needs at least one element")
    rel = np.fromfunction(lambda a, b: a <= b, (n, n))
    return validate_lattice(rel)


def is_distributive(lat: FiniteLattice) -> bool:
    """Exhaustive check of a & (b | c) == (a & b) | (a & c); the dual law follows."""
    n, meet, join = lat.size, lat.meet, lat.join
    for a in range(n):
        for b in range(n):
            for c in range(n):
                if meet[a, join[b, c]] != join[meet[a, b], meet[a, c]]:
                    return False
    return True


def generated_sublattice(lat: FiniteLattice, seed: SubsetHandle) -> SubsetHandle:
    """Smallest subset containing the seed and closed under meet and join.

    Fixed-point closure; terminates because the lattice is finite.
    """
    if seed.parent is not lat:
        raise ValueError("seed belongs to a different lattice")
    current = set(seed.members)
    while True:
        added = set()
        for a in current:
            for b in current:
                added.add(int(lat.meet[a, b]))
                added.add(int(lat.join[a, b]))
        if added <= current:
            return SubsetHandle(lat, tuple(current))
        current |= added


def max_element(lat: FiniteLattice) -> Optional[int]:
    """The global maximum, or None.  Always present for a valid finite lattice."""
    for a in range(lat.size):
        if all(lat.leq[b, a] for b in range(lat.size)):
            return a
    return None


def min_element(lat: FiniteLattice) -> Optional[int]:
    for a in range(lat.size):
        if all(lat.leq[a, b] for b in range(lat.size)):
            return a
    return None


def restrict_lattice(lat: FiniteLattice, members: Sequence[int]) -> tuple[FiniteLattice, tuple[int, ...]]:
    """View a meet/join-closed subset as a lattice in its own right.

    Returns the sublattice (elements renumbered 0..m-1) and the tuple mapping
    local index -> parent index.  Raises NotALattice if the subset is not
    closed (closure can change bounds, so closedness is required, not fixed).
    """
    order = tuple(sorted(set(int(m) for m in members)))
    pos = {p: i for i, p in enumerate(order)}
    for a in order:
        for b in order:
            if int(lat.meet[a, b]) not in pos or int(lat.join[a, b]) not in pos:
                raise NotALattice("subset not closed under meet/join", (a, b))
    return validate_lattice(lat.leq[np.ix_(order, order)]), order


# --- text format -----------------------------------------------------------
#
#   chain n                  an n-chain
#   lattice n                general lattice on 0..n-1, followed by
#   i <= j                   generating order relations (closure is applied)
#
# Comments start with '#'; blank lines are ignored.


def parse_lattice(text: str) -> FiniteLattice:
    lines = text.splitlines()
    header = None
    header_line = 0
    for idx, raw in enumerate(lines, start=1):
        stripped = raw.split("#", 1)[0].strip()
        if stripped:
            header = stripped
            header_line = idx
            break
    if header is None:
        raise ParseError("empty lattice file", 1, 1)

    parts = header.split()
    if parts[0] == "chain":
        if len(parts) != 2 or not parts[1].isdigit() or int(parts[1]) < 1:
            raise ParseError("expected 'chain n' with n >= 1", header_line, 1)
        return chain(int(parts[1]))
    if parts[0] != "lattice":
        raise ParseError(f"expected 'chain' or 'lattice', got {parts[0]!r}", header_line, 1)
    if len(parts) != 2 or not parts[1].isdigit() or int(parts[1]) < 1:
        raise ParseError("expected 'lattice n' with n >= 1", header_line, 1)
    n = int(parts[1])

    rel = np.eye(n, dtype=bool)
    for idx, raw in enumerate(lines, start=1):
        if idx <= header_line:
            continue
        stripped = raw.split("#", 1)[0].strip()
        if not stripped:
            continue
        tokens = stripped.split()
        if len(tokens) != 3 or tokens[1] != "<=":
            raise ParseError("expected 'i <= j'", idx, 1)
        try:
            a, b = int(tokens[0]), int(tokens[2])
        except ValueError:
            raise ParseError("indices must be integers", idx, 1) from None
        if not (0 <= a < n and 0 <= b < n):
            raise ParseError(f"index out of range 0..{n - 1}", idx, 1)
        rel[a, b] = True

    # reflexive-transitive closure (Warshall)
    for c in range(n):
        rel |= np.outer(rel[:, c], rel[c, :])
    return validate_lattice(rel)


def format_lattice(lat: FiniteLattice) -> str:
    """Canonical text form; parse_lattice(format_lattice(L)) reproduces L."""
    if lat.kind == "chain" and lat.chain_positions == tuple(range(lat.size)):
        return f"chain {lat.size}\n"
    lines = [f"lattice {lat.size}"]
    for a in range(lat.size):
        for b in range(lat.size):
            if a != b and lat.leq[a, b]:
                lines.append(f"{a} <= {b}")
    return "\n".join(lines) + "\n"
