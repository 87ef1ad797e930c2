"""Extending partial lattice homomorphisms.

extend decides whether a partial map between finite lattices grows to a
total homomorphism, by backtracking with forced-value propagation: fixing
the images of a and b forces the images of their meet and join.  On top of
it sit the finite-sublattice witness construction (find_f1) and the sup/inf
extension of monotone maps along a chain (gamma_extend).
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Iterator, Mapping, Optional, Sequence

import numpy as np

from .dual import DualPoint
from .errors import (
    BudgetExceeded,
    EmptySubset,
    InfeasibleInput,
    NotAChain,
    NotDistributive,
)
from .lattice import (
    FiniteLattice,
    SubsetHandle,
    generated_sublattice,
    is_distributive,
    restrict_lattice,
    validate_lattice,
)

_DESK_SUBLATTICE_CAP = 8


@dataclass(frozen=True)
class PartialHom:
    """A partial map from a lattice into a lattice, candidate for extension."""

    domain: FiniteLattice
    codomain: FiniteLattice
    assigned: Mapping[int, int]

    def __post_init__(self):
        for e, v in self.assigned.items():
            if not 0 <= e < self.domain.size:
                raise IndexError(f"domain element {e} out of range")
            if not 0 <= v < self.codomain.size:
                raise IndexError(f"codomain element {v} out of range")


@dataclass(frozen=True)
class ExtendResult:
    """Total homomorphism as a tuple, or None with the first stuck element."""

    mapping: Optional[tuple[int, ...]]
    conflict: Optional[int] = None

    @property
    def sat(self) -> bool:
        return self.mapping is not None


def _linear_extension(lat: FiniteLattice) -> list[int]:
    # sorting by number of elements below gives a linear extension
    return sorted(range(lat.size), key=lambda e: (int(lat.leq[:, e].sum()), e))


def extend(p: PartialHom) -> ExtendResult:
    """Complete search: agrees with exhaustive enumeration of all total maps.

    Variable order is a linear extension of the domain; values are tried
    ascending, so the returned homomorphism is deterministic.
    """
    dom, cod = p.domain, p.codomain
    n = dom.size

    def place(assign: list[int], element: int, value: int) -> bool:
        """Assign and propagate meet/join consequences; False on conflict."""
        queue = [(element, value)]
        while queue:
            e, v = queue.pop()
            if assign[e] >= 0:
                if assign[e] != v:
                    return False
                continue
            assign[e] = v
            for a in range(n):
                if assign[a] < 0:
                    continue
                queue.append((int(dom.meet[e, a]), int(cod.meet[v, assign[a]])))
                queue.append((int(dom.join[e, a]), int(cod.join[v, assign[a]])))
        return True

    start = [-1] * n
    for e in sorted(p.assigned):
        if not place(start, e, p.assigned[e]):
            return ExtendResult(None, conflict=e)

    order = _linear_extension(dom)

    def search(assign: list[int]) -> Optional[list[int]]:
        for e in order:
            if assign[e] < 0:
                for v in range(cod.size):
                    trial = assign.copy()
                    if place(trial, e, v):
                        found = search(trial)
                        if found is not None:
                            return found
                return None
        return assign

    solution = search(start)
    if solution is None:
        first_open = next((e for e in order if start[e] < 0), order[0])
        return ExtendResult(None, conflict=first_open)
    # propagation already enforced the law on every pair; keep a cheap guard
    for a in range(n):
        for b in range(n):
            assert solution[dom.meet[a, b]] == cod.meet[solution[a], solution[b]]
            assert solution[dom.join[a, b]] == cod.join[solution[a], solution[b]]
    return ExtendResult(tuple(solution))


# --- congruences and quotients ----------------------------------------------


def _partitions(n: int) -> Iterator[tuple[int, ...]]:
    """All partitions of 0..n-1 as restricted-growth block labels."""

    labels = [0] * n

    def rec(i: int, used: int) -> Iterator[tuple[int, ...]]:
        if i == n:
            yield tuple(labels)
            return
        for lab in range(used + 1):
            labels[i] = lab
            yield from rec(i + 1, used + (1 if lab == used else 0))

    yield from rec(1, 1) if n > 1 else iter([(0,) * n])


def congruences(lat: FiniteLattice) -> list[tuple[int, ...]]:
    """Block labelings compatible with meet and join.

    One-sided substitution suffices: a ~ b forces a op c ~ b op c for all c,
    and transitivity recovers the two-sided law.
    """
    out = []
    n = lat.size
    for labels in _partitions(n):
        ok = True
        for a in range(n):
            if not ok:
                break
            for b in range(a + 1, n):
                if labels[a] != labels[b]:
                    continue
                for c in range(n):
                    if (
                        labels[lat.meet[a, c]] != labels[lat.meet[b, c]]
                        or labels[lat.join[a, c]] != labels[lat.join[b, c]]
                    ):
                        ok = False
                        break
                if not ok:
                    break
        if ok:
            out.append(labels)
    return out


def quotient(lat: FiniteLattice, labels: Sequence[int]) -> tuple[FiniteLattice, tuple[int, ...]]:
    """The quotient lattice of a congruence and the projection map.

    Every surjective lattice homomorphism factors as an isomorphism after
    such a projection, so these quotients list the codomains of Lemma-style
    witness maps up to equivalence (equal kernels give canonically
    isomorphic quotient maps).
    """
    blocks = sorted(set(labels))
    renumber = {lab: i for i, lab in enumerate(blocks)}
    proj = tuple(renumber[lab] for lab in labels)
    reps = [labels.index(lab) for lab in blocks]
    m = len(blocks)
    rel = np.zeros((m, m), dtype=bool)
    for i, a in enumerate(reps):
        for j, b in enumerate(reps):
            rel[i, j] = proj[lat.meet[a, b]] == i
    return validate_lattice(rel), proj


# --- the finite-sublattice witness -------------------------------------------


def _as_sublattice(lat: FiniteLattice, members: Sequence[int]):
    sub, order = restrict_lattice(lat, members)
    local = {parent: i for i, parent in enumerate(order)}
    return sub, local


def _extends_from(
    lat: FiniteLattice,
    members: Sequence[int],
    partial_parent: Mapping[int, int],
    cod: FiniteLattice,
) -> bool:
    """Does the partial map extend to a homomorphism on the given sublattice?"""
    sub, local = _as_sublattice(lat, members)
    localized = {local[e]: v for e, v in partial_parent.items()}
    return extend(PartialHom(sub, cod, localized)).sat


def _grow_until_unsat(
    lat: FiniteLattice,
    seed_members: set[int],
    partial_parent: Mapping[int, int],
    cod: FiniteLattice,
) -> set[int]:
    """Add elements (ascending, closing as we go) until extension fails.

    Terminates: once the sublattice is all of the lattice, the map was
    non-extendable by hypothesis.
    """
    members = set(seed_members)
    while _extends_from(lat, sorted(members), partial_parent, cod):
        fresh = next(e for e in range(lat.size) if e not in members)
        members = set(
            generated_sublattice(lat, SubsetHandle(lat, tuple(members | {fresh}))).members
        )
    return members


def find_f1(
    lat: FiniteLattice, f0: SubsetHandle, *, sublattice_cap: int = _DESK_SUBLATTICE_CAP
) -> SubsetHandle:
    """A finite sublattice from which partial-map extension is decided.

    Mirrors the compactness-free finite construction: enumerate the quotient
    projections of the sublattice generated by the seed; for each projection
    that does not extend to the whole lattice, grow a witness sublattice
    until extension fails from it already; join the witnesses.  Because a
    homomorphism on a larger sublattice may escape the image of its seed
    restriction, the construction is followed by an exhaustive verification
    pass that grows further on any surviving counterexample, so the returned
    subset always satisfies the contract checked by verify_f1.
    """
    if not is_distributive(lat):
        raise NotDistributive("witness construction requires a distributive lattice")
    gen = generated_sublattice(lat, f0)
    if len(gen) > sublattice_cap:
        raise BudgetExceeded(len(gen), sublattice_cap)
    gen_lat, gen_local = _as_sublattice(lat, gen.members)

    members = set(gen.members)
    for labels in congruences(gen_lat):
        cod, proj = quotient(gen_lat, labels)
        on_gen = {parent: proj[gen_local[parent]] for parent in gen.members}
        if extend(PartialHom(lat, cod, on_gen)).sat:
            continue
        members |= _grow_until_unsat(lat, members, on_gen, cod)

    while True:
        offender = _verification_gap(lat, f0, sorted(members), gen_lat)
        if offender is None:
            break
        partial, cod = offender
        members |= _grow_until_unsat(lat, members, partial, cod)
    return SubsetHandle(lat, tuple(members))


def _verification_gap(
    lat: FiniteLattice,
    f0: SubsetHandle,
    members: Sequence[int],
    gen_lat: FiniteLattice,
):
    """First seed-partial-map extendable from members but not from the lattice."""
    for labels in congruences(gen_lat):
        cod, _ = quotient(gen_lat, labels)
        for image in itertools.product(range(cod.size), repeat=len(f0.members)):
            partial = dict(zip(f0.members, image))
            if not _extends_from(lat, members, partial, cod):
                continue
            if not extend(PartialHom(lat, cod, partial)).sat:
                return partial, cod
    return None


def verify_f1(lat: FiniteLattice, f0: SubsetHandle, f1: SubsetHandle) -> bool:
    """Exhaustive check of the find_f1 contract at desk scale.

    For every quotient codomain of the seed-generated sublattice and every
    partial map on the seed: extendability from f1 implies extendability
    from the whole lattice.
    """
    gen = generated_sublattice(lat, f0)
    gen_lat, _ = _as_sublattice(lat, gen.members)
    return _verification_gap(lat, f0, f1.members, gen_lat) is None


# --- monotone extension along a chain ----------------------------------------


def gamma_extend(
    cod: FiniteLattice, members: Sequence[int], values: Sequence[float]
) -> DualPoint:
    """Extend monotone values on a subset of a chain to the whole chain.

    Each element takes the supremum of the values below it, or the infimum
    of the values above when nothing lies below.  The result is monotone,
    stays within [-1, 1], and restricts to the input exactly.
    """
    if cod.kind != "chain":
        raise NotAChain("gamma extension is defined on chains")
    mem = [int(m) for m in members]
    if not mem:
        raise EmptySubset("need at least one assigned element")
    if len(mem) != len(set(mem)):
        raise ValueError("duplicate subset members")
    vals = [float(v) for v in values]
    if len(vals) != len(mem):
        raise ValueError("one value per subset member required")
    by_element = dict(zip(mem, vals))
    for a in mem:
        if not -1.0 <= by_element[a] <= 1.0:
            raise ValueError("values must lie in [-1, 1]")
        for b in mem:
            if cod.leq[a, b] and by_element[a] > by_element[b]:
                raise ValueError(f"values not monotone at pair ({a}, {b})")

    out = []
    for x in range(cod.size):
        below = [by_element[y] for y in mem if cod.leq[y, x]]
        if below:
            out.append(max(below))
        else:
            out.append(min(by_element[y] for y in mem if cod.leq[x, y]))
    return DualPoint(tuple(out))


def family_feasibility_preserved(
    cod: FiniteLattice,
    members: Sequence[int],
    families: Sequence[Sequence[float]],
    *,
    tol: float = 1e-12,
) -> bool:
    """Gamma-extend a feasible family and re-check feasibility on the chain.

    The input must satisfy the packing constraint on the subset; the
    extension preserves it, so True is the only correct answer.
    """
    mem = [int(m) for m in members]
    for pos in range(len(mem)):
        total = sum(abs(fam[pos]) for fam in families)
        if total > 1.0 + tol:
            raise InfeasibleInput(f"family sums to {total} at element {mem[pos]}")
    extended = [gamma_extend(cod, mem, fam) for fam in families]
    for x in range(cod.size):
        if sum(abs(e.values[x]) for e in extended) > 1.0 + tol:
            return False
    return True
