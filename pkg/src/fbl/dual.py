"""The discretized dual of a finite lattice.

A dual point assigns each lattice element a value in [-1, 1] so that joins
map to maxima and meets to minima; on a chain this is exactly a nondecreasing
vector.  Grid enumeration streams points whose coordinates are exact integer
multiples j/k; membership arithmetic always goes through the integers to
avoid float drift.  Streams are caller-pulled so a pricing pass can walk
grids that would be too large to materialize.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import Iterator, Optional, Sequence

import numpy as np

from .errors import BudgetExceeded, DimensionMismatch
from .lattice import FiniteLattice

DEFAULT_BUDGET = 10_000_000

_BATCH = 262_144


@dataclass(frozen=True)
class GridSpec:
    """Uniform grid {j/k : j = -k..k} in each coordinate."""

    k: int

    def __post_init__(self):
        if self.k < 1:
            raise ValueError("grid resolution must be >= 1")

    @property
    def step(self) -> float:
        return 1.0 / self.k

    def values(self) -> tuple[float, ...]:
        return tuple(j / self.k for j in range(-self.k, self.k + 1))


@dataclass(frozen=True)
class DualPoint:
    """A lattice homomorphism into [-1, 1], stored as one value per element."""

    values: tuple[float, ...]

    def __post_init__(self):
        object.__setattr__(self, "values", tuple(float(v) for v in self.values))

    def __len__(self) -> int:
        return len(self.values)


def is_dual_point(lat: FiniteLattice, v: Sequence[float]) -> bool:
    """Bounds and the homomorphism law, checked with exact comparisons."""
    vec = [float(x) for x in v]
    if len(vec) != lat.size:
        raise DimensionMismatch(f"expected {lat.size} coordinates, got {len(vec)}")
    if any(not -1.0 <= x <= 1.0 for x in vec):
        return False
    for a in range(lat.size):
        for b in range(a, lat.size):
            if vec[lat.join[a, b]] != max(vec[a], vec[b]):
                return False
            if vec[lat.meet[a, b]] != min(vec[a], vec[b]):
                return False
    return True


def chain_grid_count(n: int, k: int) -> int:
    """Number of nondecreasing n-vectors over 2k+1 grid values (stars and bars)."""
    return math.comb(2 * k + n, n)


def _check_chain_budget(n: int, k: int, budget: int) -> int:
    count = chain_grid_count(n, k)
    if count > budget:
        raise BudgetExceeded(count, budget)
    return count


def _check_box_budget(n: int, k: int, budget: int) -> int:
    count = (2 * k + 1) ** n
    if count > budget:
        raise BudgetExceeded(count, budget)
    return count


def _dtype_for(k: int):
    return np.int16 if k <= 16_000 else np.int64


def iter_chain_grid_int(
    n: int, k: int, *, budget: int = DEFAULT_BUDGET, batch: int = _BATCH
) -> Iterator[np.ndarray]:
    """Batches of nondecreasing integer vectors in [-k, k]^n, lexicographic.

    These are the grid dual points of the canonical n-chain, as numerators
    over k.
    """
    _check_chain_budget(n, k, budget)
    source = itertools.combinations_with_replacement(range(-k, k + 1), n)
    dtype = _dtype_for(k)
    while True:
        flat = np.fromiter(
            itertools.chain.from_iterable(itertools.islice(source, batch)),
            dtype=dtype,
        )
        if flat.size == 0:
            return
        yield flat.reshape(-1, n)


def iter_box_int(
    n: int, k: int, *, budget: int = DEFAULT_BUDGET, batch: int = _BATCH
) -> Iterator[np.ndarray]:
    """Batches of all integer vectors in [-k, k]^n, lexicographic."""
    _check_box_budget(n, k, budget)
    source = itertools.product(range(-k, k + 1), repeat=n)
    dtype = _dtype_for(k)
    while True:
        flat = np.fromiter(
            itertools.chain.from_iterable(itertools.islice(source, batch)),
            dtype=dtype,
        )
        if flat.size == 0:
            return
        yield flat.reshape(-1, n)


def _hom_law_mask(lat: FiniteLattice, arr: np.ndarray) -> np.ndarray:
    """Rows of arr that satisfy the meet/join law of the lattice."""
    ok = np.ones(arr.shape[0], dtype=bool)
    for a in range(lat.size):
        for b in range(a + 1, lat.size):
            va, vb = arr[:, a], arr[:, b]
            ok &= arr[:, lat.join[a, b]] == np.maximum(va, vb)
            ok &= arr[:, lat.meet[a, b]] == np.minimum(va, vb)
    return ok


def iter_grid_int(
    lat: FiniteLattice, k: int, *, budget: int = DEFAULT_BUDGET, batch: int = _BATCH
) -> Iterator[np.ndarray]:
    """Batches of integer grid dual points of the lattice (numerators over k).

    Chains enumerate nondecreasing sequences combinatorially; general
    lattices enumerate the whole box and filter by the homomorphism law,
    with the budget counting candidate vectors.
    """
    if lat.kind == "chain":
        order = lat.chain_elements()
        scatter = np.empty(lat.size, dtype=np.int64)
        for pos_idx, element in enumerate(order):
            scatter[element] = pos_idx
        for arr in iter_chain_grid_int(lat.size, k, budget=budget, batch=batch):
            yield arr[:, scatter]
    else:
        for arr in iter_box_int(lat.size, k, budget=budget, batch=batch):
            mask = _hom_law_mask(lat, arr)
            if mask.any():
                yield arr[mask]


def enumerate_grid(
    lat: FiniteLattice, grid: GridSpec, *, budget: int = DEFAULT_BUDGET
) -> Iterator[DualPoint]:
    """Stream exactly the dual points whose coordinates lie on the grid.

    Deterministic order.  Every yielded point passes is_dual_point.
    """
    k = grid.k
    for arr in iter_grid_int(lat, k, budget=budget):
        floats = arr.astype(np.float64) / k
        for row in floats:
            yield DualPoint(tuple(row))


def boundary_normalize(p: DualPoint) -> Optional[tuple[DualPoint, float]]:
    """Scale a nonzero point so its largest absolute coordinate is exactly 1.

    Positive scaling preserves the homomorphism law.  Returns the scaled
    point together with the original sup-norm; None for the zero point.
    """
    scale = max(abs(v) for v in p.values)
    if scale == 0.0:
        return None
    if scale == 1.0:
        return p, 1.0
    return DualPoint(tuple(v / scale for v in p.values)), scale
