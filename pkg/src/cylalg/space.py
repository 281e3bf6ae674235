"""Finite cylindric spaces ^dU and their subsets as int bitsets.

Cells are ordered lexicographically with coordinate 0 most significant, so the
cell s has number sum(s[k] * |U|**(d-1-k)) and is bit of that number.
"""
from __future__ import annotations

import os
from functools import cached_property
from itertools import product
from typing import Iterable, Iterator

import numpy as np

DEFAULT_CELL_BUDGET = 1 << 20


def cell_budget() -> int:
    env = os.environ.get("CYLALG_CELL_BUDGET")
    return int(env) if env else DEFAULT_CELL_BUDGET


class BudgetError(ValueError):
    pass


def _bits_to_int(arr: np.ndarray) -> int:
    return int.from_bytes(np.packbits(arr.astype(bool), bitorder="little").tobytes(), "little")


class CylSpace:
    """The space ^dU with U = {0, ..., base_size-1}.  Raw elements are ints."""

    def __init__(self, dim: int, base_size: int, budget: int | None = None):
        if dim < 1:
            raise ValueError("dimension must be positive")
        if base_size < 1:
            raise ValueError("base must be nonempty")
        budget = cell_budget() if budget is None else budget
        if base_size ** dim > budget:
            raise BudgetError(f"{base_size}^{dim} cells exceeds the cell budget {budget}")
        self.dim = dim
        self.base_size = base_size
        self.ncells = base_size ** dim
        self.full = (1 << self.ncells) - 1
        self.strides = [base_size ** (dim - 1 - i) for i in range(dim)]
        self._diag: dict[tuple[int, int], int] = {}
        self._perm: dict[tuple[int, int], np.ndarray] = {}

    def __repr__(self):
        return f"CylSpace(dim={self.dim}, base_size={self.base_size})"

    def __eq__(self, other):
        return isinstance(other, CylSpace) and (self.dim, self.base_size) == (other.dim, other.base_size)

    def __hash__(self):
        return hash((self.dim, self.base_size))

    # cells ---------------------------------------------------------------

    def index(self, cell) -> int:
        if len(cell) != self.dim:
            raise ValueError(f"cell {tuple(cell)} has wrong length for dimension {self.dim}")
        k = 0
        for v in cell:
            if not 0 <= v < self.base_size:
                raise ValueError(f"coordinate {v} outside the base")
            k = k * self.base_size + v
        return k

    def cell(self, k: int) -> tuple[int, ...]:
        out = []
        for _ in range(self.dim):
            k, r = divmod(k, self.base_size)
            out.append(r)
        return tuple(reversed(out))

    def cells(self) -> Iterator[tuple[int, ...]]:
        return product(range(self.base_size), repeat=self.dim)

    @cached_property
    def coords(self) -> np.ndarray:
        """coords[k, i] = coordinate i of cell k."""
        grid = np.indices((self.base_size,) * self.dim).reshape(self.dim, -1).T
        return grid.astype(np.int64)

    def from_mask(self, arr) -> int:
        return _bits_to_int(np.asarray(arr))

    def to_mask(self, x: int) -> np.ndarray:
        nbytes = (self.ncells + 7) // 8
        raw = np.frombuffer(x.to_bytes(nbytes, "little"), dtype=np.uint8)
        return np.unpackbits(raw, bitorder="little")[: self.ncells].astype(bool)

    def from_cells(self, cells: Iterable) -> int:
        x = 0
        for c in cells:
            x |= 1 << self.index(c)
        return x

    def from_predicate(self, pred) -> int:
        x = 0
        for k, c in enumerate(self.cells()):
            if pred(c):
                x |= 1 << k
        return x

    def members(self, x: int) -> Iterator[tuple[int, ...]]:
        k = 0
        while x:
            if x & 1:
                yield self.cell(k)
            x >>= 1
            k += 1

    # operations ---------------------------------------------------------------

    @cached_property
    def _zero_slab(self) -> list[int]:
        """For each axis i, the cells whose coordinate i is 0."""
        return [self.from_mask(self.coords[:, i] == 0) for i in range(self.dim)]

    def cyl(self, i: int, x: int) -> int:
        if not 0 <= i < self.dim:
            raise IndexError(f"index {i} out of range for dimension {self.dim}")
        stride, slab = self.strides[i], self._zero_slab[i]
        proj = 0
        for u in range(self.base_size):
            proj |= (x >> (u * stride)) & slab
        out = 0
        for u in range(self.base_size):
            out |= proj << (u * stride)
        return out

    def diag(self, i: int, j: int) -> int:
        if not (0 <= i < self.dim and 0 <= j < self.dim):
            raise IndexError(f"diagonal d{i},{j} out of range for dimension {self.dim}")
        key = (min(i, j), max(i, j))
        if key not in self._diag:
            self._diag[key] = self.from_mask(self.coords[:, i] == self.coords[:, j])
        return self._diag[key]

    def transpose(self, i: int, j: int, x: int) -> int:
        """p_ij x = {s : s o [i,j] in x}."""
        if i == j:
            return x
        key = (min(i, j), max(i, j))
        if key not in self._perm:
            c = self.coords.copy()
            c[:, [i, j]] = c[:, [j, i]]
            self._perm[key] = c @ np.array(self.strides, dtype=np.int64)
        return self.from_mask(self.to_mask(x)[self._perm[key]])

    def join(self, x: int, y: int) -> int:
        return x | y

    def meet(self, x: int, y: int) -> int:
        return x & y

    def complement(self, x: int) -> int:
        return self.full ^ x

    def symdiff(self, x: int, y: int) -> int:
        return x ^ y

    def zero(self) -> int:
        return 0

    def one(self) -> int:
        return self.full

    def leq(self, x: int, y: int) -> bool:
        return x & ~y == 0

    def popcount(self, x: int) -> int:
        return bin(x).count("1")

    def random_element(self, rng, density: float | None = None) -> int:
        if density is None:
            return rng.getrandbits(self.ncells) if self.ncells else 0
        x = 0
        for k in range(self.ncells):
            if rng.random() < density:
                x |= 1 << k
        return x

    def point_set(self, x: int) -> "PointSet":
        return PointSet(self, x)


class PointSet:
    """A subset of a CylSpace.  Immutable; operations return new sets."""

    __slots__ = ("space", "bits")

    def __init__(self, space: CylSpace, bits: int = 0):
        if bits < 0 or bits > space.full:
            raise ValueError("bits outside the space")
        self.space = space
        self.bits = bits

    @classmethod
    def of_cells(cls, space, cells):
        return cls(space, space.from_cells(cells))

    @classmethod
    def of_predicate(cls, space, pred):
        return cls(space, space.from_predicate(pred))

    @classmethod
    def empty(cls, space):
        return cls(space, 0)

    @classmethod
    def full(cls, space):
        return cls(space, space.full)

    def _check(self, other):
        if not isinstance(other, PointSet) or other.space != self.space:
            raise ValueError("point sets from different spaces")
        return other.bits

    def __or__(self, other):
        return PointSet(self.space, self.bits | self._check(other))

    def __and__(self, other):
        return PointSet(self.space, self.bits & self._check(other))

    def __xor__(self, other):
        return PointSet(self.space, self.bits ^ self._check(other))

    def __sub__(self, other):
        return PointSet(self.space, self.bits & ~self._check(other))

    def __invert__(self):
        return PointSet(self.space, self.space.full ^ self.bits)

    def __le__(self, other):
        return self.bits & ~self._check(other) == 0

    def __lt__(self, other):
        return self <= other and self.bits != other.bits

    def __eq__(self, other):
        return isinstance(other, PointSet) and other.space == self.space and other.bits == self.bits

    def __hash__(self):
        return hash((self.space.dim, self.space.base_size, self.bits))

    def __len__(self):
        return self.space.popcount(self.bits)

    def __bool__(self):
        return self.bits != 0

    def __contains__(self, cell):
        return bool(self.bits >> self.space.index(cell) & 1)

    def __iter__(self):
        return self.space.members(self.bits)

    def __repr__(self):
        cells = list(self)
        shown = ", ".join(map(str, cells[:6])) + (", ..." if len(cells) > 6 else "")
        return f"PointSet({self.space.dim}x{self.space.base_size}: {{{shown}}})"

    def cyl(self, i: int) -> "PointSet":
        return PointSet(self.space, self.space.cyl(i, self.bits))

    def transpose(self, i: int, j: int) -> "PointSet":
        return PointSet(self.space, self.space.transpose(i, j, self.bits))


def diagonal(space: CylSpace, i: int, j: int) -> PointSet:
    return PointSet(space, space.diag(i, j))


def cylindrify(i: int, x: PointSet) -> PointSet:
    return x.cyl(i)


def transpose(i: int, j: int, x: PointSet) -> PointSet:
    return x.transpose(i, j)
