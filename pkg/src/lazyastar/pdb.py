"""Additive pattern databases for sliding-tile puzzles.

Abstract states are the cells occupied by the pattern tiles plus the blank.
Moving a pattern tile costs its weight, moving any other tile costs nothing,
so PDBs over disjoint patterns can be summed.  Tables are indexed by the
rank of the pattern placement (blank dropped, minimum over blank cells).

File layout (little-endian)::

    b"LPDB" | version u16 | cells u8 | pattern length u8 | pattern tiles u8... |
    entry width u8 | table (entry width bytes per rank, rank order)
"""

from __future__ import annotations

import struct
from dataclasses import dataclass
from math import perm
from pathlib import Path
from typing import Sequence

import numpy as np

from .domains import TILE_NUMBER, TilePuzzle, neighbor_table
from .heuristics import Heuristic

MAGIC = b"LPDB"
VERSION = 1
DEFAULT_MEMORY_CAP = 512 * 2**20


class PdbTooLarge(MemoryError):
    pass


def rank_placement(cells: Sequence[int], n: int) -> int:
    """Lexicographic rank of a k-permutation of ``range(n)``."""
    r = 0
    for i, c in enumerate(cells):
        smaller = 0
        for j in range(i):
            if cells[j] < c:
                smaller += 1
        r = r * (n - i) + (c - smaller)
    return r


def unrank_placement(r: int, k: int, n: int) -> tuple[int, ...]:
    digits = []
    for i in reversed(range(k)):
        r, d = divmod(r, n - i)
        digits.append(d)
    digits.reverse()
    free = list(range(n))
    return tuple(free.pop(d) for d in digits)


@dataclass
class PatternDB:
    pattern: tuple[int, ...]
    cells: int
    table: np.ndarray
    additive_group: int | None = None

    @property
    def entry_width(self) -> int:
        return self.table.dtype.itemsize

    @property
    def unreachable(self) -> int:
        return int(np.iinfo(self.table.dtype).max)

    def lookup_cells(self, cells: Sequence[int]) -> int:
        return int(self.table[rank_placement(cells, self.cells)])

    def lookup(self, state: Sequence[int]) -> int:
        inv = [0] * len(state)
        for c, t in enumerate(state):
            inv[t] = c
        return self.lookup_cells([inv[t] for t in self.pattern])


def estimate_bytes(pattern_len: int, cells: int) -> int:
    # search-time distances over (pattern + blank) placements, plus the table
    return perm(cells, pattern_len + 1) + 2 * perm(cells, pattern_len)


def pdb_build(pattern: Sequence[int], puzzle: TilePuzzle, memory_cap: int = DEFAULT_MEMORY_CAP,
              additive_group: int | None = None) -> PatternDB:
    """Retrograde uniform-cost sweep from the abstract goal."""
    pattern = tuple(pattern)
    n = puzzle.width * puzzle.height
    if not pattern or len(set(pattern)) != len(pattern) or not all(0 < t < n for t in pattern):
        raise ValueError(f"pattern must be distinct tiles in 1..{n - 1}: {pattern}")
    k = len(pattern)
    need = estimate_bytes(k, n)
    if need > memory_cap:
        raise PdbTooLarge(f"pattern {pattern} needs ~{need} bytes (cap {memory_cap})")

    adj = neighbor_table(puzzle.width, puzzle.height)
    weight = {t: (t if puzzle.weights == TILE_NUMBER else 1) for t in pattern}

    big = np.iinfo(np.uint32).max
    dist = np.full(perm(n, k + 1), big, dtype=np.uint32)
    table = np.full(perm(n, k), big, dtype=np.uint32)

    # abstract state: (cell of pattern[0], ..., cell of pattern[k-1], blank cell)
    start = tuple(pattern) + (0,)
    dist[rank_placement(start, n)] = 0
    buckets: dict[int, list] = {0: [start]}
    d = 0
    remaining = 1
    while remaining:
        bucket = buckets.get(d)
        if not bucket:
            buckets.pop(d, None)
            d += 1
            continue
        i = 0
        while i < len(bucket):
            st = bucket[i]
            i += 1
            remaining -= 1
            if dist[rank_placement(st, n)] != d:
                continue
            pr = rank_placement(st[:k], n)
            if d < table[pr]:
                table[pr] = d
            blank = st[k]
            for cell in adj[blank]:
                try:
                    idx = st.index(cell, 0, k)
                except ValueError:
                    idx = -1
                if idx >= 0:
                    nxt = st[:idx] + (blank,) + st[idx + 1:k] + (cell,)
                    nd = d + weight[pattern[idx]]
                else:
                    nxt = st[:k] + (cell,)
                    nd = d
                r = rank_placement(nxt, n)
                if nd < dist[r]:
                    dist[r] = nd
                    if nd == d:
                        bucket.append(nxt)
                    else:
                        buckets.setdefault(nd, []).append(nxt)
                    remaining += 1
        buckets.pop(d, None)
        d += 1

    top = int(table[table != big].max())
    dtype = np.uint8 if top < 255 else np.uint16
    cap = np.iinfo(dtype).max
    table = np.where(table == big, cap, table).astype(dtype)
    return PatternDB(pattern, n, table, additive_group)


def write_pdb(pdb: PatternDB, path) -> None:
    header = MAGIC + struct.pack("<HBB", VERSION, pdb.cells, len(pdb.pattern))
    header += bytes(pdb.pattern) + struct.pack("<B", pdb.entry_width)
    with open(path, "wb") as fh:
        fh.write(header)
        fh.write(pdb.table.astype(pdb.table.dtype.newbyteorder("<"), copy=False).tobytes())


def read_pdb(path, mmap: bool = True) -> PatternDB:
    path = Path(path)
    with open(path, "rb") as fh:
        head = fh.read(8)
        if len(head) < 8 or head[:4] != MAGIC:
            raise ValueError(f"{path}: not a PDB file")
        version, cells, k = struct.unpack("<HBB", head[4:8])
        if version != VERSION:
            raise ValueError(f"{path}: unsupported PDB version {version}")
        pattern = tuple(fh.read(k))
        (width,) = struct.unpack("<B", fh.read(1))
    offset = 8 + k + 1
    dtype = {1: np.dtype("<u1"), 2: np.dtype("<u2")}.get(width)
    if dtype is None:
        raise ValueError(f"{path}: bad entry width {width}")
    count = perm(cells, k)
    if mmap:
        table = np.memmap(path, dtype=dtype, mode="r", offset=offset, shape=(count,))
    else:
        table = np.fromfile(path, dtype=dtype, offset=offset, count=count)
    if table.shape[0] != count:
        raise ValueError(f"{path}: truncated table")
    return PatternDB(pattern, cells, table)


def check_partition(pdbs: Sequence[PatternDB], cells: int, complete: bool = True) -> None:
    seen: set[int] = set()
    for p in pdbs:
        if seen & set(p.pattern):
            raise ValueError("patterns overlap; sum would not be admissible")
        seen |= set(p.pattern)
    if complete and seen != set(range(1, cells)):
        raise ValueError("patterns do not cover every tile")


def additive_pdb_eval(state: Sequence[int], pdbs: Sequence[PatternDB]) -> int:
    inv = [0] * len(state)
    for c, t in enumerate(state):
        inv[t] = c
    total = 0
    for p in pdbs:
        total += int(p.table[rank_placement([inv[t] for t in p.pattern], p.cells)])
    return total


def parse_partition(text: str) -> list[tuple[int, ...]]:
    """``"1-2-3-4/5-6-7-8"`` -> ``[(1, 2, 3, 4), (5, 6, 7, 8)]``."""
    groups = [g for g in text.replace(" ", "").split("/") if g]
    return [tuple(int(t) for t in g.replace(",", "-").split("-")) for g in groups]


def default_partition(width: int, height: int | None = None) -> list[tuple[int, ...]]:
    height = width if height is None else height
    n = width * height
    if n == 9:
        return [(1, 2, 3, 4), (5, 6, 7, 8)]
    if n == 16:
        return [(1, 2, 3, 4, 5), (6, 7, 8, 9, 10), (11, 12, 13, 14, 15)]
    tiles = list(range(1, n))
    return [tuple(tiles[i:i + 4]) for i in range(0, len(tiles), 4)]


def build_group(puzzle: TilePuzzle, partition: Sequence[Sequence[int]] | None = None,
                memory_cap: int = DEFAULT_MEMORY_CAP) -> list[PatternDB]:
    if partition is None:
        partition = default_partition(puzzle.width, puzzle.height)
    pdbs = [pdb_build(p, puzzle, memory_cap, additive_group=i) for i, p in enumerate(partition)]
    check_partition(pdbs, puzzle.width * puzzle.height)
    return pdbs


def pdb_heuristic(pdbs: Sequence[PatternDB], label: str = "pdb") -> Heuristic:
    pdbs = list(pdbs)
    check_partition(pdbs, pdbs[0].cells)
    tables = [(p.pattern, p.cells, p.table.tolist()) for p in pdbs]

    def fn(state):
        inv = [0] * len(state)
        for c, t in enumerate(state):
            inv[t] = c
        return sum(tab[rank_placement([inv[t] for t in pat], n)] for pat, n, tab in tables)

    return Heuristic(fn, label, consistent=True, dominates=frozenset({"md", "dx", "dy"}))
