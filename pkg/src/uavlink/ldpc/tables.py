"""Quasi-cyclic LDPC base graphs in the 3GPP TS 38.212 template.

Two lifted base graphs are provided: BG1 (46 x 68, 22 systematic block
columns, 316 edges) and BG2 (42 x 52, 10 systematic block columns, 197
edges).  Row and column supports follow the 38.212 structural template:

* four high-degree core rows (degree 19 for BG1, 8/10/8/10 for BG2),
* a dual-diagonal core parity block over columns kb..kb+3 whose first
  parity column carries shifts (1, 0, 1) in rows (0, 1, 3), so the first
  parity block p0 is recovered by summing the four core rows,
* one degree-1 identity column (shift 0) per extension row,
* heavily connected first two systematic columns (the 2Z punctured bits).

Cyclic-shift coefficients are drawn once per lifting-size set from a
fixed-seed generator and post-processed so that no length-4 cycle exists
at the largest lifting size of the set.  The draw is deterministic: the
same tables are produced on every import, on every platform.  Shift
values are reduced mod Z when a graph is lifted.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from itertools import combinations

import numpy as np

# Lifting sizes Z = a * 2^j, grouped by a in {2,3,5,7,9,11,13,15}, Z <= 384.
LIFTING_SETS: tuple[tuple[int, ...], ...] = (
    (2, 4, 8, 16, 32, 64, 128, 256),
    (3, 6, 12, 24, 48, 96, 192, 384),
    (5, 10, 20, 40, 80, 160, 320),
    (7, 14, 28, 56, 112, 224),
    (9, 18, 36, 72, 144, 288),
    (11, 22, 44, 88, 176, 352),
    (13, 26, 52, 104, 208),
    (15, 30, 60, 120, 240),
)

ALL_LIFTING_SIZES: tuple[int, ...] = tuple(
    sorted(z for group in LIFTING_SETS for z in group)
)

_SHIFT_SEED = 38212


def lifting_set_index(z: int) -> int:
    """Index of the lifting-size set containing Z."""
    for i, group in enumerate(LIFTING_SETS):
        if z in group:
            return i
    raise ValueError(f"unsupported lifting size {z}")


# Row supports.  Core rows list systematic columns only; the core parity
# placements (columns kb..kb+3) are appended programmatically.  Extension
# rows may also touch core parity columns; their degree-1 identity column
# is appended programmatically.

_BG1_KB = 22
_BG1_CORE_INFO = (
    (0, 1, 2, 3, 5, 6, 9, 10, 11, 12, 13, 15, 16, 18, 19, 20, 21),
    (0, 2, 3, 4, 5, 7, 8, 9, 11, 12, 14, 15, 16, 17, 19, 21),
    (0, 1, 2, 4, 5, 6, 7, 8, 9, 10, 13, 14, 15, 17, 18, 19, 20),
    (0, 1, 3, 4, 6, 7, 8, 10, 11, 12, 13, 14, 16, 17, 18, 20, 21),
)
_BG1_EXT = (
    (0, 1),
    (0, 1, 3, 12, 16, 21, 22),
    (0, 6, 10, 11, 13, 17, 18, 20),
    (0, 1, 4, 7, 8, 14),
    (0, 1, 3, 12, 16, 19, 21, 22, 24),
    (0, 1, 10, 11, 13, 17, 18, 20),
    (1, 2, 4, 7, 8, 14),
    (0, 1, 12, 16, 21, 22, 23),
    (0, 1, 10, 11, 13, 18),
    (0, 3, 7, 20, 23),
    (0, 12, 15, 16, 17, 21),
    (0, 1, 10, 13, 18, 25),
    (1, 3, 11, 20, 22),
    (0, 14, 16, 17, 21),
    (1, 12, 13, 18, 19),
    (0, 1, 7, 8, 10),
    (0, 3, 9, 11, 22),
    (1, 5, 16, 20, 21),
    (0, 12, 13, 17),
    (1, 2, 10, 18),
    (0, 3, 4, 11),
    (1, 6, 7, 14),
    (0, 2, 4, 15),
    (1, 6, 8, 22),
    (0, 4, 19, 21),
    (1, 14, 18, 25),
    (0, 10, 13, 24),
    (1, 7, 22, 25),
    (0, 12, 14, 24),
    (1, 2, 11, 21),
    (0, 7, 15, 17),
    (1, 6, 12, 22),
    (0, 14, 15, 18),
    (1, 13, 23),
    (0, 9, 10, 12),
    (1, 3, 7, 19),
    (0, 8, 17),
    (1, 3, 9, 18),
    (0, 4, 24),
    (1, 16, 18, 25),
    (0, 7, 9, 22),
    (1, 6, 10),
)

_BG2_KB = 10
_BG2_CORE_INFO = (
    (0, 1, 2, 3, 6, 9),
    (0, 4, 5, 6, 7, 8, 9),
    (0, 1, 3, 4, 5, 8),
    (1, 2, 4, 5, 6, 7, 8, 9),
)
_BG2_EXT = (
    (0, 1, 11),
    (0, 1, 5, 7),
    (0, 2, 6),
    (0, 1, 9, 13),
    (1, 3, 8),
    (0, 1, 4, 10),
    (1, 2, 5),
    (0, 6, 7),
    (1, 4, 8, 9),
    (0, 3, 11),
    (1, 2, 6, 12),
    (0, 5, 9),
    (1, 3, 7),
    (0, 4, 6, 13),
    (1, 8, 10),
    (0, 2, 9),
    (1, 5, 6),
    (0, 3, 4, 12),
    (1, 7, 9),
    (0, 2, 8),
    (1, 4, 5),
    (0, 6, 8, 11),
    (1, 3, 9),
    (0, 2, 7),
    (1, 5, 8),
    (0, 4, 9, 10),
    (1, 2, 3),
    (0, 7, 8),
    (1, 4, 6),
    (0, 3, 13),
    (1, 2, 9),
    (0, 6, 9),
    (1, 3, 6),
    (0, 5, 8),
    (1, 2, 4),
    (0, 7, 9),
    (1, 3, 5),
    (0, 4, 7),
)


@dataclass(frozen=True)
class BaseGraph:
    """One base graph plus its shift tables for all eight lifting sets."""

    bg: int
    n_rows: int
    n_cols: int
    kb: int
    # row_cols[r]: sorted int array of block-column indices of row r
    row_cols: tuple[np.ndarray, ...]
    # shifts[i_ls][r]: int array aligned with row_cols[r]
    shifts: tuple[tuple[np.ndarray, ...], ...]

    @property
    def n_parity(self) -> int:
        return self.n_cols - self.kb

    def n_edges(self) -> int:
        return sum(len(c) for c in self.row_cols)


def _build_support(kb: int, core_info, ext) -> list[list[tuple[int, int | None]]]:
    """Full (col, fixed_shift_or_None) support; core parity and identity
    placements carry fixed shifts, everything else is drawn."""
    rows: list[list[tuple[int, int | None]]] = []
    core_parity = (
        ((kb, 1), (kb + 1, 0)),
        ((kb, 0), (kb + 1, 0), (kb + 2, 0)),
        ((kb + 2, 0), (kb + 3, 0)),
        ((kb, 1), (kb + 3, 0)),
    )
    for r in range(4):
        entries: list[tuple[int, int | None]] = [(c, None) for c in core_info[r]]
        entries += [(c, s) for c, s in core_parity[r]]
        rows.append(sorted(entries))
    for i, info in enumerate(ext):
        entries = [(c, None) for c in info]
        entries.append((kb + 4 + i, 0))  # degree-1 identity column
        rows.append(sorted(entries))
    return rows


def _assign_shifts(support, z_max: int, rng: np.random.Generator):
    """Draw free shifts and remove all length-4 cycles at lifting size z_max.

    A 4-cycle between rows r1, r2 sharing columns c1, c2 exists iff
    (s[r1,c1] - s[r2,c1]) == (s[r1,c2] - s[r2,c2]) mod Z.  Free entries are
    redrawn until no pair of rows violates the condition.
    """
    shift: dict[tuple[int, int], int] = {}
    free: set[tuple[int, int]] = set()
    rows_by_col: dict[int, list[int]] = {}
    for r, entries in enumerate(support):
        for c, fixed in entries:
            if fixed is None:
                shift[(r, c)] = int(rng.integers(z_max))
                free.add((r, c))
            else:
                shift[(r, c)] = fixed
            rows_by_col.setdefault(c, []).append(r)

    cols_of = [frozenset(c for c, _ in entries) for entries in support]
    pairs = []
    n = len(support)
    for r1 in range(n):
        for r2 in range(r1 + 1, n):
            shared = sorted(cols_of[r1] & cols_of[r2])
            if len(shared) >= 2:
                pairs.append((r1, r2, shared))

    for _ in range(200):  # passes until stable
        dirty = False
        for r1, r2, shared in pairs:
            for c1, c2 in combinations(shared, 2):
                d = (shift[(r1, c1)] - shift[(r2, c1)]
                     - shift[(r1, c2)] + shift[(r2, c2)]) % z_max
                if d != 0:
                    continue
                for key in ((r1, c1), (r2, c1), (r1, c2), (r2, c2)):
                    if key in free:
                        shift[key] = int(rng.integers(z_max))
                        dirty = True
                        break
                else:
                    raise RuntimeError("unremovable 4-cycle among fixed entries")
        if not dirty:
            return shift
    raise RuntimeError("cycle removal did not converge")


def _build_base_graph(bg: int) -> BaseGraph:
    if bg == 1:
        kb, core, ext, n_rows, n_cols = _BG1_KB, _BG1_CORE_INFO, _BG1_EXT, 46, 68
    elif bg == 2:
        kb, core, ext, n_rows, n_cols = _BG2_KB, _BG2_CORE_INFO, _BG2_EXT, 42, 52
    else:
        raise ValueError("base graph must be 1 or 2")

    support = _build_support(kb, core, ext)
    row_cols = tuple(
        np.array([c for c, _ in entries], dtype=np.int32) for entries in support
    )

    all_shifts = []
    for i_ls, group in enumerate(LIFTING_SETS):
        rng = np.random.default_rng(_SHIFT_SEED + 1000 * bg + i_ls)
        table = _assign_shifts(support, max(group), rng)
        all_shifts.append(
            tuple(
                np.array([table[(r, c)] for c, _ in entries], dtype=np.int32)
                for r, entries in enumerate(support)
            )
        )

    graph = BaseGraph(
        bg=bg,
        n_rows=n_rows,
        n_cols=n_cols,
        kb=kb,
        row_cols=row_cols,
        shifts=tuple(all_shifts),
    )
    _validate(graph)
    return graph


def _validate(g: BaseGraph) -> None:
    expected_edges = 316 if g.bg == 1 else 197
    if g.n_edges() != expected_edges:
        raise AssertionError(f"BG{g.bg}: {g.n_edges()} edges, want {expected_edges}")
    if len(g.row_cols) != g.n_rows:
        raise AssertionError("row count mismatch")
    if int(max(c.max() for c in g.row_cols)) != g.n_cols - 1:
        raise AssertionError("column span mismatch")
    # Dual-diagonal core: summing the four core rows must cancel columns
    # kb+1..kb+3 (two equal-shift entries each) and leave x^0 at column kb.
    for shifts in g.shifts:
        core = {}
        for r in range(4):
            for c, s in zip(g.row_cols[r], shifts[r]):
                if c >= g.kb:
                    core.setdefault(int(c), []).append(int(s))
        if sorted(core[g.kb]) != [0, 1, 1]:
            raise AssertionError("first parity column must carry shifts (1,0,1)")
        for c in (g.kb + 1, g.kb + 2, g.kb + 3):
            if len(core[c]) != 2 or core[c][0] != core[c][1]:
                raise AssertionError("core parity columns must cancel pairwise")
    # Extension rows: exactly one identity column each, shift 0.
    for i, r in enumerate(range(4, g.n_rows)):
        c_id = g.kb + 4 + i
        mask = g.row_cols[r] == c_id
        if mask.sum() != 1:
            raise AssertionError("extension row missing its identity column")
        for shifts in g.shifts:
            if int(shifts[r][mask][0]) != 0:
                raise AssertionError("identity column shift must be 0")
    # Punctured systematic columns must stay highly connected.
    for c in (0, 1):
        deg = sum(int((cols == c).sum()) for cols in g.row_cols)
        if deg < 20:
            raise AssertionError(f"column {c} degree {deg} too low")


@lru_cache(maxsize=2)
def get_base_graph(bg: int) -> BaseGraph:
    return _build_base_graph(bg)
