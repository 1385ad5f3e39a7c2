"""Hierarchical grid cells, Z-order, and compressed quadtrees.

Cells of the hierarchical grid over the unit square are addressed by
(level, ix, iy); level i cells have side 2^-i, iy counts from the bottom.
The Z-order lists a contained cell before its container and orders unrelated
cells by the child order NW, NE, SW, SE at their lowest common ancestor.

Every cell gets an interleaved integer key (y-bits complemented so NW sorts
first) padded to a fixed depth: padding with zeros gives the start of the
cell's subtree range (k0), padding with ones the end (k3).  Sorting by
(k3, -level) is exactly the Z-order, so predecessor searches are plain
binary searches.  Keys fit an int64 up to depth 29; deeper instances fall
back to Python integers transparently.
"""

from __future__ import annotations

import math
from fractions import Fraction
from typing import NamedTuple, Optional

import numpy as np

INT64_MAX_DEPTH = 29
_LEVEL_BITS = 5            # int64 path: levels 0..29 fit in 5 bits
_LEVEL_MAX = (1 << _LEVEL_BITS) - 1


class InvariantViolation(AssertionError):
    pass


class GridCell(NamedTuple):
    level: int
    ix: int
    iy: int

    def side(self) -> float:
        return 2.0 ** (-self.level)

    def bounds(self):
        s = self.side()
        return (self.ix * s, self.iy * s, (self.ix + 1) * s, (self.iy + 1) * s)

    def contains_cell(self, other: "GridCell") -> bool:
        d = other.level - self.level
        if d < 0:
            return False
        return (other.ix >> d) == self.ix and (other.iy >> d) == self.iy

    def contains_point(self, x: float, y: float) -> bool:
        x0, y0, x1, y1 = self.bounds()
        return x0 <= x < x1 and y0 <= y < y1


ROOT = GridCell(0, 0, 0)


def _spread_bits64(v: np.ndarray) -> np.ndarray:
    v = v.astype(np.uint64)
    v = (v | (v << np.uint64(16))) & np.uint64(0x0000FFFF0000FFFF)
    v = (v | (v << np.uint64(8))) & np.uint64(0x00FF00FF00FF00FF)
    v = (v | (v << np.uint64(4))) & np.uint64(0x0F0F0F0F0F0F0F0F)
    v = (v | (v << np.uint64(2))) & np.uint64(0x3333333333333333)
    v = (v | (v << np.uint64(1))) & np.uint64(0x5555555555555555)
    return v


def _compact_bits64(v: np.ndarray) -> np.ndarray:
    v = v.astype(np.uint64) & np.uint64(0x5555555555555555)
    v = (v | (v >> np.uint64(1))) & np.uint64(0x3333333333333333)
    v = (v | (v >> np.uint64(2))) & np.uint64(0x0F0F0F0F0F0F0F0F)
    v = (v | (v >> np.uint64(4))) & np.uint64(0x00FF00FF00FF00FF)
    v = (v | (v >> np.uint64(8))) & np.uint64(0x0000FFFF0000FFFF)
    v = (v | (v >> np.uint64(16))) & np.uint64(0x00000000FFFFFFFF)
    return v.astype(np.int64)


def _morton64(ix: np.ndarray, iy: np.ndarray, level) -> np.ndarray:
    """Interleaved key with complemented y as the high bit of each pair."""
    if np.isscalar(level):
        mask = np.uint64((1 << level) - 1)
    else:
        mask = ((np.uint64(1) << np.asarray(level).astype(np.uint64)) - np.uint64(1))
    iyc = mask - np.asarray(iy).astype(np.uint64)
    return ((_spread_bits64(iyc) << np.uint64(1)) |
            _spread_bits64(np.asarray(ix))).astype(np.int64)


def _morton_py(ix: int, iy: int, level: int) -> int:
    iyc = ((1 << level) - 1) - iy
    m = 0
    for b in range(level - 1, -1, -1):
        m = (m << 2) | (((iyc >> b) & 1) << 1) | ((ix >> b) & 1)
    return m


def _bit_length_u64(v: np.ndarray) -> np.ndarray:
    """Per-element bit length of nonnegative int64 values (exact)."""
    v = v.astype(np.uint64)
    hi = (v >> np.uint64(32)).astype(np.int64)
    lo = (v & np.uint64(0xFFFFFFFF)).astype(np.int64)
    use_hi = hi != 0
    sel = np.where(use_hi, hi, lo)
    f = np.maximum(sel, 1).astype(np.float64)
    bl = np.floor(np.log2(f)).astype(np.int64) + 1
    bl = np.where((np.int64(1) << np.maximum(bl - 1, 0)) > sel, bl - 1, bl)
    bl = np.where(sel == 0, 0, bl)
    return bl + np.where(use_hi, 32, 0)


class ZKeys:
    """Key computation for a fixed padding depth L, int64 or Python ints."""

    def __init__(self, depth: int):
        self.depth = depth
        self.int64 = depth <= INT64_MAX_DEPTH
        self.level_bits = _LEVEL_BITS if self.int64 else max(12, depth.bit_length() + 1)
        self.level_max = (1 << self.level_bits) - 1

    def keys_from_codes(self, levels, codes):
        """(k0, k3, ckey) of the level-`levels` ancestors of depth-L codes."""
        L = self.depth
        if self.int64:
            levels = np.asarray(levels, dtype=np.int64)
            codes = np.asarray(codes, dtype=np.int64)
            pad = (np.uint64(2) * (L - levels).astype(np.uint64))
            ones = (((np.uint64(1) << pad) - np.uint64(1))).astype(np.int64)
            k0 = codes & ~ones
            k3 = codes | ones
            ckey = (k3 << _LEVEL_BITS) | (_LEVEL_MAX - levels)
            return k0, k3, ckey
        k0l, k3l, ckl = [], [], []
        for l, c in zip(np.asarray(levels).tolist(), np.asarray(codes).tolist()):
            pad = 2 * (L - int(l))
            ones = (1 << pad) - 1
            a = int(c) & ~ones
            b = int(c) | ones
            k0l.append(a)
            k3l.append(b)
            ckl.append((b << self.level_bits) | (self.level_max - int(l)))
        return (np.array(k0l, dtype=object), np.array(k3l, dtype=object),
                np.array(ckl, dtype=object))

    def cell_keys(self, levels, ixs, iys):
        """(k0, k3, ckey) for explicit cells; ckey sorts in Z-order."""
        L = self.depth
        if self.int64:
            levels = np.asarray(levels, dtype=np.int64)
            m = _morton64(np.asarray(ixs), np.asarray(iys), levels)
            pad = (np.uint64(2) * (L - levels).astype(np.uint64))
            codes = (m.astype(np.uint64) << pad).astype(np.int64)
            return self.keys_from_codes(levels, codes)
        out0, out3, outc = [], [], []
        for l, x, y in zip(np.asarray(levels).tolist(),
                           np.asarray(ixs).tolist(), np.asarray(iys).tolist()):
            m = _morton_py(int(x), int(y), int(l)) << (2 * (L - int(l)))
            a, b, c = self.keys_from_codes([int(l)], [m])
            out0.append(a[0])
            out3.append(b[0])
            outc.append(c[0])
        return (np.array(out0, dtype=object), np.array(out3, dtype=object),
                np.array(outc, dtype=object))

    def cell_key(self, cell: GridCell):
        k0, k3, ck = self.cell_keys([cell.level], [cell.ix], [cell.iy])
        return k0[0], k3[0], ck[0]

    def decode(self, level: int, k0) -> GridCell:
        pref = int(k0) >> (2 * (self.depth - level))
        if self.int64:
            ix = int(_compact_bits64(np.array([pref]))[0])
            iyc = int(_compact_bits64(np.array([pref >> 1]))[0])
        else:
            ix = iyc = 0
            for b in range(level):
                ix |= ((pref >> (2 * b)) & 1) << b
                iyc |= ((pref >> (2 * b + 1)) & 1) << b
        return GridCell(level, ix, ((1 << level) - 1) - iyc)

    def point_codes(self, xs: np.ndarray, ys: np.ndarray):
        """Depth-L cell key (k0 == k3) of each point in the unit square."""
        L = self.depth
        if self.int64:
            scale = float(1 << L)
            ix = np.minimum((xs * scale).astype(np.int64), (1 << L) - 1)
            iy = np.minimum((ys * scale).astype(np.int64), (1 << L) - 1)
            return _morton64(ix, iy, L)
        out = []
        two_L = 1 << L
        for x, y in zip(np.asarray(xs).tolist(), np.asarray(ys).tolist()):
            fx, fy = Fraction(x), Fraction(y)
            ix = min((fx.numerator << L) // fx.denominator, two_L - 1)
            iy = min((fy.numerator << L) // fy.denominator, two_L - 1)
            out.append(_morton_py(int(ix), int(iy), L))
        return np.array(out, dtype=object)


_ZKEYS_CACHE: dict = {}


def _zkeys_for(depth: int) -> ZKeys:
    zk = _ZKEYS_CACHE.get(depth)
    if zk is None:
        zk = _ZKEYS_CACHE[depth] = ZKeys(depth)
    return zk


def z_compare(a: GridCell, b: GridCell, depth: Optional[int] = None) -> int:
    """-1, 0, +1 for a before/equal/after b in Z-order."""
    if depth is None:
        depth = max(a.level, b.level, 1)
    ma = _morton_py(a.ix, a.iy, a.level)
    mb = _morton_py(b.ix, b.iy, b.level)
    pa, pb = 2 * (depth - a.level), 2 * (depth - b.level)
    k3a = ((ma << pa) | ((1 << pa) - 1), -a.level)
    k3b = ((mb << pb) | ((1 << pb) - 1), -b.level)
    return -1 if k3a < k3b else (1 if k3a > k3b else 0)


def z_sort_key(cell: GridCell, depth: int):
    return _zkeys_for(depth).cell_key(cell)[2]


# ---------------------------------------------------------------------------
# compressed quadtree


class CompressedQuadtree:
    """Minimal quadtree over point sites: the root, every largest private
    cell, and all pairwise lowest common ancestors, single-child paths
    contracted.  Nodes are stored in increasing Z-order (a postorder), which
    doubles as the linearization."""

    __slots__ = ("zkeys", "n_sites", "zorder_sites", "point_codes",
                 "levels", "k0", "k3", "ckey", "site_lo", "site_hi",
                 "is_leaf", "leaf_site")

    def __init__(self, zkeys: ZKeys, zorder_sites: np.ndarray,
                 point_codes: np.ndarray, levels, k0, k3, ckey):
        self.zkeys = zkeys
        self.n_sites = len(zorder_sites)
        self.zorder_sites = zorder_sites        # site ids in Z-order
        self.point_codes = point_codes          # sorted depth-L codes
        self.levels = levels
        self.k0 = k0
        self.k3 = k3
        self.ckey = ckey
        self.site_lo = np.searchsorted(point_codes, k0, side="left").astype(np.int64)
        self.site_hi = np.searchsorted(point_codes, k3, side="right").astype(np.int64)
        self.is_leaf = (self.site_hi - self.site_lo) == 1
        self.leaf_site = np.where(
            self.is_leaf,
            zorder_sites[np.minimum(self.site_lo, max(self.n_sites - 1, 0))], -1)

    def __len__(self) -> int:
        return len(self.levels)

    @property
    def depth(self) -> int:
        return self.zkeys.depth

    def cell(self, i: int) -> GridCell:
        return self.zkeys.decode(int(self.levels[i]), self.k0[i])

    def cells(self) -> list[GridCell]:
        return [self.cell(i) for i in range(len(self))]

    def sites_in_node(self, i: int) -> np.ndarray:
        return self.zorder_sites[int(self.site_lo[i]):int(self.site_hi[i])]

    def parent_of(self, i: int) -> int:
        """Index of the parent node (-1 for the root); scans upward."""
        for j in range(i + 1, len(self)):
            if self.k0[j] <= self.k0[i] and self.k3[j] >= self.k3[i]:
                return j
        return -1

    def structure(self) -> list[tuple[int, int, int]]:
        """Cells as sorted (level, ix, iy) tuples, for structural equality."""
        return sorted(tuple(self.cell(i)) for i in range(len(self)))


def _lca_levels(codes: np.ndarray, depth: int, int64: bool) -> np.ndarray:
    """Level of the lowest common ancestor cell of adjacent code pairs."""
    if len(codes) < 2:
        return np.empty(0, dtype=np.int64)
    if int64:
        x = (codes[:-1] ^ codes[1:]).astype(np.int64)
        bl = _bit_length_u64(x)
        return depth - ((bl + 1) >> 1)
    out = []
    for a, b in zip(codes[:-1].tolist(), codes[1:].tolist()):
        bl = (int(a) ^ int(b)).bit_length()
        out.append(depth - ((bl + 1) >> 1))
    return np.array(out, dtype=np.int64)


def build_compressed_quadtree_from_codes(zkeys: ZKeys, site_ids: np.ndarray,
                                         codes: np.ndarray) -> CompressedQuadtree:
    """Build from sites already sorted by their depth-L point codes."""
    L = zkeys.depth
    n = len(site_ids)
    if n == 0:
        raise ValueError("empty site set")
    if n == 1:
        k0, k3, ck = zkeys.keys_from_codes([0], [codes[0] * 0])
        return CompressedQuadtree(zkeys, site_ids, codes,
                                  np.array([0], dtype=np.int64), k0, k3, ck)
    lca = _lca_levels(codes, L, zkeys.int64)
    if int(lca.max(initial=0)) >= L:
        raise InvariantViolation("two sites share a maximal-depth cell; deepen the tree")
    lv = np.empty(n, dtype=np.int64)
    lv[0] = lca[0] + 1
    lv[-1] = lca[-1] + 1
    if n > 2:
        lv[1:-1] = np.maximum(lca[:-1], lca[1:]) + 1
    levels = np.concatenate((lv, lca, np.array([0], dtype=np.int64)))
    if zkeys.int64:
        codes_all = np.concatenate((codes, codes[:-1], np.array([0], dtype=np.int64)))
    else:
        codes_all = np.concatenate((codes, codes[:-1], np.array([0], dtype=object)))
    k0, k3, ckey = zkeys.keys_from_codes(levels, codes_all)
    ckey_u, idx = np.unique(ckey, return_index=True)
    return CompressedQuadtree(zkeys, site_ids, codes,
                              levels[idx], k0[idx], k3[idx], ckey_u)


def linearize(tree: CompressedQuadtree) -> list[GridCell]:
    """The linearized quadtree: cells in increasing Z-order (nodes are
    already stored that way; this materializes the cell list)."""
    return tree.cells()


def choose_depth(xs: np.ndarray, ys: np.ndarray, min_radius: float = 1.0) -> int:
    """Smallest supported padding depth separating all sites and reaching
    the neighborhood level of the smallest radius."""
    need_r = 0
    if 0 < min_radius < 1.0:
        need_r = max(0, -math.floor(math.log2(min_radius)))
    L = max(26, need_r)
    while True:
        zk = ZKeys(L)
        codes = zk.point_codes(xs, ys)
        sc = np.sort(codes, kind="stable")
        if len(sc) < 2 or (sc[1:] != sc[:-1]).all():
            return L
        if L > 1200:
            raise InvariantViolation("cannot separate sites; duplicate coordinates?")
        L *= 2


def build_compressed_quadtree(xs, ys, depth: Optional[int] = None,
                              min_radius: float = 1.0):
    """Compressed quadtree over points strictly inside the unit square.

    Returns (tree, zkeys); the node order is the linearization.
    """
    xs = np.asarray(xs, dtype=np.float64)
    ys = np.asarray(ys, dtype=np.float64)
    if len(xs) == 0:
        raise ValueError("empty site set")
    if ((xs <= 0) | (xs >= 1) | (ys <= 0) | (ys >= 1)).any():
        raise ValueError("sites must lie strictly inside the unit square")
    if depth is None:
        depth = choose_depth(xs, ys, min_radius)
    zk = ZKeys(depth)
    codes = zk.point_codes(xs, ys)
    order = np.argsort(codes, kind="stable").astype(np.int64)
    tree = build_compressed_quadtree_from_codes(zk, order, codes[order])
    return tree, zk


# ---------------------------------------------------------------------------
# predecessor queries and neighborhoods


def _locate(tree: CompressedQuadtree, k0q, k3q, ckq) -> tuple[int, int]:
    """(node index, kind): kind 2 = node holds exactly the query's sites,
    1 = disjoint predecessor (query empty), 0 = no predecessor."""
    idx = int(np.searchsorted(tree.ckey, ckq, side="right")) - 1
    if idx >= 0 and tree.k0[idx] >= k0q and tree.k3[idx] <= k3q:
        return idx, 2
    succ = idx + 1
    if succ < len(tree) and tree.is_leaf[succ] and \
            tree.k0[succ] <= k0q and tree.k3[succ] >= k3q:
        code = tree.point_codes[int(tree.site_lo[succ])]
        if k0q <= code <= k3q:
            return succ, 2
    return (idx, 1) if idx >= 0 else (idx, 0)


def z_predecessor(tree: CompressedQuadtree, cell: GridCell) -> Optional[GridCell]:
    """Cell tau of the linearization with: tau disjoint from the query
    implies the query holds no site, else the query's sites equal tau's.

    This is the Z-order predecessor, extended by one successor probe for
    queries strictly inside a leaf cell (where the plain predecessor is
    disjoint although the leaf's site may lie inside the query).
    """
    k0q, k3q, ckq = tree.zkeys.cell_key(cell)
    idx, kind = _locate(tree, k0q, k3q, ckq)
    if idx < 0:
        return None
    return tree.cell(idx)


def cell_sites(tree: CompressedQuadtree, cell: GridCell) -> np.ndarray:
    """Site ids inside the query cell, via the predecessor contract."""
    k0q, k3q, ckq = tree.zkeys.cell_key(cell)
    idx, kind = _locate(tree, k0q, k3q, ckq)
    if kind != 2:
        return np.empty(0, dtype=np.int64)
    return tree.sites_in_node(idx)


def neighborhood(x: float, y: float, r: float, depth: int) -> list[GridCell]:
    """All cells of side 2^floor(log2 r) intersecting the disk at (x, y).

    At most 25 cells: the cell side exceeds r/2, and a 5x5 block of such
    cells covers the disk wherever it sits.
    """
    if r <= 0:
        raise ValueError("radius must be positive")
    level = max(0, -math.floor(math.log2(r))) if r < 1.0 else 0
    level = min(level, depth)
    side = 2.0 ** (-level)
    nmax = (1 << level) - 1
    ix0 = max(0, int(math.floor((x - r) / side)))
    ix1 = min(nmax, int(math.floor((x + r) / side)))
    iy0 = max(0, int(math.floor((y - r) / side)))
    iy1 = min(nmax, int(math.floor((y + r) / side)))
    out = []
    for ix in range(ix0, ix1 + 1):
        cx = min(max(x, ix * side), (ix + 1) * side)
        ddx = cx - x
        for iy in range(iy0, iy1 + 1):
            cy = min(max(y, iy * side), (iy + 1) * side)
            ddy = cy - y
            if ddx * ddx + ddy * ddy <= r * r:
                out.append(GridCell(level, ix, iy))
    if len(out) > 25:
        raise InvariantViolation(f"neighborhood has {len(out)} > 25 cells")
    return out
