"""Reduced simplicial homology over the integers.

Matrices are sparse and column-major with arbitrary-precision entries.
Invariant factors come from sparse elimination on unit pivots (Markowitz-style
choice of the shortest column and shortest row) followed by a dense Smith
normal form of whatever non-unit block survives.  For the order complexes of
buildings that block is empty in practice, so the dense step only matters for
small torsion examples.
"""
from __future__ import annotations

import heapq
import math
import random
from dataclasses import dataclass, field
from typing import Iterable, Sequence

from .complexes import SimplicialComplex

MODULAR_CHECK = True


class SparseIntMatrix:
    """Integer matrix stored as a list of ``{row: value}`` column dicts."""

    def __init__(self, rows: int, cols: int, columns: Sequence[dict] | None = None):
        self.rows = rows
        self.cols = cols
        if columns is None:
            columns = [{} for _ in range(cols)]
        if len(columns) != cols:
            raise ValueError("column count mismatch")
        self.columns = [{r: v for r, v in c.items() if v} for c in columns]

    @classmethod
    def from_triplets(cls, rows: int, cols: int, triplets: Iterable[tuple[int, int, int]]):
        columns = [{} for _ in range(cols)]
        for r, c, v in triplets:
            if not (0 <= r < rows and 0 <= c < cols):
                raise IndexError(f"entry ({r}, {c}) outside {rows}x{cols}")
            if r in columns[c]:
                raise ValueError(f"duplicate entry at ({r}, {c})")
            columns[c][r] = int(v)
        return cls(rows, cols, columns)

    @classmethod
    def from_dense(cls, dense: Sequence[Sequence[int]], cols: int | None = None):
        rows = len(dense)
        if cols is None:
            cols = len(dense[0]) if rows else 0
        columns = [{r: int(dense[r][c]) for r in range(rows) if dense[r][c]}
                   for c in range(cols)]
        return cls(rows, cols, columns)

    @classmethod
    def identity(cls, n: int):
        return cls(n, n, [{i: 1} for i in range(n)])

    def triplets(self) -> list[tuple[int, int, int]]:
        return sorted((r, c, v) for c, col in enumerate(self.columns) for r, v in col.items())

    @property
    def nnz(self) -> int:
        return sum(len(c) for c in self.columns)

    def to_dense(self) -> list[list[int]]:
        out = [[0] * self.cols for _ in range(self.rows)]
        for c, col in enumerate(self.columns):
            for r, v in col.items():
                out[r][c] = v
        return out

    def transpose(self) -> "SparseIntMatrix":
        cols = [{} for _ in range(self.rows)]
        for c, col in enumerate(self.columns):
            for r, v in col.items():
                cols[r][c] = v
        return SparseIntMatrix(self.cols, self.rows, cols)

    def __matmul__(self, other: "SparseIntMatrix") -> "SparseIntMatrix":
        if self.cols != other.rows:
            raise ValueError(f"shape mismatch {self.rows}x{self.cols} @ {other.rows}x{other.cols}")
        out = []
        for ocol in other.columns:
            acc: dict = {}
            for k, w in ocol.items():
                for r, v in self.columns[k].items():
                    acc[r] = acc.get(r, 0) + v * w
            out.append(acc)
        return SparseIntMatrix(self.rows, other.cols, out)

    def apply(self, vec: dict) -> dict:
        acc: dict = {}
        for k, w in vec.items():
            for r, v in self.columns[k].items():
                acc[r] = acc.get(r, 0) + v * w
        return {r: v for r, v in acc.items() if v}

    def is_zero(self) -> bool:
        return all(not c for c in self.columns)

    def __eq__(self, other):
        if not isinstance(other, SparseIntMatrix):
            return NotImplemented
        return (self.rows, self.cols, self.columns) == (other.rows, other.cols, other.columns)

    def __repr__(self):
        return f"SparseIntMatrix({self.rows}x{self.cols}, nnz={self.nnz})"


def format_matrix(m: SparseIntMatrix) -> str:
    trip = m.triplets()
    lines = [f"{m.rows} {m.cols} {len(trip)}"] + [f"{r} {c} {v}" for r, c, v in trip]
    return "\n".join(lines) + "\n"


def parse_matrix(text: str) -> SparseIntMatrix:
    lines = [ln for ln in text.strip().splitlines() if ln.strip()]
    rows, cols, nnz = map(int, lines[0].split())
    trip = [tuple(map(int, ln.split())) for ln in lines[1:]]
    if len(trip) != nnz:
        raise ValueError(f"header promises {nnz} entries, found {len(trip)}")
    return SparseIntMatrix.from_triplets(rows, cols, trip)


# ---------------------------------------------------------------------------
# Smith normal form


def _dense_snf_diagonal(a: list[list[int]]) -> list[int]:
    """Nonzero diagonal of a (not yet normalized) Smith form of a dense matrix."""
    a = [row[:] for row in a]
    m = len(a)
    n = len(a[0]) if m else 0
    diag = []
    t = 0
    while t < m and t < n:
        entries = [(abs(a[i][j]), i, j) for i in range(t, m) for j in range(t, n) if a[i][j]]
        if not entries:
            break
        _, i, j = min(entries)
        a[t], a[i] = a[i], a[t]
        for row in a:
            row[t], row[j] = row[j], row[t]
        while True:
            p = a[t][t]
            done = True
            for i in range(t + 1, m):
                if a[i][t]:
                    f = a[i][t] // p
                    if f:
                        a[i] = [x - f * y for x, y in zip(a[i], a[t])]
                    if a[i][t]:
                        done = False
            for j in range(t + 1, n):
                if a[t][j]:
                    f = a[t][j] // p
                    if f:
                        for row in a:
                            row[j] -= f * row[t]
                    if a[t][j]:
                        done = False
            if done:
                bad = next(((i, j) for i in range(t + 1, m) for j in range(t + 1, n)
                            if a[i][j] % p), None)
                if bad is None:
                    break
                a[t] = [x + y for x, y in zip(a[t], a[bad[0]])]
                continue
            # move the smallest remaining entry of row/column t to the pivot
            cand = [(abs(a[i][t]), i, t) for i in range(t, m) if a[i][t]]
            cand += [(abs(a[t][j]), t, j) for j in range(t, n) if a[t][j]]
            _, i, j = min(cand)
            a[t], a[i] = a[i], a[t]
            for row in a:
                row[t], row[j] = row[j], row[t]
        diag.append(abs(a[t][t]))
        t += 1
    return diag


def _normalize_factors(diag: list[int]) -> list[int]:
    d = sorted(x for x in diag if x)
    for i in range(len(d)):
        for j in range(i + 1, len(d)):
            g = math.gcd(d[i], d[j])
            if g != d[i]:
                d[i], d[j] = g, d[i] * d[j] // g
    return sorted(d)


def _sparse_unit_elimination(m: SparseIntMatrix):
    """Eliminate unit pivots in place on a row-major copy.

    Returns ``(count, rows)`` where ``count`` is the number of unit pivots
    removed and ``rows`` is the remaining block as ``{row: {col: value}}``.
    """
    rows: dict = {}
    cols: dict = {}
    for c, col in enumerate(m.columns):
        if col:
            cols[c] = set(col)
            for r, v in col.items():
                rows.setdefault(r, {})[c] = v
    count = 0
    while True:
        heap = [(len(rs), c) for c, rs in cols.items()]
        heapq.heapify(heap)
        deferred = False
        progress = False
        while heap:
            ln, c = heapq.heappop(heap)
            rs = cols.get(c)
            if rs is None:
                continue
            if len(rs) != ln:
                heapq.heappush(heap, (len(rs), c))
                continue
            if not rs:
                del cols[c]
                continue
            best = None
            for r in rs:
                if abs(rows[r][c]) == 1 and (best is None or len(rows[r]) < len(rows[best])):
                    best = r
            if best is None:
                deferred = True
                continue
            prow = rows.pop(best)
            v = prow[c]
            for r2 in list(rs):
                if r2 == best:
                    continue
                row2 = rows[r2]
                f = row2[c] * v
                for c3, x in prow.items():
                    y = row2.get(c3, 0) - f * x
                    if y:
                        if c3 not in row2:
                            cols[c3].add(r2)
                        row2[c3] = y
                    else:
                        if c3 in row2:
                            del row2[c3]
                            cols[c3].discard(r2)
                if not row2:
                    del rows[r2]
            for c3 in prow:
                cols[c3].discard(best)
                if c3 != c and c3 in cols:
                    heapq.heappush(heap, (len(cols[c3]), c3))
            del cols[c]
            count += 1
            progress = True
        if not deferred or not progress:
            break
    return count, rows


def smith_normal_form(m: SparseIntMatrix) -> list[int]:
    """Nonzero invariant factors d_1 | d_2 | ... of ``m``."""
    units, rest = _sparse_unit_elimination(m)
    factors = [1] * units
    if rest:
        rkeys = sorted(rest)
        ckeys = sorted({c for row in rest.values() for c in row})
        cpos = {c: j for j, c in enumerate(ckeys)}
        dense = [[0] * len(ckeys) for _ in rkeys]
        for i, r in enumerate(rkeys):
            for c, v in rest[r].items():
                dense[i][cpos[c]] = v
        factors += _normalize_factors(_dense_snf_diagonal(dense))
    return _normalize_factors(factors)


def rank_mod_p(m: SparseIntMatrix, p: int) -> int:
    """Rank over F_p by sparse elimination."""
    pivots: dict = {}  # leading row -> reduced column
    rank = 0
    for col in m.columns:
        v = {r: x % p for r, x in col.items() if x % p}
        while v:
            low = max(v)
            other = pivots.get(low)
            if other is None:
                inv = pow(v[low], p - 2, p)
                pivots[low] = {r: x * inv % p for r, x in v.items()}
                rank += 1
                break
            f = v[low]
            for r, x in other.items():
                y = (v.get(r, 0) - f * x) % p
                if y:
                    v[r] = y
                else:
                    v.pop(r, None)
    return rank


def _is_probable_prime(n: int) -> bool:
    if n < 2:
        return False
    for sp in (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37):
        if n % sp == 0:
            return n == sp
    d, s = n - 1, 0
    while d % 2 == 0:
        d //= 2
        s += 1
    for a in (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37):
        x = pow(a, d, n)
        if x in (1, n - 1):
            continue
        for _ in range(s - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


def random_prime(bits: int = 62, rng: random.Random | None = None) -> int:
    rng = rng or random.Random()
    while True:
        c = rng.getrandbits(bits) | (1 << (bits - 1)) | 1
        if _is_probable_prime(c):
            return c


# ---------------------------------------------------------------------------
# Chain complexes


@dataclass
class IntegerChainComplex:
    """Augmented simplicial chain complex.

    ``bases[d]`` lists the d-simplices (``bases[-1] == [()]``) and
    ``boundary[d]`` is the matrix of C_d -> C_{d-1} for d >= 0.
    """

    bases: dict
    boundary: dict

    @property
    def top(self) -> int:
        return max(self.bases)

    def dim(self, d: int) -> int:
        return len(self.bases.get(d, ()))

    def check(self):
        for d in range(1, self.top + 1):
            if not (self.boundary[d - 1] @ self.boundary[d]).is_zero():
                raise ArithmeticError(f"boundary composition nonzero in degree {d}")


def _boundary_matrix(faces: Sequence[tuple], simplices: Sequence[tuple]) -> SparseIntMatrix:
    pos = {s: i for i, s in enumerate(faces)}
    cols = []
    for s in simplices:
        col = {}
        for i in range(len(s)):
            f = s[:i] + s[i + 1:]
            try:
                col[pos[f]] = -1 if i % 2 else 1
            except KeyError:
                raise ValueError(f"face {f} of {s} missing: complex not face-closed") from None
        cols.append(col)
    return SparseIntMatrix(len(faces), len(simplices), cols)


def boundaries(c: SimplicialComplex, check: bool = True) -> IntegerChainComplex:
    bases = {-1: [()]}
    for d, ss in c.simplices.items():
        bases[d] = list(ss)
    boundary = {}
    for d in range(0, c.dimension + 1):
        boundary[d] = _boundary_matrix(bases[d - 1], bases[d])
    cc = IntegerChainComplex(bases, boundary)
    if check:
        cc.check()
    return cc


@dataclass
class HomologySummary:
    """Reduced integral homology: free rank and torsion factors per degree."""

    betti: dict = field(default_factory=dict)
    torsion: dict = field(default_factory=dict)

    def nonzero_degrees(self) -> list[int]:
        return sorted(d for d in set(self.betti) | set(self.torsion)
                      if self.betti.get(d, 0) or self.torsion.get(d))

    def is_free(self) -> bool:
        return not any(self.torsion.values())

    def euler(self) -> int:
        return sum((-1) ** d * b for d, b in self.betti.items())

    def to_lines(self) -> str:
        degs = sorted(set(self.betti) | set(self.torsion))
        out = []
        for d in degs:
            tor = ",".join(map(str, self.torsion.get(d, []))) or "-"
            out.append(f"{d} {self.betti.get(d, 0)} {tor}")
        return "\n".join(out) + ("\n" if out else "")

    @classmethod
    def from_lines(cls, text: str) -> "HomologySummary":
        h = cls()
        for ln in text.strip().splitlines():
            if not ln.strip():
                continue
            d, b, tor = ln.split()
            h.betti[int(d)] = int(b)
            h.torsion[int(d)] = [] if tor == "-" else [int(x) for x in tor.split(",")]
        return h

    def to_dict(self) -> dict:
        return {str(d): {"betti": self.betti.get(d, 0), "torsion": self.torsion.get(d, [])}
                for d in sorted(set(self.betti) | set(self.torsion))}


def homology(cc: IntegerChainComplex, modular_check: bool | None = None,
             prime: int | None = None) -> HomologySummary:
    """Reduced homology of ``cc`` with an Euler characteristic cross-check.

    With ``modular_check`` (default: the module flag ``MODULAR_CHECK``) the
    rank of every boundary matrix is recomputed modulo a random 62-bit prime
    and compared with the rank from the integer elimination.
    """
    if modular_check is None:
        modular_check = MODULAR_CHECK
    top = cc.top
    factors = {d: smith_normal_form(cc.boundary[d]) for d in range(0, top + 1)}
    rank = {d: len(f) for d, f in factors.items()}
    if modular_check:
        p = prime or random_prime(62)
        for d in range(0, top + 1):
            rp = rank_mod_p(cc.boundary[d], p)
            if rp != rank[d]:
                raise ArithmeticError(
                    f"rank of boundary {d}: integer {rank[d]} vs mod-p {rp} (p={p})")
    h = HomologySummary()
    for d in range(-1, top + 1):
        b = cc.dim(d) - rank.get(d, 0) - rank.get(d + 1, 0)
        h.betti[d] = b
        h.torsion[d] = [x for x in factors.get(d + 1, []) if x > 1]
    chi = sum((-1) ** d * cc.dim(d) for d in range(-1, top + 1))
    if h.euler() != chi:
        raise ArithmeticError(f"Euler characteristic mismatch: {h.euler()} vs {chi}")
    return h


def complex_homology(c: SimplicialComplex, modular_check: bool | None = None) -> HomologySummary:
    return homology(boundaries(c), modular_check=modular_check)


def summary_is_spherical(h: HomologySummary, dimension: int, d: int) -> bool:
    """d-spherical: dimension <= d, reduced homology only in degree d and free there."""
    if dimension > d:
        return False
    if not h.is_free():
        return False
    return all(deg == d for deg in h.nonzero_degrees())


def is_spherical(c: SimplicialComplex, d: int, summary: HomologySummary | None = None) -> bool:
    if c.dimension > d:
        return False
    if summary is None:
        summary = complex_homology(c)
    return summary_is_spherical(summary, c.dimension, d)


# ---------------------------------------------------------------------------
# Chain maps and surjectivity


def _perm_sign(seq: Sequence[int]) -> int:
    sign = 1
    seq = list(seq)
    for i in range(len(seq)):
        for j in range(i + 1, len(seq)):
            if seq[i] > seq[j]:
                sign = -sign
    return sign


def induced_chain_map(f, source_cc: IntegerChainComplex | None = None,
                      target_cc: IntegerChainComplex | None = None,
                      check: bool = True) -> dict:
    """Per-degree matrices of the simplicial map induced by a monotone poset map.

    Degree -1 is the identity on the augmentation.  Degenerate image chains
    map to zero.
    """
    from .poset import order_complex

    if not f.is_monotone():
        raise ValueError("poset map is not monotone")
    if source_cc is None:
        source_cc = boundaries(order_complex(f.source))
    if target_cc is None:
        target_cc = boundaries(order_complex(f.target))
    im = f.index_map()
    maps = {-1: SparseIntMatrix.identity(1)}
    for d in range(0, source_cc.top + 1):
        tpos = {s: i for i, s in enumerate(target_cc.bases.get(d, []))}
        cols = []
        for s in source_cc.bases[d]:
            img = [im[v] for v in s]
            if len(set(img)) < len(img):
                cols.append({})
                continue
            cols.append({tpos[tuple(sorted(img))]: _perm_sign(img)})
        maps[d] = SparseIntMatrix(len(tpos), len(cols), cols)
    if check:
        for d in range(0, source_cc.top + 1):
            lhs = maps[d - 1] @ source_cc.boundary[d]
            if d in target_cc.boundary:
                rhs = target_cc.boundary[d] @ maps[d]
            else:
                rhs = SparseIntMatrix(lhs.rows, lhs.cols)
            if lhs != rhs:
                raise ArithmeticError(f"chain map does not commute with boundary in degree {d}")
    return maps


def _xgcd(a: int, b: int):
    x0, x1, y0, y1 = 1, 0, 0, 1
    while b:
        qq, a, b = a // b, b, a % b
        x0, x1 = x1, x0 - qq * x1
        y0, y1 = y1, y0 - qq * y1
    return a, x0, y0


def _comb(a: dict, s: int, b: dict, t: int) -> dict:
    """s*a + t*b for sparse vectors."""
    out = {r: s * v for r, v in a.items()} if s else {}
    if t:
        for r, v in b.items():
            y = out.get(r, 0) + t * v
            if y:
                out[r] = y
            else:
                out.pop(r, None)
    return {r: v for r, v in out.items() if v}


def kernel_basis(m: SparseIntMatrix) -> list[dict]:
    """A Z-basis of the integer kernel of ``m`` as sparse vectors.

    Column reduction with unimodular two-column operations (extended gcd when
    the pivot does not divide), recording the transformation; the recorded
    columns whose reduced image vanishes form a basis of the kernel lattice.
    """
    reduced: list = []
    trans: list = []
    owner: dict = {}  # low row -> column index
    kernel = []
    for j, col in enumerate(m.columns):
        rj = dict(col)
        vj = {j: 1}
        while rj:
            low = max(rj)
            i = owner.get(low)
            if i is None:
                break
            a, b = reduced[i][low], rj[low]
            if b % a == 0:
                f = b // a
                rj = _comb(rj, 1, reduced[i], -f)
                vj = _comb(vj, 1, trans[i], -f)
                continue
            g, s, t = _xgcd(a, b)
            ri, vi = reduced[i], trans[i]
            reduced[i] = _comb(ri, s, rj, t)
            trans[i] = _comb(vi, s, vj, t)
            rj = _comb(rj, a // g, ri, -(b // g))
            vj = _comb(vj, a // g, vi, -(b // g))
        if rj:
            owner[max(rj)] = len(reduced)
            reduced.append(rj)
            trans.append(vj)
        else:
            kernel.append(vj)
    return kernel


@dataclass
class SurjectivityResult:
    surjective: bool
    source_cycle_rank: int
    target_cycle_rank: int
    image_rank: int
    cokernel: list  # invariant factors > 1, then a 0 for each free summand


def surjective_on_homology(f_chain: dict, source_cc: IntegerChainComplex,
                           target_cc: IntegerChainComplex, d: int) -> SurjectivityResult:
    """Decide over Z whether f_*: H_d(source) -> H_d(target) is onto.

    Cycles of the source are pushed forward; together with the target's
    boundaries they span a sublattice of the (saturated) target cycle lattice
    Z_d.  The cokernel is read off from the Smith form of those generators.
    """
    if d not in source_cc.bases or d not in target_cc.bases or d not in f_chain:
        raise ValueError(f"degree {d} missing from the complexes or the chain map")
    fd = f_chain[d]
    if fd.cols != source_cc.dim(d) or fd.rows != target_cc.dim(d):
        raise ValueError("chain map shape does not match the complexes")
    z_source = kernel_basis(source_cc.boundary[d])
    gens = [fd.apply(z) for z in z_source]
    if d + 1 in target_cc.boundary:
        gens += [dict(c) for c in target_cc.boundary[d + 1].columns]
    g = SparseIntMatrix(target_cc.dim(d), len(gens), gens)
    factors = smith_normal_form(g)
    target_rank = target_cc.dim(d) - len(smith_normal_form(target_cc.boundary[d]))
    torsion = [x for x in factors if x > 1]
    free = target_rank - len(factors)
    return SurjectivityResult(
        surjective=free == 0 and not torsion,
        source_cycle_rank=len(z_source),
        target_cycle_rank=target_rank,
        image_rank=len(factors),
        cokernel=torsion + [0] * free,
    )
