"""Exact linear algebra over prime fields and canonical subspace enumeration.

Subspaces of F_q^n are stored by their reduced row echelon basis, so two
subspaces are equal exactly when their representations are equal.  Each
subspace also carries a bitmask of its member vectors (vector ``v`` has index
``sum(v[i] * q**i)``), which turns containment and trivial-intersection tests
into integer operations.  That is only sensible at desk scale (q**n small),
which is the only scale this package targets.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Sequence

__all__ = [
    "PrimeField",
    "Subspace",
    "SplitPair",
    "rref",
    "subspace_span",
    "zero_subspace",
    "full_space",
    "contains",
    "intersect",
    "subspace_sum",
    "is_direct_sum",
    "enumerate_subspaces",
    "enumerate_complements",
    "subspaces_within",
    "gaussian_binomial",
    "format_subspace",
    "parse_subspace",
]


def _is_prime(q: int) -> bool:
    if q < 2:
        return False
    i = 2
    while i * i <= q:
        if q % i == 0:
            return False
        i += 1
    return True


@dataclass(frozen=True)
class PrimeField:
    q: int

    def __post_init__(self):
        if not isinstance(self.q, int) or not _is_prime(self.q):
            raise ValueError(f"field modulus must be prime, got {self.q!r}")

    def inv(self, a: int) -> int:
        a %= self.q
        if a == 0:
            raise ZeroDivisionError("zero has no inverse")
        return pow(a, self.q - 2, self.q)


def _as_field(field_or_q) -> PrimeField:
    if isinstance(field_or_q, PrimeField):
        return field_or_q
    return PrimeField(int(field_or_q))


def rref(rows: Sequence[Sequence[int]], q: int, ncols: int | None = None):
    """Reduced row echelon form over F_q.

    Returns ``(basis, rank, pivots)`` where ``basis`` is a tuple of row tuples
    with zero rows removed.  An empty input gives rank 0.
    """
    m = [[x % q for x in r] for r in rows]
    if ncols is None:
        ncols = len(m[0]) if m else 0
    pivots = []
    r = 0
    for c in range(ncols):
        if r == len(m):
            break
        piv = next((i for i in range(r, len(m)) if m[i][c]), None)
        if piv is None:
            continue
        m[r], m[piv] = m[piv], m[r]
        inv = pow(m[r][c], q - 2, q)
        if inv != 1:
            m[r] = [(x * inv) % q for x in m[r]]
        row = m[r]
        for i in range(len(m)):
            if i != r and m[i][c]:
                f = m[i][c]
                m[i] = [(a - f * b) % q for a, b in zip(m[i], row)]
        pivots.append(c)
        r += 1
    basis = tuple(tuple(row) for row in m[:r])
    return basis, r, tuple(pivots)


@dataclass(frozen=True)
class Subspace:
    """A linear subspace of F_q^n in canonical (rref) form."""

    q: int
    n: int
    basis: tuple
    pivots: tuple = field(compare=False)

    @property
    def rank(self) -> int:
        return len(self.basis)

    @property
    def ambient_dim(self) -> int:
        return self.n

    @cached_property
    def mask(self) -> int:
        """Bitmask over all q**n vectors marking the members of this subspace."""
        weights = [self.q**i for i in range(self.n)]
        m = 0
        for v in self.vectors():
            m |= 1 << sum(w * x for w, x in zip(weights, v))
        return m

    def vectors(self):
        """All member vectors, in coefficient-lexicographic order."""
        q = self.q
        out = []
        for coeffs in itertools.product(range(q), repeat=self.rank):
            v = [0] * self.n
            for c, row in zip(coeffs, self.basis):
                if c:
                    for j, x in enumerate(row):
                        v[j] = (v[j] + c * x) % q
            out.append(tuple(v))
        return out

    def __repr__(self):
        rows = ",".join("".join(map(str, r)) for r in self.basis)
        return f"Subspace(q={self.q}, n={self.n}, [{rows}])"

    def __lt__(self, other):
        return _order_key(self) < _order_key(other)


def _order_key(s: Subspace):
    return (s.rank, s.pivots, s.basis)


@dataclass(frozen=True)
class SplitPair:
    """An ordered pair (P, Q) of subspaces meeting only in zero.

    As a vertex of a split poset of ``U`` it also satisfies P + Q = U; that
    part is checked by :meth:`splits`, since U need not be the whole space.
    """

    p: Subspace
    q_part: Subspace

    def __post_init__(self):
        _check_same(self.p, self.q_part)
        if self.p.mask & self.q_part.mask != 1:
            raise ValueError("parts intersect nontrivially")

    def splits(self, u: Subspace | None = None) -> bool:
        if u is None:
            return is_direct_sum(self.p, self.q_part)
        return (self.p.rank + self.q_part.rank == u.rank
                and contains(u, self.p) and contains(u, self.q_part))

    def __repr__(self):
        return f"SplitPair({self.p!r}, {self.q_part!r})"


def _make(basis, pivots, q, n) -> Subspace:
    return Subspace(q, n, basis, pivots)


def subspace_span(vectors: Iterable[Sequence[int]], n: int, field) -> Subspace:
    q = _as_field(field).q
    vecs = [tuple(v) for v in vectors]
    for v in vecs:
        if len(v) != n:
            raise ValueError(f"vector {v} does not have length {n}")
    basis, _, pivots = rref(vecs, q, n)
    return _make(basis, pivots, q, n)


def zero_subspace(n: int, field) -> Subspace:
    return _make((), (), _as_field(field).q, n)


def full_space(n: int, field) -> Subspace:
    q = _as_field(field).q
    basis = tuple(tuple(int(i == j) for j in range(n)) for i in range(n))
    return _make(basis, tuple(range(n)), q, n)


def _check_same(a: Subspace, b: Subspace):
    if a.q != b.q or a.n != b.n:
        raise ValueError(
            f"ambient mismatch: F_{a.q}^{a.n} vs F_{b.q}^{b.n}")


def contains(a: Subspace, b: Subspace) -> bool:
    """True iff ``b`` is a subset of ``a``."""
    _check_same(a, b)
    if b.rank > a.rank:
        return False
    return b.mask & ~a.mask == 0


def subspace_sum(a: Subspace, b: Subspace) -> Subspace:
    _check_same(a, b)
    basis, _, pivots = rref(a.basis + b.basis, a.q, a.n)
    return _make(basis, pivots, a.q, a.n)


def intersect(a: Subspace, b: Subspace) -> Subspace:
    """Intersection via the Zassenhaus construction."""
    _check_same(a, b)
    q, n = a.q, a.n
    rows = [r + r for r in a.basis] + [r + (0,) * n for r in b.basis]
    ech, _, pivots = rref(rows, q, 2 * n)
    inter = [row[n:] for row, p in zip(ech, pivots) if p >= n]
    basis, _, piv = rref(inter, q, n)
    return _make(basis, piv, q, n)


def is_direct_sum(p: Subspace, q_part: Subspace) -> bool:
    _check_same(p, q_part)
    if p.rank + q_part.rank != p.n:
        return False
    return p.mask & q_part.mask == 1


def _rref_patterns(n: int, k: int, q: int):
    for pivots in itertools.combinations(range(n), k):
        piv_set = set(pivots)
        free = [(r, c) for r, pc in enumerate(pivots)
                for c in range(pc + 1, n) if c not in piv_set]
        for vals in itertools.product(range(q), repeat=len(free)):
            rows = [[0] * n for _ in range(k)]
            for r, pc in enumerate(pivots):
                rows[r][pc] = 1
            for (r, c), x in zip(free, vals):
                rows[r][c] = x
            yield tuple(tuple(r) for r in rows), pivots


def enumerate_subspaces(n: int, field, k: int | None = None) -> list[Subspace]:
    """All subspaces of F_q^n (or only those of rank ``k``) in canonical order.

    Order: rank, then pivot-column set (lexicographic), then free entries
    (lexicographic, row-major).
    """
    q = _as_field(field).q
    if k is not None and not 0 <= k <= n:
        raise ValueError(f"rank {k} out of range for n={n}")
    ranks = range(n + 1) if k is None else [k]
    return [_make(b, p, q, n) for kk in ranks for b, p in _rref_patterns(n, kk, q)]


def enumerate_complements(p: Subspace) -> list[Subspace]:
    if p.rank == 0:
        raise ValueError("complements are enumerated for nonzero subspaces only")
    return [c for c in enumerate_subspaces(p.n, p.q, p.n - p.rank)
            if p.mask & c.mask == 1]


def subspaces_within(u: Subspace, k: int | None = None) -> list[Subspace]:
    """Subspaces of ``u`` (as subspaces of the ambient space), canonically sorted."""
    local = enumerate_subspaces(u.rank, u.q, k)
    out = []
    for s in local:
        vecs = []
        for row in s.basis:
            v = [0] * u.n
            for c, urow in zip(row, u.basis):
                if c:
                    for j, x in enumerate(urow):
                        v[j] = (v[j] + c * x) % u.q
            vecs.append(v)
        out.append(subspace_span(vecs, u.n, u.q))
    out.sort(key=_order_key)
    return out


def gaussian_binomial(n: int, k: int, q: int) -> int:
    """Number of rank-k subspaces of F_q^n, by the product formula."""
    if k < 0 or k > n:
        return 0
    num = den = 1
    for i in range(k):
        num *= q ** (n - i) - 1
        den *= q ** (k - i) - 1
    return num // den


def format_subspace(s: Subspace) -> str:
    lines = [f"{s.q} {s.n} {s.rank}"]
    lines += [" ".join(map(str, row)) for row in s.basis]
    return "\n".join(lines) + "\n"


def parse_subspace(text: str) -> Subspace:
    lines = [ln for ln in text.strip().splitlines() if ln.strip()]
    q, n, k = map(int, lines[0].split())
    rows = [tuple(int(x) for x in ln.split()) for ln in lines[1:]]
    if len(rows) != k:
        raise ValueError(f"expected {k} basis rows, got {len(rows)}")
    s = subspace_span(rows, n, q)
    if s.rank != k or s.basis != tuple(rows):
        raise ValueError("basis rows are not in reduced row echelon form")
    return s
