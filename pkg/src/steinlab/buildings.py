"""Subspace posets of F_q^n: the Tits poset, the split poset and its restrictions.

Posets can be built inside any subspace ``U`` of the ambient space, so that
split posets of a hyperplane or of a summand appearing in a link are
available in the same coordinates as the ambient ones.
"""
from __future__ import annotations

from dataclasses import dataclass, field

from .ff_linalg import (
    SplitPair,
    Subspace,
    contains,
    enumerate_complements,
    full_space,
    gaussian_binomial,
    intersect,
    subspace_sum,
    subspaces_within,
    zero_subspace,
)
from .poset import FinitePoset, PosetMap, opposite


def _strictly_inside(small: Subspace, big: Subspace) -> bool:
    return small.rank < big.rank and small.mask & ~big.mask == 0


def split_lt(a: SplitPair, b: SplitPair) -> bool:
    """(P,Q) < (P',Q') iff P is strictly inside P' and Q' strictly inside Q."""
    return _strictly_inside(a.p, b.p) and _strictly_inside(b.q_part, a.q_part)


def _poset_by_rank(elements, rank_of, lt) -> FinitePoset:
    n = len(elements)
    ranks = [rank_of(e) for e in elements]
    up = [0] * n
    for i, a in enumerate(elements):
        m = 0
        ra = ranks[i]
        for j, b in enumerate(elements):
            if ranks[j] > ra and lt(a, b):
                m |= 1 << j
        up[i] = m
    return FinitePoset(elements, up, check=False)


@dataclass
class TitsPoset:
    """Proper nonzero subspaces of ``ambient`` ordered by inclusion."""

    ambient: Subspace
    poset: FinitePoset

    @property
    def elements(self):
        return self.poset.elements

    def __len__(self):
        return len(self.poset)


@dataclass
class SplitPoset:
    """Split pairs (P, Q) of proper nonzero subspaces with P + Q = ambient."""

    ambient: Subspace
    poset: FinitePoset

    @property
    def elements(self):
        return self.poset.elements

    def __len__(self):
        return len(self.poset)


def _ambient(n, field, ambient):
    if ambient is None:
        if n < 1:
            raise ValueError("n must be at least 1")
        return full_space(n, field)
    return ambient


def build_T(n: int, field, ambient: Subspace | None = None) -> TitsPoset:
    u = _ambient(n, field, ambient)
    els = [s for s in subspaces_within(u) if 0 < s.rank < u.rank]
    poset = _poset_by_rank(els, lambda s: s.rank, _strictly_inside)
    return TitsPoset(u, poset)


def split_pairs(u: Subspace) -> list[SplitPair]:
    """All split pairs of ``u``, sorted by the canonical order of (P, Q)."""
    subs = subspaces_within(u)
    by_rank: dict[int, list] = {}
    for s in subs:
        by_rank.setdefault(s.rank, []).append(s)
    r = u.rank
    out = []
    for p in subs:
        if not 0 < p.rank < r:
            continue
        for c in by_rank[r - p.rank]:
            if p.mask & c.mask == 1:
                out.append(SplitPair(p, c))
    return out


def build_S(n: int, field, ambient: Subspace | None = None) -> SplitPoset:
    u = _ambient(n, field, ambient)
    els = split_pairs(u)
    poset = _poset_by_rank(els, lambda e: e.p.rank, split_lt)
    return SplitPoset(u, poset)


def restrict_S(s: SplitPoset, k_bound: Subspace | None = None,
               v_bound: Subspace | None = None) -> FinitePoset:
    """Induced subposet of pairs with P inside ``k_bound`` and Q containing ``v_bound``."""
    for b in (k_bound, v_bound):
        if b is not None and (b.q, b.n) != (s.ambient.q, s.ambient.n):
            raise ValueError("bound lives in a different ambient space")

    def keep(e: SplitPair) -> bool:
        if k_bound is not None and not contains(k_bound, e.p):
            return False
        if v_bound is not None and not contains(e.q_part, v_bound):
            return False
        return True

    return s.poset.induced(e for e in s.elements if keep(e))


def forgetful_map(s: SplitPoset, t: TitsPoset) -> PosetMap:
    """(P, Q) -> Q as a monotone map from the split poset to the opposite Tits poset."""
    if s.ambient != t.ambient:
        raise ValueError("split and Tits posets live in different ambient spaces")
    return PosetMap(s.poset, opposite(t.poset), {e: e.q_part for e in s.elements})


def tits_size(n: int, q: int) -> int:
    return sum(gaussian_binomial(n, k, q) for k in range(1, n))


def split_size(n: int, q: int) -> int:
    return sum(gaussian_binomial(n, k, q) * q ** (k * (n - k)) for k in range(1, n))


# ---------------------------------------------------------------------------
# The filtration of S_M(<=, >=V) by the rank of P and position relative to H.


def canonical_line_and_hyperplane(v: Subspace) -> tuple[Subspace, Subspace]:
    """First line L inside ``v`` and first hyperplane H with H + L = ambient."""
    line = subspaces_within(v, 1)[0]
    return line, enumerate_complements(line)[0]


def line_hyperplane_choices(v: Subspace):
    """Every admissible (L, H): L a line of ``v``, H a complement of L."""
    for line in subspaces_within(v, 1):
        for h in enumerate_complements(line):
            yield line, h


@dataclass
class FiltrationStage:
    """Filtration of X = S_M(<=, >=V) for a rank-k subspace V with k >= 2.

    ``base`` holds the pairs with P inside H.  ``layers[i]`` for
    i = -1, ..., n-k-2 holds the pairs with rank(P) = n-k-1-i and P not
    inside H; layer -1 (where Q = V) is needed for the layers to exhaust X.
    ``stage(j)`` is the base together with layers -1..j, so ``stage(-2)`` is
    the base and ``stage(n-k-2)`` is X.
    """

    n: int
    q: int
    v: Subspace
    line: Subspace
    hyperplane: Subspace
    x: FinitePoset
    base: frozenset
    layers: dict = field(default_factory=dict)

    @property
    def k(self) -> int:
        return self.v.rank

    @property
    def last(self) -> int:
        return self.n - self.k - 2

    def stage(self, j: int) -> frozenset:
        out = set(self.base)
        for i in range(-1, j + 1):
            out |= self.layers[i]
        return frozenset(out)

    def literal_gap(self) -> frozenset:
        """Elements of X missed when the layers start at index 0 instead of -1."""
        covered = set(self.base)
        for i in range(0, self.last + 1):
            covered |= self.layers[i]
        return frozenset(e for e in self.x.elements if e not in covered)


def build_filtration(n: int, field, v: Subspace, line: Subspace | None = None,
                     hyperplane: Subspace | None = None,
                     split: SplitPoset | None = None) -> FiltrationStage:
    if not 0 < v.rank < n or v.n != n:
        raise ValueError("V must be a proper nonzero subspace of the ambient space")
    if v.rank < 2:
        raise ValueError("the filtration needs rank(V) >= 2")
    if line is None or hyperplane is None:
        line, hyperplane = canonical_line_and_hyperplane(v)
    if line.rank != 1 or not contains(v, line):
        raise ValueError("L must be a line inside V")
    if hyperplane.rank != n - 1 or line.mask & hyperplane.mask != 1:
        raise ValueError("H must be a hyperplane complementary to L")
    s = split if split is not None else build_S(n, field)
    x = restrict_S(s, v_bound=v)
    k = v.rank
    base = frozenset(e for e in x.elements if contains(hyperplane, e.p))
    layers = {}
    for i in range(-1, n - k - 1):
        r = n - k - 1 - i
        layers[i] = frozenset(e for e in x.elements
                              if e.p.rank == r and not contains(hyperplane, e.p))
    st = FiltrationStage(n, v.q, v, line, hyperplane, x, base, layers)
    if st.stage(st.last) != frozenset(x.elements):
        raise AssertionError("filtration stages do not exhaust X")
    return st


def upper_link_set(x: FinitePoset, a) -> frozenset:
    i = x.index[a]
    return frozenset(x.elements[j] for j in range(len(x)) if x.up[i] >> j & 1)


def lower_link_set(x: FinitePoset, a) -> frozenset:
    i = x.index[a]
    return frozenset(x.elements[j] for j in range(len(x)) if x.down[i] >> j & 1)


def claim3_domain(stage: FiltrationStage, a: SplitPair) -> frozenset:
    """{(P,Q) in X : P inside A & H, Q strictly containing B} for a = (A, B)."""
    ah = intersect(a.p, stage.hyperplane)
    return frozenset(e for e in stage.x.elements
                     if contains(ah, e.p) and _strictly_inside(a.q_part, e.q_part))


@dataclass
class IsoCheck:
    name: str
    element: object
    domain_size: int
    codomain_size: int
    bijective: bool
    order_preserving: bool

    @property
    def ok(self) -> bool:
        return self.bijective and self.order_preserving


def _check_iso(name, element, dom: list, cod: list, fwd, bwd) -> IsoCheck:
    cod_set = set(cod)
    dom_set = set(dom)
    bij = len(dom) == len(cod)
    images = {}
    for a in dom:
        try:
            b = fwd(a)
        except ValueError:
            bij = False
            continue
        if b not in cod_set:
            bij = False
        images[a] = b
    for b in cod:
        try:
            a = bwd(b)
        except ValueError:
            bij = False
            continue
        if a not in dom_set or images.get(a) != b:
            bij = False
    mono = bij
    if bij:
        for a in dom:
            for a2 in dom:
                if split_lt(a, a2) != split_lt(images[a], images[a2]):
                    mono = False
                    break
            if not mono:
                break
    return IsoCheck(name, element, len(dom), len(cod), bij, mono)


@dataclass
class WitnessReport:
    base_iso: IsoCheck
    upper_isos: list
    lower_isos: list
    upper_link_identity: list  # (element, holds)
    lower_link_identity: list

    @property
    def ok(self) -> bool:
        return (self.base_iso.ok
                and all(c.ok for c in self.upper_isos + self.lower_isos)
                and all(h for _, h in self.upper_link_identity + self.lower_link_identity))


def claim_isomorphism_witnesses(stage: FiltrationStage) -> WitnessReport:
    """Construct the filtration's poset isomorphisms and check them element by element.

    * base  <-> S_H(<=, >= H&V)      by (P,Q) -> (P, Q&H),  (Z,W) -> (Z, W+L)
    * Link^>(A,B) <-> S_B(<=, >= V)  by (P,Q) -> (P&B, Q),  (Z,W) -> (Z+A, W)
    * lower set <-> S_A(<= A&H, >=)  by (P,Q) -> (P, Q&A),  (Z,W) -> (Z, W+B)

    Also checks, for every layer element, that the upper link lies inside the
    previous stage and that the lower link meets the previous stage exactly in
    the pairs with P inside A & H.
    """
    h, line, v = stage.hyperplane, stage.line, stage.v

    def pair(p, q):
        return SplitPair(p, q)

    s_h = build_S(0, None, ambient=h)
    hv = intersect(h, v)
    cod = [e for e in s_h.elements if contains(e.q_part, hv)]
    base_iso = _check_iso(
        "base", None, sorted(stage.base, key=_pair_key), cod,
        lambda e: pair(e.p, intersect(e.q_part, h)),
        lambda e: pair(e.p, subspace_sum(e.q_part, line)))

    uppers, lowers, up_id, low_id = [], [], [], []
    cache_sb: dict = {}
    cache_sa: dict = {}
    for i in range(-1, stage.last + 1):
        prev = stage.stage(i - 1)
        for a in sorted(stage.layers[i], key=_pair_key):
            up = upper_link_set(stage.x, a)
            up_id.append((a, up & prev == up))
            b = a.q_part
            if b not in cache_sb:
                if b.rank >= 2:
                    sb = build_S(0, None, ambient=b)
                    cache_sb[b] = [e for e in sb.elements if contains(e.q_part, v)]
                else:
                    cache_sb[b] = []
            uppers.append(_check_iso(
                "upper", a, sorted(up, key=_pair_key), cache_sb[b],
                lambda e, b=b: pair(intersect(e.p, b), e.q_part),
                lambda e, a=a: pair(subspace_sum(e.p, a.p), e.q_part)))

            low = lower_link_set(stage.x, a)
            dom = claim3_domain(stage, a)
            low_id.append((a, low & prev == dom))
            key = (a.p, h)
            if key not in cache_sa:
                ah = intersect(a.p, h)
                if a.p.rank >= 2:
                    sa = build_S(0, None, ambient=a.p)
                    cache_sa[key] = [e for e in sa.elements if contains(ah, e.p)]
                else:
                    cache_sa[key] = []
            lowers.append(_check_iso(
                "lower", a, sorted(dom, key=_pair_key), cache_sa[key],
                lambda e, a=a: pair(e.p, intersect(e.q_part, a.p)),
                lambda e, a=a: pair(e.p, subspace_sum(e.q_part, a.q_part))))
    return WitnessReport(base_iso, uppers, lowers, up_id, low_id)


def _pair_key(e: SplitPair):
    return (e.p.rank, e.p.pivots, e.p.basis, e.q_part.pivots, e.q_part.basis)


def manifest_line(kind: str, q: int, n: int, v: Subspace | None = None,
                  k: Subspace | None = None) -> str:
    """Cache key for a built poset, e.g. ``building S 2 3 V=100,010``."""
    parts = [f"building {kind} {q} {n}"]
    for tag, s in (("V", v), ("K", k)):
        if s is not None:
            rows = ",".join("".join(map(str, r)) for r in s.basis) or "0"
            parts.append(f"{tag}={rows}")
    return " ".join(parts)


__all__ = [
    "TitsPoset", "SplitPoset", "FiltrationStage", "IsoCheck", "WitnessReport",
    "build_T", "build_S", "restrict_S", "forgetful_map", "split_pairs", "split_lt",
    "build_filtration", "claim_isomorphism_witnesses", "canonical_line_and_hyperplane",
    "line_hyperplane_choices", "upper_link_set", "lower_link_set", "claim3_domain",
    "tits_size", "split_size", "manifest_line", "zero_subspace",
]
