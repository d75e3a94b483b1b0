"""Finite posets: order complexes, links, heights, poset maps and fibers.

The strict order is stored transitively closed as two lists of bitmasks,
``up[i]`` (elements strictly above ``i``) and ``down[i]`` (strictly below).
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Hashable, Iterable, Sequence

from .complexes import SimplicialComplex


def _bits(mask: int):
    while mask:
        low = mask & -mask
        yield low.bit_length() - 1
        mask ^= low


class FinitePoset:
    """A finite strict partial order on a list of hashable labels."""

    def __init__(self, elements: Sequence[Hashable], up: Sequence[int],
                 check: bool = True):
        self.elements = tuple(elements)
        self.index = {e: i for i, e in enumerate(self.elements)}
        if len(self.index) != len(self.elements):
            raise ValueError("poset labels must be distinct")
        self.up = list(up)
        self.down = [0] * len(self.elements)
        for i, m in enumerate(self.up):
            for j in _bits(m):
                self.down[j] |= 1 << i
        if check:
            self._check()

    def _check(self):
        for i, m in enumerate(self.up):
            if m >> i & 1:
                raise ValueError(f"order is not irreflexive at {self.elements[i]!r}")
            for j in _bits(m):
                if self.up[j] & ~m:
                    raise ValueError("order relation is not transitively closed")

    @classmethod
    def from_relation(cls, elements: Sequence[Hashable],
                      lt: Callable[[Hashable, Hashable], bool]) -> "FinitePoset":
        """Build from a strict-order predicate ``lt(a, b)`` meaning a < b."""
        els = list(elements)
        up = [0] * len(els)
        for i, a in enumerate(els):
            m = 0
            for j, b in enumerate(els):
                if i != j and lt(a, b):
                    m |= 1 << j
            up[i] = m
        return cls(els, up)

    @classmethod
    def from_covers(cls, elements: Sequence[Hashable],
                    pairs: Iterable[tuple[int, int]]) -> "FinitePoset":
        """Build from index pairs ``(a, b)`` meaning a < b; closes transitively."""
        n = len(elements)
        succ = [0] * n
        for a, b in pairs:
            succ[a] |= 1 << b
        up = [0] * n
        state = [0] * n  # 0 new, 1 in progress, 2 done

        def visit(i):
            stack = [(i, iter(list(_bits(succ[i]))))]
            state[i] = 1
            while stack:
                v, it = stack[-1]
                nxt = next(it, None)
                if nxt is None:
                    stack.pop()
                    m = succ[v]
                    for w in _bits(succ[v]):
                        m |= up[w]
                    up[v] = m
                    state[v] = 2
                elif state[nxt] == 1:
                    raise ValueError("relation has a cycle")
                elif state[nxt] == 0:
                    state[nxt] = 1
                    stack.append((nxt, iter(list(_bits(succ[nxt])))))

        for i in range(n):
            if state[i] == 0:
                visit(i)
        return cls(elements, up)

    def __len__(self):
        return len(self.elements)

    def __contains__(self, a):
        return a in self.index

    def __iter__(self):
        return iter(self.elements)

    def __repr__(self):
        return f"FinitePoset({len(self)} elements, {self.relation_count()} relations)"

    def _idx(self, a) -> int:
        try:
            return self.index[a]
        except KeyError:
            raise KeyError(f"unknown poset element {a!r}") from None

    def lt(self, a, b) -> bool:
        return bool(self.up[self._idx(a)] >> self._idx(b) & 1)

    def le(self, a, b) -> bool:
        return a == b or self.lt(a, b)

    def comparable(self, a, b) -> bool:
        return self.lt(a, b) or self.lt(b, a)

    def relation_count(self) -> int:
        return sum(m.bit_count() for m in self.up)

    def covering_pairs(self) -> list[tuple[int, int]]:
        out = []
        for i, m in enumerate(self.up):
            above = 0
            for j in _bits(m):
                above |= self.up[j]
            out.extend((i, j) for j in _bits(m & ~above))
        return out

    def induced(self, labels: Iterable[Hashable]) -> "FinitePoset":
        """Induced subposet on ``labels``, kept in this poset's element order."""
        keep = sorted({self._idx(a) for a in labels})
        pos = {old: new for new, old in enumerate(keep)}
        keep_mask = 0
        for i in keep:
            keep_mask |= 1 << i
        up = []
        for i in keep:
            m = 0
            for j in _bits(self.up[i] & keep_mask):
                m |= 1 << pos[j]
            up.append(m)
        return FinitePoset([self.elements[i] for i in keep], up, check=False)

    def is_antichain(self, labels: Iterable[Hashable] | None = None) -> bool:
        idx = range(len(self)) if labels is None else [self._idx(a) for a in labels]
        mask = 0
        for i in idx:
            mask |= 1 << i
        return all(self.up[i] & mask == 0 for i in idx)

    def chains(self, max_size: int | None = None):
        """Yield every nonempty chain as a tuple of indices in increasing order."""
        n = len(self)
        stack = [((i,), self.up[i]) for i in reversed(range(n))]
        while stack:
            chain, ext = stack.pop()
            yield chain
            if max_size is not None and len(chain) >= max_size:
                continue
            for j in sorted(_bits(ext), reverse=True):
                stack.append((chain + (j,), ext & self.up[j]))

    def heights(self) -> list[int]:
        """Longest strict chain ending at each element (a_0 < ... < a_k = a gives k)."""
        n = len(self)
        h = [-1] * n
        order = sorted(range(n), key=lambda i: self.down[i].bit_count())
        for i in order:
            below = [h[j] for j in _bits(self.down[i])]
            h[i] = 1 + max(below) if below else 0
        return h


def order_complex(p: FinitePoset) -> SimplicialComplex:
    """Chains of ``p`` as simplices on the element indices."""
    return SimplicialComplex(len(p), (tuple(sorted(c)) for c in p.chains()), close=False)


def opposite(p: FinitePoset) -> FinitePoset:
    return FinitePoset(p.elements, p.down, check=False)


def upper_link(p: FinitePoset, a) -> FinitePoset:
    i = p._idx(a)
    return p.induced(p.elements[j] for j in _bits(p.up[i]))


def lower_link(p: FinitePoset, a) -> FinitePoset:
    i = p._idx(a)
    return p.induced(p.elements[j] for j in _bits(p.down[i]))


def link(p: FinitePoset, a) -> FinitePoset:
    i = p._idx(a)
    return p.induced(p.elements[j] for j in _bits(p.up[i] | p.down[i]))


def height(p: FinitePoset, a) -> int:
    i = p._idx(a)
    return p.heights()[i]


@dataclass
class PosetMap:
    """A monotone map between finite posets; ``assignment`` maps labels to labels."""

    source: FinitePoset
    target: FinitePoset
    assignment: dict
    check: bool = field(default=True, repr=False)

    def __post_init__(self):
        if self.check:
            bad = self.monotonicity_violation()
            if bad is not None:
                raise ValueError(f"map is not monotone: {bad[0]!r} < {bad[1]!r}")

    def __call__(self, a):
        return self.assignment[a]

    def index_map(self) -> list[int]:
        t = self.target
        return [t._idx(self.assignment[a]) for a in self.source.elements]

    def monotonicity_violation(self):
        """First pair a < a' with F(a) not <= F(a'), or None."""
        s = self.source
        im = self.index_map()
        tup = self.target.up
        for i, m in enumerate(s.up):
            fi = im[i]
            for j in _bits(m):
                fj = im[j]
                if fi != fj and not tup[fi] >> fj & 1:
                    return s.elements[i], s.elements[j]
        return None

    def is_monotone(self) -> bool:
        return self.monotonicity_violation() is None


def fiber(f: PosetMap, b) -> FinitePoset:
    """Induced subposet of the source on {a : F(a) <= b}."""
    t = f.target
    bi = t._idx(b)
    below = t.down[bi] | (1 << bi)
    im = f.index_map()
    return f.source.induced(a for a, fa in zip(f.source.elements, im) if below >> fa & 1)


def format_poset(p: FinitePoset) -> str:
    lines = [f"elements {len(p)}"] + [f"{a} < {b}" for a, b in p.covering_pairs()]
    return "\n".join(lines) + "\n"


def parse_poset(text: str) -> FinitePoset:
    lines = [ln for ln in text.strip().splitlines() if ln.strip()]
    head = lines[0].split()
    if head[0] != "elements":
        raise ValueError(f"bad poset header: {lines[0]!r}")
    n = int(head[1])
    pairs = []
    for ln in lines[1:]:
        a, op, b = ln.split()
        if op != "<":
            raise ValueError(f"bad relation line: {ln!r}")
        pairs.append((int(a), int(b)))
    return FinitePoset.from_covers(list(range(n)), pairs)


# ---------------------------------------------------------------------------
# Sphericity-based checks.  ``homology_oracle`` maps a SimplicialComplex to a
# HomologySummary; the default is the exact integral computation.


def _default_oracle():
    from .homology import complex_homology
    return complex_homology


def _spherical(c: SimplicialComplex, d: int, oracle) -> bool:
    from .homology import summary_is_spherical
    return summary_is_spherical(oracle(c), c.dimension, d)


@dataclass
class MorseReport:
    """Outcome of checking the antichain-attachment decomposition of a poset."""

    target_dim: int
    antichain: bool
    base_spherical: bool
    link_failures: list = field(default_factory=list)
    whole_spherical: bool = False

    @property
    def hypotheses_hold(self) -> bool:
        return self.antichain and self.base_spherical and not self.link_failures

    @property
    def passed(self) -> bool:
        return self.hypotheses_hold and self.whole_spherical


def check_morse_decomposition(x: FinitePoset, y_elements: Iterable, n: int,
                              homology_oracle=None) -> MorseReport:
    """Check that X = Y plus an antichain V, with |Y| and links of V suitably spherical.

    Hypotheses: V = X - Y is an antichain, |Y| is n-spherical and every
    |Link(v) & Y| is (n-1)-spherical.  The report also records whether |X|
    itself is n-spherical, computed independently of the hypotheses.
    """
    oracle = homology_oracle or _default_oracle()
    y = set(y_elements)
    for a in y:
        x._idx(a)
    v = [a for a in x.elements if a not in y]
    rep = MorseReport(target_dim=n, antichain=x.is_antichain(v),
                      base_spherical=_spherical(order_complex(x.induced(y)), n, oracle))
    for a in v:
        lk = link(x, a)
        sub = lk.induced(b for b in lk.elements if b in y)
        if not _spherical(order_complex(sub), n - 1, oracle):
            rep.link_failures.append(a)
    rep.whole_spherical = _spherical(order_complex(x), n, oracle)
    return rep


def chain_link(p: FinitePoset, chain: Sequence[int]) -> FinitePoset:
    """Elements outside ``chain`` (indices) comparable with every member of it."""
    mask = (1 << len(p)) - 1
    for i in chain:
        mask &= p.up[i] | p.down[i]
    return p.induced(p.elements[j] for j in _bits(mask))


def is_cohen_macaulay(p: FinitePoset, d: int, homology_oracle=None):
    """Homological Cohen-Macaulay test of dimension ``d`` over the integers.

    Returns ``(ok, witness)``; ``witness`` is ``None`` on success, otherwise
    the offending chain as a tuple of labels (``()`` for the whole complex).
    """
    oracle = homology_oracle or _default_oracle()
    oc = order_complex(p)
    if oc.dimension != d or not oc.is_pure():
        bad = next((s for s in oc.maximal_simplices() if len(s) != d + 1), ())
        return False, tuple(p.elements[i] for i in bad)
    if not _spherical(oc, d, oracle):
        return False, ()
    for c in p.chains(max_size=d + 1):
        lk = chain_link(p, c)
        if not _spherical(order_complex(lk), d - len(c), oracle):
            return False, tuple(p.elements[i] for i in c)
    return True, None
