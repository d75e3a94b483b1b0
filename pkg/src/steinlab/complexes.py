"""Abstract simplicial complexes stored as sorted vertex tuples per dimension."""
from __future__ import annotations

import itertools
from typing import Iterable


class SimplicialComplex:
    """A finite abstract simplicial complex on vertices ``0..vertex_count-1``.

    ``simplices[d]`` is the sorted list of d-simplices, each a strictly
    increasing tuple of d+1 vertex indices.  The empty simplex is implicit.
    """

    def __init__(self, vertex_count: int, simplices: Iterable[Iterable[int]],
                 close: bool = True):
        self.vertex_count = vertex_count
        faces: dict[int, set] = {}
        for s in simplices:
            t = tuple(sorted(s))
            if not t:
                continue
            if len(set(t)) != len(t):
                raise ValueError(f"repeated vertex in simplex {t}")
            if t[0] < 0 or t[-1] >= vertex_count:
                raise ValueError(f"simplex {t} has a vertex out of range")
            faces.setdefault(len(t) - 1, set()).add(t)
        if close:
            top = max(faces, default=-1)
            for d in range(top, 0, -1):
                lower = faces.setdefault(d - 1, set())
                for s in faces.get(d, ()):
                    for i in range(d + 1):
                        lower.add(s[:i] + s[i + 1:])
        else:
            for d, ss in faces.items():
                if d == 0:
                    continue
                lower = faces.get(d - 1, set())
                for s in ss:
                    for i in range(d + 1):
                        if s[:i] + s[i + 1:] not in lower:
                            raise ValueError(f"face of {s} missing: not face-closed")
        self.simplices = {d: sorted(ss) for d, ss in sorted(faces.items()) if ss}

    @property
    def dimension(self) -> int:
        return max(self.simplices, default=-1)

    def count(self, d: int) -> int:
        if d == -1:
            return 1
        return len(self.simplices.get(d, ()))

    def f_vector(self) -> list[int]:
        return [self.count(d) for d in range(self.dimension + 1)]

    def reduced_euler_characteristic(self) -> int:
        return sum((-1) ** d * self.count(d) for d in range(-1, self.dimension + 1))

    def maximal_simplices(self) -> list[tuple]:
        out = []
        for d, ss in self.simplices.items():
            higher = self.simplices.get(d + 1, ())
            covered = set()
            for s in higher:
                for i in range(d + 2):
                    covered.add(s[:i] + s[i + 1:])
            out.extend(s for s in ss if s not in covered)
        return sorted(out)

    def is_pure(self) -> bool:
        d = self.dimension
        return all(len(s) == d + 1 for s in self.maximal_simplices())

    def __eq__(self, other):
        if not isinstance(other, SimplicialComplex):
            return NotImplemented
        return (self.vertex_count == other.vertex_count
                and self.simplices == other.simplices)

    def __repr__(self):
        return (f"SimplicialComplex(vertices={self.vertex_count}, "
                f"f={self.f_vector()})")


def join_complex(k: SimplicialComplex, l: SimplicialComplex) -> SimplicialComplex:
    """Join of two complexes; vertices of ``l`` are shifted past those of ``k``."""
    off = k.vertex_count
    ks = [()] + [s for d in k.simplices for s in k.simplices[d]]
    ls = [()] + [tuple(v + off for v in s) for d in l.simplices for s in l.simplices[d]]
    simplices = (a + b for a, b in itertools.product(ks, ls))
    return SimplicialComplex(k.vertex_count + l.vertex_count, simplices, close=False)


def format_complex(c: SimplicialComplex) -> str:
    lines = [f"dim {c.dimension} vertices {c.vertex_count}"]
    lines += [" ".join(map(str, s)) for s in c.maximal_simplices()]
    return "\n".join(lines) + "\n"


def parse_complex(text: str) -> SimplicialComplex:
    lines = [ln for ln in text.strip().splitlines() if ln.strip()]
    head = lines[0].split()
    if head[0] != "dim" or head[2] != "vertices":
        raise ValueError(f"bad complex header: {lines[0]!r}")
    dim, nv = int(head[1]), int(head[3])
    c = SimplicialComplex(nv, [tuple(map(int, ln.split())) for ln in lines[1:]])
    if c.dimension != dim:
        raise ValueError(f"header says dim {dim}, simplices give {c.dimension}")
    return c
