import itertools
import random

import pytest

from steinlab.buildings import build_S, build_T, forgetful_map, restrict_S
from steinlab.complexes import SimplicialComplex, format_complex, join_complex, parse_complex
from steinlab.ff_linalg import contains, enumerate_subspaces
from steinlab.homology import complex_homology
from steinlab.poset import (
    FinitePoset,
    PosetMap,
    check_morse_decomposition,
    fiber,
    format_poset,
    height,
    is_cohen_macaulay,
    link,
    lower_link,
    opposite,
    order_complex,
    parse_poset,
    upper_link,
)


def chain_poset(labels):
    return FinitePoset.from_covers(labels, [(i, i + 1) for i in range(len(labels) - 1)])


def antichain(labels):
    return FinitePoset.from_covers(labels, [])


def random_poset(rng, size, density=0.35):
    pairs = [(i, j) for i in range(size) for j in range(i + 1, size) if rng.random() < density]
    perm = list(range(size))
    rng.shuffle(perm)
    return FinitePoset.from_covers([f"e{perm[i]}" for i in range(size)], pairs)


def random_complex(rng, nv, nmax):
    simplices = []
    for _ in range(nmax):
        k = rng.randint(1, min(3, nv))
        simplices.append(rng.sample(range(nv), k))
    return SimplicialComplex(nv, simplices)


def test_construction_rejects_bad_orders():
    with pytest.raises(ValueError):
        FinitePoset(["a"], [1])  # a < a
    with pytest.raises(ValueError):
        FinitePoset(["a", "b", "c"], [0b010, 0b100, 0])  # not transitive
    with pytest.raises(ValueError):
        FinitePoset.from_covers(["a", "b"], [(0, 1), (1, 0)])


def test_order_complex_small():
    c = order_complex(antichain("abc"))
    assert c.f_vector() == [3]
    c = order_complex(chain_poset("abc"))
    assert c.f_vector() == [3, 3, 1]
    assert c.maximal_simplices() == [(0, 1, 2)]


def test_order_complex_of_tits_f2_3():
    t = build_T(3, 2)
    c = order_complex(t.poset)
    # incidence count: each of the 7 planes contains 3 lines
    planes = [s for s in t.elements if s.rank == 2]
    lines = [s for s in t.elements if s.rank == 1]
    incidences = sum(contains(p, l) for p in planes for l in lines)
    assert incidences == 21
    assert c.f_vector() == [14, incidences]


def test_opposite_examples():
    a = antichain("xyz")
    assert order_complex(opposite(a)) == order_complex(a)
    ch = chain_poset("ab")
    op = opposite(ch)
    assert op.lt("b", "a") and not op.lt("a", "b")
    assert order_complex(op) == order_complex(ch)


def test_opposite_involution_on_random_posets():
    rng = random.Random(11)
    for _ in range(30):
        p = random_poset(rng, rng.randint(1, 9))
        oo = opposite(opposite(p))
        assert oo.elements == p.elements and oo.up == p.up
        assert order_complex(opposite(p)) == order_complex(p)


def test_links_on_chain():
    p = chain_poset("abc")
    assert len(upper_link(p, "c")) == 0
    assert upper_link(p, "b").elements == ("c",)
    assert lower_link(p, "b").elements == ("a",)
    lk = link(p, "b")
    assert lk.elements == ("a", "c")
    # the induced order keeps a < c, so the link realizes the join point * point
    assert order_complex(lk).f_vector() == [2, 1]
    assert order_complex(upper_link(p, "b")).f_vector() == [1]
    assert order_complex(lower_link(p, "b")).f_vector() == [1]
    with pytest.raises(KeyError):
        link(p, "zz")


def test_upper_link_of_line_in_tits_f2_3():
    t = build_T(3, 2)
    line = enumerate_subspaces(3, 2, 1)[0]
    up = upper_link(t.poset, line)
    assert len(up) == 3  # Gaussian binomial [2,1]_2
    assert up.is_antichain()


def test_link_is_join_of_upper_and_lower():
    rng = random.Random(3)
    for _ in range(25):
        p = random_poset(rng, rng.randint(2, 8), 0.5)
        for a in p.elements:
            lk = order_complex(link(p, a))
            j = join_complex(order_complex(upper_link(p, a)), order_complex(lower_link(p, a)))
            # same homology (the complexes differ only by vertex numbering)
            assert lk.f_vector() == j.f_vector()
            h1, h2 = complex_homology(lk), complex_homology(j)
            assert h1.nonzero_degrees() == h2.nonzero_degrees()
            assert all(h1.betti.get(d, 0) == h2.betti.get(d, 0) for d in h1.nonzero_degrees())


def test_join_examples():
    two = SimplicialComplex(2, [[0], [1]])
    one = SimplicialComplex(1, [[0]])
    empty = SimplicialComplex(0, [])
    square = join_complex(two, two)
    assert square.f_vector() == [4, 4]
    h = complex_homology(square)
    assert h.nonzero_degrees() == [1] and h.betti[1] == 1
    assert join_complex(two, empty).simplices == two.simplices
    cone = join_complex(two, one)
    assert cone.f_vector() == [3, 2]
    assert complex_homology(cone).nonzero_degrees() == []


def test_height_examples():
    p = chain_poset("abc")
    assert height(p, "a") == 0
    assert height(p, "c") == 2
    t = build_T(4, 2)
    top = opposite(t.poset)
    for v in t.elements:
        assert height(top, v) == 4 - v.rank - 1


def test_height_monotone_on_random_posets():
    rng = random.Random(8)
    for _ in range(20):
        p = random_poset(rng, 9)
        hs = p.heights()
        for i, j in itertools.permutations(range(len(p)), 2):
            if p.up[i] >> j & 1:
                assert hs[i] < hs[j]


def test_fiber_examples():
    p = random_poset(random.Random(1), 7, 0.5)
    ident = PosetMap(p, p, {a: a for a in p.elements})
    for b in p.elements:
        down = {a for a in p.elements if p.le(a, b)}
        assert set(fiber(ident, b).elements) == down
    point = antichain(["*"])
    const = PosetMap(p, point, {a: "*" for a in p.elements})
    assert fiber(const, "*").elements == p.elements


def test_fiber_of_forgetful_map():
    s, t = build_S(3, 2), build_T(3, 2)
    f = forgetful_map(s, t)
    for v in t.elements:
        assert set(fiber(f, v).elements) == set(restrict_S(s, v_bound=v).elements)


def test_poset_map_rejects_non_monotone():
    p = chain_poset("ab")
    with pytest.raises(ValueError):
        PosetMap(p, p, {"a": "b", "b": "a"})


def test_morse_two_points_below_apex():
    # X = {y1, y2, v} with v above both; |X| is a path with 2 edges
    x = FinitePoset.from_covers(["y1", "y2", "v"], [(0, 2), (1, 2)])
    rep = check_morse_decomposition(x, ["y1", "y2"], 0)
    assert rep.antichain and rep.base_spherical
    assert rep.link_failures == ["v"]  # 2 points are not (-1)-spherical
    assert not rep.hypotheses_hold
    h = complex_homology(order_complex(x))
    assert h.nonzero_degrees() == []
    assert not rep.whole_spherical  # contractible 1-dim complex is not 0-spherical


def test_morse_vacuous_case():
    x = antichain(["a", "b", "c"])
    rep = check_morse_decomposition(x, x.elements, 0)
    assert rep.hypotheses_hold and rep.passed
    for d in (0, 1):
        x = chain_poset("ab")
        rep = check_morse_decomposition(x, x.elements, d)
        assert rep.antichain and not rep.link_failures
        assert rep.base_spherical == rep.whole_spherical == (d == 1)


def test_cohen_macaulay():
    t = build_T(3, 2)
    ok, wit = is_cohen_macaulay(t.poset, 1)
    assert ok and wit is None
    # a chain with a pendant element is not pure
    p = FinitePoset.from_covers(list("abcd"), [(0, 1), (1, 2)])
    ok, wit = is_cohen_macaulay(p, 2)
    assert not ok and wit == ("d",)
    # a zigzag path is contractible, hence CM (empty wedge of circles)
    z = FinitePoset.from_covers(list("abcd"), [(0, 1), (2, 1), (2, 3)])
    assert is_cohen_macaulay(z, 1) == (True, None)
    # two disjoint edges: pure but not 1-spherical as a whole
    two = FinitePoset.from_covers(list("abcd"), [(0, 1), (2, 3)])
    assert is_cohen_macaulay(two, 1) == (False, ())
    # two triangles sharing the vertex x: the link of x is two disjoint edges
    bow = FinitePoset.from_covers(list("xyzuw"), [(0, 1), (1, 2), (0, 3), (3, 4)])
    assert is_cohen_macaulay(bow, 2) == (False, ("x",))


def test_poset_format_roundtrip():
    p = random_poset(random.Random(2), 8, 0.4)
    q = parse_poset(format_poset(p))
    assert q.up == p.up
    assert format_poset(p).splitlines()[0] == "elements 8"


def test_complex_format_roundtrip():
    c = random_complex(random.Random(4), 6, 6)
    text = format_complex(c)
    assert text.startswith(f"dim {c.dimension} vertices 6")
    assert parse_complex(text) == c


def test_complex_rejects_unclosed_input():
    with pytest.raises(ValueError):
        SimplicialComplex(3, [(0, 1, 2)], close=False)
    with pytest.raises(ValueError):
        SimplicialComplex(2, [(0, 0)])
