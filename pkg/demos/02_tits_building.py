"""The Tits building of F_q^n and its top homology."""
# %%
from steinlab.buildings import build_T, tits_size
from steinlab.homology import complex_homology
from steinlab.poset import is_cohen_macaulay, order_complex

# For n = 3 the building is a bipartite graph: points versus lines of the
# projective plane over F_q, joined by incidence.
q, n = 2, 3
t = build_T(n, q)
c = order_complex(t.poset)
print(f"{len(t)} vertices (expected {tits_size(n, q)}), f-vector {c.f_vector()}")

# %%
# Reduced homology sits in degree n-2 only, free of rank q^(n(n-1)/2).
h = complex_homology(c)
print("nonzero degrees:", h.nonzero_degrees(), "rank:", h.betti[n - 2], "free:", h.is_free())

# %%
# Every link of a chain is again spherical of the right dimension.
print("Cohen-Macaulay:", is_cohen_macaulay(t.poset, n - 2))

# %%
for q, n in [(3, 2), (5, 2), (3, 3), (2, 4)]:
    h = complex_homology(order_complex(build_T(n, q).poset))
    print(f"q={q} n={n}: top rank {h.betti[n - 2]} = {q}^{n * (n - 1) // 2}")
