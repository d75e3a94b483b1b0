"""Forgetting P: the map (P, Q) -> Q on top integral homology."""
# %%
from steinlab.buildings import build_S, build_T, forgetful_map
from steinlab.homology import boundaries, induced_chain_map, surjective_on_homology
from steinlab.poset import fiber, height, opposite, order_complex

q, n = 3, 2
s, t = build_S(n, q), build_T(n, q)
f = forgetful_map(s, t)
print("monotone into the opposite Tits poset:", f.is_monotone())

# %%
# Fibers below V are exactly the pairs whose Q contains V.
top = opposite(t.poset)
v = t.elements[0]
print("fiber size:", len(fiber(f, v)), " height of V:", height(top, v))

# %%
# Push the source cycles forward and compare with the target cycle lattice.
scc = boundaries(order_complex(s.poset))
tcc = boundaries(order_complex(top))
res = surjective_on_homology(induced_chain_map(f, scc, tcc), scc, tcc, n - 2)
print(f"source cycles {res.source_cycle_rank}, target cycles {res.target_cycle_rank}, "
      f"image rank {res.image_rank}, cokernel {res.cokernel or 'trivial'}")
print("surjective over Z:", res.surjective)
