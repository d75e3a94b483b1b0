"""Split pairs (P, Q) and their restrictions."""
# %%
from steinlab.buildings import build_S, restrict_S, split_size
from steinlab.ff_linalg import enumerate_subspaces
from steinlab.homology import complex_homology, is_spherical
from steinlab.poset import order_complex

# A split pair is (P, Q) with P + Q the whole space and P, Q meeting in 0.
# (P, Q) < (P', Q') when P grows strictly and Q shrinks strictly.
q, n = 2, 3
s = build_S(n, q)
print(len(s), "split pairs; closed form gives", split_size(n, q))

h = complex_homology(order_complex(s.poset))
print("top rank:", h.betti[n - 2], "nonzero degrees:", h.nonzero_degrees())

# %%
# Pairs with Q containing a rank-k subspace V form an (n-k-1)-sphere.
for k in (1, 2):
    v = enumerate_subspaces(n, q, k)[0]
    r = restrict_S(s, v_bound=v)
    print(f"k={k}: {len(r)} pairs, {n - k - 1}-spherical:", is_spherical(order_complex(r), n - k - 1))

# %%
# The dual restriction: P inside a subspace K of corank k.
for k in (1, 2):
    kk = enumerate_subspaces(n, q, n - k)[0]
    r = restrict_S(s, k_bound=kk)
    print(f"corank {k}: {len(r)} pairs, {n - k - 1}-spherical:", is_spherical(order_complex(r), n - k - 1))
