"""Filtering S(<=, >=V) by the rank of P relative to a hyperplane."""
# %%
from steinlab.buildings import build_filtration, claim_isomorphism_witnesses
from steinlab.ff_linalg import enumerate_subspaces
from steinlab.poset import check_morse_decomposition

q, n = 2, 4
v = enumerate_subspaces(n, q, 2)[0]
st = build_filtration(n, q, v)
print("V =", v.basis, " L =", st.line.basis, " H =", st.hyperplane.basis)
print("base (P inside H):", len(st.base), "elements")
for i, layer in sorted(st.layers.items()):
    print(f"layer {i}: {len(layer)} pairs with rank(P) = {n - v.rank - 1 - i}")

# %%
# Layer -1 holds the pairs with Q = V.  Without it the stages would miss them.
print("missed by layers 0..last:", len(st.literal_gap()))

# %%
# Each stage is obtained from the previous one by adding an antichain whose
# links are spherical of the right dimension.
d = n - v.rank - 1
for j in range(-1, st.last + 1):
    xj = st.x.induced(st.stage(j))
    rep = check_morse_decomposition(xj, st.stage(j - 1), d)
    print(f"stage {j}: hypotheses {rep.hypotheses_hold}, {d}-spherical {rep.whole_spherical}")

# %%
wit = claim_isomorphism_witnesses(st)
print("isomorphisms checked:", 1 + len(wit.upper_isos) + len(wit.lower_isos), " all valid:", wit.ok)
