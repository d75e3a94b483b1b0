"""Subspaces of F_q^n: canonical forms, counting, complements."""
# %%
from steinlab.ff_linalg import (
    enumerate_complements,
    enumerate_subspaces,
    format_subspace,
    gaussian_binomial,
    intersect,
    subspace_span,
    subspace_sum,
)

# A subspace is stored by its reduced row echelon basis, so two spanning sets
# of the same space give equal objects.
a = subspace_span([(1, 1, 0), (0, 1, 1)], 3, 2)
b = subspace_span([(1, 0, 1), (1, 1, 0)], 3, 2)
print("same plane:", a == b)
print(format_subspace(a))

# %%
# Counting planes in F_3^4 two ways.
planes = enumerate_subspaces(4, 3, 2)
print(len(planes), "planes; Gaussian binomial says", gaussian_binomial(4, 2, 3))

# %%
# Complements of a rank-k subspace number q^(k(n-k)).
p = planes[0]
comps = enumerate_complements(p)
print(f"{len(comps)} complements of {p.basis} (expected {3 ** (2 * 2)})")

# %%
# Dimension formula for sum and intersection.
c = planes[5]
print(p.rank + c.rank, "=", subspace_sum(p, c).rank + intersect(p, c).rank)
