"""Intermediate extension is not exact, and does not preserve metabolic forms.

Part one pushes a short exact sequence on the first two vertices of the
rank-3 quiver through j_!* and finds where exactness breaks.  Part two takes
a metabolic form on a Jordan block over the punctured disc and shows that
its extension across the puncture has a nonzero class.
"""

# %%
from wittkit import catalog
from wittkit import quivercat as qc
from wittkit import ratlin as rl
from wittkit import sixfunctors as sf

f, g = catalog.ie2_sequence()
F, G = sf.j_midext_mor(f), sf.j_midext_mor(g)
for name, rep in [("left", F.source), ("middle", F.target), ("right", G.target)]:
    print(f"{name:>6}: dims {rep.dims}")

for i in range(3):
    exact = rl.image(F.maps[i]) == rl.kernel(G.maps[i])
    print(f"vertex {i + 1}: {'exact' if exact else 'NOT exact'}")
print("still injective / surjective:", F.is_mono(), G.is_epi())

# %%
local = catalog.ie1_local_form()
lag = catalog.ie1_lagrangian()
print("N =", rl.mat_to_json(local.rep.N(0)))
print("lagrangian line is isotropic:", qc.is_isotropic_rep(local, lag))
print("class on the open part:", qc.witt_class(local))

# %%
ext = sf.j_midext_form(local)
print("extended dims:", ext.rep.dims)
sub = qc.generated_subrep(ext.rep, lag + [rl.zero(1)])
red = qc.isotropic_reduce_rep(ext, sub)
print("reduced by the extended lagrangian:", red.rep.dims, red.vertex_form(1))
print("class of the extension:", qc.witt_class(ext))
