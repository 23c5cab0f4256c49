"""Nearby cycles, the maximal extension and gluing on the disc.

A unipotent local system is a nilpotent matrix N.  Both the nearby cycles
and the maximal extension are computed as stabilized kernels and compared
with their closed forms, then the Witt class of the intermediate extension
is rebuilt from Xi and a correction on the puncture.
"""

# %%
import random

from wittkit import catalog
from wittkit import gluecat as gc
from wittkit import qforms as qf
from wittkit import ratlin as rl

a = gc.LocalDatum(3, rl.mat([[0, 1, 0], [0, 0, 1], [0, 0, 0]]))
print("nilpotency index:", gc.nilpotency_index(a))

_, n_psi, _ = gc.psi_kernel(a)
_, n_xi, iso = gc.xi_kernel(a)
print("psi kernel stable at n =", n_psi, "; xi kernel stable at n =", n_xi)
print("kernel model of Xi is isomorphic to the closed form:", iso.is_iso())

# %%
xi = gc.xi_un(a)
print("Xi: psi", xi.psi.dim, "phi", xi.phi)
for name, (f, g) in gc.xi_sequences(a).items():
    print(f"  {name} sequence exact: {gc.is_short_exact(f, g)}")

# %%
# j_! and j_* trade places under duality.
da = gc.dual_local(a)
print("D j_! a == j_* D a:", gc.dual_glue(gc.j_shriek(a)) == gc.j_star(da))

# %%
f = gc.GlueForm.from_repform(catalog.ie1_local_form())
pairing = gc.n_pairing(f)
print("beta(N-, -) gram:", rl.mat_to_json(pairing.gram))
lhs = gc.witt_class(gc.j_midext_form(f))
rhs = gc.add_glue_classes(gc.xi_form(f), gc.i_star_form(pairing))
print("[j_!* beta]              =", lhs)
print("Xi[beta] + i_*[beta N]   =", rhs)

# %%
# Random check of the same identity and of the split/unsplit round trip.
rng = random.Random(0)
ok = 0
for _ in range(20):
    g = gc.GlueForm(gc.LocalDatum(2, rl.mat([[0, rng.randint(-2, 2)], [0, 0]])), rl.mat([[0, 1], [-1, 0]]))
    e = gc.j_midext_form(g)
    ok += gc.witt_class(gc.gluing_unsplit(*gc.gluing_split(e))) == gc.witt_class(e)
print("round trips preserving the class:", ok, "of 20")
print("Phi of Xi is metabolic:", qf.witt_invariants(gc.phi_form(gc.xi_form(f))).is_trivial)
