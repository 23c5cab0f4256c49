"""Three ways to split the Witt class of a form on a rank-3 quiver.

The form lives on a (1, 2, 1) representation whose middle vertex carries a
symplectic plane.  The canonical decomposition and the one-stratum-at-a-time
splitting both recover the full class; the strict-support sum drops the
term on the closed point.

Run with ``python demos/01_strict_support.py``.
"""

# %%
import json
from pathlib import Path

from wittkit import qforms as qf
from wittkit import quivercat as qc
from wittkit import sixfunctors as sf

HERE = Path(__file__).parent
f = qc.RepForm.from_json(json.loads((HERE / "data" / "cs2.json").read_text()))
print("dims:", f.rep.dims)
print("relations hold:", qc.validate_form(f) == [])

# %%
# The Witt class, vertex by vertex.
for k, inv in qc.witt_class(f).items():
    print(f"  vertex {k}: {inv}")

# %%
# Reducing by the simple object at the middle vertex leaves <1> + <-1>.
iso = qc.max_isotropic_rep(f)
print("maximal isotropic subobject:", iso.source.dims)
g = qc.isotropic_reduce_rep(f, iso)
print("after reduction:", g.rep.dims, [g.vertex_form(i) for i in range(3)])

# %%
# Canonical terms versus the one-step splitting.
print("canonical:", [(k, qf.witt_invariants(h)) for k, h in sf.canonical_decomposition(f)])
print("cs1:      ", sf.cs1_splitting(f))

# %%
# The strict-support sum keeps only the open term.
for k, inv in sf.strict_support_sum(f):
    print(f"  strict term at {k}: {inv}")
print("agrees with the class:", sf.agrees_with_total(f))

# %%
# Why: restricting twice is not restricting once.
twice = sf.i_midrestrict_form(sf.i_midrestrict_form(f, 2), 3)
once = sf.i_midrestrict_form(f, 3)
print("two steps:", twice.rep.dims, twice.vertex_form(2))
print("one step: ", once.rep.dims)
