"""Small worked examples used by the CLI, the demos and the regression tests."""

from __future__ import annotations

import json
from importlib import resources

from . import ratlin as rl
from .quivercat import QuiverRep, QuiverSpec, RepForm, RepMor


def cs2_rep() -> QuiverRep:
    """Rank-3 representation with dims (1, 2, 1) that is not a sum of simples."""
    spec = QuiverSpec("rank", 3)
    c = (rl.mat([[1], [0]]), rl.mat([[0, 1]]))
    V = (rl.mat([[0, 1]]), rl.mat([[1], [0]]))
    return QuiverRep(spec, (1, 2, 1), c, V)


def cs2_form() -> RepForm:
    """Nondegenerate form on cs2_rep whose strict-support sum misses a term."""
    beta = (rl.mat([[1]]), rl.mat([[0, 1], [-1, 0]]), rl.mat([[-1]]))
    return RepForm(cs2_rep(), beta)


def cs2_bundle() -> dict:
    """The shipped JSON bundle for cs2_form."""
    text = resources.files("wittkit").joinpath("data/cs2.json").read_text()
    return json.loads(text)


def ie1_local_form() -> RepForm:
    """Antisymmetric form on a rank-2 unipotent local system on the punctured disc."""
    spec = QuiverSpec.disc()
    N = rl.mat([[0, 1], [0, 0]])
    rep = QuiverRep(spec, (2,), (), (), N)
    return RepForm(rep, (rl.mat([[0, -1], [1, 0]]),))


def ie1_form() -> RepForm:
    """The form above extended across the puncture."""
    spec = QuiverSpec.disc()
    rep = QuiverRep(spec, (2, 1), (rl.mat([[0, 1]]),), (rl.mat([[1], [0]]),))
    return RepForm(rep, (rl.mat([[0, -1], [1, 0]]), rl.mat([[1]])))


def ie1_lagrangian() -> list:
    """The N-stable lagrangian line of ie1_local_form."""
    return [rl.span(rl.mat([[1], [0]]))]


def ie2_sequence() -> tuple[RepMor, RepMor]:
    """A short exact sequence on the first two vertices of the rank-3 quiver.

    Its intermediate extension fails to be exact at vertex 3.
    """
    spec = QuiverSpec("rank", 3)
    a = QuiverRep(spec, (1, 1), (rl.mat([[1]]),), (rl.mat([[0]]),))
    b = QuiverRep(spec, (1, 2), (rl.mat([[1], [0]]),), (rl.mat([[0, 1]]),))
    c = QuiverRep(spec, (0, 1), (rl.zeros(1, 0),), (rl.zeros(0, 1),))
    f = RepMor(a, b, (rl.mat([[1]]), rl.mat([[1], [0]])))
    g = RepMor(b, c, (rl.zeros(0, 1), rl.mat([[0, 1]])))
    return f, g
