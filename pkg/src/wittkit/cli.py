"""Command-line front end.

Reports go to stdout as JSON and a one-line summary goes to stderr.
Exit codes: 0 success, 1 input or validation error, 2 mismatch or disagreement.
"""

from __future__ import annotations

import json
import sys

import click

from . import catalog
from . import gluecat as gc
from . import qforms as qf
from . import quivercat as qc
from . import ratlin as rl
from . import sixfunctors as sf

EXIT_OK, EXIT_INPUT, EXIT_MISMATCH = 0, 1, 2


class InputError(Exception):
    pass


class Mismatch(Exception):
    def __init__(self, message: str, diff: dict):
        super().__init__(message)
        self.diff = diff


def _encode(obj):
    if isinstance(obj, qf.WittInvariant):
        return obj.to_json()
    if isinstance(obj, dict):
        return {str(k): _encode(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_encode(v) for v in obj]
    return obj


def _emit(report, output: str | None = None):
    text = json.dumps(_encode(report), indent=2, sort_keys=True) + "\n"
    if output:
        with open(output, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        click.echo(text, nl=False)


def _say(line: str):
    click.echo(line, err=True)


def _load_json(path: str) -> dict:
    try:
        with open(path, encoding="utf-8") as fh:
            return json.load(fh)
    except json.JSONDecodeError as e:
        raise InputError(f"{path}: invalid JSON at line {e.lineno}, column {e.colno}: {e.msg}") from e
    except OSError as e:
        raise InputError(f"{path}: {e.strerror}") from e


def load_object(path: str):
    """Parse any supported input file into a library object."""
    d = _load_json(path)
    if not isinstance(d, dict):
        raise InputError(f"{path}: top-level JSON value must be an object")
    try:
        if "beta_psi" in d:
            return gc.GlueForm.from_json(d)
        if "phi_dim" in d:
            return gc.GluingDatum.from_json(d)
        if "beta" in d:
            return qc.RepForm.from_json(d)
        if "spec" in d:
            return qc.QuiverRep.from_json(d)
        if "N" in d and "dim" in d:
            return gc.LocalDatum.from_json(d)
    except (KeyError, TypeError, ValueError, ZeroDivisionError) as e:
        raise InputError(f"{path}: {type(e).__name__}: {e}") from e
    raise InputError(f"{path}: unrecognised input (expected a representation, form or gluing datum)")


def _violations(obj) -> list[dict]:
    if isinstance(obj, qc.RepForm):
        return [v.to_json() for v in qc.validate_form(obj)]
    if isinstance(obj, qc.QuiverRep):
        return [v.to_json() for v in qc.validate(obj)]
    return []


def _load_form(path: str) -> qc.RepForm:
    obj = load_object(path)
    if isinstance(obj, gc.GlueForm):
        obj = obj.to_repform()
    if not isinstance(obj, qc.RepForm):
        raise InputError(f"{path}: a form is required")
    bad = _violations(obj)
    if bad:
        raise InputError(f"{path}: invalid form: " + "; ".join(v["relation"] for v in bad))
    if not obj.is_nondegenerate():
        raise InputError(f"{path}: form is degenerate")
    return obj


def _parse_order(order: str | None, spec: qc.QuiverSpec):
    if order is None:
        return None
    try:
        labels = [int(x) for x in order.split(",") if x.strip()]
    except ValueError as e:
        raise InputError(f"bad --order {order!r}") from e
    try:
        qc.check_order(spec, labels)
    except qc.OrderError as e:
        raise InputError(str(e)) from e
    return labels


@click.group()
def cli():
    """Witt classes of forms on quiver representations over Q."""


@cli.command()
@click.argument("path")
def check(path):
    """Validate a representation, form or gluing datum."""
    try:
        obj = load_object(path)
    except InputError as e:
        _emit({"valid": False, "error": str(e)})
        raise
    bad = _violations(obj)
    _emit({"valid": not bad, "violations": bad})
    if bad:
        _say(f"{len(bad)} violation(s)")
        sys.exit(EXIT_INPUT)
    _say("ok")


@cli.command()
@click.argument("path")
@click.option("--mode", type=click.Choice(["canon", "cs1", "strict-support"]), default="canon")
@click.option("--order", default=None, help="comma-separated vertex labels, e.g. 1,2,3")
@click.option("--assert-agree", is_flag=True, help="exit 2 if the strict-support sum disagrees")
@click.option("--output", default=None, help="write the report here instead of stdout")
def decompose(path, mode, order, assert_agree, output):
    """Decompose the Witt class of a form over the strata."""
    f = _load_form(path)
    labels = _parse_order(order, f.spec)
    total = qc.witt_class(f, labels)
    if mode == "canon":
        report = {"mode": mode, "terms": sf.canonical_report(f, labels)}
    elif mode == "cs1":
        report = {"mode": mode, "terms": sf.cs1_report(f, labels)}
    else:
        report = {"mode": mode, **sf.strict_support_report(f)}
    report["total"] = total
    _emit(report, output)
    agree = report.get("agrees_with_total", True)
    _say(f"{mode}: {len(report['terms'])} term(s)" + ("" if agree else "; sum disagrees with the class"))
    if assert_agree and not agree:
        sys.exit(EXIT_MISMATCH)


@cli.command()
@click.argument("path")
@click.option("--functor", required=True,
              type=click.Choice(["p_ishriek", "p_istar", "i_midrestrict", "j_shriek", "j_star", "j_midext"]))
@click.option("--vertex", "k", type=int, required=True,
              help="first closed vertex for restrictions, last open vertex for extensions")
@click.option("--output", default=None)
def apply(path, functor, k, output):
    """Apply a restriction or extension functor to a representation."""
    obj = load_object(path)
    if isinstance(obj, qc.RepForm):
        obj = obj.rep
    if not isinstance(obj, qc.QuiverRep):
        raise InputError(f"{path}: a quiver representation is required")
    bad = _violations(obj)
    if bad:
        raise InputError(f"{path}: invalid representation")
    try:
        i = obj.spec.index(k)
    except (ValueError, KeyError) as e:
        raise InputError(str(e)) from e
    if i >= obj.m:
        raise InputError(f"vertex {k} is outside the representation")
    if functor == "p_ishriek":
        out = sf.p_ishriek(obj, k).source
    elif functor == "p_istar":
        out = sf.p_istar(obj, k).target
    elif functor == "i_midrestrict":
        out = sf.i_midrestrict(obj, k)
    else:
        op = {"j_shriek": sf.j_shriek, "j_star": sf.j_star, "j_midext": sf.j_midext}[functor]
        out = op(qc.restrict_open(obj, i + 1))
    _emit(out.to_json(), output)
    _say(f"{functor}: dims {out.dims}")


# worked examples

def _expect(name: str, expected, actual):
    if expected != actual:
        raise Mismatch(f"{name}: expected {expected}, got {actual}",
                       {"check": name, "expected": _encode(expected), "actual": _encode(actual)})


def _inv(*diag) -> qf.WittInvariant:
    return qf.invariants_of_diagonal(diag)


def _example_cs2() -> tuple[dict, str]:
    f = catalog.cs2_form()
    one, minus = _inv(1), _inv(-1)
    canon = [(k, qf.witt_invariants(g)) for k, g in sf.canonical_decomposition(f)]
    _expect("canonical decomposition", [(1, one), (3, minus)], canon)
    _expect("cs1 splitting", [(1, one), (2, qf.WittInvariant.trivial(-1)), (3, minus)], sf.cs1_splitting(f))
    strict = sf.strict_support_sum(f)
    nontrivial = [(k, v) for k, v in strict if not v.is_trivial]
    _expect("strict-support sum", [(1, one)], nontrivial)
    agrees = sf.agrees_with_total(f)
    _expect("strict-support agreement", False, agrees)
    report = {"class": qc.witt_class(f), "canonical": sf.canonical_report(f),
              "cs1": sf.cs1_report(f), "strict_support": sf.strict_support_report(f)}
    return report, "[β] = [I_X3] − [I_pt]; strict-support sum = [I_X3]: MISMATCH (as in paper)"


def _example_ie1() -> tuple[dict, str]:
    local = catalog.ie1_local_form()
    _expect("lagrangian is isotropic", True, qc.is_isotropic_rep(local, catalog.ie1_lagrangian()))
    f = sf.j_midext_form(local)
    _expect("intermediate extension", catalog.ie1_form().rep, f.rep)
    sub = qc.generated_subrep(f.rep, catalog.ie1_lagrangian() + [rl.zero(1)])
    red = qc.isotropic_reduce_rep(f, sub)
    _expect("reduction dims", (0, 1), red.rep.dims)
    _expect("reduction form", [[1]], [[int(x) for x in row] for row in red.vertex_form(1).gram.tolist()])
    cls = qc.witt_class(f)
    _expect("class at the puncture", _inv(1), cls[1])
    report = {"reduction": red.to_json(), "class": cls, "nontrivial": not cls[1].is_trivial}
    return report, "j_!*β reduces to ⟨1⟩ at Φ; [j_!*β] ≠ 0 although [β] = 0"


def _example_ie2() -> tuple[dict, str]:
    f, g = catalog.ie2_sequence()
    F, G = sf.j_midext_mor(f), sf.j_midext_mor(g)
    _expect("middle row", catalog.cs2_rep(), F.target)
    _expect("dims", [(1, 1, 0), (1, 2, 1), (0, 1, 0)], [F.source.dims, F.target.dims, G.target.dims])
    _expect("left row still injective", True, F.is_mono())
    _expect("right row still surjective", True, G.is_epi())
    failures = [F.source.spec.label(i) for i in range(3)
                if rl.image(F.maps[i]) != rl.kernel(G.maps[i])]
    _expect("middle-exactness failures", [3], failures)
    report = {"left": F.source.to_json(), "middle": F.target.to_json(), "right": G.target.to_json(),
              "not_exact_at": failures}
    return report, "j_!* of the sequence is not exact in the middle; failure at vertex 3 (dims 0 → 1 → 0)"


def _example_glue_ie1() -> tuple[dict, str]:
    a = catalog.ie1_local_form()
    f = gc.GlueForm.from_repform(a)
    n = gc.n_pairing(f)
    _expect("N-pairing", [[0, 0], [0, 1]], [[int(x) for x in row] for row in n.gram.tolist()])
    e = gc.j_midext_form(f)
    lhs = gc.witt_class(e)
    rhs = gc.add_glue_classes(gc.xi_form(f), gc.i_star_form(n))
    _expect("[j_!*β] = Ξ[β] + i_*[Ψβ∘N]", lhs, rhs)
    u, y = gc.gluing_split_invariants(e)
    _expect("gluing split", (qf.WittInvariant.trivial(-1), _inv(1)), (u, y))
    report = {"n_pairing": n.to_json(), "class": lhs, "split": {"open": u, "puncture": y}}
    return report, "Ψβ∘N = ⟨1⟩ and [j_!*β] = Ξ[β] + i_*⟨1⟩"


EXAMPLES = {"cs2": _example_cs2, "ie1": _example_ie1, "ie2": _example_ie2, "glue-ie1": _example_glue_ie1}


@cli.command("paper-example")
@click.argument("name", type=click.Choice(sorted(EXAMPLES)))
def paper_example(name):
    """Rebuild a worked example from built-in data and check its stated outcome."""
    report, summary = EXAMPLES[name]()
    _emit(report)
    _say(summary)


def main(argv=None) -> int:
    try:
        cli.main(args=argv, prog_name="wittkit", standalone_mode=False)
    except click.exceptions.Exit as e:
        return e.exit_code
    except click.Abort:
        return EXIT_INPUT
    except click.ClickException as e:
        e.show()
        return EXIT_INPUT
    except InputError as e:
        _say(f"error: {e}")
        return EXIT_INPUT
    except Mismatch as e:
        click.echo(json.dumps(e.diff, indent=2, sort_keys=True), err=True)
        _say(f"MISMATCH: {e}")
        return EXIT_MISMATCH
    except SystemExit as e:
        return int(e.code or 0)
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
