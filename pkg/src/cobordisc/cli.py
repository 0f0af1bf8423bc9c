"""Command-line interface: JSON in, canonical JSON reports out.

Exit codes: 0 when no check fails, 1 when some check fails, 2 for invalid
input, 3 when an internal consistency check trips.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import sys
from fractions import Fraction
from pathlib import Path

from .errors import InvariantError, ValidationError
from .homology import (
    ChainComplex,
    GroupRingComplex,
    equivariant_collapse,
    homology,
    homology_K,
    homology_K_closed_form,
    is_orientable,
    rp_local_system,
)
from .lattice import Lattice, dehn_twist, gw_solve, is_even_form
from .linalg import IntMatrix, rational_json
from .multilinear import Hypermatrix, certify_degenerate, det222, hyperdet_schlafli, kernel_search
from .rings import CobordismData, StructRing, cobordism_report, ring_discriminant, three_sphere_example
from .spectral import FilteredComplex, e_infinity, page, pages, stable_index, verify_convergence

EXIT_OK, EXIT_FAIL, EXIT_INPUT, EXIT_INVARIANT = 0, 1, 2, 3

# checks that carry information but never fail a run
_INFO_CHECKS = {"cobordism.integral"}


def check(id_: str, status, detail: str = "") -> dict:
    if isinstance(status, bool):
        status = "pass" if status else "fail"
    return {"id": id_, "name": id_.split(".", 1)[-1], "status": status, "detail": detail}


def _default(x):
    if isinstance(x, Fraction):
        return rational_json(x)
    raise TypeError(f"cannot serialise {type(x).__name__}")


def canonical(obj) -> str:
    return json.dumps(obj, sort_keys=True, separators=(",", ":"), ensure_ascii=False, default=_default)


def _load(path: str) -> tuple:
    p = Path(path)
    try:
        raw = p.read_bytes()
    except OSError as exc:
        raise ValidationError(f"cannot read {path}: {exc.strerror or exc}") from None
    try:
        data = json.loads(raw.decode("utf-8"))
    except UnicodeDecodeError as exc:
        raise ValidationError(f"{path}: not UTF-8 ({exc.reason} at byte {exc.start})") from None
    except json.JSONDecodeError as exc:
        raise ValidationError(f"{path}: malformed JSON at line {exc.lineno}, column {exc.colno}: {exc.msg}") from None
    return data, hashlib.sha256(raw).hexdigest()


def _args_digest(args: dict) -> str:
    return hashlib.sha256(canonical(args).encode()).hexdigest()


def _need_dict(data, what: str) -> dict:
    if not isinstance(data, dict):
        raise ValidationError(f"{what}: expected a JSON object")
    return data


# ---------------------------------------------------------------------------
# subcommands; each returns (result, checks)


def cmd_hyperdet(data, args):
    A = Hypermatrix.from_dict(_need_dict(data, "hypermatrix"))
    checks = []
    result = {"format": list(A.format)}
    if A.format != (2, 2, 2):
        pt = certify_degenerate(A)
        result["kernel_point"] = pt.to_list() if pt else None
        checks.append(check("hyperdet.degenerate_certificate", "pass" if pt else "inconclusive",
                            "kernel point found" if pt else "no small kernel point; value not computed for this format"))
        return result, checks
    vals = {}
    if args.method in ("formula", "both"):
        vals["formula"] = det222(A)
    if args.method in ("schlafli", "both"):
        vals["schlafli"] = hyperdet_schlafli(A)
    result.update({k: rational_json(v) for k, v in vals.items()})
    value = next(iter(vals.values()))
    result["value"] = rational_json(value)
    if len(vals) == 2:
        same = vals["formula"] == vals["schlafli"]
        checks.append(check("hyperdet.formula_vs_schlafli", same,
                            f"{rational_json(vals['formula'])} vs {rational_json(vals['schlafli'])}"))
    ks = kernel_search(A)
    result["kernel"] = ks.to_dict() if ks else None
    checks.append(check("hyperdet.kernel_iff_zero", (ks is not None) == (value == 0),
                        "kernel point certified" if ks else "no kernel point"))
    return result, checks


def cmd_ring_disc(data, args):
    data = _need_dict(data, "ring")
    R = StructRing.from_dict(data)
    res = ring_discriminant(R, witness=data.get("witness"))
    checks = []
    if args.assoc:
        checks.append(check("ring.unit", _unit_ok(R), "unit element acts as identity"))
        checks.append(check("ring.associative", R.is_associative()))
        checks.append(check("ring.commutative", R.is_commutative()))
    checks.append(check("ring.discriminant", "inconclusive" if res.kind == "unknown" else "pass", res.kind))
    return {"rank": R.rank, "discriminant": res.to_dict()}, checks


def _unit_ok(R) -> bool:
    try:
        R.check_unit()
    except ValidationError:
        return False
    return True


def _cobordism(C: CobordismData):
    rep = cobordism_report(C)
    checks = [check(c.id, "inconclusive" if c.id in _INFO_CHECKS else c.ok, c.detail) for c in rep.checks]
    out = rep.to_dict()
    del out["checks"]
    return out, checks


def cmd_cobordism_check(data, args):
    return _cobordism(CobordismData.from_dict(_need_dict(data, "cobordism data")))


def cmd_cobordism_surgery(data, args):
    C = three_sphere_example(args.sigma, args.alpha)
    out, checks = _cobordism(C)
    out["data"] = C.to_dict()
    return out, checks


def _table(groups, shift: int = 0) -> list:
    return [{"degree": n + shift, "group": str(g), **g.to_dict()} for n, g in enumerate(groups)]


def cmd_homology(data, args):
    C = ChainComplex.from_dict(_need_dict(data, "chain complex"))
    return {"coeff": str(C.coeff), "homology": _table(homology(C))}, []


def cmd_equivariant_ki(data, args):
    n, i = args.n, args.i
    H = homology_K(n, i)
    closed = homology_K_closed_form(n, i)
    j = min(i, n - i)
    local = rp_local_system(j, n - j)
    result = {
        "n": n,
        "i": i,
        "homology": _table(H),
        "local_system": _table(local, n - j),
        "orientable": is_orientable(n, i),
    }
    checks = [check("equivariant.closed_form", H == closed,
                    "; ".join(f"H_{k}: {a} vs {b}" for k, (a, b) in enumerate(zip(H, closed)) if a != b))]
    return result, checks


def cmd_equivariant_custom(data, args):
    E = GroupRingComplex.from_dict(_need_dict(data, "group-ring complex"))
    C = equivariant_collapse(E)
    return {"ranks": list(E.ranks), "action": E.action.tolist(), "homology": _table(homology(C))}, []


def cmd_specseq(data, args):
    F = FilteredComplex.from_dict(_need_dict(data, "filtered complex"))
    result = {"stable_index": stable_index(F), "coeff": str(F.base.coeff)}
    if args.page is not None:
        if args.page < 0:
            raise ValidationError("page index must be >= 0")
        result["pages"] = [page(F, args.page).to_dict()]
    else:
        result["pages"] = [pg.to_dict() for pg in pages(F)]
    result["e_infinity"] = e_infinity(F).to_dict()["groups"]
    checks = []
    if args.verify:
        rep = verify_convergence(F)
        result["convergence"] = rep.to_dict()
        checks.append(check("specseq.convergence", rep.ok, f"collapses at page {rep.collapse}"))
    return result, checks


def cmd_pl_twist(data, args):
    L = Lattice.from_dict(_need_dict(data, "lattice"))
    phi = dehn_twist(L, args.sphere)
    s = L.designated[args.sphere]
    G = L.gram
    checks = [
        check("pl.twist_negates_sphere", phi.apply(s) == tuple(-x for x in s)),
        check("pl.isometry", (phi.T @ G @ phi).tolist() == G.tolist()),
        check("pl.involution", (phi @ phi).tolist() == IntMatrix.identity(L.rank).tolist()),
    ]
    return {"sphere": list(s), "matrix": phi.tolist()}, checks


def cmd_pl_solve(data, args):
    sol = gw_solve(Lattice.from_dict(_need_dict(data, "lattice")))
    checks = [
        check(ident.id, "pass" if ident.holds else "inconclusive", f"{ident.statement}" + (f" ({ident.residual})" if ident.residual else ""))
        for ident in sol.identities
    ]
    for d in sol.discriminants:
        i, j = d.pair
        checks.append(check("gw.pair_discriminant", "pass" if d.forced_zero else "inconclusive",
                            f"L{i + 1}, L{j + 1}: " + ("forced to 0" if d.forced_zero else "square of a free parameter")))
    return sol.to_dict(), checks


def cmd_form_even(data, args):
    Q = data.get("form", data.get("gram")) if isinstance(data, dict) else data
    if Q is None:
        raise ValidationError("expected a matrix or an object with 'form'")
    try:
        M = IntMatrix.of(Q)
    except (TypeError, ValueError) as exc:
        raise ValidationError(f"bad matrix: {exc}") from None
    return {"even": is_even_form(M), "diagonal": [M[i, i] for i in range(M.nrows)]}, []


# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="cobordisc", description="Exact discriminant and homology computations.")
    ap.add_argument("--pretty", action="store_true", help="human-readable output")
    sub = ap.add_subparsers(dest="command", required=True)

    def add(parser, name, func, needs_input=True, **kw):
        p = parser.add_parser(name, **kw)
        if needs_input:
            p.add_argument("--input", required=True)
        p.add_argument("--pretty", action="store_true", default=argparse.SUPPRESS)
        p.set_defaults(func=func, needs_input=needs_input)
        return p

    p = add(sub, "hyperdet", cmd_hyperdet, help="hyperdeterminant of a hypermatrix")
    p.add_argument("--method", choices=["formula", "schlafli", "both"], default="both")

    ring = sub.add_parser("ring", help="rings given by structure constants").add_subparsers(dest="sub", required=True)
    p = add(ring, "disc", cmd_ring_disc)
    p.add_argument("--assoc", action="store_true", help="also check unit, associativity and commutativity")

    cob = sub.add_parser("cobordism", help="end discriminants").add_subparsers(dest="sub", required=True)
    add(cob, "check", cmd_cobordism_check)
    p = add(cob, "surgery", cmd_cobordism_surgery, needs_input=False)
    p.add_argument("--sigma", type=int, required=True)
    p.add_argument("--alpha", type=int, required=True)

    add(sub, "homology", cmd_homology, help="homology of a chain complex")

    eq = sub.add_parser("equivariant", help="group-ring complexes").add_subparsers(dest="sub", required=True)
    p = add(eq, "ki", cmd_equivariant_ki, needs_input=False)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--i", type=int, required=True)
    add(eq, "custom", cmd_equivariant_custom)

    p = add(sub, "specseq", cmd_specseq, help="spectral sequence of a filtered complex")
    p.add_argument("--page", type=int)
    p.add_argument("--verify", action="store_true")

    pl = sub.add_parser("pl", help="lattices of spheres").add_subparsers(dest="sub", required=True)
    p = add(pl, "twist", cmd_pl_twist)
    p.add_argument("--sphere", type=int, required=True)
    add(pl, "solve", cmd_pl_solve)

    form = sub.add_parser("form", help="intersection forms").add_subparsers(dest="sub", required=True)
    add(form, "even", cmd_form_even)
    return ap


def _command_name(args) -> str:
    return " ".join(x for x in (args.command, getattr(args, "sub", None)) if x)


def _echo(args) -> dict:
    skip = {"func", "needs_input", "pretty", "command", "sub"}
    return {k: v for k, v in sorted(vars(args).items()) if k not in skip}


def run(argv=None, out=None) -> int:
    out = out or sys.stdout
    args = build_parser().parse_args(argv)
    name = _command_name(args)
    report = {"command": name, "args": _echo(args)}
    try:
        if args.needs_input:
            data, digest = _load(args.input)
        else:
            data, digest = None, _args_digest(_echo(args))
        report["input_sha256"] = digest
        result, checks = args.func(data, args)
    except ValidationError as exc:
        report["error"] = {"kind": "validation", "message": str(exc)}
        _emit(report, args, out)
        return EXIT_INPUT
    except InvariantError as exc:
        report["error"] = {"kind": "invariant", "message": str(exc)}
        _emit(report, args, out)
        return EXIT_INVARIANT
    report["result"] = result
    report["checks"] = checks
    report["ok"] = all(c["status"] != "fail" for c in checks)
    _emit(report, args, out)
    return EXIT_OK if report["ok"] else EXIT_FAIL


def _emit(report: dict, args, out) -> None:
    if getattr(args, "pretty", False):
        out.write(render_pretty(report))
    else:
        out.write(canonical(report) + "\n")


def render_pretty(report: dict) -> str:
    lines = [f"command: {report['command']}"]
    if "error" in report:
        lines.append(f"error ({report['error']['kind']}): {report['error']['message']}")
        return "\n".join(lines) + "\n"
    res = report["result"]
    if "homology" in res and isinstance(res["homology"], list):
        lines.append(_homology_table("H", res["homology"]))
        if "local_system" in res:
            lines.append(_homology_table("H(local)", res["local_system"]))
        if "orientable" in res:
            lines.append(f"orientable: {res['orientable']}")
    if "pages" in res:
        for pg in res["pages"]:
            lines.append(_page_table(pg))
    if "homology" not in res and "pages" not in res:
        lines += [f"{k}: {json.dumps(v, sort_keys=True, default=_default)}" for k, v in sorted(res.items())]
    for c in report["checks"]:
        lines.append(f"{c['id']}: {c['status']}" + (f"  {c['detail']}" if c["detail"] else ""))
    return "\n".join(lines) + "\n"


def _homology_table(title: str, rows: list) -> str:
    w = max(len(str(r["degree"])) for r in rows) if rows else 1
    body = [f"  {title}_{str(r['degree']).ljust(w)}  {r['group']}" for r in rows]
    return "\n".join(body)


def _page_table(pg: dict) -> str:
    groups = {(p, q): d for p, q, d in pg["groups"]}
    lines = [f"E^{pg['r']}"]
    if not groups:
        return lines[0] + "  (zero)"
    ps = range(min(p for p, _ in groups), max(p for p, _ in groups) + 1)
    qs = range(max(q for _, q in groups), min(q for _, q in groups) - 1, -1)
    lines.append("  q\\p " + " ".join(f"{p:>4}" for p in ps))
    for q in qs:
        lines.append(f"  {q:>4} " + " ".join(f"{groups.get((p, q), 0) or '.':>4}" for p in ps))
    return "\n".join(lines)


def main(argv=None) -> None:
    sys.exit(run(argv))


if __name__ == "__main__":
    main()
