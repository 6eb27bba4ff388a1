"""Command line front end: ``garland <subcommand> [flags]``.

Exit codes: 0 success, 1 a Fails verdict under --strict, 2 usage or input
error, 3 an Unverified/infeasible outcome under --strict.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import sys
import time
from fractions import Fraction
from pathlib import Path

import numpy as np

from . import actions, complexes, coxeter, criterion, geometry, spectra
from .criterion import ALL_PASS, FAILS, fmt_float

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_UNVERIFIED = 0, 1, 2, 3


class UsageError(ValueError):
    pass


# -- output helpers ----------------------------------------------------------------------

def _jsonable(obj):
    if isinstance(obj, float):
        return float(fmt_float(obj))
    if isinstance(obj, Fraction):
        return criterion.format_rational(obj)
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (np.floating,)):
        return float(fmt_float(float(obj)))
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    return obj


def _dump_json(obj) -> str:
    return json.dumps(_jsonable(obj), indent=2)


def _dump_csv(rows: list[dict]) -> str:
    if not rows:
        return ""
    fields = list(rows[0])
    for r in rows[1:]:
        fields += [k for k in r if k not in fields]
    buf = io.StringIO()
    w = csv.DictWriter(buf, fieldnames=fields, lineterminator="\n")
    w.writeheader()
    for r in rows:
        w.writerow({k: ("" if v is None else v) for k, v in r.items()})
    return buf.getvalue().rstrip("\n")


def _flat_rows(d: dict) -> list[dict]:
    return [{"key": k, "value": json.dumps(_jsonable(v)) if isinstance(v, (list, dict)) else v}
            for k, v in d.items()]


def _text(d: dict, indent: int = 0) -> str:
    pad = "  " * indent
    out = []
    for k, v in d.items():
        if isinstance(v, dict):
            out.append(f"{pad}{k}:")
            out.append(_text(v, indent + 1))
        elif isinstance(v, list) and v and isinstance(v[0], dict):
            out.append(f"{pad}{k}:")
            for item in v:
                out.append(_text(item, indent + 1))
                out.append("")
        else:
            out.append(f"{pad}{k}: {_jsonable(v)}")
    return "\n".join(x for x in out if x is not None).rstrip()


def _emit(args, payload: dict, rows: list[dict] | None = None, text: str | None = None):
    if args.format == "json":
        print(_dump_json(payload))
    elif args.format == "csv":
        print(_dump_csv(rows if rows is not None else _flat_rows(payload)))
    else:
        print(text if text is not None else _text(payload))


# -- input helpers -----------------------------------------------------------------------

def _read_file(path: str) -> str:
    try:
        return Path(path).read_text()
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc.strerror}") from exc


def _diagram(args) -> coxeter.CoxeterDiagram:
    if not args.diagram:
        raise UsageError("--diagram is required")
    return coxeter.CoxeterDiagram.parse(args.diagram)


def _load_complex(args) -> tuple[complexes.WeightedComplex, str]:
    if getattr(args, "complex", None):
        return complexes.read_complex(_read_file(args.complex)), args.complex
    builtin = getattr(args, "builtin", None)
    if builtin:
        table = {"octahedron": complexes.octahedron, "torus": complexes.torus,
                 "tetrahedron": lambda: complexes.simplex_boundary(3)}
        return table[builtin](), builtin
    if getattr(args, "building", None):
        if args.q is None:
            raise UsageError("--building needs --q")
        return geometry.building_complex(args.building, args.q), f"{args.building}({args.q})"
    if getattr(args, "gon", None):
        if args.q is None:
            raise UsageError("--gon needs --q")
        g = geometry.construct_gon(args.gon, args.q)
        return g.as_complex(), g.name
    raise UsageError("give one of --complex, --builtin, --building or --gon")


def _strict_code(args, verdict: str) -> int:
    if not args.strict or verdict == ALL_PASS:
        return EXIT_OK
    return EXIT_FAIL if verdict == FAILS else EXIT_UNVERIFIED


# -- subcommands -------------------------------------------------------------------------

def cmd_enumerate(args) -> int:
    if args.dim is None:
        raise UsageError("--dim is required")
    t0 = time.perf_counter()
    rep = coxeter.enumeration_report(args.dim)
    rep["seconds"] = round(time.perf_counter() - t0, 4)
    rows = [{"dim": rep["dim"], "index": i, "diagram": s} for i, s in enumerate(rep["diagrams"])]
    lines = [f"dimension {rep['dim']}: {rep['count']} compact hyperbolic diagram(s)"]
    lines += [f"  {s}" for s in rep["diagrams"]]
    if "reference_count" in rep:
        lines.append(f"  reference count: {rep['reference_count']}  computed: {rep['count']}"
                     + ("  DISCREPANCY" if rep["discrepancy"] else ""))
        for r in rows:
            r["reference_count"] = rep["reference_count"]
            r["discrepancy"] = rep["discrepancy"]
    _emit(args, rep, rows, "\n".join(lines))
    return EXIT_OK


def cmd_classify(args) -> int:
    d = _diagram(args)
    cls = coxeter.classify(d)
    out = {"diagram": d.to_text(), "kind": cls.kind, "signature": list(cls.signature)}
    if d.rank <= 5:
        chk = coxeter.exact_cross_check(d)
        out.update({"exact_det": str(chk["det"]), "det_sign": chk["det_sign"],
                    "exact_agrees": chk["agrees"]})
    if cls.kind == coxeter.SPHERICAL:
        out["type"] = coxeter.identify_spherical_type(d)
    _emit(args, out)
    return EXIT_OK


def cmd_check(args) -> int:
    d = _diagram(args)
    if args.q is None:
        raise UsageError("--q is required")
    rep = criterion.check_building(d, args.q, args.gon_source, args.mode, args.jobs)
    if args.format == "json":
        print(rep.to_json())
    elif args.format == "csv":
        print(_dump_csv(rep.csv_rows()))
    else:
        print(rep.to_text())
    if args.plot:
        from .plotting import plot_check
        plot_check(rep, args.plot)
    return _strict_code(args, rep.verdict)


def cmd_minimal_q(args) -> int:
    diagrams = [_diagram(args)] if args.diagram else None
    if diagrams is None:
        if args.dim is None:
            raise UsageError("give --diagram or --dim")
        diagrams = coxeter.enumerate_hyperbolic(args.dim)
    results = [criterion.minimal_q(d, args.qmax, args.gon_source, args.mode, args.jobs)
               for d in diagrams]
    if args.format == "json":
        if len(results) == 1:
            print(results[0].to_json())
        else:
            print(_dump_json([r.as_dict() for r in results]))
    elif args.format == "csv":
        print(_dump_csv([row for r in results for row in r.csv_rows()]))
    else:
        print("\n\n".join(r.to_text() for r in results))
    if args.plot:
        from .plotting import plot_minimal_q
        for i, r in enumerate(results):
            path = args.plot if len(results) == 1 else _indexed(args.plot, i)
            plot_minimal_q(r, path)
    if args.strict and any(r.minimal_q is None for r in results):
        return EXIT_UNVERIFIED
    return EXIT_OK


def _indexed(path: str, i: int) -> str:
    p = Path(path)
    return str(p.with_name(f"{p.stem}_{i}{p.suffix}"))


def cmd_spectrum(args) -> int:
    out: dict = {}
    if args.gon:
        if args.q is None:
            raise UsageError("--gon needs --q")
        g = geometry.construct_gon(args.gon, args.q)
        out["geometry"] = g.name
        out["axioms"] = g.check_axioms()
        A = g.adjacency()
        eig = spectra.dense_eigensolve(A)[0]
        out["adjacency_spectrum"] = _multiset(eig)
        out["closed_form"] = [[fmt_float(e), m] for e, m in
                              geometry.gon_spectrum_closed_form(args.gon, args.q)]
        out["closed_form_status"] = geometry.closed_form_status(args.gon, args.q)
        pair = g.laplacian_pair()
        if args.export:
            Path(args.export).write_text(g.to_edge_list())
    else:
        X, name = _load_complex(args)
        out["complex"] = name
        pair = X.laplacian_pair()
        eig = None
    rep = spectra.kappa_of(pair, args.mode)
    out["kappa"] = rep.kappa
    out["kernel_dim"] = rep.kernel_dim
    out["method"] = rep.method
    out["residual"] = rep.residual
    if rep.spectrum is not None:
        out["laplacian_spectrum"] = _multiset(rep.spectrum)
    _emit(args, out)
    if args.plot:
        from .plotting import plot_spectrum
        vals = eig if eig is not None else rep.spectrum
        if vals is None:
            raise UsageError("--plot needs a full spectrum; use --mode dense")
        plot_spectrum(vals, args.plot, out.get("geometry", out.get("complex", "")))
    return EXIT_OK


def _multiset(vals) -> list:
    vals = np.sort(np.asarray(vals))
    groups: list[list] = []
    for v in vals:
        if groups and abs(v - groups[-1][0]) <= 1e-8 * max(1.0, abs(v)):
            groups[-1][1] += 1
        else:
            groups.append([float(v), 1])
    return [[fmt_float(v), m] for v, m in groups]


def cmd_betti(args) -> int:
    X, name = _load_complex(args)
    b = X.betti_numbers(args.betti_mode)
    out = {"complex": name, "f_vector": X.f_vector(), "betti": b, "mode": args.betti_mode,
           "euler_characteristic": X.euler_characteristic(),
           "euler_from_betti": sum((-1) ** i * x for i, x in enumerate(b))}
    _emit(args, out)
    return EXIT_OK


def cmd_vanishing(args) -> int:
    X, name = _load_complex(args)
    rep = criterion.vanishing_demo(X, args.mode if args.mode != "auto" else "dense")
    rep = {"complex": name, **rep}
    rows = [{k: v for k, v in d.items() if k != "failures"} for d in rep["degrees"]]
    _emit(args, rep, rows)
    ok = all(d["implication_holds"] for d in rep["degrees"])
    return EXIT_OK if ok else EXIT_FAIL


def cmd_mass_formula(args) -> int:
    X, name = _load_complex(args)
    if not args.group:
        raise UsageError("--group is required")
    G = actions.read_group(_read_file(args.group), max(X.vertices) + 1)
    rng = np.random.default_rng(args.seed)
    ids = actions.pair_orbit_ids(X, G, args.l, args.k)
    rows = []
    for s in range(args.samples):
        f = actions.random_invariant_function(X, G, args.l, args.k, rng, ids)
        lhs, rhs = actions.mass_formula_check(X, G, args.l, args.k, f)
        rows.append({"sample": s, "lhs": str(lhs), "rhs": str(rhs), "equal": lhs == rhs})
    out = {"complex": name, "group_order": G.order, "l": args.l, "k": args.k,
           "samples": rows, "all_equal": all(r["equal"] for r in rows)}
    _emit(args, out, rows)
    return EXIT_OK if out["all_equal"] else EXIT_FAIL


def cmd_transitivity(args) -> int:
    X, name = _load_complex(args)
    if not args.group:
        raise UsageError("--group is required")
    G = actions.read_group(_read_file(args.group), max(X.vertices) + 1)
    out = {"complex": name, "group_order": G.order, **actions.link_transitivity_check(X, G)}
    _emit(args, out)
    return EXIT_OK


def cmd_selftest(args) -> int:
    checks = []

    def record(name, ok, detail=""):
        checks.append({"check": name, "ok": bool(ok), "detail": detail})

    counts = {d: coxeter.enumeration_report(d)["count"] for d in (3, 4)}
    record("hyperbolic diagram counts dim 3/4", counts == {3: 2, 4: 1}, str(counts))
    fano = geometry.construct_gon(3, 2)
    lam = spectra.second_adjacency_eigenvalue(fano.adjacency())
    record("Fano second eigenvalue sqrt(2)", abs(lam - 2 ** 0.5) < 1e-9, fmt_float(lam))
    kap = spectra.kappa_of(geometry.construct_gon(4, 2).laplacian_pair()).kappa
    record("W(3,2) kappa 1/3", abs(kap - 1 / 3) < 1e-9, fmt_float(kap))
    rng = np.random.default_rng(0)
    S = rng.standard_normal((40, 40))
    S = S + S.T
    ev = spectra.dense_eigensolve(S)[0]
    err = float(np.max(np.abs(np.sort(ev) - np.linalg.eigvalsh(S))))
    record("dense solver vs LAPACK", err < 1e-10, "%.3g" % err)
    b = complexes.torus().betti_numbers()
    record("torus Betti numbers", b == [1, 2, 1], str(b))
    ok = all(c["ok"] for c in checks)
    _emit(args, {"checks": checks, "ok": ok}, checks,
          "\n".join(f"{'PASS' if c['ok'] else 'FAIL'}  {c['check']}  {c['detail']}" for c in checks))
    return EXIT_OK if ok else EXIT_FAIL


# -- parser ------------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=["json", "csv", "text"], default="text")
    common.add_argument("--strict", action="store_true",
                        help="nonzero exit on Fails (1) or Unverified/infeasible (3)")
    common.add_argument("--jobs", type=int, default=1, help="worker processes for link checks")
    common.add_argument("--qmax", type=int, default=13, help="largest q for minimal-q search")
    common.add_argument("--plot", metavar="FILE", help="also write a figure to FILE")
    common.add_argument("--mode", choices=["auto", "dense", "sparse"], default="auto",
                        help="eigensolver selection")

    p = argparse.ArgumentParser(prog="garland", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    def add(name, func, help_):
        sp = sub.add_parser(name, parents=[common], help=help_)
        sp.set_defaults(func=func)
        return sp

    def complex_inputs(sp):
        sp.add_argument("--complex", metavar="FILE", help="maximal simplices, one per line")
        sp.add_argument("--builtin", choices=["octahedron", "torus", "tetrahedron"])
        sp.add_argument("--building", metavar="TYPE", help="A3, C3, B3, A4 or a join like A1xI2(3)")
        sp.add_argument("--gon", type=int, choices=[2, 3, 4, 6])
        sp.add_argument("--q", type=int)

    sp = add("enumerate", cmd_enumerate, "list compact hyperbolic simplex diagrams")
    sp.add_argument("--dim", type=int)

    sp = add("classify", cmd_classify, "classify a diagram by its Gram matrix")
    sp.add_argument("--diagram")

    for name, func, help_ in (("check", cmd_check, "check every link at one q"),
                              ("minimal-q", cmd_minimal_q, "least q passing every link")):
        sp = add(name, func, help_)
        sp.add_argument("--diagram")
        sp.add_argument("--q", type=int)
        sp.add_argument("--dim", type=int)
        sp.add_argument("--gon-source", choices=["construct", "closed_form"],
                        default="construct" if name == "check" else "closed_form")

    sp = add("spectrum", cmd_spectrum, "link Laplacian spectrum of a geometry or complex")
    complex_inputs(sp)
    sp.add_argument("--export", metavar="FILE", help="write the gon incidence edge list")

    sp = add("betti", cmd_betti, "Betti numbers of a complex")
    complex_inputs(sp)
    sp.add_argument("--betti-mode", choices=["exact_rational", "float_svd"],
                    default="exact_rational")

    sp = add("vanishing-demo", cmd_vanishing, "link test and Betti numbers per degree")
    complex_inputs(sp)

    for name, func, help_ in (("mass-formula", cmd_mass_formula, "orbit double-count identity"),
                              ("lemma16", cmd_transitivity, "link connectivity and stabilizer transitivity")):
        sp = add(name, func, help_)
        complex_inputs(sp)
        sp.add_argument("--group", metavar="FILE", help="generators in cycle notation")
        if name == "mass-formula":
            sp.add_argument("--l", type=int, default=0)
            sp.add_argument("--k", type=int, default=1)
            sp.add_argument("--samples", type=int, default=10)
            sp.add_argument("--seed", type=int, default=0)

    add("selftest", cmd_selftest, "quick known-value checks")
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.func(args)
    except ValueError as exc:
        print(f"garland {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except spectra.SpectralError as exc:
        print(f"garland {args.command}: solver error: {exc}", file=sys.stderr)
        return EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
