"""Command-line front end.

Subcommands write UTF-8 CSV with a header row (or JSON) to ``--out`` or
stdout and print a one-line summary to stderr. Exit status is 0 on success,
2 on validation errors and 3 on numerical non-convergence.

Two CSV schemas are produced:

* experiments: ``experiment,family,d,k_or_gen,p,scale,value``
  (volume, walk, escape, sobolev-sweep rows)
* quotients: ``family,d,k,p,scale,value,witnessHash``
  (poincare, sobolev, faber-krahn, pathkernel)

``fit`` reads either schema, groups rows by everything except scale and
value, and appends ``<experiment>:slope``, ``:intercept`` and ``:r2`` rows.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from pathlib import Path

import numpy as np

from . import acceptance
from .calculus import (
    ScalarField,
    apply_p,
    ball_average,
    dirichlet_energy,
    edge_seminorm,
    gradient_field,
    lp_norm,
    pseudo_average_field,
)
from .errors import NumericalError, ValidationError
from .experiments import (
    ScalingSample,
    escape_time,
    extremal_field,
    fit_exponent,
    poincare_candidate,
    return_probability,
    volume_sweep,
)
from .generators import lattice_box, model_from_graph, path_graph, vicsek
from .graph import make_domain
from .inequalities import (
    faber_krahn_lambda1,
    maximize_sobolev_quotient,
    path_kernel_k,
    poincare_quotient,
    sobolev_quotient,
)
from .io import field_digest, read_field, read_graph, write_field, write_graph

EXPERIMENT_COLUMNS = ["experiment", "family", "d", "k_or_gen", "p", "scale", "value"]
QUOTIENT_COLUMNS = ["family", "d", "k", "p", "scale", "value", "witnessHash"]


def _ints(text):
    try:
        vals = [int(t) for t in text.split(",") if t.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}")
    if not vals:
        raise argparse.ArgumentTypeError("list is empty")
    return vals


def _floats(text):
    try:
        vals = [float(t) for t in text.split(",") if t.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}")
    if not vals or any(not (math.isinf(v) or v >= 1) for v in vals):
        raise argparse.ArgumentTypeError(f"p values must be >= 1, got {text!r}")
    return vals


def _fmt(x):
    if isinstance(x, (float, np.floating)):
        return repr(float(x))
    if isinstance(x, np.integer):
        return str(int(x))
    return "" if x is None else str(x)


def _emit_csv(args, columns, rows):
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(columns)
    for row in rows:
        writer.writerow([_fmt(row.get(c)) for c in columns])
    text = buf.getvalue()
    if args.out and args.out != "-":
        Path(args.out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


def _summary(experiment, count, slope=None):
    line = f"{experiment}: {count} samples"
    if slope is not None:
        line += f", fitted slope {slope:.6g}"
    print(line, file=sys.stderr)


def _add_graph_args(parser, default_family="vicsek"):
    parser.add_argument("--family", choices=["vicsek", "lattice", "path", "file"], default=default_family)
    parser.add_argument("--graph", help="graph file (implies --family file)")
    parser.add_argument("--d", type=int, default=2, help="dimension (vicsek: 1..6)")
    parser.add_argument("--gen", type=int, default=6, help="Vicsek generation >= 1")
    parser.add_argument("--side", type=int, default=101, help="lattice side / path length >= 2")


def _load(args):
    """Return ``(graph, model_or_None, label dict)``."""
    if args.graph or args.family == "file":
        if not args.graph:
            raise ValidationError("--family file needs --graph FILE")
        g = read_graph(args.graph)
        model = model_from_graph(g) if g.family == "vicsek" and g.coordinates is not None else None
    elif args.family == "vicsek":
        model = vicsek(args.d, args.gen)
        g = model.graph
    elif args.family == "lattice":
        g, model = lattice_box(args.d, args.side), None
    else:
        g, model = path_graph(args.side), None
    params = g.parameters
    d = params.get("d", 1 if g.family == "path" else "")
    k = params.get("generation", params.get("side", params.get("length", "")))
    return g, model, {"family": g.family, "d": d, "k": k}


def _center(g, choice):
    if choice in (None, "auto"):
        c = g.markers.get("center")
        if c is None:
            raise ValidationError("graph has no center marker; pass --center ID")
        return int(c)
    return g.check_vertex(int(choice))


def cmd_generate(args):
    if args.family == "vicsek":
        g = vicsek(args.d, args.gen).graph
    elif args.family == "lattice":
        g = lattice_box(args.d, args.side)
    elif args.family == "path":
        g = path_graph(args.side)
    else:
        raise ValidationError("generate needs --family vicsek, lattice or path")
    if args.out and args.out != "-":
        write_graph(g, args.out)
    else:
        from .io import dumps_graph
        sys.stdout.write(dumps_graph(g))
    print(f"generate: {g.family} with {g.vertex_count} vertices, {g.edge_count} edges", file=sys.stderr)


def _experiment_rows(name, label, p, samples):
    return [
        {"experiment": name, "family": label["family"], "d": label["d"], "k_or_gen": label["k"],
         "p": p, "scale": s.scale, "value": s.value}
        for s in samples
    ]


def _finish_samples(args, name, label, p, samples):
    _emit_csv(args, EXPERIMENT_COLUMNS, _experiment_rows(name, label, p, samples))
    slope = fit_exponent(samples, 0).slope if len(samples) >= 2 else None
    _summary(name, len(samples), slope)


def cmd_volume(args):
    g, _, label = _load(args)
    samples = volume_sweep(g, _center(g, args.center), args.radii)
    _finish_samples(args, "volume", label, "", samples)


def cmd_walk(args):
    g, _, label = _load(args)
    samples = return_probability(g, _center(g, args.center), args.kmax)
    _finish_samples(args, "walk", label, "", samples)


def cmd_escape(args):
    g, _, label = _load(args)
    x = _center(g, args.center)
    samples = [ScalingSample(r, escape_time(g, x, r, args.tol), "escape") for r in args.radii]
    _finish_samples(args, "escape", label, "", samples)


def _need_model(model):
    if model is None:
        raise ValidationError("this subcommand needs a Vicsek graph (generated or file with coordinates)")
    return model


def cmd_poincare(args):
    g, model, label = _load(args)
    model = _need_model(model)
    rows = []
    for p in args.p:
        for r in args.radii:
            f = poincare_candidate(model, r)
            q = poincare_quotient(g, f, model.center, r, p)
            rows.append({**label, "p": p, "scale": r, "value": q, "witnessHash": field_digest(f.values)})
    _emit_csv(args, QUOTIENT_COLUMNS, rows)
    _summary("poincare", len(rows))


def _block_generations(args, model):
    gens = args.blocks or list(range(2, model.generation))
    if max(gens) >= model.generation or min(gens) < 1:
        raise ValidationError(
            f"--blocks must lie in [1, {model.generation - 1}] so every block is interior"
        )
    return gens


def cmd_sobolev(args):
    g, model, label = _load(args)
    model = _need_model(model)
    rows = []
    for p in args.p:
        for n in _block_generations(args, model):
            F = extremal_field(model, n)
            scale = float(math.fsum(g.measure[F.support]))
            if args.maximize:
                dom = make_domain(g, F.support)
                rep = maximize_sobolev_quotient(g, dom, p, seeds=[F], iters=args.iters)
                value, witness = rep.value, rep.witness
            else:
                value, witness = sobolev_quotient(g, F, p), F
            rows.append({**label, "p": p, "scale": scale, "value": value,
                         "witnessHash": field_digest(witness.values)})
    _emit_csv(args, QUOTIENT_COLUMNS, rows)
    _summary("sobolev", len(rows))


def cmd_faber_krahn(args):
    g, model, label = _load(args)
    model = _need_model(model)
    rows = []
    for n in _block_generations(args, model):
        dom = make_domain(g, model.central_block(n)[0])
        fk = faber_krahn_lambda1(g, dom, tol=args.tol)
        rows.append({**label, "p": 2.0, "scale": dom.measure, "value": fk.lambda1,
                     "witnessHash": field_digest(fk.witness)})
        print(f"faber-krahn: n={n} lambda1={fk.lambda1:.6g} r={dom.inradius} "
              f"lambda1*r*mu={fk.lambda1 * dom.inradius * dom.measure:.6g} iters={fk.iterations}",
              file=sys.stderr)
    _emit_csv(args, QUOTIENT_COLUMNS, rows)


def cmd_pathkernel(args):
    g, _, label = _load(args)
    x = _center(g, args.center)
    rows = []
    for p in args.p:
        for n in args.radii:
            rows.append({**label, "p": p, "scale": n, "value": path_kernel_k(g, x, n, p),
                         "witnessHash": ""})
    _emit_csv(args, QUOTIENT_COLUMNS, rows)
    _summary("pathkernel", len(rows))


def cmd_extremal(args):
    g, model, _ = _load(args)
    model = _need_model(model)
    F = extremal_field(model, args.n)
    if args.out and args.out != "-":
        write_field(g, F, args.out)
    else:
        sys.stdout.write(json.dumps({"graphHash": g.digest, "values": F.values.tolist(),
                                     "support": F.support.tolist()}, separators=(",", ":")) + "\n")
    print(f"extremal: F_{args.n} on {len(F.support)} vertices", file=sys.stderr)


def cmd_eval(args):
    g = read_graph(args.graph)
    f = read_field(args.field, g) if args.field else ScalarField(np.ones(g.vertex_count))
    op = args.op
    if op == "norm":
        result = lp_norm(g, f, args.p)
    elif op == "seminorm":
        result = edge_seminorm(g, f, args.p)
    elif op == "energy":
        result = dirichlet_energy(g, f)
    elif op == "gradient":
        result = gradient_field(g, f).tolist()
    elif op == "apply-p":
        result = apply_p(g, f).tolist()
    elif op == "average":
        result = ball_average(g, f, _center(g, args.center), args.n)
    elif op == "pseudo-average":
        result = pseudo_average_field(g, f, args.n).tolist()
    elif op == "sobolev":
        result = sobolev_quotient(g, f, args.p)
    else:
        result = poincare_quotient(g, f, _center(g, args.center), args.n, args.p)
    text = json.dumps({"op": op, "p": args.p, "result": result}, separators=(",", ":")) + "\n"
    if args.out and args.out != "-":
        Path(args.out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


def read_fit_rows(text):
    """Parse either CSV schema; fit rows (experiment containing ':') are skipped."""
    reader = csv.DictReader(io.StringIO(text))
    if reader.fieldnames is None:
        raise ValidationError("input CSV is empty")
    missing = {"scale", "value"} - set(reader.fieldnames)
    if missing:
        raise ValidationError(f"input CSV lacks columns {sorted(missing)}")
    rows = []
    for lineno, row in enumerate(reader, start=2):
        if ":" in row.get("experiment", ""):
            continue
        try:
            row["scale"], row["value"] = float(row["scale"]), float(row["value"])
        except ValueError as exc:
            raise ValidationError(f"line {lineno}: {exc}") from exc
        rows.append(row)
    return reader.fieldnames, rows


def cmd_fit(args):
    if args.input in (None, "-"):
        text = sys.stdin.read()
    else:
        try:
            text = Path(args.input).read_text(encoding="utf-8")
        except OSError as exc:
            raise ValidationError(f"{args.input}: {exc}") from exc
    if not text.strip():
        from .errors import TooFewSamples
        raise TooFewSamples("input CSV has no samples")
    columns, rows = read_fit_rows(text)
    group_cols = [c for c in columns if c not in ("scale", "value", "witnessHash")]
    groups = {}
    for row in rows:
        groups.setdefault(tuple(row[c] for c in group_cols), []).append(row)
    if not groups:
        from .errors import TooFewSamples
        raise TooFewSamples("input CSV has no samples")
    out = [dict(r) for r in rows]
    for key, members in groups.items():
        samples = [ScalingSample(r["scale"], r["value"], "fit") for r in members]
        fit = fit_exponent(samples, args.skip)
        base = dict(zip(group_cols, key))
        name = base.get("experiment") or "quotient"
        for suffix, value in (("slope", fit.slope), ("intercept", fit.intercept), ("r2", fit.r_squared)):
            row = {**base, "scale": float(fit.count), "value": value}
            if "experiment" in base:
                row["experiment"] = f"{name}:{suffix}"
            else:
                row["family"] = f"{base.get('family', '')}:{suffix}"
            out.append(row)
        _summary(name, fit.count, fit.slope)
    _emit_csv(args, columns, out)


def cmd_verify(args):
    only = args.only.split(",") if args.only else None
    if only:
        unknown = [n for n in only if n not in acceptance.CHECKS]
        if unknown:
            raise ValidationError(f"unknown check {unknown[0]!r}; valid: {', '.join(acceptance.CHECKS)}")
    if args.graph:
        read_graph(args.graph)  # surfaces file diagnostics before running
    results = []
    for name in only or acceptance.CHECKS:
        res = acceptance.CHECKS[name]()
        print(res.line(), flush=True)
        results.append(res)
    passed = sum(r.passed for r in results)
    total = sum(r.seconds for r in results)
    print(f"verify: {passed}/{len(results)} checks passed in {total:.1f}s")
    return 0 if passed == len(results) else 1


def build_parser():
    parser = argparse.ArgumentParser(prog="fracsob", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name, fn, **kw):
        sp = sub.add_parser(name, **kw)
        sp.set_defaults(func=fn)
        sp.add_argument("--out", help="output path (default stdout)")
        return sp

    sp = add("generate", cmd_generate, help="write a graph file")
    _add_graph_args(sp)

    sp = add("volume", cmd_volume, help="ball volumes mu(B(x, r))")
    _add_graph_args(sp)
    sp.add_argument("--center", default="auto")
    sp.add_argument("--radii", type=_ints, default=[3, 9, 27, 81, 243])

    sp = add("walk", cmd_walk, help="return probabilities p_2k(x, x)")
    _add_graph_args(sp)
    sp.add_argument("--center", default="auto")
    sp.add_argument("--kmax", type=int, default=200)

    sp = add("escape", cmd_escape, help="mean exit times T(x, r)")
    _add_graph_args(sp)
    sp.add_argument("--center", default="auto")
    sp.add_argument("--radii", type=_ints, default=[3, 9, 27, 81])
    sp.add_argument("--tol", type=float, default=1e-10)

    sp = add("poincare", cmd_poincare, help="Poincare quotients of the tent candidates")
    _add_graph_args(sp)
    sp.add_argument("--radii", type=_ints, default=[3, 9, 27, 81])
    sp.add_argument("--p", type=_floats, default=[2.0])

    sp = add("sobolev", cmd_sobolev, help="Sobolev quotients of F_n on central blocks")
    _add_graph_args(sp)
    sp.add_argument("--blocks", type=_ints, help="block generations (default 2..gen-1)")
    sp.add_argument("--p", type=_floats, default=[2.0])
    sp.add_argument("--maximize", action="store_true", help="ascend from F_n")
    sp.add_argument("--iters", type=int, default=2000)

    sp = add("faber-krahn", cmd_faber_krahn, help="Dirichlet eigenvalue of central blocks")
    _add_graph_args(sp)
    sp.add_argument("--blocks", type=_ints, help="block generations (default 2..gen-1)")
    sp.add_argument("--tol", type=float, default=1e-10)

    sp = add("pathkernel", cmd_pathkernel, help="path kernel K(x, n)")
    _add_graph_args(sp)
    sp.add_argument("--center", default="auto")
    sp.add_argument("--radii", type=_ints, default=[1, 3, 9])
    sp.add_argument("--p", type=_floats, default=[2.0])

    sp = add("extremal", cmd_extremal, help="write the field F_n")
    _add_graph_args(sp)
    sp.add_argument("--n", type=int, required=True)

    sp = add("eval", cmd_eval, help="evaluate a calculus operation on a stored graph and field")
    sp.add_argument("--graph", required=True)
    sp.add_argument("--field")
    sp.add_argument("--op", required=True, choices=[
        "norm", "seminorm", "energy", "gradient", "apply-p", "average", "pseudo-average",
        "sobolev", "poincare"])
    sp.add_argument("--p", type=float, default=2.0)
    sp.add_argument("--n", type=int, default=1)
    sp.add_argument("--center", default="auto")

    sp = add("fit", cmd_fit, help="fit log-log slopes to a CSV")
    sp.add_argument("--in", dest="input", help="input CSV (default stdin)")
    sp.add_argument("--skip", type=int, default=1, help="smallest scales to skip")

    sp = add("verify", cmd_verify, help="run the acceptance checks")
    sp.add_argument("--only", help="comma-separated check names")
    sp.add_argument("--graph", help="optional graph file to validate first")
    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        status = args.func(args)
    except ValidationError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 2
    except NumericalError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 3
    return status or 0


if __name__ == "__main__":
    sys.exit(main())
