"""``pdc`` command line front end.

Exit status: 0 on success or a true verdict, 2 on a domain-level negative
verdict (not completable, check failed), 1 on usage or input errors.
"""

from __future__ import annotations

import argparse
import json
import math
import sys

import numpy as np

from . import analytics, completion, graph, partial, symlin
from .errors import NotCompletable, PdcError, PerfectDag

EXIT_OK = 0
EXIT_INPUT = 1
EXIT_NEGATIVE = 2


class InputError(Exception):
    pass


def _jsonable(x):
    if isinstance(x, np.ndarray):
        return _jsonable(x.tolist())
    if isinstance(x, dict):
        return {str(k): _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    if isinstance(x, np.generic):
        x = x.item()
    if isinstance(x, float) and not math.isfinite(x):
        return None
    return x


def _fmt_matrix(M, precision):
    M = np.asarray(M, dtype=float)
    cells = [["*" if np.isnan(v) else f"{v:.{precision}g}" for v in row] for row in M]
    width = max((len(c) for row in cells for c in row), default=1)
    return "\n".join("  ".join(c.rjust(width) for c in row) for row in cells)


def _load(loader, path):
    try:
        return loader(path)
    except PdcError as exc:
        raise InputError(f"{path}: {exc}") from exc
    except OSError as exc:
        raise InputError(f"{path}: {exc.strerror}") from exc


def _load_dag(path, relabel):
    G = _load(graph.read_graph, path)
    if not isinstance(G, graph.Dag):
        raise InputError(f"{path}: expected a 'dag' graph file")
    if G.is_ordered:
        return G, None
    if not relabel:
        bad = sorted((i, j) for i, j in G.edges if i < j)
        raise InputError(
            f"{path}: edges {bad} violate the i -> j => i > j numbering (pass --relabel)"
        )
    return graph.topological_relabel(G.p, G.edges)


def _unpermute(M, perm):
    if perm is None:
        return M
    idx = [v - 1 for v in perm]
    return np.asarray(M)[np.ix_(idx, idx)]


def _orig_vertex(v, perm):
    if perm is None or v is None:
        return v
    return graph.invert_permutation(perm)[v - 1]


def _emit(args, payload, text):
    if args.json:
        print(json.dumps(_jsonable(payload), indent=2))
    else:
        print(text)


def cmd_complete(args):
    D, perm = _load_dag(args.graph, args.relabel)
    gamma = _load(partial.read_matrix, args.matrix)
    if perm is not None:
        gamma = gamma.permute(perm)
    prec = args.precision
    lines = []
    if perm is not None:
        lines.append("relabelled vertices: " + " ".join(f"{o}->{n}" for o, n in enumerate(perm, 1)))
    if args.space == "p":
        res = completion.complete_in_p(gamma, D)
        status = "completed" if res.in_p_d else "not_completable"
        payload = {
            "status": status,
            "space": "p",
            "gamma_hat": _unpermute(res.completed, perm),
            "L": res.factor.L,
            "lambda": res.factor.D,
            "failing_vertex": _orig_vertex(res.failing_vertex, perm),
            "permutation": list(perm) if perm else None,
        }
        lines += [
            f"status: {status}",
            "lambda: " + " ".join(f"{v:.{prec}g}" for v in res.factor.D),
            "L:",
            _fmt_matrix(res.factor.L, prec),
            "completed matrix:",
            _fmt_matrix(payload["gamma_hat"], prec),
        ]
        if not res.in_p_d:
            lines.append(f"pivot of vertex {payload['failing_vertex']} is not positive; "
                         "no completion in the inverse-covariance space")
        _emit(args, payload, "\n".join(lines))
        return EXIT_OK if res.in_p_d else EXIT_NEGATIVE

    res = completion.complete_in_pd(gamma, D, tol=args.tol, diagnose=args.diagnose)
    sigma = _unpermute(res.sigma, perm)
    residual = completion.markov_residual(res.sigma, D) if res.completed else None
    payload = {
        "status": "completed" if res.completed else "not_completable",
        "space": "pd",
        "sigma": sigma,
        "failing_vertex": _orig_vertex(res.failing_vertex, perm),
        "failures": [_orig_vertex(v, perm) for v in res.failures],
        "residual_max": residual,
        "permutation": list(perm) if perm else None,
    }
    lines.append(f"status: {payload['status']}")
    if res.completed:
        lines += ["sigma:", _fmt_matrix(sigma, prec), f"max residual: {residual:.3e}"]
    else:
        lines.append(f"family block of vertex {payload['failing_vertex']} is not positive definite")
        if args.diagnose:
            lines.append("failing vertices: " + " ".join(map(str, payload["failures"])))
        lines += ["partially filled sigma:", _fmt_matrix(sigma, prec)]
    _emit(args, payload, "\n".join(lines))
    return EXIT_OK if res.completed else EXIT_NEGATIVE


def cmd_check(args):
    G = _load(graph.read_graph, args.graph)
    what = args.what
    witness = None
    if what == "decomposable":
        U = graph.undirected_version(G) if isinstance(G, graph.Dag) else G
        verdict, order = graph.is_decomposable(U, return_ordering=True)
        witness = {"elimination_order": order}
    elif what == "perfect":
        if not isinstance(G, graph.Dag):
            raise InputError(f"{args.graph}: --perfect needs a 'dag' graph file")
        im = graph.immoralities(G)
        verdict = not im
        witness = {"immoralities": [list(t) for t in im]}
    else:
        if args.matrix is None:
            raise InputError(f"--{what.replace('_', '-')} needs --matrix")
        M = _load(partial.read_matrix, args.matrix)
        if what == "qd":
            U = graph.undirected_version(G) if isinstance(G, graph.Dag) else G
            try:
                bad = partial.failing_clique(M, U, args.tol)
            except PdcError as exc:
                raise InputError(f"{args.matrix}: {exc}") from exc
            verdict = bad is None
            witness = {"failing_clique": list(bad) if bad else None}
        else:
            if not isinstance(G, graph.Dag):
                raise InputError(f"{args.graph}: expected a 'dag' graph file")
            if not G.is_ordered:
                raise InputError(f"{args.graph}: graph violates the i -> j => i > j numbering")
            if not M.mask.all():
                raise InputError(f"{args.matrix}: --{what.replace('_', '-')} needs a fully specified matrix")
            S = M.to_array()
            if what == "in_pd":
                verdict = completion.verify_in_pd(S, G, args.tol)
                witness = {"residual_max": completion.markov_residual(S, G),
                           "positive_definite": symlin.is_positive_definite(S)}
            else:
                verdict = completion.verify_in_p(S, G, args.tol)
    payload = {"check": what, "verdict": verdict, "witness": witness}
    text = f"{what}: {str(verdict).lower()}"
    if witness:
        text += "\n" + "\n".join(f"{k}: {v}" for k, v in witness.items())
    _emit(args, payload, text)
    return EXIT_OK if verdict else EXIT_NEGATIVE


def cmd_inverse(args):
    D, perm = _load_dag(args.graph, args.relabel)
    gamma = _load(partial.read_matrix, args.matrix)
    if perm is not None:
        gamma = gamma.permute(perm)
    try:
        rep = analytics.markov_inverse(gamma, D, args.tol)
    except NotCompletable as exc:
        _emit(args, {"status": "not_completable", "failing_vertex": _orig_vertex(exc.j, perm)},
              f"status: not_completable\n{exc}")
        return EXIT_NEGATIVE
    omega = _unpermute(rep.omega, perm)
    payload = {"status": "completed", "det_omega": rep.det_omega, "log_det_omega": rep.log_det_omega}
    if args.command == "inverse":
        payload["omega"] = omega
    if args.verbose:
        payload["families"] = [{"vertex": v, "family": list(fa), "parents": list(pa)}
                               for v, fa, pa in rep.per_family_terms]
        payload["materialized"] = [[i, j, x] for (i, j), x in sorted(rep.materialized.items())]
    lines = ["status: completed"]
    if args.command == "inverse":
        lines += ["inverse:", _fmt_matrix(omega, args.precision)]
    lines.append(f"det(inverse): {rep.det_omega:.{args.precision}g}")
    if args.verbose:
        for v, fa, pa in rep.per_family_terms:
            lines.append(f"vertex {v}: family {list(fa)} parents {list(pa)}")
        for (i, j), x in sorted(rep.materialized.items()):
            lines.append(f"computed cell ({i},{j}) = {x:.{args.precision}g}")
    _emit(args, payload, "\n".join(lines))
    return EXIT_OK


def cmd_counterexample(args):
    D, perm = _load_dag(args.graph, args.relabel)
    try:
        gamma = analytics.counterexample_partial_matrix(D, args.epsilon)
    except PerfectDag as exc:
        print(f"{exc}", file=sys.stderr)
        return EXIT_NEGATIVE
    in_q = partial.is_partial_positive_definite(gamma, D)
    res = completion.complete_in_pd(gamma, D)
    out_gamma = gamma.permute(graph.invert_permutation(perm)) if perm else gamma
    text = partial.serialize(out_gamma)
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text)
    transcript = [
        f"immorality used: {graph.immoralities(D)[0]}",
        f"partial positive definite: {str(in_q).lower()}",
        f"completion: {'completed' if res.completed else 'not_completable'}"
        + ("" if res.completed else f" (family of vertex {_orig_vertex(res.failing_vertex, perm)})"),
    ]
    payload = {"matrix": out_gamma.to_array(), "partial_pd": in_q, "completed": res.completed,
               "failing_vertex": _orig_vertex(res.failing_vertex, perm)}
    _emit(args, payload, ("" if args.out else text) + "\n".join(transcript))
    return EXIT_OK


def cmd_c4(args):
    rep = analytics.c4_inequalities(args.a, args.b, args.c, args.d)
    d = rep.as_dict()
    text = "\n".join(f"{k}={v:.4f}" if isinstance(v, float) else f"{k}={v}"
                     for k, v in d.items() if not k.endswith("branches"))
    text += f"\nf5 branches: {rep.f5_branches[0]:.4f} {rep.f5_branches[1]:.4f}"
    text += f"\nf6 branches: {rep.f6_branches[0]:.4f} {rep.f6_branches[1]:.4f}"
    _emit(args, d, text)
    return EXIT_OK


def cmd_orientations(args):
    G = _load(graph.read_graph, args.graph)
    if isinstance(G, graph.Dag):
        G = graph.undirected_version(G)
    dags = graph.enumerate_acyclic_orientations(G)
    if args.json:
        print(json.dumps({"count": len(dags),
                          "orientations": [sorted(map(list, D.edges)) for D in dags]}, indent=2))
    else:
        print(f"# {len(dags)} acyclic orientations")
        for k, D in enumerate(dags, 1):
            print(f"# orientation {k}")
            print(graph.format_graph(D), end="")
    return EXIT_OK


def build_parser():
    parser = argparse.ArgumentParser(prog="pdc", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, matrix=True, relabel=True):
        p.add_argument("--graph", required=True, help="graph file")
        if matrix:
            p.add_argument("--matrix", required=matrix == "required" or None, help="matrix file")
        p.add_argument("--tol", type=float, default=symlin.PD_TOL, help="positive definiteness tolerance")
        p.add_argument("--json", action="store_true", help="machine readable output")
        p.add_argument("--precision", type=int, default=6, help="significant digits in text output")
        if relabel:
            p.add_argument("--relabel", action="store_true",
                           help="renumber a DAG violating i -> j => i > j and report the permutation")

    p = sub.add_parser("complete", help="complete a partial matrix over a DAG")
    p.add_argument("--space", choices=("pd", "p"), required=True)
    common(p, matrix="required")
    p.add_argument("--diagnose", action="store_true", help="run every layer, report all failures")
    p.set_defaults(func=cmd_complete)

    p = sub.add_parser("check", help="graph and matrix membership checks")
    g = p.add_mutually_exclusive_group(required=True)
    for flag in ("perfect", "decomposable", "qd", "in-pd", "in-p"):
        g.add_argument(f"--{flag}", dest="what", action="store_const", const=flag.replace("-", "_"))
    common(p, relabel=False)
    p.set_defaults(func=cmd_check)

    for name in ("inverse", "det"):
        p = sub.add_parser(name, help="closed-form inverse / determinant of the completion")
        common(p, matrix="required")
        p.add_argument("--verbose", action="store_true", help="per-family audit trail")
        p.set_defaults(func=cmd_inverse)

    p = sub.add_parser("counterexample", help="non-completable partial matrix for a non-perfect DAG")
    common(p, matrix=False)
    p.add_argument("--epsilon", type=float, required=True)
    p.add_argument("--out", help="write the partial matrix file here")
    p.set_defaults(func=cmd_counterexample)

    p = sub.add_parser("c4", help="completability inequalities on the four-cycle")
    for name in "abcd":
        p.add_argument(name, type=float)
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_c4)

    p = sub.add_parser("orientations", help="list acyclic orientations of a graph")
    p.add_argument("--graph", required=True)
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_orientations)
    return parser


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_INPUT if exc.code else EXIT_OK
    if getattr(args, "tol", 1.0) <= 0:
        print("error: --tol must be positive", file=sys.stderr)
        return EXIT_INPUT
    if getattr(args, "epsilon", None) is not None and not math.sqrt(2) / 2 < args.epsilon < 1:
        print("error: --epsilon must lie in (sqrt(2)/2, 1)", file=sys.stderr)
        return EXIT_INPUT
    try:
        return args.func(args)
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except (PdcError, ValueError) as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
