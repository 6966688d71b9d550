"""Deterministic command-line front end.

Exit codes: 0 success / all checks pass, 1 a verification failed (witness on
stderr), 2 usage error.  All numeric output is exact ("p/q"); verification
timings go to stderr so stdout is byte-identical across runs.
"""

from __future__ import annotations

import argparse
import itertools
import json
import sys
import time
from concurrent.futures import ProcessPoolExecutor

from . import cycles, rtclasses, serialize, strata0, trees, weights
from .trees import InvalidArgument


def _read_json(path: str) -> dict:
    if path == "-":
        return json.load(sys.stdin)
    with open(path) as fh:
        return json.load(fh)


def _emit(text: str) -> None:
    sys.stdout.write(text if text.endswith("\n") else text + "\n")


# ---------------------------------------------------------------------------
# subcommands


def cmd_trees(args) -> int:
    if args.rt:
        family = trees.enumerate_rt_graphs(args.n)
    else:
        family = trees.enumerate_trees0(args.n)
    if args.format == "json":
        _emit(serialize.dumps({"count": len(family), "trees": [serialize.tree_to_json(t) for t in family]}))
    else:
        _emit(str(len(family)))
        for t in family:
            _emit(serialize.tree_to_latex(t))
    return 0


def cmd_coeff(args) -> int:
    tree, dec = serialize.tree_from_json(_read_json(args.graph))
    method = "brute" if args.brute else "dp"
    if args.coda:
        if args.i is None:
            raise InvalidArgument("--coda needs --i")
        I = frozenset(int(x) for x in args.coda.split(","))
        value = weights.coeff_d(tree, dec, args.i, I, method=method)
        count = len(weights.enumerate_weightings(tree, dec, context="i-coda", i=args.i, I=I))
    elif args.i is not None:
        value = weights.coeff_c_im(tree, dec, args.i, args.m, method=method)
        count = len(weights.enumerate_weightings(tree, dec, context="i-rooted", i=args.i, m=args.m))
    else:
        mults = _parse_mults(args.multiplicities) if args.multiplicities else None
        value = weights.coeff_c(tree, dec, mults, method=method)
        count = len(weights.enumerate_weightings(tree, dec, mults=mults))
    _emit(str(value))
    _emit(f"weightings: {count}")
    return 0


def _parse_mults(raw: str) -> dict:
    vals = [int(x) for x in raw.split(",")]
    return {idx + 1: v for idx, v in enumerate(vals)}


def cmd_zcycle(args) -> int:
    if args.truncated:
        x = cycles.z_truncated(args.n, args.i, args.j)
    else:
        x = cycles.z_cycle(args.n, args.i, args.j, args.m)
    if args.format == "json":
        _emit(serialize.dumps(serialize.class0_to_json(x)))
    else:
        _emit(serialize.class0_to_latex(x))
    return 0


def cmd_fclass(args) -> int:
    k = args.k if args.k in ("sym", "k") else int(args.k)
    if args.multiplicities:
        mults = tuple(int(x) for x in args.multiplicities.split(","))
        x = rtclasses.f_class_m(k, args.g, mults)
    elif args.n is not None:
        x = rtclasses.f_class(k, args.g, args.n)
    else:
        raise InvalidArgument("fclass needs --n or --multiplicities")
    ksym = "k" if k in ("sym", "k") else str(k)
    if args.format == "json":
        _emit(serialize.dumps(serialize.rtclass_to_json(x, k=ksym)))
    else:
        _emit(serialize.rtclass_to_latex(x, k=ksym))
    return 0


def cmd_pair(args) -> int:
    x = serialize.class0_from_json(_read_json(args.klass))
    stratum, dec = serialize.tree_from_json(_read_json(args.stratum))
    if dec.degree():
        raise InvalidArgument("the test stratum must be undecorated")
    _emit(str(strata0.pair(x, stratum)))
    return 0


def cmd_relations(args) -> int:
    x = rtclasses.emit_relation(args.g, args.n)
    if args.format == "json":
        blob = serialize.rtclass_to_json(x, k="1")
        blob["relation"] = f"F^1_(g={args.g},n={args.n}) = 0 over rational tails"
        _emit(serialize.dumps(blob))
    else:
        _emit("0 = " + serialize.rtclass_to_latex(x, k="1"))
    return 0


# ---------------------------------------------------------------------------
# verification suites (parallelizable grids)


def _grid(suite: str, max_n: int, max_sum: int) -> list:
    tasks = []
    if suite == "vanishing":
        for n in range(3, max_n + 1):
            for i in range(1, n):
                for j in range(1, i):
                    tasks.append(("vanishing_z", (n, i, j)))
                    tasks.append(("vanishing_zt", (n, i, j)))
    elif suite == "recursion":
        for n in range(3, max_n + 1):
            for i in range(1, n):
                for j in range(i - n + 1, i):
                    tasks.append(("recursion_all", (n, i, j)))
                    tasks.append(("dect", (n, i, j)))
    elif suite == "decrec":
        for n in range(3, max_n + 1):
            for i in range(1, n):
                tasks.append(("decrec", (n, i)))
    elif suite == "collide0":
        for n in range(3, max_n + 1):
            for m in range(1, n):
                tasks.append(("collide0", (n, m)))
    elif suite == "closed-forms":
        for n in range(3, max_n + 1):
            tasks.append(("closed_forms", (n,)))
    elif suite == "ei":
        for n in range(3, max_n + 1):
            for r in range(1, n - 1):
                for I in itertools.combinations(range(1, n), r):
                    for i in range(1, n):
                        tasks.append(("ei_pushforward", (n, I, i)))
    elif suite == "frec":
        for n in range(2, max_n + 1):
            tasks.append(("frec", (n,)))
    elif suite == "collide-rt":
        for total in range(2, max_sum + 1):
            for mults in _compositions(total):
                tasks.append(("colliding_rt", (mults,)))
    elif suite == "logan":
        for g in (2, 3):
            tasks.append(("logan", (g,)))
    elif suite == "heavy":
        for a in range(1, 7):
            tasks.append(("heavy", (a,)))
        tasks.append(("heavy_pushforwards", ()))
    elif suite == "expansions":
        tasks.append(("expansions", ()))
        for n in range(1, min(max_n, 4) + 1):
            tasks.append(("overdegree_drop", (n,)))
    else:
        raise InvalidArgument(f"unknown suite {suite!r}")
    return tasks


def _compositions(total: int):
    if total == 0:
        yield ()
        return
    for first in range(1, total + 1):
        for rest in _compositions(total - first):
            yield (first,) + rest


def run_task(task) -> cycles.VerificationReport:
    name, params = task
    if name == "vanishing_z":
        n, i, j = params
        t0 = time.perf_counter()
        w = strata0.zero_witness(cycles.z_cycle(n, i, j))
        return cycles.VerificationReport("vanishing_z", params, w is None, w, time.perf_counter() - t0)
    if name == "vanishing_zt":
        n, i, j = params
        t0 = time.perf_counter()
        w = strata0.zero_witness(cycles.z_truncated(n, i, j))
        return cycles.VerificationReport("vanishing_zt", params, w is None, w, time.perf_counter() - t0)
    if name == "recursion_all":
        return cycles.verify_recursion_all(*params)
    if name == "dect":
        return cycles.verify_dect(*params)
    if name == "decrec":
        return cycles.verify_decrec(*params)
    if name == "collide0":
        return cycles.verify_collide0(*params)
    if name == "closed_forms":
        return cycles.verify_closed_forms(*params)
    if name == "ei_pushforward":
        n, I, i = params
        return cycles.verify_ei_pushforward(n, I, i)
    if name == "frec":
        return rtclasses.verify_frec("k", "g", params[0])
    if name == "colliding_rt":
        return rtclasses.verify_colliding_rt("k", "g", params[0])
    if name == "overdegree_drop":
        return rtclasses.verify_overdegree_drop(params[0])
    if name == "logan":
        return _verify_logan(params[0])
    if name == "heavy":
        return _verify_heavy(params[0])
    if name == "heavy_pushforwards":
        return _verify_heavy_pushforwards()
    if name == "expansions":
        return _verify_expansions()
    raise InvalidArgument(f"unknown task {name!r}")


def _verify_logan(g: int) -> cycles.VerificationReport:
    from .rtclasses import KPoly, PushedClass, _leg_slot, pushforward_phi
    from .trees import build_tree

    t0 = time.perf_counter()
    out = pushforward_phi(rtclasses.f_class(1, g, g), k=1, g=g)
    expected = PushedClass()
    t, d = build_tree([list(range(1, g + 1))], [], rt_root=0)
    for i in range(1, g + 1):
        expected._add((t, d, ((_leg_slot(i), 1),), ()), KPoly.const(1))
    expected._add((t, d, (), (1,)), KPoly.const(-1))
    for r in range(2, g + 1):
        for M in itertools.combinations(range(1, g + 1), r):
            root = [l for l in range(1, g + 1) if l not in M]
            tc, dc = build_tree([root, list(M)], [(0, 1)], rt_root=0)
            expected._add((tc, dc, (), ()), KPoly.const(-r * (r - 1) // 2))
    ok = out == expected
    return cycles.VerificationReport("logan", (g,), ok, None if ok else "class mismatch", time.perf_counter() - t0)


def _verify_heavy(a: int) -> cycles.VerificationReport:
    t0 = time.perf_counter()
    ok = rtclasses.f_heavy_expanded(a) == rtclasses.heavy_point_expansion(a)
    return cycles.VerificationReport("heavy", (a,), ok, None if ok else "expansion mismatch", time.perf_counter() - t0)


def _verify_heavy_pushforwards() -> cycles.VerificationReport:
    from .rtclasses import KPoly, PushedClass, pushforward_phi, pushforward_point
    from .trees import build_tree

    t0 = time.perf_counter()
    out = pushforward_point(rtclasses.f_class_m("k", "g", (2,)), g=None)
    expected = PushedClass()
    expected._add(("kappa", 1, "eta", 0), KPoly({2: 1, 1: 1}))
    expected._add(("kappa", 0, "eta", 1), KPoly({1: -2, 0: -1}))
    ok = out == expected
    if ok:
        t, d = build_tree([[1]], [], rt_root=0)
        phi = pushforward_phi(rtclasses.f_class_m("k", "g", (2,)), k=2, g=2, rank_override=3)
        ok = phi == PushedClass({(t, d, (), ()): KPoly.const(1)})
    return cycles.VerificationReport(
        "heavy_pushforwards", (), ok, None if ok else "pushforward mismatch", time.perf_counter() - t0
    )


def _verify_expansions() -> cycles.VerificationReport:
    t0 = time.perf_counter()
    ok = True
    witness = None
    try:
        for n in (1, 2, 3):
            rtclasses.f_class("k", "g", n)
        # the appendix consistency: F_2 = (kω1-η)(kω2-η) - E_{1}
        from .rtclasses import RtClass, _fact_tuple, _leg_slot
        from .trees import build_tree

        t, d = build_tree([[1, 2]], [], rt_root=0)
        smooth = RtClass({1, 2}, {(t, d, _fact_tuple({_leg_slot(1): 1, _leg_slot(2): 1})): 1})
        ok = rtclasses.f_class("k", "g", 2) == smooth - rtclasses.e_class("k", "g", 2, {1})
        if not ok:
            witness = "F_2 vs (kω-η)^2 - E_1"
    except Exception as exc:  # pragma: no cover - defensive
        ok, witness = False, repr(exc)
    return cycles.VerificationReport("expansions", (), ok, witness, time.perf_counter() - t0)


def cmd_verify(args) -> int:
    t_start = time.perf_counter()
    tasks = _grid(args.suite, args.max_n, args.max_sum)
    if args.jobs > 1:
        with ProcessPoolExecutor(max_workers=args.jobs) as pool:
            reports = list(pool.map(run_task, tasks))
    else:
        reports = []
        for t in tasks:
            rep = run_task(t)
            reports.append(rep)
            if args.fail_fast and not rep.passed:
                break
    failed = [r for r in reports if not r.passed]
    for rep in reports:
        _emit(rep.line())
        print(f"  time: {rep.seconds:.3f}s", file=sys.stderr)
    if failed:
        for rep in failed:
            print(f"witness: {rep.identity}{rep.params}: {rep.witness!r}", file=sys.stderr)
        return 1
    elapsed = time.perf_counter() - t_start
    if args.time_budget is not None and elapsed > args.time_budget:
        print(f"time budget exceeded: {elapsed:.3f}s > {args.time_budget:g}s", file=sys.stderr)
        return 1
    return 0


# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="rtails", description=__doc__)
    sub = p.add_subparsers(dest="command", required=True)

    q = sub.add_parser("trees", help="enumerate stable trees")
    q.add_argument("--n", type=int, required=True)
    q.add_argument("--rt", action="store_true", help="rational-tails graphs instead of rooted rational trees")
    q.add_argument("--format", choices=("json", "text"), default="text")
    q.set_defaults(fn=cmd_trees)

    q = sub.add_parser("coeff", help="weighting coefficient of a decorated graph")
    q.add_argument("--graph", required=True, help="JSON file or - for stdin")
    q.add_argument("--i", type=int)
    q.add_argument("--m", type=int, default=1)
    q.add_argument("--coda", help="comma-separated I for the coda coefficient")
    q.add_argument("--multiplicities")
    q.add_argument("--brute", action="store_true", help="use the brute-force oracle")
    q.set_defaults(fn=cmd_coeff)

    q = sub.add_parser("zcycle", help="a graded piece of the rooted D-polynomial")
    q.add_argument("--n", type=int, required=True)
    q.add_argument("--i", type=int, required=True)
    q.add_argument("--j", type=int, required=True)
    q.add_argument("--m", type=int, default=1)
    q.add_argument("--truncated", action="store_true")
    q.add_argument("--format", choices=("json", "latex"), default="latex")
    q.set_defaults(fn=cmd_zcycle)

    q = sub.add_parser("fclass", help="the rational-tails graph-formula class")
    q.add_argument("--k", default="sym")
    q.add_argument("--g", default="sym")
    q.add_argument("--n", type=int)
    q.add_argument("--multiplicities")
    q.add_argument("--format", choices=("json", "latex"), default="latex")
    q.set_defaults(fn=cmd_fclass)

    q = sub.add_parser("pair", help="pair a class against an undecorated stratum")
    q.add_argument("--klass", "--class", dest="klass", required=True)
    q.add_argument("--stratum", required=True)
    q.set_defaults(fn=cmd_pair)

    q = sub.add_parser("verify", help="run a verification suite")
    q.add_argument(
        "suite",
        choices=(
            "vanishing",
            "recursion",
            "decrec",
            "collide0",
            "closed-forms",
            "ei",
            "frec",
            "collide-rt",
            "logan",
            "heavy",
            "expansions",
        ),
    )
    q.add_argument("--max-n", type=int, default=4)
    q.add_argument("--max-sum", type=int, default=4, help="bound on Σm for collide-rt")
    q.add_argument("--fail-fast", action="store_true")
    q.add_argument("--jobs", type=int, default=1)
    q.add_argument(
        "--time-budget",
        type=float,
        help="fail (exit 1) when the suite exceeds this many seconds; results still print",
    )
    q.set_defaults(fn=cmd_verify)

    q = sub.add_parser("relations", help="emit a vanishing-regime class as a relation")
    q.add_argument("--g", type=int, required=True)
    q.add_argument("--n", type=int, required=True)
    q.add_argument("--format", choices=("json", "latex"), default="latex")
    q.set_defaults(fn=cmd_relations)

    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 2 if exc.code not in (0, None) else 0
    try:
        return args.fn(args)
    except InvalidArgument as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (OSError, json.JSONDecodeError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
