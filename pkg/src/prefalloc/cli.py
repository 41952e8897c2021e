"""Command-line front end.

Subcommands: solve, classify, bound, check, oracle, gen, bench.  All
output is JSON on stdout (DOT with ``--format dot``); identical
invocations produce byte-identical output.  Exit codes: 0 success, 2 no
applicable solver / solver precondition failed, 1 I/O or validation
error.
"""

from __future__ import annotations

import argparse
import json
import sys
import time

from . import instances as gen_mod
from .certificates import certify, lower_bound
from .errors import PrefAllocError, PreconditionViolated, Unsupported
from .graph import PreferenceGraph, reachability
from .io import (
    allocation_result_to_dict,
    instance_to_dict,
    load_allocation,
    load_instance,
    to_dot,
)
from .oracle import brute_force_optimum
from .recognize import cactus_decompose, classify, sp_decompose
from .solvers import (
    solve_auto,
    solve_by_components,
    solve_canonical_many_agents,
    solve_out_cactus,
    solve_out_tree,
    solve_polytree,
    solve_series_parallel,
    solve_two_agents,
    solve_width_two,
)


def _emit(text: str, output: str | None) -> None:
    if output:
        with open(output, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _emit_json(obj, output: str | None) -> None:
    _emit(json.dumps(obj, indent=2, sort_keys=True) + "\n", output)


def _agents(args, file_agents: int | None) -> int:
    k = args.agents if args.agents is not None else file_agents
    if k is None:
        raise PrefAllocError("agent count missing: pass --agents or set it in the file")
    if k < 1:
        raise PrefAllocError("agent count must be >= 1")
    return k


def _forced_solve(graph: PreferenceGraph, k: int, name: str):
    if name == "canonical":
        return solve_canonical_many_agents(graph, k)
    if name == "two_agents":
        if k != 2:
            raise PreconditionViolated("two_agents solver requires --agents 2")
        return solve_two_agents(graph)
    if name == "out_tree":
        return solve_out_tree(graph, k)
    if name == "polytree":
        return solve_by_components(graph, k, solve_polytree)
    if name == "series_parallel":
        return solve_series_parallel(graph, sp_decompose(graph), k)
    if name == "out_cactus":
        return solve_out_cactus(graph, cactus_decompose(graph), k)
    if name == "width_two":
        return solve_width_two(graph, reachability(graph), k)
    if name == "oracle":
        return brute_force_optimum(graph, reachability(graph), k).best_allocation
    raise PrefAllocError(f"unknown solver {name!r}")


def _cmd_solve(args) -> int:
    graph, file_agents = load_instance(args.instance)
    k = _agents(args, file_agents)
    if args.solver:
        allocation = _forced_solve(graph, k, args.solver)
        solver = args.solver
        certificate = certify(graph, reachability(graph), allocation)
    else:
        result = solve_auto(graph, k)
        allocation, solver, certificate = (
            result.allocation,
            result.solver_used,
            result.certificate,
        )
    if args.format == "dot":
        _emit(to_dot(graph, allocation), args.output)
        return 0
    _emit_json(
        allocation_result_to_dict(
            allocation, solver, certificate, include_certificate=args.certify
        ),
        args.output,
    )
    return 0


def _cmd_classify(args) -> int:
    graph, file_agents = load_instance(args.instance)
    k = _agents(args, file_agents)
    _emit_json(classify(graph, k).to_json_dict(), args.output)
    return 0


def _cmd_bound(args) -> int:
    graph, file_agents = load_instance(args.instance)
    k = _agents(args, file_agents)
    _emit_json({"lower_bound": lower_bound(graph, reachability(graph), k)}, args.output)
    return 0


def _cmd_check(args) -> int:
    graph, _ = load_instance(args.instance)
    allocation = load_allocation(args.allocation)
    cert = certify(graph, reachability(graph), allocation)
    _emit_json(cert.to_json_dict(), args.output)
    return 0


def _cmd_oracle(args) -> int:
    graph, file_agents = load_instance(args.instance)
    k = _agents(args, file_agents)
    result = brute_force_optimum(graph, reachability(graph), k, limit=args.limit)
    _emit_json(
        {
            "best_total": result.best_total,
            "labeling": [lab if lab is not None else None for lab in result.best_labeling],
            "bundles": [sorted(b) for b in result.best_allocation.bundles],
        },
        args.output,
    )
    return 0


_GEN_CLASSES = {
    "polytree": lambda args: gen_mod.random_polytree(args.n, args.seed),
    "out_tree": lambda args: gen_mod.random_out_tree(args.n, args.seed),
    "sp": lambda args: gen_mod.random_sp(args.depth, args.seed),
    "out_cactus": lambda args: gen_mod.random_out_cactus(args.n, args.seed),
    "width_two": lambda args: gen_mod.random_width_two(args.n, args.seed),
    "dag": lambda args: gen_mod.random_dag(args.n, args.p, args.seed),
}


def _cmd_gen(args) -> int:
    graph = _GEN_CLASSES[getattr(args, "cls")](args)
    if args.format == "dot":
        _emit(to_dot(graph), args.output)
    else:
        _emit_json(instance_to_dict(graph, args.agents), args.output)
    return 0


def _cmd_bench(args) -> int:
    sizes = [int(s) for s in args.sizes.split(",") if s]
    k = args.agents
    # warm up the compiled path so timings measure the solve alone
    solve_polytree(gen_mod.random_polytree(10_000, args.seed), k)
    results = []
    for n in sizes:
        graph = gen_mod.random_polytree(n, args.seed)
        t0 = time.perf_counter()
        solve_polytree(graph, k)
        seconds = time.perf_counter() - t0
        results.append({"n": n, "seconds": round(seconds, 6)})
    _emit_json({"agents": k, "results": results}, args.output)
    return 0


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="prefalloc",
        description="Exact solvers for item allocation under a common preference DAG.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, instance=True):
        if instance:
            p.add_argument("instance", help="instance JSON file")
        p.add_argument("--agents", "-k", type=int, default=None, help="number of agents")
        p.add_argument("--output", "-o", default=None, help="write output to a file")

    p = sub.add_parser("solve", help="solve an instance and print the allocation")
    common(p)
    p.add_argument(
        "--solver",
        choices=sorted(
            ["canonical", "two_agents", "out_tree", "polytree", "series_parallel",
             "out_cactus", "width_two", "oracle"]
        ),
        default=None,
        help="force a specific solver instead of automatic dispatch",
    )
    p.add_argument("--certify", action="store_true", help="append the certificate block")
    p.add_argument("--format", choices=["json", "dot"], default="json")
    p.set_defaults(func=_cmd_solve)

    p = sub.add_parser("classify", help="report structure flags and chosen solver")
    common(p)
    p.set_defaults(func=_cmd_classify)

    p = sub.add_parser("bound", help="print the dissatisfaction lower bound")
    common(p)
    p.set_defaults(func=_cmd_bound)

    p = sub.add_parser("check", help="certify an allocation file against an instance")
    p.add_argument("instance", help="instance JSON file")
    p.add_argument("allocation", help="allocation JSON file")
    p.add_argument("--output", "-o", default=None)
    p.set_defaults(func=_cmd_check)

    p = sub.add_parser("oracle", help="exhaustive optimum for small instances")
    common(p)
    p.add_argument("--limit", type=int, default=12, help="max items for exhaustive search")
    p.set_defaults(func=_cmd_oracle)

    p = sub.add_parser("gen", help="generate a random instance of a named class")
    p.add_argument("--class", dest="cls", choices=sorted(_GEN_CLASSES), required=True)
    p.add_argument("--n", type=int, default=10, help="item count (ignored for sp)")
    p.add_argument("--depth", type=int, default=4, help="composition depth for sp")
    p.add_argument("--p", type=float, default=0.3, help="arc probability for dag")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--agents", "-k", type=int, default=None)
    p.add_argument("--output", "-o", default=None)
    p.add_argument("--format", choices=["json", "dot"], default="json")
    p.set_defaults(func=_cmd_gen)

    p = sub.add_parser("bench", help="time the polytree solver at growing sizes")
    p.add_argument("--sizes", default="1000,10000,100000")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--agents", "-k", type=int, default=5)
    p.add_argument("--output", "-o", default=None)
    p.set_defaults(func=_cmd_bench)

    return parser


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (Unsupported, PreconditionViolated) as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 2
    except (PrefAllocError, OSError, json.JSONDecodeError) as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
