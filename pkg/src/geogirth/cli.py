"""Command line interface: instance generation, the six algorithm entry
points, oracle verification, and scaling benchmarks with CSV output.

Exit codes: 0 success, 1 I/O or parse or validation error, 2 oracle
mismatch under --verify.
"""

from __future__ import annotations

import argparse
import os
import sys
import time
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .disk_triangle import find_triangle_disk, shortest_triangle_disk
from .generator import GeneratorSpec, generate
from .girth import girth_unweighted, weighted_girth_disk
from .graphs import (ORACLE_CAP, Cycle, Triangle, brute_directed_triangle,
                     brute_girth_unweighted, brute_min_weight_cycle,
                     brute_shortest_directed_triangle, brute_shortest_triangle,
                     brute_triangle, build_disk_graph_brute,
                     build_tx_graph_brute)
from .sites import InstanceError, SiteSet, read_instance, write_instance
from .tx import find_directed_triangle, shortest_triangle_tx

REL_TOL = 1e-9

ALGO_COMMANDS = ("triangle", "shortest-triangle", "girth", "weighted-girth",
                 "tx-triangle", "tx-shortest-triangle")


@dataclass
class RunReport:
    command: str
    instance: str
    answer: str
    seconds: float
    seed: int
    oracle_agrees: Optional[bool] = None

    def print(self, out=sys.stdout):
        print(f"command: {self.command}", file=out)
        print(f"instance: {self.instance}", file=out)
        print(f"answer: {self.answer}", file=out)
        print(f"seconds: {self.seconds:.6f}", file=out)
        print(f"seed: {self.seed}", file=out)
        if self.oracle_agrees is not None:
            print(f"oracle-agreement: {'true' if self.oracle_agrees else 'false'}",
                  file=out)


def _fmt_triangle(t: Optional[Triangle]) -> str:
    if t is None:
        return "none"
    i, j, k = t.sorted_ids
    return f"triangle {i} {j} {k} perimeter={t.perimeter:.17g}"


def _fmt_girth(g: Optional[int]) -> str:
    return "none" if g is None else str(g)


def _fmt_cycle(c: Optional[Cycle]) -> str:
    if c is None:
        return "none"
    verts = " ".join(str(v) for v in c.vertices)
    return f"cycle {verts} length={c.length:.17g}"


def _rel_close(a: float, b: float) -> bool:
    return abs(a - b) <= REL_TOL * max(1.0, abs(a), abs(b))


def _run_algorithm(cmd: str, S: SiteSet, seed: int):
    if cmd == "triangle":
        return find_triangle_disk(S)
    if cmd == "shortest-triangle":
        return shortest_triangle_disk(S, rng_seed=seed)
    if cmd == "girth":
        return girth_unweighted(S)
    if cmd == "weighted-girth":
        return weighted_girth_disk(S, rng_seed=seed)
    if cmd == "tx-triangle":
        return find_directed_triangle(S)
    if cmd == "tx-shortest-triangle":
        return shortest_triangle_tx(S, rng_seed=seed)
    raise ValueError(f"unknown command {cmd!r}")


def _format_answer(cmd: str, result) -> str:
    if cmd in ("triangle", "shortest-triangle", "tx-triangle", "tx-shortest-triangle"):
        return _fmt_triangle(result)
    if cmd == "girth":
        return _fmt_girth(result)
    return _fmt_cycle(result)


def _oracle_agrees(cmd: str, S: SiteSet, result) -> bool:
    if cmd == "triangle":
        slow = brute_triangle(build_disk_graph_brute(S), S)
        return (result is None) == (slow is None)
    if cmd == "shortest-triangle":
        slow = brute_shortest_triangle(build_disk_graph_brute(S), S)
        if (result is None) != (slow is None):
            return False
        return result is None or (
            _rel_close(result.perimeter, slow.perimeter)
            and result.sorted_ids == slow.sorted_ids)
    if cmd == "girth":
        return result == brute_girth_unweighted(build_disk_graph_brute(S))
    if cmd == "weighted-girth":
        slow = brute_min_weight_cycle(build_disk_graph_brute(S))
        if (result is None) != (slow is None):
            return False
        return result is None or _rel_close(result.length, slow.length)
    if cmd == "tx-triangle":
        slow = brute_directed_triangle(build_tx_graph_brute(S), S)
        return (result is None) == (slow is None)
    if cmd == "tx-shortest-triangle":
        slow = brute_shortest_directed_triangle(build_tx_graph_brute(S), S)
        if (result is None) != (slow is None):
            return False
        return result is None or (
            _rel_close(result.perimeter, slow.perimeter)
            and result.sorted_ids == slow.sorted_ids)
    raise ValueError(cmd)


def _default_seed(args_seed: Optional[int]) -> int:
    if args_seed is not None:
        return args_seed
    env = os.environ.get("GEOGIRTH_SEED")
    if env is not None:
        try:
            return int(env)
        except ValueError:
            raise InstanceError(f"GEOGIRTH_SEED={env!r} is not an integer") from None
    return 0


def _parse_bench_spec(spec: str) -> dict:
    """'sizes=4096..65536[,repeats=5]': doubling series between the bounds."""
    out: dict = {}
    for part in spec.split(","):
        if not part:
            continue
        key, _, val = part.partition("=")
        if key == "sizes":
            if ".." in val:
                a, b = val.split("..", 1)
                lo, hi = int(a), int(b)
                if lo < 1 or hi < lo:
                    raise InstanceError(f"bad size range {val!r}")
                sizes = []
                v = lo
                while v <= hi:
                    sizes.append(v)
                    v *= 2
                out["sizes"] = sizes
            else:
                out["sizes"] = [int(v) for v in val.split(":") if v]
        elif key == "repeats":
            out["repeats"] = int(val)
        else:
            raise InstanceError(f"unknown bench option {key!r}")
    if "sizes" not in out:
        raise InstanceError("bench spec needs sizes=A..B")
    return out


def _bench(cmd: str, sizes: list[int], repeats: int, seed: int, out) -> None:
    # each repeat times a fresh instance so the per-size median smooths
    # instance-to-instance variance of the expected-time algorithms
    print("n,repeat,seconds,answer", file=out)
    for n in sizes:
        for rep in range(repeats):
            S = generate(GeneratorSpec(n=n, seed=seed + n + rep))
            t0 = time.perf_counter()
            result = _run_algorithm(cmd, S, seed)
            dt = time.perf_counter() - t0
            ans = _format_answer(cmd, result).replace(",", ";")
            print(f"{n},{rep},{dt:.6f},{ans}", file=out)
            out.flush()


def bench_medians(cmd: str, sizes: list[int], repeats: int = 5, seed: int = 0) -> list[float]:
    """Median wall time per size; used by the acceptance suite.

    Repeats are interleaved across sizes so slow machine drift affects all
    sizes alike (the criterion compares ratios of consecutive sizes), and
    cheap sizes get extra repeats (still >= `repeats`) since timer jitter
    dominates sub-second measurements."""
    import gc

    def reps_for(n: int) -> int:
        return max(repeats, 11 if n <= 8192 else 7)

    times: dict[int, list[float]] = {n: [] for n in sizes}
    # one untimed warm-up at the largest size settles allocator and caches
    _run_algorithm(cmd, generate(GeneratorSpec(n=max(sizes), seed=seed)), seed)
    max_reps = max(reps_for(n) for n in sizes)
    for rep in range(max_reps):
        # alternate the sweep direction so allocator/cache context effects
        # hit neighboring sizes symmetrically across repeats
        order = sizes if rep % 2 == 0 else list(reversed(sizes))
        for n in order:
            if rep >= reps_for(n):
                continue
            S = generate(GeneratorSpec(n=n, seed=seed + n + rep))
            gc.collect()
            gc.disable()
            try:
                t0 = time.perf_counter()
                _run_algorithm(cmd, S, seed)
                times[n].append(time.perf_counter() - t0)
            finally:
                gc.enable()
    return [float(np.median(times[n])) for n in sizes]


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="geogirth",
                                description="triangles and girth of disk and transmission graphs")
    sub = p.add_subparsers(dest="command", required=True)

    g = sub.add_parser("generate", help="write a random instance file")
    g.add_argument("--n", type=int, required=True)
    g.add_argument("--centers", choices=("uniform", "clustered"), default="uniform")
    g.add_argument("--radius-law", choices=("uniform", "power"), default="uniform")
    g.add_argument("--r-min", type=float, default=0.35)
    g.add_argument("--r-max", type=float, default=0.7)
    g.add_argument("--gamma", type=float, default=2.5)
    g.add_argument("--absolute-radii", action="store_true",
                   help="do not scale radii by 1/sqrt(n)")
    g.add_argument("--seed", type=int, default=None)
    g.add_argument("--out", required=True)

    for cmd in ALGO_COMMANDS:
        a = sub.add_parser(cmd, help=f"run {cmd} on an instance file")
        a.add_argument("instance", nargs="?", help="instance file (omit with --bench)")
        a.add_argument("--seed", type=int, default=None)
        a.add_argument("--verify", action="store_true",
                       help="compare against the brute-force oracle")
        a.add_argument("--oracle-cap", type=int, default=ORACLE_CAP)
        a.add_argument("--bench", metavar="SPEC",
                       help="run a doubling series, e.g. sizes=4096..65536")
        a.add_argument("--out", default=None, help="write output here instead of stdout")

    b = sub.add_parser("bench", help="scaling benchmark with CSV output")
    b.add_argument("--command", dest="algo", choices=ALGO_COMMANDS, required=True)
    b.add_argument("--sizes", default="4096..65536",
                   help="doubling range A..B or colon-separated list")
    b.add_argument("--repeats", type=int, default=5)
    b.add_argument("--seed", type=int, default=None)
    b.add_argument("--out", default=None)

    v = sub.add_parser("verify", help="run every algorithm against its oracle")
    v.add_argument("instance")
    v.add_argument("--seed", type=int, default=None)
    v.add_argument("--oracle-cap", type=int, default=ORACLE_CAP)
    return p


def main(argv: Optional[list[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return _dispatch(args)
    except InstanceError as e:
        print(f"error: {e}", file=sys.stderr)
        return 1
    except OSError as e:
        print(f"error: {e}", file=sys.stderr)
        return 1


def _open_out(path: Optional[str]):
    if path is None:
        return sys.stdout, False
    return open(path, "w", encoding="utf-8"), True


def _dispatch(args) -> int:
    if args.command == "generate":
        seed = _default_seed(args.seed)
        spec = GeneratorSpec(n=args.n, centers=args.centers,
                             radius_law=getattr(args, "radius_law"),
                             r_min=args.r_min, r_max=args.r_max,
                             gamma=args.gamma, seed=seed,
                             scale_by_sqrt_n=not args.absolute_radii)
        S = generate(spec)
        write_instance(args.out, S)
        print(f"wrote {args.out}: n={len(S)} seed={seed}")
        return 0

    if args.command == "bench":
        seed = _default_seed(args.seed)
        spec = _parse_bench_spec(f"sizes={args.sizes},repeats={args.repeats}")
        out, close = _open_out(args.out)
        try:
            _bench(args.algo, spec["sizes"], spec["repeats"], seed, out)
        finally:
            if close:
                out.close()
        return 0

    if args.command == "verify":
        seed = _default_seed(args.seed)
        S = read_instance(args.instance)
        if len(S) > args.oracle_cap:
            print(f"error: instance size {len(S)} exceeds oracle cap {args.oracle_cap}",
                  file=sys.stderr)
            return 1
        ok = True
        for cmd in ALGO_COMMANDS:
            t0 = time.perf_counter()
            result = _run_algorithm(cmd, S, seed)
            dt = time.perf_counter() - t0
            agrees = _oracle_agrees(cmd, S, result)
            ok = ok and agrees
            status = "ok" if agrees else "MISMATCH"
            print(f"{cmd}: {status} answer=[{_format_answer(cmd, result)}] seconds={dt:.4f}")
        return 0 if ok else 2

    # algorithm commands
    cmd = args.command
    seed = _default_seed(args.seed)
    if args.bench:
        spec = _parse_bench_spec(args.bench)
        out, close = _open_out(args.out)
        try:
            _bench(cmd, spec["sizes"], spec.get("repeats", 5), seed, out)
        finally:
            if close:
                out.close()
        return 0
    if not args.instance:
        print("error: instance file required (or use --bench)", file=sys.stderr)
        return 1
    S = read_instance(args.instance)
    t0 = time.perf_counter()
    result = _run_algorithm(cmd, S, seed)
    dt = time.perf_counter() - t0
    report = RunReport(cmd, args.instance, _format_answer(cmd, result), dt, seed)
    code = 0
    if args.verify:
        if len(S) > args.oracle_cap:
            print(f"error: --verify needs n <= oracle cap ({args.oracle_cap})",
                  file=sys.stderr)
            return 1
        report.oracle_agrees = _oracle_agrees(cmd, S, result)
        if not report.oracle_agrees:
            code = 2
    out, close = _open_out(args.out)
    try:
        report.print(out)
    finally:
        if close:
            out.close()
    return code


if __name__ == "__main__":
    sys.exit(main())
