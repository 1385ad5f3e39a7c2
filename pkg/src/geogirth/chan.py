"""Randomized reduction from geometric optimization to its decision problem.

The driver recurses on r subproblems in uniformly random order, carrying the
best value found so far and asking the decision oracle whether a subproblem
can still improve on it.  The returned optimum is exact and independent of
the seed; only the running time is randomized.
"""

from __future__ import annotations

import math
import random
from typing import Optional, Protocol, runtime_checkable


class ChanInconsistencyError(RuntimeError):
    """decide() and split()/base_solve() disagree about the optimum."""


@runtime_checkable
class OptProblem(Protocol):
    def size(self) -> int: ...

    def decide(self, t: float) -> bool:
        """Whether the optimum of this subproblem beats t (w(P) < t under the
        tie-perturbed order; t may be math.inf, meaning: any solution at all)."""
        ...

    def split(self) -> list["OptProblem"]:
        """At most r subproblems, each of size <= ceil(alpha * size), whose
        minimum optimum equals this problem's optimum."""
        ...

    def base_solve(self) -> Optional[float]:
        """Exact optimum for small instances (None = no feasible solution)."""
        ...


def optimize(problem: OptProblem, alpha: float, r: int, n0: int,
             rng_seed: int, initial: Optional[float] = None,
             stats: Optional[dict] = None) -> Optional[float]:
    """Exact optimum of `problem`; None when no solution exists.

    `initial` may carry a known achievable value (an upper bound realized by
    an actual solution); passing it skips the open-ended existence decisions
    at the top of the recursion.
    """
    if not (0.0 < alpha < 1.0):
        raise ValueError("alpha must be in (0, 1)")
    if r < 1:
        raise ValueError("r must be >= 1")
    if math.ceil(alpha * (n0 + 1)) > n0:
        raise ValueError(f"n0={n0} too small for alpha={alpha}: recursion would stall")

    rng = random.Random(rng_seed)
    best: Optional[float] = initial
    decide_calls = 0
    base_calls = 0

    def solve(p: OptProblem) -> None:
        nonlocal best, decide_calls, base_calls
        if p.size() <= n0:
            base_calls += 1
            val = p.base_solve()
            if val is not None and (best is None or val < best):
                best = val
            return
        subs = p.split()
        if len(subs) > r:
            raise ChanInconsistencyError(f"split produced {len(subs)} > r={r} subproblems")
        cap = math.ceil(alpha * p.size())
        for sp in subs:
            if sp.size() > cap:
                raise ChanInconsistencyError(
                    f"subproblem size {sp.size()} exceeds ceil(alpha*n) = {cap}")
        order = list(range(len(subs)))
        rng.shuffle(order)
        for k in order:
            sp = subs[k]
            t_entry = best
            decide_calls += 1
            if sp.decide(math.inf if t_entry is None else t_entry):
                solve(sp)
                if best is None:
                    raise ChanInconsistencyError(
                        "decide reported a solution but none was found")
                if t_entry is not None and best >= t_entry:
                    raise ChanInconsistencyError(
                        "decide claimed an improvement the recursion did not find")

    solve(problem)
    if stats is not None:
        stats["decide_calls"] = decide_calls
        stats["base_calls"] = base_calls
    return best


def mod4_split_indices(n: int) -> list[list[int]]:
    """The four index subsets dropping every fourth position, offset 0..3.

    Any three positions survive together in at least one subset, so the
    minimum over subsets preserves a minimum-triangle optimum.
    """
    return [[i for i in range(n) if i % 4 != j] for j in range(4)]
