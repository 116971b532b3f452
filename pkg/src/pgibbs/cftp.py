"""Coupling from the past: exact posterior samples for noisy-OR networks.

Runs are attempted from start times -1, -2, -4, ... until the chain state
at time 0 is fully determined. Every attempt reuses the same per-time
uniforms (the stream is addressed by absolute time), and the state is
always read at t = 0 regardless of when coalescence happened; both points
are what make the returned configuration an exact draw from the posterior.

Two drivers are provided: `cftp_summary` tracks the set of all chains with
one ternary summary state (cheap, may overstate the set and so coalesce
late), and `cftp_explicit` tracks every chain from every start state
(exponential in the unknown count; the ground-truth reference).
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from itertools import product

from .chain import (
    RandomStream,
    build_schedule,
    gibbs_conditional,
    gibbs_step,
    unit_uniform,
)
from .errors import SizeLimitError
from .model import Network
from .summary import UNDECIDED, all_undecided_state, summary_conditional_bounds

COALESCED = "coalesced"
INDETERMINATE = "indeterminate"

DEFAULT_T_MAX = 1 << 20

# Conditional probabilities and summary bounds depend only on the updated
# node and the values of its Markov blanket, so per-run caches keyed by
# that slice make repeated visits (across chains and across restarts)
# nearly free.


@dataclass(frozen=True)
class RunRecord:
    """Outcome of one exact-sampling attempt sequence for one seed.

    For a coalesced run, ``coalescence_time`` is the smallest attempted
    start depth that produced a fully determined state at t = 0 (a power
    of two under the doubling schedule), ``sample`` is that state, and
    ``total_steps`` = 1 + 2 + ... + coalescence_time = 2 * coalescence_time - 1.
    For an indeterminate run ``sample`` and ``coalescence_time`` are None
    and ``deepest_attempt`` records the last start depth tried.
    """

    seed: int
    status: str
    sample: tuple | None
    coalescence_time: int | None
    total_steps: int
    deepest_attempt: int


def cftp_summary(net: Network, seed: int, t_max: int = DEFAULT_T_MAX) -> RunRecord:
    """Exact sample via the ternary summary chain.

    The network should be valid (see model.validate); at least one node
    must be unobserved. Deterministic given (net, seed, t_max).
    """
    order = build_schedule(net).order
    if not order:
        raise ValueError("cannot sample: every node is observed")
    period = len(order)
    relevant = net._relevant
    start = all_undecided_state(net)
    bounds_cache: dict = {}
    total = 0
    depth = 1
    while depth <= t_max:
        s = list(start)
        for t in range(-depth, 0):
            k = order[t % period]
            key = (k, *(s[i] for i in relevant[k]))
            b = bounds_cache.get(key)
            if b is None:
                b = summary_conditional_bounds(net, s, k)
                bounds_cache[key] = b
            u = unit_uniform(seed, t)
            if u < b[0]:
                s[k] = 1
            elif u >= b[1]:
                s[k] = 0
            else:
                s[k] = UNDECIDED
        total += depth
        if UNDECIDED not in s:
            return RunRecord(
                seed=seed,
                status=COALESCED,
                sample=tuple(s),
                coalescence_time=depth,
                total_steps=total,
                deepest_attempt=depth,
            )
        depth *= 2
    return RunRecord(
        seed=seed,
        status=INDETERMINATE,
        sample=None,
        coalescence_time=None,
        total_steps=total,
        deepest_attempt=depth // 2,
    )


def cftp_explicit(
    net: Network,
    seed: int,
    t_max: int = DEFAULT_T_MAX,
    max_unknowns: int = 16,
) -> RunRecord:
    """Exact sample by explicitly evolving chains from every start state.

    Coalescence means the set of chain states at t = 0 is a singleton.
    Exponential in the number of unobserved nodes; refuses more than
    ``max_unknowns`` of them.
    """
    unknowns = net.unobserved
    if not unknowns:
        raise ValueError("cannot sample: every node is observed")
    if len(unknowns) > max_unknowns:
        raise SizeLimitError(
            f"{len(unknowns)} unobserved nodes would need 2**{len(unknowns)} "
            f"chains (cap {max_unknowns})"
        )
    order = unknowns
    period = len(order)
    relevant = net._relevant
    template = [net.evidence.get(i, 0) for i in range(net.n)]
    initial = []
    for bits in product((0, 1), repeat=len(unknowns)):
        x = template.copy()
        for i, b in zip(unknowns, bits):
            x[i] = b
        initial.append(tuple(x))
    cond_cache: dict = {}
    total = 0
    depth = 1
    while depth <= t_max:
        chains = set(initial)
        for t in range(-depth, 0):
            k = order[t % period]
            u = unit_uniform(seed, t)
            step_to: set = set()
            for x in chains:
                key = (k, *(x[i] for i in relevant[k]))
                p = cond_cache.get(key)
                if p is None:
                    p = gibbs_conditional(net, x, k)
                    cond_cache[key] = p
                v = 1 if u < p else 0
                if x[k] != v:
                    x = x[:k] + (v,) + x[k + 1 :]
                step_to.add(x)
            chains = step_to
        total += depth
        if len(chains) == 1:
            return RunRecord(
                seed=seed,
                status=COALESCED,
                sample=next(iter(chains)),
                coalescence_time=depth,
                total_steps=total,
                deepest_attempt=depth,
            )
        depth *= 2
    return RunRecord(
        seed=seed,
        status=INDETERMINATE,
        sample=None,
        coalescence_time=None,
        total_steps=total,
        deepest_attempt=depth // 2,
    )


def forward_samples(
    net: Network, start, n: int, seed: int, per_step: bool = False
) -> list[tuple]:
    """Ordinary Gibbs sampling forward from t = 0 for n full sweeps.

    Records the configuration after each sweep (or after every single step
    with ``per_step``). Started from an exact sample, every recorded state
    is marginally an exact posterior draw.
    """
    schedule = build_schedule(net)
    if not schedule.order:
        raise ValueError("cannot sample: every node is observed")
    stream = RandomStream(seed)
    period = schedule.period
    out: list[tuple] = []
    x = tuple(start)
    for sweep in range(n):
        for t in range(sweep * period, (sweep + 1) * period):
            x = gibbs_step(net, x, t, stream, schedule)
            if per_step:
                out.append(x)
        if not per_step:
            out.append(x)
    return out


def marginals(samples) -> tuple[float, ...]:
    """Per-node frequency of value 1 across samples."""
    if not samples:
        raise ValueError("cannot compute marginals of an empty sample list")
    n = len(samples[0])
    totals = [0] * n
    for x in samples:
        if len(x) != n:
            raise ValueError("samples have unequal lengths")
        for i, v in enumerate(x):
            totals[i] += v
    count = len(samples)
    return tuple(c / count for c in totals)


def record_to_json(record: RunRecord) -> dict:
    """JSON-ready form of a run record; the sample is a 0/1 string in node order."""
    return {
        "seed": record.seed,
        "status": record.status,
        "coalescence_time": record.coalescence_time,
        "total_steps": record.total_steps,
        "sample": (
            "".join(map(str, record.sample)) if record.sample is not None else None
        ),
    }


def write_records_jsonl(records, fp) -> None:
    """One JSON object per line, in the given order."""
    for record in records:
        fp.write(json.dumps(record_to_json(record)) + "\n")
