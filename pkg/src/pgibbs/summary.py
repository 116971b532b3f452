"""The ternary summary chain that tracks a whole set of Gibbs chains at once.

A summary state assigns each node 0, 1, or "undecided" (rendered '?'). It
stands for the set of binary configurations that match it entry-wise, with
an undecided entry matching both values. Driving the summary state with the
same per-time uniforms as the individual chains keeps that set a superset
of wherever the real chains are: when a variable's conditional probability
is bounded between pmin and pmax over the represented set, a draw below
pmin sends every chain to 1, a draw at or above pmax sends every chain to
0, and anything in between leaves the variable undecided.

For strictly layered networks the pmin/pmax bounds are exact and cheap:
each is attained at one specific completion of the undecided values
(`extremal_completion`), so a summary update costs two ordinary conditional
evaluations instead of an exhaustive enumeration.
"""

from __future__ import annotations

from itertools import product

from .chain import SweepSchedule, gibbs_conditional, variable_at
from .errors import SizeLimitError, StructureError
from .model import Network

UNDECIDED = 2  # ternary entry meaning "the chains disagree here"

_GLYPHS = {0: "0", 1: "1", UNDECIDED: "?"}
_VALUES = {"0": 0, "1": 1, "?": UNDECIDED}


def render_summary(s) -> str:
    """String form over {0,1,?} in node order, e.g. '1?001?'."""
    return "".join(_GLYPHS[v] for v in s)


def parse_summary(text: str) -> tuple:
    try:
        return tuple(_VALUES[ch] for ch in text)
    except KeyError as exc:
        raise ValueError(f"invalid summary character {exc.args[0]!r}") from None


def all_undecided_state(net: Network) -> tuple:
    """Start state for exact sampling: every unobserved node undecided."""
    return tuple(net.evidence.get(i, UNDECIDED) for i in range(net.n))


def is_coalesced(s) -> bool:
    """True iff no entry is undecided, i.e. s stands for a single configuration."""
    return UNDECIDED not in s


def summary_contains(s, x) -> bool:
    """True iff configuration x is one of the states s stands for."""
    if len(s) != len(x):
        raise ValueError(f"length mismatch: {len(s)} vs {len(x)}")
    return all(sv == xv or sv == UNDECIDED for sv, xv in zip(s, x))


def expand_summary(s, cap: int = 20) -> list[tuple]:
    """All configurations matching s; 2**(#undecided) of them.

    Raises SizeLimitError when the undecided count exceeds ``cap``.
    """
    free = [i for i, v in enumerate(s) if v == UNDECIDED]
    if len(free) > cap:
        raise SizeLimitError(
            f"{len(free)} undecided entries would expand to 2**{len(free)} "
            f"configurations (cap {cap})"
        )
    base = list(s)
    out = []
    for bits in product((0, 1), repeat=len(free)):
        for i, b in zip(free, bits):
            base[i] = b
        out.append(tuple(base))
    return out


def extremal_completion(net: Network, s, k: int, which: str) -> tuple:
    """The member of the represented set where node k's conditional is extremal.

    For the minimum: undecided parents and children of k become 0, and
    undecided co-parents sharing a child whose entry is 1 become 1 (they
    explain that child away). For the maximum: undecided parents and
    children become 1, and undecided co-parents sharing a child whose entry
    is 1 or undecided become 0 (leaving k to explain the child). Undecided
    nodes outside k's Markov blanket cannot affect the conditional and are
    set to 0.
    """
    if net._completion_conflict[k]:
        raise StructureError(
            f"node {net.nodes[k].name} shares a child with one of its own "
            "relatives; the completion rules require a strictly layered network"
        )
    x = [0 if v == UNDECIDED else v for v in s]
    if which == "min":
        for p, _ in net.parents[k]:
            if s[p] == UNDECIDED:
                x[p] = 0
        for child, _, others in net._child_detail[k]:
            if s[child] == UNDECIDED:
                x[child] = 0
            elif s[child] == 1:
                for p, _ in others:
                    if s[p] == UNDECIDED:
                        x[p] = 1
    elif which == "max":
        for p, _ in net.parents[k]:
            if s[p] == UNDECIDED:
                x[p] = 1
        for child, _, others in net._child_detail[k]:
            if s[child] != 0:  # entry is 1 or undecided (completed to 1)
                for p, _ in others:
                    if s[p] == UNDECIDED:
                        x[p] = 0
            if s[child] == UNDECIDED:
                x[child] = 1
    else:
        raise ValueError(f"which must be 'min' or 'max', got {which!r}")
    return tuple(x)


def summary_conditional_bounds(net: Network, s, k: int) -> tuple[float, float]:
    """(pmin, pmax) of node k's conditional over every configuration s represents.

    Exact for strictly layered networks; each bound is one conditional
    evaluation at the corresponding extremal completion. When no node in
    k's Markov blanket is undecided the two coincide and a single
    evaluation is done.
    """
    for i in net._relevant[k]:
        if s[i] == UNDECIDED:
            break
    else:
        p = gibbs_conditional(net, extremal_completion(net, s, k, "min"), k)
        return (p, p)
    pmin = gibbs_conditional(net, extremal_completion(net, s, k, "min"), k)
    pmax = gibbs_conditional(net, extremal_completion(net, s, k, "max"), k)
    return (pmin, pmax)


def summary_step(net: Network, s, t: int, stream, schedule: SweepSchedule) -> tuple:
    """One summary-chain update at time t.

    Node k = variable_at(schedule, t) becomes 1 if u_t < pmin, 0 if
    u_t >= pmax, and undecided in between; other entries are unchanged.
    Mirrors the per-chain rule value = 1 iff u_t < p, so the three cases
    partition [0, 1) exactly.
    """
    k = variable_at(schedule, t)
    pmin, pmax = summary_conditional_bounds(net, s, k)
    u = stream.at(t)
    if u < pmin:
        v = 1
    elif u >= pmax:
        v = 0
    else:
        v = UNDECIDED
    if s[k] == v:
        return s
    out = list(s)
    out[k] = v
    return tuple(out)
