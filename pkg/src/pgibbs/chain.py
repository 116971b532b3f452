"""Systematic-scan Gibbs sampling on binary configurations.

A configuration is a tuple of 0/1 values, one per network node, with
evidence nodes held at their observed values. Time is a signed integer;
each time step updates exactly one unobserved variable, chosen by the
sweep schedule from the absolute time index. The random number driving
step t is a pure function of (seed, t), so a run restarted from an
earlier time re-applies identical randomness at every revisited step —
the property coupling from the past depends on.
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import ImpossibleConfigurationError
from .model import Network

_MASK64 = (1 << 64) - 1
_GOLDEN = 0x9E3779B97F4A7C15
_MIX1 = 0xBF58476D1CE4E5B9
_MIX2 = 0x94D049BB133111EB
_INV_2_64 = 1.0 / 2.0**64


def zigzag(t: int) -> int:
    """Fold a signed integer onto the non-negative integers: 0,-1,1,-2,... -> 0,1,2,3,..."""
    return 2 * t if t >= 0 else -2 * t - 1


def unit_uniform(seed: int, t: int) -> float:
    """Deterministic uniform draw in [0, 1) addressed by (seed, time).

    A counter-based construction: the zigzag-folded time is spread by a
    64-bit odd constant, combined with the seed, and passed through a
    splitmix-style finalizer. All arithmetic is 64-bit wrapping, so the
    result is bit-identical across platforms and invocations.
    """
    z = (((seed & _MASK64) ^ ((zigzag(t) * _GOLDEN) & _MASK64)) + _GOLDEN) & _MASK64
    z ^= z >> 30
    z = (z * _MIX1) & _MASK64
    z ^= z >> 27
    z = (z * _MIX2) & _MASK64
    z ^= z >> 31
    return z * _INV_2_64


@dataclass(frozen=True)
class RandomStream:
    """Seedable random-access stream of unit uniforms, indexed by time."""

    seed: int

    def at(self, t: int) -> float:
        return unit_uniform(self.seed, t)


@dataclass(frozen=True)
class SweepSchedule:
    """Fixed update order over the unobserved nodes; one node per time step."""

    order: tuple[int, ...]

    @property
    def period(self) -> int:
        return len(self.order)


def build_schedule(net: Network) -> SweepSchedule:
    """Canonical schedule: unobserved nodes in node (topological) order."""
    return SweepSchedule(order=net.unobserved)


def variable_at(schedule: SweepSchedule, t: int) -> int:
    """Node updated at absolute time t.

    Depends only on t, never on where a run started, so restarting from
    further back drives the same variable at every revisited time.
    """
    if not schedule.order:
        raise ValueError("schedule is empty: the network is fully observed")
    return schedule.order[t % len(schedule.order)]


def gibbs_conditional(
    net: Network, config, k: int, use_child0_shortcut: bool = True
) -> float:
    """P(node k = 1 | all other values in config).

    Computed as w1 / (w0 + w1) where w_v multiplies the prior of k taking
    value v by the likelihood of each of k's children given v. A child
    observed at 0 factorizes over its parents, so its other parents can be
    skipped (`use_child0_shortcut`); this changes nothing but the constant
    shared by w0 and w1.

    Raises ImpossibleConfigurationError when both weights are zero, i.e.
    the surrounding configuration has zero probability for either value.
    """
    q = net._leak_comp[k]
    for p, w in net.parents[k]:
        if config[p]:
            q *= 1.0 - w
    w1 = 1.0 - q  # P(k=1 | parents)
    w0 = q
    for child, w_kc, others in net._child_detail[k]:
        if config[child]:
            qc = net._leak_comp[child]
            for p, w in others:
                if config[p]:
                    qc *= 1.0 - w
            w0 *= 1.0 - qc
            w1 *= 1.0 - qc * (1.0 - w_kc)
        elif use_child0_shortcut:
            w1 *= 1.0 - w_kc
        else:
            qc = net._leak_comp[child]
            for p, w in others:
                if config[p]:
                    qc *= 1.0 - w
            w0 *= qc
            w1 *= qc * (1.0 - w_kc)
    total = w0 + w1
    if total == 0.0:
        raise ImpossibleConfigurationError(
            f"configuration has zero probability for both values of node {k}"
        )
    return w1 / total


def gibbs_step(net: Network, config, t: int, stream, schedule: SweepSchedule):
    """One Gibbs update at time t: node k becomes 1 iff u_t < P(k=1 | rest)."""
    k = variable_at(schedule, t)
    p = gibbs_conditional(net, config, k)
    v = 1 if stream.at(t) < p else 0
    if config[k] == v:
        return config
    out = list(config)
    out[k] = v
    return tuple(out)


def gibbs_run(
    net: Network,
    init,
    t_from: int,
    t_to: int,
    stream,
    schedule: SweepSchedule | None = None,
    record_trajectory: bool = False,
):
    """Apply gibbs_step at t = t_from, ..., t_to - 1.

    Returns the final configuration, or (final, trajectory) when
    ``record_trajectory`` is set; the trajectory holds the configuration
    after each step. Deterministic given (net, init, stream.seed, t_from,
    t_to).
    """
    if t_from > t_to:
        raise ValueError(f"t_from={t_from} must not exceed t_to={t_to}")
    if schedule is None:
        schedule = build_schedule(net)
    config = tuple(init)
    trajectory = [] if record_trajectory else None
    for t in range(t_from, t_to):
        config = gibbs_step(net, config, t, stream, schedule)
        if record_trajectory:
            trajectory.append(config)
    if record_trajectory:
        return config, trajectory
    return config


def initial_configuration(net: Network, fill: int = 0) -> tuple:
    """All-`fill` configuration with evidence nodes at their observed values."""
    return tuple(net.evidence.get(i, fill) for i in range(net.n))
