"""Two-urn ball dynamic: the elementary exhibit of the two-time-scale effect.

Urn A starts with all n balls, urn B empty; a fair coin moves a uniform ball
towards B (heads) or back to A (tails), doing nothing when the source urn is
empty.  Every step consumes two uniforms (coin, selector) like the chain, so
the ball count performs the same reflected walk as the chain's mark count.
"""

import math
from typing import NamedTuple

import numpy as np

from .pools import SwapPool
from .quadrature import integrate

_BLOCK = 1 << 15


class UrnState:
    """Ball population 1..n split between urns A and B."""

    __slots__ = ("n", "step_count", "pool_a", "pool_b")

    def __init__(self, n):
        if n < 1:
            raise ValueError("n must be >= 1")
        self.n = n
        self.step_count = 0
        self.pool_a = SwapPool(n + 1, initial=range(1, n + 1))
        self.pool_b = SwapPool(n + 1)

    @classmethod
    def fresh(cls, n):
        return cls(n)

    @property
    def in_B(self):
        return frozenset(self.pool_b.items)

    def count_B(self):
        return len(self.pool_b)


def urn_step(state, rng):
    """Fair coin; heads moves a uniform ball A->B, tails B->A; no-op if empty."""
    coin = rng.random()
    u = rng.random()
    if coin < 0.5:
        if len(state.pool_a):
            ball = state.pool_a.draw(u)
            state.pool_a.remove(ball)
            state.pool_b.add(ball)
    else:
        if len(state.pool_b):
            ball = state.pool_b.draw(u)
            state.pool_b.remove(ball)
            state.pool_a.add(ball)
    state.step_count += 1


def _advance(state, steps, rng):
    """Apply ``steps`` urn steps with the same stream consumption as urn_step."""
    a_items, a_pos = state.pool_a.items, state.pool_a.pos
    b_items, b_pos = state.pool_b.items, state.pool_b.pos
    remaining = steps
    while remaining > 0:
        m = min(_BLOCK, remaining)
        draws = rng.random(2 * m).tolist()
        idx = 0
        for _ in range(m):
            coin = draws[idx]
            u = draws[idx + 1]
            idx += 2
            if coin < 0.5:
                sz = len(a_items)
                if sz:
                    i = int(u * sz)
                    ball = a_items[i]
                    last = a_items[sz - 1]
                    a_items[i] = last
                    a_pos[last] = i
                    a_items.pop()
                    a_pos[ball] = -1
                    b_pos[ball] = len(b_items)
                    b_items.append(ball)
            else:
                sz = len(b_items)
                if sz:
                    i = int(u * sz)
                    ball = b_items[i]
                    last = b_items[sz - 1]
                    b_items[i] = last
                    b_pos[last] = i
                    b_items.pop()
                    b_pos[ball] = -1
                    a_pos[ball] = len(a_items)
                    a_items.append(ball)
        remaining -= m
        state.step_count += m


def urn_count_at(n, t, rng):
    """Ball count of urn B after floor(t*n) steps of a fresh urn."""
    if t <= 0:
        raise ValueError("t must be positive")
    state = UrnState(n)
    _advance(state, math.floor(t * n), rng)
    return state.count_B()


class TurnoverResult(NamedTuple):
    fraction: float
    b_was_empty: bool  # flagged replicas are excluded from mean statistics


def urn_turnover(n, t, s, rng):
    """Fraction of B's balls at step floor(t*n) still in B at floor(t*n + s*sqrt(n)).

    Returns fraction 0.0 with ``b_was_empty`` set when urn B is empty at the
    snapshot (probability vanishing in n).
    """
    if t <= 0 or s < 0:
        raise ValueError("need t > 0 and s >= 0")
    k1 = math.floor(t * n)
    k2 = math.floor(t * n + s * math.sqrt(n))
    state = UrnState(n)
    _advance(state, k1, rng)
    snapshot = list(state.pool_b.items)
    if not snapshot:
        return TurnoverResult(0.0, True)
    _advance(state, k2 - k1, rng)
    b_pos = state.pool_b.pos
    still = sum(1 for ball in snapshot if b_pos[ball] >= 0)
    return TurnoverResult(still / len(snapshot), False)


def _count_and_turnover(n, t, s, rng):
    """(count at floor(t*n), turnover to floor(t*n + s*sqrt(n))) from one run.

    count == 0 doubles as the empty-snapshot flag.
    """
    k1 = math.floor(t * n)
    k2 = math.floor(t * n + s * math.sqrt(n))
    state = UrnState(n)
    _advance(state, k1, rng)
    count = state.count_B()
    snapshot = list(state.pool_b.items)
    _advance(state, k2 - k1, rng)
    if not snapshot:
        return count, 0.0
    b_pos = state.pool_b.pos
    still = sum(1 for ball in snapshot if b_pos[ball] >= 0)
    return count, still / len(snapshot)


def expected_turnover(t, s):
    """Limit prediction for the mean turnover fraction: E[exp(-s/(2*R_t))].

    Integrates exp(-s/(2r)) against the half-normal density of R_t with the
    same quadrature engine as the pair-survival mixture; the tail beyond
    8*sqrt(t) carries < 1e-15 of the mass.
    """
    if t <= 0 or s < 0:
        raise ValueError("need t > 0 and s >= 0")
    c = math.sqrt(2.0 / (t * math.pi))

    def f(r):
        r = np.asarray(r)
        with np.errstate(divide="ignore"):
            surv = np.exp(-s / (2.0 * r))
        return c * surv * np.exp(-r * r / (2.0 * t))

    return integrate(f, 0.0, 8.0 * math.sqrt(t), tol=1e-8).value
