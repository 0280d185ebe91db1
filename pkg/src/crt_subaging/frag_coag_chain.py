"""Fair-coin mark/unmark chain on a fixed tree, plus a rooted-forest variant.

Stream contract: every chain step consumes exactly two uniforms from the
replica stream -- a coin and a selector, in that order -- whether or not the
step is a no-op, so trajectories are bit-reproducible and `run_until` is
interchangeable with repeated `chain_step` calls on the same stream.  The
rooted-forest step consumes three uniforms (coin, two selectors).
"""

import math
from dataclasses import dataclass

import numpy as np

from .dynamic_forest import DynamicForest
from .pools import SwapPool
from .random_trees import LabeledTree

_BLOCK = 1 << 15


@dataclass(frozen=True)
class Observation:
    """Read-only snapshot of a chain at step k."""

    k: int
    masses: np.ndarray
    mark_count: int
    pair_flags: tuple


class MarkChainState:
    """One replica of the mark/unmark chain: forest, edge pools, step count."""

    __slots__ = ("tree", "forest", "marked", "unmarked", "k")

    def __init__(self, tree: LabeledTree, backend="naive"):
        self.tree = tree
        self.forest = DynamicForest(tree, backend=backend)
        m = len(tree.edges)
        self.marked = SwapPool(m)
        self.unmarked = SwapPool(m, initial=range(m))
        self.k = 0

    @classmethod
    def fresh(cls, tree, backend="naive"):
        return cls(tree, backend=backend)

    @property
    def mark_count(self):
        return len(self.marked)


def observation_index(n, t, s):
    """Step index floor(t*n + s*sqrt(n)); rejects negative targets."""
    if n < 1:
        raise ValueError("n must be >= 1")
    if t <= 0:
        raise ValueError("t must be positive")
    k = math.floor(t * n + s * math.sqrt(n))
    if k < 0:
        raise ValueError(f"observation index {k} < 0 for n={n}, t={t}, s={s}")
    return k


def chain_step(state, rng):
    """Advance one step: heads marks a uniform unmarked edge, tails unmarks."""
    coin = rng.random()
    u = rng.random()
    if coin < 0.5:
        if len(state.unmarked):
            e = state.unmarked.draw(u)
            state.unmarked.remove(e)
            state.marked.add(e)
            state.forest.cut(e)
    else:
        if len(state.marked):
            e = state.marked.draw(u)
            state.marked.remove(e)
            state.unmarked.add(e)
            state.forest.link(e)
    state.k += 1


def run_until(state, k_target, rng):
    """Advance the chain to step k_target (exactly k_target - k steps)."""
    if k_target < state.k:
        raise ValueError(f"k_target {k_target} below current step {state.k}")
    remaining = k_target - state.k
    if state.forest.backend != "naive":
        for _ in range(remaining):
            chain_step(state, rng)
        return

    # Fast path: pools and the present mask are updated inline; the forest's
    # counters are reconciled once per block (no queries can interleave).
    forest = state.forest
    pm = forest._present
    um_items, um_pos = state.unmarked.items, state.unmarked.pos
    mk_items, mk_pos = state.marked.items, state.marked.pos
    while remaining > 0:
        m = min(_BLOCK, remaining)
        draws = rng.random(2 * m).tolist()
        idx = 0
        for _ in range(m):
            coin = draws[idx]
            u = draws[idx + 1]
            idx += 2
            if coin < 0.5:
                sz = len(um_items)
                if sz:
                    i = int(u * sz)
                    e = um_items[i]
                    last = um_items[sz - 1]
                    um_items[i] = last
                    um_pos[last] = i
                    um_items.pop()
                    um_pos[e] = -1
                    mk_pos[e] = len(mk_items)
                    mk_items.append(e)
                    pm[e] = False
            else:
                sz = len(mk_items)
                if sz:
                    i = int(u * sz)
                    e = mk_items[i]
                    last = mk_items[sz - 1]
                    mk_items[i] = last
                    mk_pos[last] = i
                    mk_items.pop()
                    mk_pos[e] = -1
                    um_pos[e] = len(um_items)
                    um_items.append(e)
                    pm[e] = True
        remaining -= m
        state.k += m
    forest._absent_count = len(mk_items)
    forest._version += 1


def observe(state, pairs=()):
    """Snapshot (ranked masses, mark count, same-component flag per pair)."""
    n = state.tree.n
    for u, v in pairs:
        if not (1 <= u <= n and 1 <= v <= n):
            raise ValueError(f"pair ({u},{v}) out of range")
    flags = tuple(state.forest.same_component(u, v) for u, v in pairs)
    return Observation(
        k=state.k,
        masses=state.forest.ranked_masses(),
        mark_count=len(state.marked),
        pair_flags=flags,
    )


class RootedForestState:
    """Rooted forest on {1..n}: parent[v] = 0 marks v as a root."""

    __slots__ = ("n", "parent", "nonroots", "roots", "step_count")

    def __init__(self, n, parent):
        self.n = n
        self.parent = parent
        self.nonroots = SwapPool(n + 1)
        self.roots = SwapPool(n + 1)
        for v in range(1, n + 1):
            (self.roots if parent[v] == 0 else self.nonroots).add(v)
        self.step_count = 0

    @classmethod
    def singletons(cls, n):
        return cls(n, [0] * (n + 1))

    @classmethod
    def from_tree(cls, tree, root=1):
        adj = tree.adjacency()
        parent = [0] * (tree.n + 1)
        seen = [False] * (tree.n + 1)
        seen[root] = True
        order = [root]
        for v in order:
            for w in adj[v]:
                if not seen[w]:
                    seen[w] = True
                    parent[w] = v
                    order.append(w)
        return cls(tree.n, parent)

    def root_of(self, v):
        p = self.parent
        steps = 0
        while p[v] != 0:
            v = p[v]
            steps += 1
            if steps > self.n:
                raise RuntimeError("parent pointers contain a cycle")
        return v

    def component_sizes(self):
        """Integer component sizes, decreasing (O(n * depth) walk)."""
        counts = {}
        for v in range(1, self.n + 1):
            r = self.root_of(v)
            counts[r] = counts.get(r, 0) + 1
        return sorted(counts.values(), reverse=True)


def spr_step(state, rng):
    """One prune-or-regraft move on a rooted forest.

    Heads deletes a uniform forest edge; the detached endpoint becomes the
    root of its component.  Tails picks a uniform vertex v and attaches the
    root of a uniformly chosen other tree below v; when no move is admissible
    the step is a no-op.  Always consumes three uniforms.
    """
    coin = rng.random()
    u1 = rng.random()
    u2 = rng.random()
    if coin < 0.5:
        if len(state.nonroots):
            c = state.nonroots.draw(u1)
            state.parent[c] = 0
            state.nonroots.remove(c)
            state.roots.add(c)
    else:
        v = 1 + int(u1 * state.n)
        if len(state.roots) >= 2:
            rv = state.root_of(v)
            j = int(u2 * (len(state.roots) - 1))
            cand = state.roots.items[j]
            if cand == rv:
                cand = state.roots.items[len(state.roots) - 1]
            state.parent[cand] = v
            state.roots.remove(cand)
            state.nonroots.add(cand)
    state.step_count += 1
