"""Limit objects: reduced trees of the continuum tree, the stationary mark
process with its exact thinning/birth kernel, induced leaf partitions and
block frequencies, the half-normal mixing variable, and analytic oracles for
pair statistics.

Only finite reduced trees are ever materialized; the global mark process is
represented through its stationary marginal (Poisson with intensity r per
unit length) and the transition kernel over a time increment d:

    each atom survives with probability exp(-d/(2r)), and an independent
    Poisson process with rate r*(1 - exp(-d/(2r))) per unit length is added.
"""

import math
from dataclasses import dataclass, InitVar

import numpy as np

from .quadrature import integrate2d
from .random_trees import ReducedTree


@dataclass(frozen=True, eq=False)
class MarkSet:
    """Finite set of atoms on a reduced tree: (edge id, position inside edge)."""

    tree: ReducedTree
    edge_ids: np.ndarray
    positions: np.ndarray
    validate: InitVar[bool] = True

    def __post_init__(self, validate):
        object.__setattr__(self, "edge_ids",
                           np.asarray(self.edge_ids, dtype=np.int64))
        object.__setattr__(self, "positions",
                           np.asarray(self.positions, dtype=float))
        if validate:
            if self.edge_ids.shape != self.positions.shape:
                raise ValueError("edge_ids and positions must be parallel")
            ne = len(self.tree.edges)
            if self.edge_ids.size and (self.edge_ids.min() < 0
                                       or self.edge_ids.max() >= ne):
                raise ValueError("edge id out of range")
            lens = self.tree.lengths[self.edge_ids]
            if np.any(self.positions <= 0) or np.any(self.positions >= lens):
                raise ValueError("positions must lie strictly inside edges")

    def __len__(self):
        return int(self.edge_ids.size)


@dataclass(frozen=True)
class SamplePartition:
    """Set partition of leaf labels {1..i}."""

    blocks: frozenset

    def __post_init__(self):
        total = 0
        union = set()
        for b in self.blocks:
            if not b:
                raise ValueError("empty block")
            total += len(b)
            union |= set(b)
        if total != len(union):
            raise ValueError("blocks are not disjoint")

    @property
    def ground_size(self):
        return sum(len(b) for b in self.blocks)


@dataclass(frozen=True)
class MixingVariable:
    """Cut intensity r drawn for age parameter t (the half-normal mixer)."""

    r: float
    t: float

    def __post_init__(self):
        if self.r <= 0:
            raise ValueError("r must be positive")


def sample_reflected_bm(t, rng):
    """Draw |sqrt(t) * Z| with Z standard normal (density sqrt(2/(t*pi)) e^{-r^2/2t})."""
    if t <= 0:
        raise ValueError("t must be positive")
    r = 0.0
    while r == 0.0:
        r = abs(rng.standard_normal()) * math.sqrt(t)
    return r


def sample_reduced_tree(i, rng):
    """Reduced tree spanning i random leaves of the continuum tree.

    Shape: uniform over the (2i-5)!! leaf-labeled binary topologies, grown by
    attaching leaf j to a uniformly chosen edge of the current shape.
    Lengths: total S with S^2 ~ chi-square(2(i-1)), split uniformly over the
    (2i-3)-simplex.  For i = 2 this is a single edge of Rayleigh length.
    """
    if i < 2:
        raise ValueError("need at least 2 leaves")
    # leaves are nodes 0..i-1; internals i..2i-4 appear as leaves 3..i attach
    edges = [(0, 1)]
    if i > 2:
        picks = rng.random(i - 2)
        for j in range(3, i + 1):
            leaf = j - 1
            internal = i + (j - 3)
            e = int(picks[j - 3] * len(edges))
            a, b = edges[e]
            edges[e] = (a, internal)
            edges.append((internal, b))
            edges.append((internal, leaf))
    total = math.sqrt(rng.chisquare(2 * (i - 1)))
    while True:
        split = rng.dirichlet(np.ones(2 * i - 3))
        lengths = total * split
        if np.all(lengths > 0):
            break
    return ReducedTree(i, 2 * i - 2, tuple(edges), lengths)


def _scatter_positions(rng, tree, edge_ids):
    """Uniform positions strictly inside each atom's edge."""
    lens = tree.lengths[edge_ids]
    pos = rng.random(edge_ids.size) * lens
    bad = pos <= 0.0
    while np.any(bad):
        pos[bad] = rng.random(int(bad.sum())) * lens[bad]
        bad = pos <= 0.0
    return pos


def init_marks(tree, r, rng):
    """Stationary mark state: Poisson process with rate r per unit length."""
    if r <= 0:
        raise ValueError("r must be positive")
    counts = rng.poisson(r * tree.lengths)
    edge_ids = np.repeat(np.arange(counts.size), counts)
    positions = _scatter_positions(rng, tree, edge_ids)
    return MarkSet(tree, edge_ids, positions, validate=False)


def evolve_marks(tree, marks, r, delta, rng):
    """Apply the transition kernel over a time increment delta.

    Existing atoms survive independently with probability exp(-delta/(2r));
    an independent Poisson process with rate r*(1 - exp(-delta/(2r))) per
    unit length is superposed.  Stationary for init_marks(tree, r).
    """
    if marks.tree is not tree:
        raise ValueError("marks belong to a different tree")
    if r <= 0 or delta < 0:
        raise ValueError("need r > 0 and delta >= 0")
    if delta == 0:
        return MarkSet(tree, marks.edge_ids.copy(), marks.positions.copy(),
                       validate=False)
    survive_p = math.exp(-delta / (2.0 * r))
    keep = rng.random(len(marks)) < survive_p
    birth_counts = rng.poisson(r * (1.0 - survive_p) * tree.lengths)
    birth_edges = np.repeat(np.arange(birth_counts.size), birth_counts)
    birth_pos = _scatter_positions(rng, tree, birth_edges)
    return MarkSet(
        tree,
        np.concatenate([marks.edge_ids[keep], birth_edges]),
        np.concatenate([marks.positions[keep], birth_pos]),
        validate=False,
    )


def partition_from_marks(tree, marks):
    """Partition of leaf labels: u, v share a block iff their path is atom-free."""
    if marks.tree is not tree:
        raise ValueError("marks belong to a different tree")
    m = tree.node_count
    cut = np.zeros(len(tree.edges), dtype=bool)
    cut[marks.edge_ids] = True
    parent = list(range(m))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for k, (a, b) in enumerate(tree.edges):
        if not cut[k]:
            ra, rb = find(a), find(b)
            if ra != rb:
                parent[ra] = rb
    groups = {}
    for leaf in range(tree.leaf_count):
        groups.setdefault(find(leaf), []).append(leaf + 1)
    return SamplePartition(frozenset(frozenset(g) for g in groups.values()))


def block_frequencies(p, i):
    """Ranked block sizes divided by i: the i-leaf estimate of the mass partition."""
    if p.ground_size != i:
        raise ValueError(f"partition covers {p.ground_size} labels, expected {i}")
    union = set()
    for b in p.blocks:
        union |= set(b)
    if union != set(range(1, i + 1)):
        raise ValueError("partition must cover exactly {1..i}")
    sizes = sorted((len(b) for b in p.blocks), reverse=True)
    return np.array(sizes, dtype=float) / i


def estimate_R(masses, window):
    """Recover the cut intensity from the tail of a mass partition.

    Averages sqrt(2 / (pi * masses[i-1] * i^2)) over ranks i in the inclusive
    1-based window (lo, hi).
    """
    masses = np.asarray(masses, dtype=float)
    lo, hi = window
    if lo < 1 or hi < lo:
        raise ValueError(f"bad window ({lo},{hi})")
    if hi > masses.size:
        raise ValueError(f"window ({lo},{hi}) exceeds partition length {masses.size}")
    chunk = masses[lo - 1:hi]
    if np.any(chunk <= 0):
        raise ValueError("zero mass inside estimation window")
    ranks = np.arange(lo, hi + 1, dtype=float)
    return float(np.mean(np.sqrt(2.0 / (math.pi * chunk * ranks**2))))


def pair_joint_survival(r, length, delta):
    """P(a path of length l is atom-free at two times delta apart, stationary).

    exp(-r*l) for the first epoch times exp(-r*l*(1 - exp(-delta/(2r)))) for
    no births on the path by the second epoch.
    """
    if r <= 0 or length <= 0 or delta < 0:
        raise ValueError("need r > 0, length > 0, delta >= 0")
    return math.exp(-r * length * (2.0 - math.exp(-delta / (2.0 * r))))


def mixed_pair_prob(t, delta):
    """P(two random leaves share a block at both epochs, under the mixture).

    Double quadrature of pair_joint_survival against the Rayleigh law of the
    two-leaf distance and the half-normal law of the cut intensity:

        V = int_r int_l exp(-r*l*(2 - e^{-delta/(2r)})) * l e^{-l^2/2} dl
              * sqrt(2/(t*pi)) e^{-r^2/(2t)} dr

    Truncated to r <= 8*sqrt(t), l <= 10 (combined tail mass < 1e-8); the
    adaptive rule is driven to a discrepancy below 5e-7, so the absolute
    error is <= 1e-6.  Typical cost is ~30k integrand evaluations.
    """
    if t <= 0 or delta < 0:
        raise ValueError("need t > 0 and delta >= 0")
    c = math.sqrt(2.0 / (t * math.pi))

    def f(r, ls):
        if r <= 0:
            return np.ones_like(ls) * 0.0
        a = r * (2.0 - math.exp(-delta / (2.0 * r)))
        return (np.exp(-a * ls) * ls * np.exp(-0.5 * ls * ls)
                * c * math.exp(-r * r / (2.0 * t)))

    res = integrate2d(f, 0.0, 8.0 * math.sqrt(t), 0.0, 10.0,
                      tol=2.5e-7, inner_tol=2.5e-8)
    return min(1.0, max(0.0, res.value))
