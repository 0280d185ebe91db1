"""Uniform random labeled trees and reduced spanning subtrees with edge lengths.

Trees live on vertex set {1..n}.  Sampling goes through the Prufer bijection,
so uniformity over the n^(n-2) labeled trees is exact.  Reduced subtrees carry
the 1/sqrt(n) edge rescaling used everywhere else in the package.
"""

import math
from dataclasses import dataclass, InitVar

import numpy as np


@dataclass(frozen=True)
class LabeledTree:
    """Tree on vertices {1..n}, stored as a sequence of n-1 unordered edges.

    Each edge is normalized to (min, max); the *position* of an edge in the
    sequence is its stable identity for the dynamic-forest layer.
    """

    n: int
    edges: tuple
    validate: InitVar[bool] = True

    def __post_init__(self, validate):
        object.__setattr__(
            self, "edges",
            tuple((u, v) if u < v else (v, u) for u, v in self.edges))
        if validate:
            self._check()

    def _check(self):
        n = self.n
        if n < 1:
            raise ValueError("vertex count must be >= 1")
        if len(self.edges) != n - 1:
            raise ValueError(f"tree on {n} vertices needs {n - 1} edges, "
                             f"got {len(self.edges)}")
        parent = list(range(n + 1))

        def find(x):
            root = x
            while parent[root] != root:
                root = parent[root]
            while parent[x] != root:
                parent[x], x = root, parent[x]
            return root

        for u, v in self.edges:
            if not (1 <= u <= n and 1 <= v <= n):
                raise ValueError(f"edge ({u},{v}) out of range 1..{n}")
            if u == v:
                raise ValueError(f"self-loop at vertex {u}")
            ru, rv = find(u), find(v)
            if ru == rv:
                raise ValueError(f"edge ({u},{v}) closes a cycle")
            parent[ru] = rv

    def adjacency(self):
        """Adjacency lists indexed 1..n (index 0 unused)."""
        adj = [[] for _ in range(self.n + 1)]
        for u, v in self.edges:
            adj[u].append(v)
            adj[v].append(u)
        return adj

    def edge_index(self, u, v):
        """Position of the undirected edge {u, v} in the edge sequence."""
        key = (u, v) if u < v else (v, u)
        try:
            return self.edges.index(key)
        except ValueError:
            raise KeyError(f"no edge {{{u},{v}}} in tree") from None


@dataclass(frozen=True, eq=False)
class ReducedTree:
    """Combinatorial tree shape with labeled nodes and positive edge lengths.

    Nodes 0..leaf_count-1 carry the labels 1..leaf_count; the remaining nodes
    are unlabeled internals of degree >= 3.  A labeled node normally has
    degree 1 (a leaf), but instances reduced from discrete trees may carry a
    labeled node internally; it is kept in the shape either way.

    ``edge_units`` is set on discrete-origin instances: edge k spans
    edge_units[k] base-tree edges and lengths[k] == edge_units[k]/sqrt(n).
    """

    leaf_count: int
    node_count: int
    edges: tuple
    lengths: np.ndarray
    edge_units: tuple = None
    validate: InitVar[bool] = True

    def __post_init__(self, validate):
        object.__setattr__(self, "lengths",
                           np.asarray(self.lengths, dtype=float))
        if validate:
            self._check()

    def _check(self):
        i, m = self.leaf_count, self.node_count
        if i < 2 or m < i:
            raise ValueError("need >= 2 labeled nodes and node_count >= leaf_count")
        if len(self.edges) != m - 1:
            raise ValueError("shape must be a tree: node_count - 1 edges")
        if self.lengths.shape != (m - 1,) or np.any(self.lengths <= 0):
            raise ValueError("need one positive length per edge")
        deg = [0] * m
        parent = list(range(m))

        def find(x):
            while parent[x] != x:
                parent[x] = parent[parent[x]]
                x = parent[x]
            return x

        for a, b in self.edges:
            if not (0 <= a < m and 0 <= b < m) or a == b:
                raise ValueError(f"bad shape edge ({a},{b})")
            deg[a] += 1
            deg[b] += 1
            ra, rb = find(a), find(b)
            if ra == rb:
                raise ValueError(f"shape edge ({a},{b}) closes a cycle")
            parent[ra] = rb
        for v in range(i, m):
            if deg[v] < 3:
                raise ValueError(f"unlabeled internal node {v} has degree {deg[v]}")

    @property
    def total_length(self):
        return float(self.lengths.sum())

    def leaf_node(self, label):
        """Node id carrying the given leaf label (1-based)."""
        if not 1 <= label <= self.leaf_count:
            raise ValueError(f"label {label} out of range")
        return label - 1


def prufer_decode(seq, n):
    """Decode a Prufer sequence into its unique labeled tree on {1..n}.

    Linear-time pointer variant of the classical smallest-leaf decode.
    """
    if n < 2:
        raise ValueError("decode needs n >= 2")
    seq = list(seq)
    if len(seq) != n - 2:
        raise ValueError(f"sequence length must be n-2 = {n - 2}, got {len(seq)}")
    deg = [1] * (n + 1)
    for x in seq:
        if not 1 <= x <= n:
            raise ValueError(f"label {x} out of range 1..{n}")
        deg[x] += 1
    edges = []
    ptr = 1
    while deg[ptr] != 1:
        ptr += 1
    leaf = ptr
    for x in seq:
        edges.append((leaf, x) if leaf < x else (x, leaf))
        deg[x] -= 1
        if deg[x] == 1 and x < ptr:
            leaf = x
        else:
            ptr += 1
            while deg[ptr] != 1:
                ptr += 1
            leaf = ptr
    edges.append((leaf, n))
    return LabeledTree(n, tuple(edges), validate=False)


def prufer_encode(tree):
    """Prufer sequence of a labeled tree; inverse of :func:`prufer_decode`."""
    n = tree.n
    if n < 2:
        raise ValueError("encode needs n >= 2")
    if n == 2:
        return ()
    adj = tree.adjacency()
    # orient away from vertex n, which is never consumed as a leaf
    parent = [0] * (n + 1)
    order = [n]
    parent[n] = -1
    for v in order:
        for w in adj[v]:
            if parent[w] == 0:
                parent[w] = v
                order.append(w)
    deg = [len(a) for a in adj]
    out = []
    ptr = 1
    while deg[ptr] != 1:
        ptr += 1
    leaf = ptr
    for _ in range(n - 2):
        p = parent[leaf]
        out.append(p)
        deg[p] -= 1
        if deg[p] == 1 and p < ptr:
            leaf = p
        else:
            ptr += 1
            while deg[ptr] != 1:
                ptr += 1
            leaf = ptr
    return tuple(out)


def sample_uniform_tree(n, rng):
    """Uniform tree over the n^(n-2) labeled trees on {1..n}."""
    if n < 1:
        raise ValueError("n must be >= 1")
    if n == 1:
        return LabeledTree(1, ())
    if n == 2:
        return LabeledTree(2, ((1, 2),), validate=False)
    seq = rng.integers(1, n + 1, size=n - 2)
    return prufer_decode(seq.tolist(), n)


def reduce_to_vertices(tree, i):
    """Spanning subtree of vertices {1..i}, with degree-2 internals suppressed.

    Returns a ReducedTree whose labeled nodes are the vertices 1..i (kept even
    when they sit internally) and whose edge lengths are (1 + j)/sqrt(n), j
    being the number of suppressed degree-2 vertices on the segment.
    """
    n = tree.n
    if not 2 <= i <= n:
        raise ValueError(f"need 2 <= i <= n, got i={i}, n={n}")
    adj = tree.adjacency()
    deg = [len(a) for a in adj]
    alive = [False] + [True] * n
    # peel non-terminal leaves until only the spanning union of {1..i} remains
    stack = [v for v in range(i + 1, n + 1) if deg[v] == 1]
    while stack:
        v = stack.pop()
        alive[v] = False
        for w in adj[v]:
            if alive[w]:
                deg[w] -= 1
                if deg[w] == 1 and w > i:
                    stack.append(w)

    is_node = [False] * (n + 1)
    for v in range(1, n + 1):
        if alive[v] and (v <= i or deg[v] >= 3):
            is_node[v] = True
    node_id = {}
    for v in range(1, i + 1):
        node_id[v] = v - 1
    nxt = i
    for v in range(1, n + 1):
        if is_node[v] and v > i:
            node_id[v] = nxt
            nxt += 1

    scale = math.sqrt(n)
    edges, units = [], []
    seen_halfedge = set()
    for v in range(1, n + 1):
        if not is_node[v]:
            continue
        for w in adj[v]:
            if not alive[w] or (v, w) in seen_halfedge:
                continue
            # walk through suppressed degree-2 vertices to the next node
            prev, cur, steps = v, w, 1
            while not is_node[cur]:
                nxt_v = next(x for x in adj[cur] if alive[x] and x != prev)
                prev, cur, steps = cur, nxt_v, steps + 1
            seen_halfedge.add((cur, prev))
            edges.append((node_id[v], node_id[cur]))
            units.append(steps)
    lengths = np.array(units, dtype=float) / scale
    return ReducedTree(i, nxt, tuple(edges), lengths, edge_units=tuple(units))


def shape_key(rt):
    """Canonical identifier of a reduced tree's leaf-labeled topology.

    The key is the set of non-trivial leaf bipartitions induced by removing
    each edge; for binary shapes this determines the topology.
    """
    i, m = rt.leaf_count, rt.node_count
    adj = [[] for _ in range(m)]
    for k, (a, b) in enumerate(rt.edges):
        adj[a].append((b, k))
        adj[b].append((a, k))
    splits = set()
    for k, (a, b) in enumerate(rt.edges):
        # leaves on the a-side of edge k
        side = set()
        stack = [a]
        seen = {a}
        while stack:
            v = stack.pop()
            if v < i:
                side.add(v + 1)
            for w, ek in adj[v]:
                if ek != k and w not in seen:
                    seen.add(w)
                    stack.append(w)
        other = frozenset(range(1, i + 1)) - side
        if len(side) >= 2 and len(other) >= 2:
            splits.add(frozenset((frozenset(side), other)))
    return frozenset(splits)


def dump_tree(tree):
    """Serialize a tree: first line n, then one 'u v' line per edge."""
    lines = [str(tree.n)]
    lines.extend(f"{u} {v}" for u, v in tree.edges)
    return "\n".join(lines) + "\n"


def parse_tree_dump(text):
    """Inverse of :func:`dump_tree`; validates the result."""
    lines = [ln for ln in text.strip().splitlines() if ln.strip()]
    if not lines:
        raise ValueError("empty tree dump")
    n = int(lines[0])
    edges = []
    for ln in lines[1:]:
        u, v = ln.split()
        edges.append((int(u), int(v)))
    return LabeledTree(n, tuple(edges))
