"""Forests obtained from a fixed base tree by removing marked edges.

Two interchangeable backends sit behind :class:`DynamicForest`:

* ``"naive"`` -- cut/link are O(1) bit flips; connectivity answers are
  recomputed on demand from the present-edge mask (vectorized pointer
  doubling along the rooted base tree) and cached until the next mutation.
  This is the right trade when observations are sparse relative to steps.
* ``"euler"`` -- an Euler-tour treap with O(log n) cut/link/size; the
  performance structure, validated against the naive answers and against
  :func:`naive_ranked_masses`.

Component sizes are compared as integers everywhere; division by n happens
only when a mass partition is produced.
"""

from collections import Counter

import numpy as np

from .euler_tour import EulerTourForest
from .random_trees import LabeledTree


class DynamicForest:
    """Base tree plus a present/absent flag per edge, with size queries.

    Edge identity is the index into ``tree.edges``.  A single instance is not
    thread-safe; distinct instances share nothing.
    """

    def __init__(self, tree: LabeledTree, backend="naive"):
        if backend not in ("naive", "euler"):
            raise ValueError(f"unknown backend {backend!r}")
        self.tree = tree
        self.backend = backend
        n = tree.n
        self.n = n
        self._present = np.ones(len(tree.edges), dtype=bool)
        self._absent_count = 0
        self._version = 0
        self._cache_version = -1
        self._labels = None
        self._sizes_by_root = None
        self._rooted = False
        if backend == "euler":
            self._ett = EulerTourForest(n)
            for u, v in tree.edges:
                self._ett.link(u, v)
            self._size_multiset = Counter({n: 1})

    # -- mutation ---------------------------------------------------------

    @property
    def component_count(self):
        return self._absent_count + 1

    def present(self, edge_id):
        return bool(self._present[edge_id])

    def cut(self, edge_id):
        """Remove a present edge, splitting its component in two."""
        if not self._present[edge_id]:
            raise ValueError(f"edge {edge_id} is already absent")
        if self.backend == "euler":
            u, v = self.tree.edges[edge_id]
            s_before = self._ett.size(u)
            self._ett.cut(u, v)
            s1 = self._ett.size(u)
            ms = self._size_multiset
            ms[s_before] -= 1
            if ms[s_before] == 0:
                del ms[s_before]
            ms[s1] += 1
            ms[s_before - s1] += 1
        self._present[edge_id] = False
        self._absent_count += 1
        self._version += 1

    def link(self, edge_id):
        """Reinsert an absent edge, merging two components."""
        if self._present[edge_id]:
            raise ValueError(f"edge {edge_id} is already present")
        if self.backend == "euler":
            u, v = self.tree.edges[edge_id]
            s1 = self._ett.size(u)
            s2 = self._ett.size(v)
            self._ett.link(u, v)
            ms = self._size_multiset
            for s in (s1, s2):
                ms[s] -= 1
                if ms[s] == 0:
                    del ms[s]
            ms[s1 + s2] += 1
        self._present[edge_id] = True
        self._absent_count -= 1
        self._version += 1

    # -- queries ----------------------------------------------------------

    def component_size(self, v):
        if not 1 <= v <= self.n:
            raise ValueError(f"vertex {v} out of range")
        if self.backend == "euler":
            return self._ett.size(v)
        labels, sizes = self._connectivity()
        return int(sizes[labels[v]])

    def same_component(self, u, v):
        if not (1 <= u <= self.n and 1 <= v <= self.n):
            raise ValueError("vertex out of range")
        if u == v:
            return True
        if self.backend == "euler":
            return self._ett.connected(u, v)
        labels, _ = self._connectivity()
        return bool(labels[u] == labels[v])

    def component_sizes(self):
        """Integer component sizes, decreasing."""
        if self.backend == "euler":
            sizes = sorted(self._size_multiset.elements(), reverse=True)
            return np.array(sizes, dtype=np.int64)
        _, sizes = self._connectivity()
        out = sizes[sizes > 0]
        return np.sort(out)[::-1]

    def ranked_masses(self):
        """Component sizes divided by n, decreasing (a mass partition)."""
        return self.component_sizes() / self.n

    # -- naive backend internals -----------------------------------------

    def _ensure_rooted(self):
        if self._rooted:
            return
        n = self.n
        adj = self.tree.adjacency()
        parent = np.zeros(n + 1, dtype=np.int64)
        parent[1] = 1
        seen = [False] * (n + 1)
        seen[0] = seen[1] = True
        order = [1]
        for v in order:
            for w in adj[v]:
                if not seen[w]:
                    seen[w] = True
                    parent[w] = v
                    order.append(w)
        child = np.empty(len(self.tree.edges), dtype=np.int64)
        for k, (u, v) in enumerate(self.tree.edges):
            child[k] = v if parent[v] == u else u
        self._base_parent = parent
        self._edge_child = child
        self._rooted = True

    def _connectivity(self):
        """(labels, sizes-by-root-label) for the current present mask, cached."""
        if self._cache_version == self._version:
            return self._labels, self._sizes_by_root
        self._ensure_rooted()
        par = self._base_parent.copy()
        cut_children = self._edge_child[~self._present]
        par[cut_children] = cut_children
        while True:
            nxt = par[par]
            if np.array_equal(nxt, par):
                break
            par = nxt
        sizes = np.bincount(par[1:], minlength=self.n + 1)
        sizes[0] = 0
        self._labels = par
        self._sizes_by_root = sizes
        self._cache_version = self._version
        return par, sizes


def forest_new(tree, backend="naive"):
    """Fresh forest with every base edge present (one component of size n)."""
    return DynamicForest(tree, backend=backend)


def naive_component_sizes(tree, absent):
    """Integer component sizes after deleting ``absent`` edge ids, decreasing.

    Independent oracle: plain breadth-first traversal over adjacency lists,
    sharing nothing with the incremental structures.
    """
    absent = set(absent)
    n = tree.n
    adj = [[] for _ in range(n + 1)]
    for k, (u, v) in enumerate(tree.edges):
        if k not in absent:
            adj[u].append(v)
            adj[v].append(u)
    seen = [False] * (n + 1)
    sizes = []
    for start in range(1, n + 1):
        if seen[start]:
            continue
        seen[start] = True
        queue = [start]
        count = 0
        while queue:
            v = queue.pop()
            count += 1
            for w in adj[v]:
                if not seen[w]:
                    seen[w] = True
                    queue.append(w)
        sizes.append(count)
    sizes.sort(reverse=True)
    return sizes


def naive_ranked_masses(tree, absent):
    """Mass partition computed by fresh traversal; oracle for ranked_masses."""
    sizes = naive_component_sizes(tree, absent)
    return np.array(sizes, dtype=float) / tree.n
