"""Euler-tour dynamic forest: cut/link/size/connectivity in O(log n).

Each component's Euler tour (one self-loop node per vertex plus the two
directed arcs of every present edge) is held in a treap ordered by implicit
position.  Treap priorities come from a private counter fed through an
avalanche mix, so the structure is fully deterministic and independent of
caller RNG streams.
"""

_M64 = (1 << 64) - 1


def _mix64(z):
    z = (z + 0x9E3779B97F4A7C15) & _M64
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _M64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _M64
    return z ^ (z >> 31)


class _Node:
    __slots__ = ("prio", "left", "right", "parent", "is_vertex", "vcnt")

    def __init__(self, prio, is_vertex):
        self.prio = prio
        self.left = None
        self.right = None
        self.parent = None
        self.is_vertex = is_vertex
        self.vcnt = 1 if is_vertex else 0


def _pull(x):
    c = 1 if x.is_vertex else 0
    if x.left is not None:
        c += x.left.vcnt
    if x.right is not None:
        c += x.right.vcnt
    x.vcnt = c


def _root(x):
    while x.parent is not None:
        x = x.parent
    return x


def _merge(a, b):
    """Concatenate two treaps (min-heap on prio); returns the new root."""
    if a is None:
        return b
    if b is None:
        return a
    if a.prio < b.prio:
        r = _merge(a.right, b)
        a.right = r
        r.parent = a
        _pull(a)
        return a
    l = _merge(a, b.left)
    b.left = l
    l.parent = b
    _pull(b)
    return b


def _ascend(x, left_part, right_part):
    """Distribute x's ancestors (and their far subtrees) around the split point."""
    node = x
    p = x.parent
    x.parent = None
    while p is not None:
        gp = p.parent
        p.parent = None
        if p.left is node:
            # p and its right subtree come after everything processed so far
            p.left = None
            _pull(p)
            right_part = _merge(right_part, p)
        else:
            p.right = None
            _pull(p)
            left_part = _merge(p, left_part)
        node = p
        p = gp
    return left_part, right_part


def _split_before(x):
    """Split x's treap into (prefix strictly before x, suffix starting at x)."""
    left_part = x.left
    if left_part is not None:
        left_part.parent = None
        x.left = None
        _pull(x)
    return _ascend(x, left_part, x)


def _split_after(x):
    """Split x's treap into (prefix ending at x, suffix strictly after x)."""
    right_part = x.right
    if right_part is not None:
        right_part.parent = None
        x.right = None
        _pull(x)
    return _ascend(x, x, right_part)


class EulerTourForest:
    """Forest over vertices 1..n; starts with no edges."""

    def __init__(self, n):
        self._n = n
        self._counter = 0
        self._vnode = [None] * (n + 1)
        for v in range(1, n + 1):
            self._vnode[v] = _Node(self._next_prio(), True)
        self._arc = {}

    def _next_prio(self):
        self._counter += 1
        return _mix64(self._counter)

    def connected(self, u, v):
        return _root(self._vnode[u]) is _root(self._vnode[v])

    def size(self, v):
        """Number of vertices in v's component."""
        return _root(self._vnode[v]).vcnt

    def has_edge(self, u, v):
        return (u, v) in self._arc

    def _reroot(self, v):
        """Rotate v's tour so it starts at v's self-loop; returns the root."""
        a, b = _split_before(self._vnode[v])
        return _merge(b, a)

    def link(self, u, v):
        if self.connected(u, v):
            raise ValueError(f"link({u},{v}) would close a cycle")
        tu = self._reroot(u)
        tv = self._reroot(v)
        au = _Node(self._next_prio(), False)
        av = _Node(self._next_prio(), False)
        self._arc[(u, v)] = au
        self._arc[(v, u)] = av
        _merge(_merge(_merge(tu, au), tv), av)

    def cut(self, u, v):
        try:
            a1 = self._arc.pop((u, v))
            a2 = self._arc.pop((v, u))
        except KeyError:
            raise ValueError(f"no edge {{{u},{v}}} present") from None
        before, _ = _split_before(a1)
        if _root(a2) is _root(a1):
            # order along the tour: [before] a1 [mid] a2 [rest]
            _, rest = _split_after(a2)
            _split_after(a1)   # isolates a1
            _split_before(a2)  # isolates a2; [mid] stays as its own tour
            _merge(before, rest)
        else:
            # a2 precedes a1: [pre] a2 [mid] a1 [rest]
            pre, _ = _split_before(a2)
            _split_after(a2)   # isolates a2
            _, rest = _split_after(a1)
            _merge(pre, rest)
