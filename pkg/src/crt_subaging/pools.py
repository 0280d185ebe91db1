"""Ordered sampling pools with O(1) uniform draw, insert and remove."""


class SwapPool:
    """Pool of integer ids in [0, universe) supporting O(1) uniform sampling.

    Removal swaps the last item into the vacated slot, so the pool order is a
    deterministic function of the operation history.  Hot loops may bypass the
    methods and manipulate ``items``/``pos`` directly with the same swap-remove
    discipline; both views stay consistent.
    """

    __slots__ = ("items", "pos")

    def __init__(self, universe, initial=()):
        self.items = []
        self.pos = [-1] * universe
        for x in initial:
            self.add(x)

    def __len__(self):
        return len(self.items)

    def __contains__(self, x):
        return self.pos[x] >= 0

    def add(self, x):
        if self.pos[x] >= 0:
            raise ValueError(f"item {x} already in pool")
        self.pos[x] = len(self.items)
        self.items.append(x)

    def remove(self, x):
        i = self.pos[x]
        if i < 0:
            raise ValueError(f"item {x} not in pool")
        last = self.items[-1]
        self.items[i] = last
        self.pos[last] = i
        self.items.pop()
        self.pos[x] = -1

    def draw(self, u):
        """Return the item at slot int(u * len); u must lie in [0, 1)."""
        return self.items[int(u * len(self.items))]

    def as_tuple(self):
        return tuple(self.items)
