import pytest

from crt_subaging.cli_harness import derive_stream
from crt_subaging.pools import SwapPool


def test_basic_operations():
    p = SwapPool(10, initial=[3, 5, 7])
    assert len(p) == 3
    assert 5 in p and 4 not in p
    p.add(4)
    p.remove(5)
    assert sorted(p.as_tuple()) == [3, 4, 7]
    with pytest.raises(ValueError):
        p.add(3)
    with pytest.raises(ValueError):
        p.remove(5)


def test_draw_uniform_slot():
    p = SwapPool(4, initial=[0, 1, 2, 3])
    assert p.draw(0.0) == p.items[0]
    assert p.draw(0.999) == p.items[3]


def test_positions_consistent_under_churn():
    rng = derive_stream(700, 0)
    p = SwapPool(50)
    member = set()
    for _ in range(5000):
        x = int(rng.random() * 50)
        if x in member:
            p.remove(x)
            member.remove(x)
        else:
            p.add(x)
            member.add(x)
        assert set(p.items) == member
        for i, v in enumerate(p.items):
            assert p.pos[v] == i
