import pytest

import mhcl


def test_greedy_worked_example():
    p = mhcl.partition_greedy(mhcl.AddressRange(0, 256), [1, 2, 3])
    assert p.own_address == 0
    assert [(c.child, c.range.start, c.range.length) for c in p.children] == [
        (1, 1, 79),
        (2, 80, 79),
        (3, 159, 79),
    ]
    assert p.reserve == mhcl.AddressRange(238, 18)


def test_aggregate_worked_example():
    p = mhcl.partition_aggregate(mhcl.AddressRange(0, 256), [(1, 10), (2, 20), (3, 30)])
    assert [c.range.length for c in p.children] == [40, 80, 119]
    assert p.reserve.start == 240


def test_delayed_allocation():
    p = mhcl.allocate_delayed(mhcl.AddressRange(238, 18), [4, 5])
    assert p.own_address is None
    assert [c.range.start for c in p.children] == [238, 246]


def test_insufficient_space_raises_with_code():
    with pytest.raises(mhcl.Error) as info:
        mhcl.partition_greedy(mhcl.AddressRange(10, 4), [1, 2, 3, 4], reserve_percent=0)
    assert info.value.code == "InsufficientSpace"


@pytest.mark.parametrize(
    "payload",
    [mhcl.Dio(80, 79), mhcl.DioAck(3), mhcl.Dao(12), mhcl.DaoAck(9),
     mhcl.AppData(17, mhcl.Direction.DOWN), mhcl.RplDao(4)],
)
def test_codec_round_trip(payload):
    msg = mhcl.Message(1, 2, 258, payload)
    data = mhcl.encode(msg)
    assert isinstance(data, bytes)
    assert mhcl.decode(data) == msg


def test_dio_bytes():
    data = mhcl.encode(mhcl.Message(1, 2, 0x0102, mhcl.Dio(0x50, 0x4F)))
    assert data.hex() == "01010001000201020050004f"


def test_decode_rejects_garbage():
    with pytest.raises(mhcl.Error) as info:
        mhcl.decode(b"\x09\x01")
    assert info.value.code == "MalformedMessage"


def test_topologies():
    g = mhcl.make_grid(9)
    assert g.size == 9 and g.root == 0 and g.depth == 4
    assert sorted(g.neighbors(4)) == [1, 3, 5, 7]
    u = mhcl.make_uniform(25, seed=3)
    assert u.connected()
    assert u.positions == mhcl.make_uniform(25, seed=3).positions
    with pytest.raises(mhcl.Error):
        mhcl.make_grid(10)


@pytest.mark.parametrize("mode", ["greedy", "aggregate"])
def test_lossless_run(mode):
    m = mhcl.run(mhcl.make_grid(25), mode=mode, seed=2)
    assert m.n == 25
    assert m.addressing_rate == 1.0
    assert m.down_rate == 1.0
    assert m.dio_count + m.dao_count == (4 if mode == "greedy" else 6) * 24
    assert len(set(m.addresses.values())) == 25


def test_run_is_deterministic_and_baseline_lags():
    t = mhcl.make_grid(169)
    a = mhcl.run(t, mode="aggregate", failure="tx", rate=0.1, seed=5)
    b = mhcl.run(t, mode="aggregate", failure="tx", rate=0.1, seed=5)
    assert (a.setup_ms, a.dio_count, a.dao_count) == (b.setup_ms, b.dio_count, b.dao_count)
    base = mhcl.run(t, mode="baseline", seed=5)
    assert base.down_rate < 0.5 * mhcl.run(t, mode="aggregate", seed=5).down_rate


def test_bad_mode():
    with pytest.raises(mhcl.Error):
        mhcl.run(mhcl.make_grid(9), mode="fast")
