import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from emfirefly.energy import EnergyLedger, NodeState, RadioModel, consume_rx, consume_tx, residual_energy
from emfirefly.errors import ConfigError, DeadNodeError

from oracles import tx_cost

RADIO = RadioModel()


def node(initial=200.0, consumed=0.0):
    return NodeState(id=0, position=(0.0, 0.0), initial_energy=initial, consumed_energy=consumed)


@pytest.mark.parametrize(
    "initial,consumed,expected",
    [(200.0, 0.0, 200.0), (200.0, 200.0, 0.0), (200.0, 50.0, 150.0)],
)
def test_residual_energy(initial, consumed, expected):
    assert residual_energy(node(initial, consumed)) == expected


def test_residual_never_negative():
    assert residual_energy(node(1.0, 1.5)) == 0.0


def test_tx_zero_bits_is_free():
    n = node()
    assert consume_tx(n, 0, 100.0, RADIO) == 0.0
    assert n.consumed_energy == 0.0 and n.cumulative_tx_cost == 0.0


def test_tx_first_order_cost():
    radio = RadioModel(e_elec=5e-8, eps_amp=1e-10)
    n = node()
    cost = consume_tx(n, 4000, 100.0, radio)
    assert cost == pytest.approx(4.2e-3, rel=1e-12)
    assert n.consumed_energy == pytest.approx(4.2e-3, rel=1e-12)
    assert n.cumulative_tx_cost == n.consumed_energy


def test_tx_at_zero_distance_is_electronics_only():
    radio = RadioModel(e_elec=5e-8, eps_amp=1e-10)
    assert consume_tx(node(), 4000, 0.0, radio) == 5e-8 * 4000


def test_rx_cost_not_counted_as_transfer():
    radio = RadioModel(e_elec=5e-8)
    n = node()
    assert consume_rx(n, 4000, radio) == pytest.approx(2.0e-4)
    assert n.cumulative_tx_cost == 0.0
    assert consume_rx(n, 0, radio) == 0.0


def test_rx_kills_node_and_clamps():
    radio = RadioModel(e_elec=5e-8)
    n = node(initial=1.0, consumed=1.0 - 1e-5)
    spent = consume_rx(n, 4000, radio)
    assert not n.alive
    assert residual_energy(n) == 0.0
    assert spent == pytest.approx(1e-5)
    assert n.initial_energy == pytest.approx(residual_energy(n) + n.consumed_energy)


def test_dead_node_rejects_traffic():
    n = node()
    n.alive = False
    with pytest.raises(DeadNodeError):
        consume_tx(n, 10, 1.0, RADIO)
    with pytest.raises(DeadNodeError):
        consume_rx(n, 10, RADIO)


def test_node_dies_at_hello_threshold():
    n = node(initial=1.0)
    # leave exactly one zero-distance HELLO worth of energy
    n.consumed_energy = 1.0 - RADIO.death_threshold - 1e-6
    consume_rx(n, 20, RADIO)  # 1e-6 J
    assert not n.alive


@pytest.mark.parametrize("field", ["e_elec", "eps_amp", "packet_bits", "hello_bits"])
def test_radio_rejects_non_positive(field):
    with pytest.raises(ConfigError):
        RadioModel(**{field: 0})


ops = st.lists(
    st.tuples(st.booleans(), st.integers(0, 20000), st.floats(0, 300)),
    min_size=1,
    max_size=60,
)


@settings(max_examples=200, deadline=None)
@given(initial=st.floats(0.01, 5.0), seq=ops)
def test_conservation_monotonicity_and_death_permanence(initial, seq):
    n = node(initial=initial)
    last = residual_energy(n)
    died = False
    for is_tx, bits, d in seq:
        if not n.alive:
            died = True
            before = n.consumed_energy
            with pytest.raises(DeadNodeError):
                (consume_tx(n, bits, d, RADIO) if is_tx else consume_rx(n, bits, RADIO))
            assert n.consumed_energy == before
            continue
        consume_tx(n, bits, d, RADIO) if is_tx else consume_rx(n, bits, RADIO)
        r = residual_energy(n)
        assert r <= last
        last = r
        assert 0 <= n.consumed_energy <= n.initial_energy
        assert n.cumulative_tx_cost <= n.consumed_energy + 1e-15
        assert math.isclose(n.initial_energy, r + n.consumed_energy, rel_tol=1e-9)
        assert n.alive == (r > RADIO.death_threshold)
    if died:
        assert not n.alive


@settings(max_examples=50, deadline=None)
@given(seq=ops)
def test_vector_ledger_matches_scalar_model(seq):
    ledger = EnergyLedger(np.array([0.5]), RADIO)
    n = node(initial=0.5)
    for is_tx, bits, d in seq:
        if not n.alive:
            break
        if is_tx:
            a = consume_tx(n, bits, d, RADIO)
            b = ledger.charge([0], tx_cost(bits, d, RADIO.e_elec, RADIO.eps_amp), transmit=True)[0]
        else:
            a = consume_rx(n, bits, RADIO)
            b = ledger.charge([0], RADIO.e_elec * bits, transmit=False)[0]
        assert a == pytest.approx(b, rel=1e-12, abs=1e-18)
    assert ledger.consumed[0] == pytest.approx(n.consumed_energy, rel=1e-12, abs=1e-18)
    assert ledger.tx_cost[0] == pytest.approx(n.cumulative_tx_cost, rel=1e-12, abs=1e-18)
    assert bool(ledger.alive[0]) == n.alive


def test_ledger_skips_dead_nodes():
    ledger = EnergyLedger(np.array([1.0, 1.0]), RADIO)
    ledger.alive[1] = False
    spent = ledger.charge([0, 1], 0.1, transmit=True)
    assert spent.tolist() == [0.1, 0.0]
    assert ledger.consumed[1] == 0.0
