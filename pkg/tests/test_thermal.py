import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from hybridgrid.thermal import (
    DiversionLedger,
    HotWaterSpec,
    absorb,
    annual_demand,
    demand_curve,
    heater_energy,
)


def test_heater_energy():
    assert heater_energy(1000, 30, 30) == 0.0
    assert heater_energy(1000, 35, 25) == pytest.approx(41_800 / 3600)
    assert heater_energy(1000, 35, 25) == pytest.approx(11.611, abs=1e-3)
    with pytest.raises(ValueError):
        heater_energy(1000, 20, 25)


def test_annual_demand_at_250_guests():
    spec = HotWaterSpec()
    assert spec.t_f - spec.t_in == pytest.approx(19.5)
    by_hand = 250 * 200 * 365 * 4.18 * 19.5 / 3600 / 1000
    assert annual_demand(spec) / 1000 == pytest.approx(by_hand)
    assert annual_demand(spec) / 1000 == pytest.approx(413.19, rel=0.005)


def test_zero_guests_and_linearity():
    assert annual_demand(HotWaterSpec(guests_per_day=0)) == 0.0
    curve = demand_curve(HotWaterSpec(), np.arange(0, 401, 50))
    np.testing.assert_allclose(np.diff(curve), curve[1], rtol=1e-12)
    assert curve[5] == pytest.approx(annual_demand(HotWaterSpec()))


def test_hourly_draw_sums_to_daily():
    spec = HotWaterSpec()
    assert spec.hourly_draw_kwh().sum() == pytest.approx(spec.daily_demand_kwh)


def test_resolved_defaults():
    spec = HotWaterSpec().resolved(500.0)
    assert spec.tank_capacity_kwh == pytest.approx(spec.daily_demand_kwh)
    assert spec.heater_power_kw == 500.0
    fixed = HotWaterSpec(tank_capacity_kwh=10, heater_power_kw=5).resolved(500.0)
    assert (fixed.tank_capacity_kwh, fixed.heater_power_kw) == (10, 5)


def test_absorb_examples():
    spec = HotWaterSpec(tank_capacity_kwh=1000, heater_power_kw=60)
    assert absorb(0.0, 100.0, spec, 0.0) == (0.0, 100.0)
    got, tank = absorb(100.0, 0.0, spec, 0.0)
    assert got == 60.0 and tank == 60.0
    got, tank = absorb(100.0, 1000.0, spec, 0.0)
    assert got == 0.0 and tank == 1000.0
    # draw leaves first, freeing headroom
    got, tank = absorb(100.0, 1000.0, spec, 30.0)
    assert got == 30.0 and tank == 1000.0


def test_absorb_requires_resolved_spec():
    with pytest.raises(ValueError):
        absorb(1.0, 0.0, HotWaterSpec(), 0.0)
    with pytest.raises(ValueError):
        absorb(-1.0, 0.0, HotWaterSpec(tank_capacity_kwh=1, heater_power_kw=1), 0.0)


@given(st.lists(st.tuples(st.floats(0, 500), st.floats(0, 80)), min_size=1, max_size=200))
def test_tank_stays_in_bounds(steps):
    spec = HotWaterSpec(tank_capacity_kwh=300, heater_power_kw=120)
    tank = 300.0
    total_in = total_offered = 0.0
    for offered, draw in steps:
        got, tank = absorb(offered, tank, spec, draw)
        assert 0.0 <= tank <= 300.0
        assert 0.0 <= got <= min(offered, 120.0)
        total_in += got
        total_offered += offered
    assert total_in <= total_offered + 1e-9


def test_unlimited_heater_absorbs_min_of_excess_and_demand():
    spec = HotWaterSpec(heater_power_kw=1e12).resolved(0.0)
    draw = spec.hourly_draw_kwh()
    rng = np.random.default_rng(0)
    offers = rng.uniform(0, 2 * spec.daily_demand_kwh / 24, 8760) * (rng.random(8760) < 0.5)
    tank = spec.tank_capacity_kwh
    absorbed = 0.0
    for h, offer in enumerate(offers):
        got, tank = absorb(offer, tank, spec, draw[h % 24])
        absorbed += got
    demand = annual_demand(spec)
    # tank starts full, so the year's draw minus the opening stock is what can be refilled
    assert absorbed <= min(offers.sum(), demand) + 1e-6
    assert absorbed == pytest.approx(min(offers.sum(), demand), rel=0.001)


def test_ledger():
    led = DiversionLedger.from_totals(1000.0, 400.0, 300.0)
    assert led.utilization == pytest.approx(0.75)
    assert led.spilled_kwh_yr == pytest.approx(100.0)
    assert DiversionLedger.from_totals(1.0, 0.0, 0.0).utilization == 0.0


def test_spec_validation():
    with pytest.raises(ValueError):
        HotWaterSpec(t_in=50, t_f=40)
    with pytest.raises(ValueError):
        HotWaterSpec(guests_per_day=-1)
    with pytest.raises(ValueError):
        HotWaterSpec(draw_profile=(1.0,) * 23)
