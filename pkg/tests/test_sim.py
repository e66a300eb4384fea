"""Scintillation simulation: generation, detection, decoding statistics."""

import io

import numpy as np
import pytest

from gtreadout.construct import greedy_construct
from gtreadout.sim import (
    FiringTrace,
    PhotonList,
    ScintParams,
    SensorParams,
    detect,
    export_photons,
    gen_events,
    import_photons,
    random_support_success,
    run,
    sweep,
)


def small_sensor(**kw):
    code = greedy_construct(30, 5, 2, 64, seed=1, budget=10**5)
    return SensorParams(8, code, **kw)


def small_scint(events=3):
    # scaled-down burst keeps the unit tests fast
    return ScintParams(yield_per_mev=2000.0, events=events)


class TestParams:
    def test_scint_validation(self):
        with pytest.raises(ValueError):
            ScintParams(events=0)
        with pytest.raises(ValueError):
            ScintParams(decay_ns=0)
        with pytest.raises(ValueError):
            ScintParams(transport_eff=0)

    def test_sensor_validation(self):
        code = greedy_construct(30, 5, 2, 64, seed=1, budget=10**5)
        with pytest.raises(ValueError):
            SensorParams(0, code)
        with pytest.raises(ValueError):
            SensorParams(8, code, fill_factor=0)
        with pytest.raises(ValueError):
            SensorParams(9, code)  # needs 81 columns, code has 64

    def test_pde(self):
        s = small_sensor(fill_factor=0.5, quantum_eff=0.5)
        assert s.pde == 0.25


class TestGenEvents:
    def test_deterministic(self):
        a = gen_events(small_scint(), 7)
        b = gen_events(small_scint(), 7)
        assert (a.time_ps == b.time_ps).all()
        assert (a.event_id == b.event_id).all()

    def test_doubling_yield_doubles_count(self):
        base = ScintParams(yield_per_mev=20000.0, events=20)
        double = ScintParams(yield_per_mev=40000.0, events=20)
        n1 = len(gen_events(base, 3))
        n2 = len(gen_events(double, 3))
        assert abs(n2 / n1 - 2.0) < 0.1

    def test_events_never_overlap(self):
        photons = gen_events(small_scint(events=5), 1)
        gap_ps = int(10.0 * 1e6)
        for e in range(5):
            ts = photons.time_ps[photons.event_id == e]
            assert ts.min() >= e * gap_ps
            # exponential tails beyond the 10 us gap are vanishingly rare
            assert ts.max() < (e + 1) * gap_ps

    def test_zero_decay_limit_one_window(self):
        scint = ScintParams(yield_per_mev=2000.0, decay_ns=1e-9, events=1)
        photons = gen_events(scint, 0)
        assert photons.time_ps.max() // 40 == photons.time_ps.min() // 40


class TestDetect:
    def test_lossless_limit(self):
        photons = gen_events(small_scint(), 2)
        sensor = small_sensor(fill_factor=1.0, quantum_eff=1.0, dead_time_ns=0.0)
        trace = detect(photons, sensor, 2)
        assert len(trace) == len(photons)

    def test_dead_time_rule(self):
        # two photons on one pixel 10 ns apart under a 20 ns dead time
        photons = PhotonList(
            np.array([0, 0]), np.array([1000, 11000]), np.array([4, 4]), 1
        )
        sensor = small_sensor(fill_factor=1.0, quantum_eff=1.0, dead_time_ns=20.0)
        trace = detect(photons, sensor, 0)
        assert len(trace) == 1 and int(trace.time_ps[0]) == 1000

    def test_dead_time_non_paralyzable(self):
        # arrivals at 0, 15, 30 ns with 20 ns dead time: the 15 ns photon is
        # dropped and must not extend the dead window, so 30 ns fires
        photons = PhotonList(
            np.array([0, 0, 0]), np.array([0, 15000, 30000]), np.array([4, 4, 4]), 1
        )
        sensor = small_sensor(fill_factor=1.0, quantum_eff=1.0, dead_time_ns=20.0)
        trace = detect(photons, sensor, 0)
        assert trace.time_ps.tolist() == [0, 30000]

    def test_respects_given_pixels(self):
        photons = PhotonList(np.array([0]), np.array([100]), np.array([7]), 1)
        sensor = small_sensor(fill_factor=1.0, quantum_eff=1.0)
        trace = detect(photons, sensor, 9)
        assert trace.pixel.tolist() == [7]

    def test_thinning_rate(self):
        photons = gen_events(ScintParams(yield_per_mev=40000.0, events=5), 4)
        sensor = small_sensor(dead_time_ns=0.0)
        trace = detect(photons, sensor, 4)
        rate = len(trace) / len(photons)
        assert abs(rate - sensor.pde) < 0.02


class TestPhotonIO:
    def test_round_trip_without_pixels(self):
        photons = gen_events(small_scint(), 5)
        buf = io.StringIO()
        export_photons(buf, photons)
        buf.seek(0)
        back = import_photons(buf)
        assert (back.time_ps == photons.time_ps).all()
        assert (back.pixel == -1).all()

    def test_round_trip_with_pixels_preserves_downstream(self):
        photons = gen_events(small_scint(), 5)
        sensor = small_sensor(fill_factor=1.0, quantum_eff=1.0)
        trace = detect(photons, sensor, 5)
        assigned = PhotonList(trace.event_id, trace.time_ps, trace.pixel,
                              photons.events)
        buf = io.StringIO()
        export_photons(buf, assigned)
        buf.seek(0)
        back = import_photons(buf)
        trace2 = detect(back, sensor, 5)
        assert (trace2.pixel == trace.pixel).all()
        assert (trace2.time_ps == trace.time_ps).all()

    def test_rejects_negative_time(self):
        with pytest.raises(ValueError):
            import_photons(io.StringIO("event_id,time_ps\n0,-5\n"))

    def test_rejects_bad_header(self):
        with pytest.raises(ValueError):
            import_photons(io.StringIO("foo,bar\n0,5\n"))

    def test_rejects_malformed_row(self):
        with pytest.raises(ValueError, match="line 2"):
            import_photons(io.StringIO("event_id,time_ps\nx,y\n"))


class TestRun:
    def test_invariants_small(self):
        stats = run(small_scint(events=5), small_sensor(), seed=11)
        cert = 2
        # guaranteed multiplicities decode perfectly
        for s, _, pct in stats.rows:
            if s <= cert:
                assert pct == 100.0
        assert stats.total_firings > 0
        assert 0.0 <= stats.missed_pct <= 100.0
        assert stats.max_simultaneity >= max(s for s, _, _ in stats.rows)

    def test_deterministic_across_workers(self):
        a = run(small_scint(events=4), small_sensor(), seed=5, workers=1)
        b = run(small_scint(events=4), small_sensor(), seed=5, workers=4)
        assert a == b

    def test_alpha_is_failure_rate(self):
        stats = run(small_scint(events=4), small_sensor(), seed=5)
        for s, _, pct in stats.rows:
            assert stats.alpha[s] == pytest.approx(1 - pct / 100.0)

    def test_trace_injection_matches_internal(self):
        scint = small_scint(events=4)
        sensor = small_sensor()
        photons = gen_events(scint, 5)
        trace = detect(photons, sensor, 5)
        a = run(scint, sensor, seed=5)
        b = run(scint, sensor, seed=5, trace=trace)
        assert a == b


class TestRandomSupport:
    def test_guaranteed_below_certificate(self):
        code = greedy_construct(30, 5, 2, 64, seed=1, budget=10**5)
        assert random_support_success(code, 1, 200, seed=0) == 1.0
        assert random_support_success(code, 2, 200, seed=0) == 1.0

    def test_degrades_above_certificate(self):
        code = greedy_construct(30, 5, 2, 64, seed=1, budget=10**5)
        assert random_support_success(code, 6, 200, seed=0) < 1.0

    def test_rejects_bad_sparsity(self):
        code = greedy_construct(30, 5, 2, 64, seed=1, budget=10**5)
        with pytest.raises(ValueError):
            random_support_success(code, 0, 10)
        with pytest.raises(ValueError):
            random_support_success(code, 65, 10)


class TestSweep:
    def test_shape_and_monotonicity(self):
        code2 = greedy_construct(30, 5, 2, 64, seed=1, budget=10**5)
        code3 = greedy_construct(40, 7, 3, 64, seed=1, budget=10**5)
        rows = sweep(
            small_scint(events=3), 8, {2: code2, 3: code3},
            dead_times_ns=(20, 40), intervals_ps=(20, 40), seed=2,
        )
        assert len(rows) == 4
        for row in rows:
            assert set(row) >= {"dead_time_ns", "tdc_interval_ps", "firings",
                                "max_simultaneity", "missed_pct_d2",
                                "missed_pct_d3"}
            assert row["missed_pct_d3"] <= row["missed_pct_d2"]
