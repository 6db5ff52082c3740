import numpy as np
import pytest

from hdcnav.network import (DegenerateActivityError, HDCNetwork, NetworkState,
                            TurningStimulus, ZERO_STIMULUS, decode)


@pytest.fixture(scope="module")
def settled(kernel):
    net = HDCNetwork(kernel)
    net.init_at(np.pi)
    return net


def wrapped_deg(a, b):
    return np.degrees(np.remainder(a - b + np.pi, 2 * np.pi) - np.pi)


def test_stimulus_validation():
    with pytest.raises(ValueError):
        TurningStimulus(left=-0.1)
    with pytest.raises(ValueError):
        TurningStimulus(right=float("nan"))


def test_decode_of_synthetic_bump():
    n = 100
    theta = 2 * np.pi * np.arange(n) / n
    state = NetworkState(
        hdc_rates=10.0 + 60.0 * np.exp(5.0 * (np.cos(theta - 1.0) - 1.0)),
        shift_left_rates=np.zeros(n), shift_right_rates=np.zeros(n))
    assert decode(state) == pytest.approx(1.0, abs=1e-6)


def test_decode_rejects_flat_activity():
    n = 100
    state = NetworkState(hdc_rates=np.full(n, 10.0),
                         shift_left_rates=np.zeros(n),
                         shift_right_rates=np.zeros(n))
    with pytest.raises(DegenerateActivityError):
        decode(state)


def test_init_at_grid_consistency(kernel):
    for i in range(0, 100, 10):
        heading = 2 * np.pi * i / 100
        net = HDCNetwork(kernel)
        net.init_at(heading)
        assert abs(wrapped_deg(net.decode(), heading)) < 0.1


def test_settled_rates_bounded(settled):
    state = settled.state
    for rates in (state.hdc_rates, state.shift_left_rates,
                  state.shift_right_rates):
        assert np.all(rates > 0.0)
        assert np.all(rates < 76.2)


def test_shift_layers_mirror_hdc_shape(settled):
    state = settled.state
    np.testing.assert_allclose(state.shift_left_rates, state.shift_right_rates,
                               atol=1e-9)
    # same peak location as the heading layer
    assert np.argmax(state.shift_left_rates) == np.argmax(state.hdc_rates)
    # lower amplitude: phi(u/2) of the heading layer's recurrent drive
    ratio = state.shift_left_rates.max() / state.hdc_rates.max()
    assert 0.4 < ratio < 0.75


def test_zero_stimulus_drift(kernel):
    net = HDCNetwork(kernel)
    net.init_at(1.0)
    h0 = net.decode()
    net.run_frame(ZERO_STIMULUS, 60.0)
    assert abs(wrapped_deg(net.decode(), h0)) < 1.0


@pytest.mark.parametrize("level", [0.5, 1.0, 2.0])
def test_equal_stimulus_cancellation(kernel, level):
    net = HDCNetwork(kernel)
    net.init_at(np.pi)
    h0 = net.decode()
    net.run_frame(TurningStimulus(left=level, right=level), 1.0)
    assert abs(wrapped_deg(net.decode(), h0)) < 0.05


@pytest.mark.parametrize("level", [0.02, 0.046])
def test_left_right_antisymmetry(kernel, level):
    speeds = {}
    for side in ("left", "right"):
        net = HDCNetwork(kernel)
        net.init_at(np.pi)
        net.run_frame(TurningStimulus(**{side: level}), 2.0)
        # displacement over the final second, past the spin-up transient
        h1 = net.decode()
        net.run_frame(TurningStimulus(**{side: level}), 1.0)
        speeds[side] = np.remainder(net.decode() - h1 + np.pi, 2 * np.pi) - np.pi
    assert speeds["left"] > 0.0
    assert speeds["right"] < 0.0
    assert abs(speeds["left"]) == pytest.approx(abs(speeds["right"]), rel=0.02)


def test_left_stimulus_moves_counterclockwise(kernel):
    net = HDCNetwork(kernel)
    net.init_at(1.0)
    net.run_frame(TurningStimulus(left=0.046), 1.0)
    assert wrapped_deg(net.decode(), 1.0) > 1.0


def test_run_frame_substep_count(kernel):
    net = HDCNetwork(kernel, dt=0.0005)
    net.init_at(0.0)
    # 10 ms frame at 0.5 ms steps: 20 substeps; 50 ms: 100 substeps.
    assert int(np.ceil(0.010 / net.dt - 1e-9)) == 20
    assert int(np.ceil(0.050 / net.dt - 1e-9)) == 100
    t0 = net.sim_time
    net.run_frame(ZERO_STIMULUS, 0.010)
    assert net.sim_time - t0 == pytest.approx(0.010)


def test_run_frame_rejects_subresolution_interval(kernel):
    net = HDCNetwork(kernel)
    with pytest.raises(ValueError):
        net.run_frame(ZERO_STIMULUS, 1e-5)


def test_invalid_dt_rejected(kernel):
    with pytest.raises(ValueError):
        HDCNetwork(kernel, dt=0.01)  # above tau/10


def test_state_round_trip(kernel):
    net = HDCNetwork(kernel)
    net.init_at(2.0)
    saved = net.state
    net.run_frame(TurningStimulus(left=0.03), 0.5)
    net.set_state(saved)
    assert net.decode() == pytest.approx(decode(saved))


def test_state_to_json(tmp_path, settled):
    path = tmp_path / "state.json"
    settled.state.to_json(path)
    import json
    doc = json.loads(path.read_text())
    assert len(doc["hdc_rates"]) == 100
    assert set(doc) == {"sim_time", "hdc_rates", "shift_left_rates",
                        "shift_right_rates"}


def test_halving_dt_changes_little(kernel, gain):
    from hdcnav.io import SyntheticProfile, generate
    records = generate(SyntheticProfile("balanced_maze", np.radians(30), 30.0))
    finals = []
    for dt in (0.0005, 0.00025):
        net = HDCNetwork(kernel, dt=dt)
        net.init_at(0.0)
        for k in range(1, len(records)):
            omega = records[k].omega
            level = gain.stimulus_for(omega)
            stim = (TurningStimulus(left=level) if omega >= 0
                    else TurningStimulus(right=level))
            net.run_frame(stim, records[k].t - records[k - 1].t)
        finals.append(net.decode())
    assert abs(wrapped_deg(finals[0], finals[1])) < 0.1
