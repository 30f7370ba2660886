import numpy as np
import pytest

from rotorllc import fcs, plant


@pytest.fixture(scope="module")
def acah_cfg(default_reduced, default_trim):
    return fcs.make_default_config(default_reduced, default_trim.u_trim, fcs.ACAH)


@pytest.fixture(scope="module")
def rcah_cfg(default_reduced, default_trim):
    return fcs.make_default_config(
        default_reduced, default_trim.u_trim, fcs.RCAH, kp=6.0, ki=10.0, kd=0.0
    )


def closed_loop(params, cfg, stick_fn, duration, clamp=None):
    """Minimal FCS-plant loop; returns (theta, q, u_lon) histories."""
    st = fcs.FcsState.init(cfg)
    s = plant.PlantState.at_trim(params)
    dt = cfg.dt_ctrl
    n = int(round(duration / dt))
    theta = np.empty(n)
    q = np.empty(n)
    u_lon = np.empty(n)
    for k in range(n):
        stick = stick_fn(k * dt)
        y_cmd = fcs.command_filter(stick, cfg, st, dt)
        u_cmd = fcs.di_step(cfg, st, s.x, y_cmd, dt, stick=stick)
        u_app = np.clip(u_cmd, 0.0, 100.0)
        if clamp is not None:
            u_app = clamp(u_app)
        fcs.anti_windup_update(cfg, st, u_cmd, u_app, dt)
        s = plant.step_plant(params, s, u_app, dt)
        theta[k], q[k], u_lon[k] = s.x[6], s.x[4], u_app[0]
    return theta, q, u_lon


class TestCommandFilter:
    def test_zero_stick_decays(self, acah_cfg):
        st = fcs.FcsState.init(acah_cfg)
        st.filt[:] = [5.0, 0.0]
        vals = [fcs.command_filter(0.0, acah_cfg, st, acah_cfg.dt_ctrl) for _ in range(600)]
        assert abs(vals[-1]) < 1e-3
        assert abs(vals[-1]) < abs(vals[0])

    def test_acah_unity_dc_gain(self, acah_cfg):
        st = fcs.FcsState.init(acah_cfg)
        last = 0.0
        for _ in range(2000):
            last = fcs.command_filter(20.0, acah_cfg, st, acah_cfg.dt_ctrl)
        assert last == pytest.approx(20.0, abs=1e-6)  # 20% stick -> 20 deg command

    def test_rcah_unity_dc_gain(self, rcah_cfg):
        st = fcs.FcsState.init(rcah_cfg)
        last = 0.0
        for _ in range(2000):
            last = fcs.command_filter(20.0, rcah_cfg, st, rcah_cfg.dt_ctrl)
        assert last == pytest.approx(20.0 * rcah_cfg.stick_to_rate, abs=1e-6)

    def test_dt_mismatch_rejected(self, acah_cfg):
        st = fcs.FcsState.init(acah_cfg)
        with pytest.raises(fcs.FcsError):
            fcs.command_filter(0.0, acah_cfg, st, acah_cfg.dt_ctrl * 2)


class TestDynamicInversion:
    def test_trim_equilibrium(self, acah_cfg):
        st = fcs.FcsState.init(acah_cfg)
        u = fcs.di_step(acah_cfg, st, np.zeros(10), 0.0, acah_cfg.dt_ctrl, stick=0.0)
        np.testing.assert_allclose(u, acah_cfg.u_trim, atol=1e-12)

    def test_acah_step_zero_steady_state_error(self, default_params, acah_cfg):
        theta, _, _ = closed_loop(default_params, acah_cfg, lambda t: 5.0 if t >= 0.5 else 0.0, 10.0)
        assert theta[-1] == pytest.approx(5.0, abs=0.01)  # integral action

    def test_doubling_p_gain_speeds_error_decay(self, default_params, default_reduced, default_trim):
        # RCAH with pure P: the inverted loop is e_dot = -Kp e, so the decay
        # time constant halves when Kp doubles (approximately: inversion is
        # of the mean model, the plant is periodic)
        def decay_time(kp):
            cfg = fcs.make_default_config(
                default_reduced, default_trim.u_trim, fcs.RCAH, kp=kp, ki=0.0, kd=0.0,
                rcah_tau=1e6,  # hold the commanded rate at ~0 during the test
            )
            st = fcs.FcsState.init(cfg)
            s = plant.PlantState(x=np.zeros(10), psi=0.0, t=0.0)
            s.x[4] = 8.0  # initial rate error
            dt = cfg.dt_ctrl
            q0 = s.x[4]
            for k in range(2000):
                u = fcs.di_step(cfg, st, s.x, 0.0, dt, stick=0.0)
                s = plant.step_plant(default_params, s, np.clip(u, 0, 100), dt)
                if abs(s.x[4]) < q0 * np.exp(-1):
                    return (k + 1) * dt
            return np.inf

        t1 = decay_time(2.0)
        t2 = decay_time(4.0)
        assert t1 / t2 == pytest.approx(2.0, rel=0.35)

    def test_singular_inversion_rejected(self, default_reduced, default_trim):
        b = default_reduced.b_hat.copy()
        b[fcs.Q_STATE, fcs.LON_AXIS] = 0.0
        with pytest.raises(fcs.FcsError, match="singular"):
            fcs.FcsConfig(a_fc=default_reduced.a_hat, b_fc=b, u_trim=default_trim.u_trim)


class TestAntiWindup:
    def test_noop_without_clamping(self, acah_cfg):
        st = fcs.FcsState.init(acah_cfg)
        st.int_e = 1.5
        u = np.array([60.0, 50.0, 50.0, 50.0])
        fcs.anti_windup_update(acah_cfg, st, u, u.copy(), acah_cfg.dt_ctrl)
        assert st.int_e == 1.5

    def test_saturated_integrator_grows_slower(self, default_params, default_reduced, default_trim):
        def integrator_after(aw_gain):
            cfg = fcs.make_default_config(
                default_reduced, default_trim.u_trim, fcs.ACAH, anti_windup_gain=aw_gain
            )
            st = fcs.FcsState.init(cfg)
            s = plant.PlantState.at_trim(default_params)
            dt = cfg.dt_ctrl
            for k in range(100):
                y_cmd = fcs.command_filter(30.0, cfg, st, dt)
                u_cmd = fcs.di_step(cfg, st, s.x, y_cmd, dt, stick=30.0)
                u_app = np.clip(u_cmd, 0.0, 60.0)  # tight saturation
                fcs.anti_windup_update(cfg, st, u_cmd, u_app, dt)
                s = plant.step_plant(default_params, s, u_app, dt)
            return st.int_e

        assert integrator_after(3.0) < integrator_after(0.0)

    def test_unsaturated_traces_identical(self, default_params, default_reduced, default_trim):
        # without saturation, the anti-windup gain is unobservable
        def run(aw_gain):
            cfg = fcs.make_default_config(
                default_reduced, default_trim.u_trim, fcs.ACAH, anti_windup_gain=aw_gain
            )
            return closed_loop(default_params, cfg, lambda t: 2.0 if t >= 0.5 else 0.0, 4.0)

        a = run(0.0)
        b = run(5.0)
        for xa, xb in zip(a, b):
            assert np.array_equal(xa, xb)

    def test_overshoot_reduced_under_clamping(self, default_params, default_reduced, default_trim):
        # clamp the effector well below the DI demand: with back-calculation
        # the attitude overshoot is strictly smaller
        def overshoot(aw_gain):
            cfg = fcs.make_default_config(
                default_reduced, default_trim.u_trim, fcs.ACAH, anti_windup_gain=aw_gain
            )
            clamp = lambda u: np.minimum(u, [62.0, 100.0, 100.0, 100.0])
            theta, _, _ = closed_loop(
                default_params, cfg, lambda t: 15.0 if t >= 0.5 else 0.0, 15.0, clamp=clamp
            )
            return theta.max() - 15.0

        assert overshoot(3.0) < overshoot(0.0)


class TestTrimHold:
    def test_thirty_seconds_at_trim(self, default_params, acah_cfg):
        theta, q, u_lon = closed_loop(default_params, acah_cfg, lambda t: 0.0, 30.0)
        assert np.max(np.abs(theta)) < 1e-9
        assert np.max(np.abs(q)) < 1e-9
        assert np.max(np.abs(u_lon - acah_cfg.u_trim[0])) < 1e-9


class TestRcahTracking:
    def test_doublet_rate_envelope(self, default_params, rcah_cfg):
        # 2-second doublet: commanded rate shape reproduced with bounded lag.
        # Envelope frozen after the first validated run.
        stick = lambda t: 20.0 if 1.0 <= t < 2.0 else (-20.0 if 2.0 <= t < 3.0 else 0.0)
        theta, q, _ = closed_loop(default_params, rcah_cfg, stick, 6.0)
        target = 20.0 * rcah_cfg.stick_to_rate
        assert q.max() == pytest.approx(target, rel=0.15)
        # reversal reaches 93% of the commanded -6 deg/s within the 1 s
        # half-doublet (0.3 s command filter lag); frozen regression value
        assert q.min() == pytest.approx(-5.5626, abs=0.25)
        # commanded rate returns to zero and holds attitude
        assert abs(q[-1]) < 0.2
