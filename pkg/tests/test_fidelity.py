import numpy as np
import pytest

from rotorllc import fidelity, harmonic, kernels

from test_reduction import plain_lti


def fr_from_values(omega, values, pair="y0/u0", coherence=None):
    resp = np.asarray(values, dtype=complex).reshape(-1, 1)
    coh = None if coherence is None else np.asarray(coherence, dtype=float).reshape(-1, 1)
    return fidelity.FrequencyResponse(
        omega=np.asarray(omega, dtype=float), pairs=(pair,), response=resp, coherence=coh
    )


class TestFrequencyResponse:
    def test_scalar_first_order(self):
        lti = plain_lti(np.array([[-1.0]]), np.array([[1.0]]), np.array([[1.0]]), np.zeros((1, 1)))
        fr = fidelity.frequency_response(lti, ["y0/u0"], np.array([1.0]))
        h = fr.response[0, 0]
        assert abs(h) == pytest.approx(1 / np.sqrt(2), abs=1e-12)
        assert np.degrees(np.angle(h)) == pytest.approx(-45.0, abs=1e-9)

    def test_feedthrough_only_flat(self):
        lti = plain_lti(np.array([[-1.0]]), np.zeros((1, 1)), np.zeros((1, 1)), np.array([[2.5]]))
        fr = fidelity.frequency_response(lti, ["y0/u0"], np.array([0.5, 5.0, 50.0]))
        np.testing.assert_allclose(fr.response, 2.5, atol=1e-14)

    def test_matches_sine_dwell(self, default_reduced):
        # time-domain oracle: drive the reduced model with a unit sine and
        # measure steady-state amplitude/phase of the load mean output
        model = default_reduced
        fr = fidelity.frequency_response(model, ["pitch_link_load/delta_lon"], np.array([0.5, 2.0, 8.0]))
        dt = 0.002
        for k, w in enumerate([0.5, 2.0, 8.0]):
            n = int(round((30.0 + 10 * 2 * np.pi / w) / dt))
            t = np.arange(n) * dt
            u = np.zeros((n, model.b_hat.shape[1]))
            u[:, 0] = np.sin(w * t)
            traj = kernels.lti_simulate(model.a_hat, model.b_hat, np.zeros(model.n_states), u, dt)
            y = traj[:-1] @ model.c_hat[0] + u @ model.d_hat[0]
            # fit a sin/cos pair over the final cycles
            n_fit = int(round(6 * 2 * np.pi / w / dt))
            tt = t[-n_fit:]
            a_mat = np.column_stack([np.sin(w * tt), np.cos(w * tt)])
            (a, b), *_ = np.linalg.lstsq(a_mat, y[-n_fit:], rcond=None)
            amp = np.hypot(a, b)
            phase = np.arctan2(b, a)
            h = fr.response[k, 0]
            assert amp == pytest.approx(abs(h), rel=0.01)
            assert np.degrees(phase) == pytest.approx(np.degrees(np.angle(h)), abs=1.0)

    def test_state_pair_targets(self, default_lti):
        fr = fidelity.frequency_response(default_lti, ["q/delta_lon"], np.array([1.0]))
        assert fr.response.shape == (1, 1)

    def test_harmonic_output_targets(self, default_reduced):
        fr = fidelity.frequency_response(
            default_reduced, ["pitch_link_load.1c/delta_lon"], np.array([1.0])
        )
        assert np.isfinite(fr.response).all()

    def test_unknown_target_rejected(self, default_reduced):
        with pytest.raises(fidelity.FidelityError):
            fidelity.frequency_response(default_reduced, ["nope/delta_lon"], np.array([1.0]))


class TestFidelityCost:
    def test_one_db_magnitude_example(self):
        omega = [1.0]
        ref = fr_from_values(omega, [1.0], coherence=[1.0])
        model = fr_from_values(omega, [10 ** (1 / 20)])  # exactly +1 dB
        rep = fidelity.fidelity_cost(model, ref)
        w_gamma = (1.58 * (1 - np.exp(-1))) ** 2
        assert rep.costs[0] == pytest.approx(20 * w_gamma, abs=1e-9)
        assert rep.costs[0] == pytest.approx(19.95005, abs=1e-3)

    def test_phase_equivalence_example(self):
        # 7.57 deg of phase error weighs the same as 1 dB of magnitude error
        omega = [1.0]
        ref = fr_from_values(omega, [1.0], coherence=[1.0])
        model = fr_from_values(omega, [np.exp(1j * np.radians(7.57))])
        rep = fidelity.fidelity_cost(model, ref)
        w_gamma = (1.58 * (1 - np.exp(-1))) ** 2
        expected = 20 * w_gamma * 0.01745 * 7.57**2
        assert rep.costs[0] == pytest.approx(expected, abs=1e-9)
        assert rep.costs[0] == pytest.approx(19.94944, abs=1e-3)
        # the two hand cases agree to ~0.001
        mag = fidelity.fidelity_cost(fr_from_values(omega, [10 ** (1 / 20)]), ref)
        assert abs(rep.costs[0] - mag.costs[0]) < 0.01

    def test_identical_responses_zero(self, default_reduced):
        fr = fidelity.frequency_response(
            default_reduced, ["pitch_link_load/delta_lon"], np.logspace(-1, 1, 20)
        )
        rep = fidelity.fidelity_cost(fr, fr)
        assert rep.average == 0.0

    def test_invariant_under_common_cascade(self):
        # adding the same (dB, phase) response to both sides leaves J alone
        rng = np.random.default_rng(4)
        omega = np.linspace(0.5, 10, 15)
        hm = rng.standard_normal(15) + 1j * rng.standard_normal(15) + 3
        hr = hm * (1 + 0.05 * rng.standard_normal(15))
        common = (0.5 + 0.1j) * np.exp(1j * 0.3 * omega)
        j0 = fidelity.fidelity_cost(
            fr_from_values(omega, hm), fr_from_values(omega, hr)
        ).costs[0]
        j1 = fidelity.fidelity_cost(
            fr_from_values(omega, hm * common), fr_from_values(omega, hr * common)
        ).costs[0]
        assert j1 == pytest.approx(j0, rel=1e-9)

    def test_quadratic_in_db_offset(self):
        omega = np.linspace(1, 5, 5)
        ref = fr_from_values(omega, np.ones(5))
        j1 = fidelity.fidelity_cost(fr_from_values(omega, np.full(5, 10 ** (1 / 20))), ref).costs[0]
        j2 = fidelity.fidelity_cost(fr_from_values(omega, np.full(5, 10 ** (2 / 20))), ref).costs[0]
        assert j2 == pytest.approx(4 * j1, rel=1e-9)

    def test_low_coherence_downweights(self):
        omega = [1.0]
        model = fr_from_values(omega, [10 ** (1 / 20)])
        j_high = fidelity.fidelity_cost(model, fr_from_values(omega, [1.0], coherence=[1.0])).costs[0]
        j_low = fidelity.fidelity_cost(model, fr_from_values(omega, [1.0], coherence=[0.3])).costs[0]
        assert j_low < j_high

    def test_missing_coherence_means_unit_weight(self):
        omega = [1.0]
        model = fr_from_values(omega, [10 ** (1 / 20)])
        rep = fidelity.fidelity_cost(model, fr_from_values(omega, [1.0]))
        assert rep.costs[0] == pytest.approx(20.0, abs=1e-9)

    def test_phase_wrap(self):
        omega = [1.0]
        ref = fr_from_values(omega, [np.exp(1j * np.radians(179.0))])
        model = fr_from_values(omega, [np.exp(1j * np.radians(-179.0))])
        rep = fidelity.fidelity_cost(model, ref)
        # 2 degrees apart across the branch cut, not 358
        assert rep.costs[0] == pytest.approx(20 * 0.01745 * 4.0, abs=1e-6)

    def test_grid_mismatch_rejected(self):
        a = fr_from_values([1.0, 2.0], [1.0, 1.0])
        b = fr_from_values([1.0, 2.5], [1.0, 1.0])
        with pytest.raises(fidelity.FidelityError, match="grids"):
            fidelity.fidelity_cost(a, b)

    def test_reduced_vs_full_synthetic_reference(self, default_lti, default_reduced):
        # synthetic-reference validation: the reduced model scores a small
        # but nonzero cost against the full model at mid frequencies
        omega = np.logspace(np.log10(0.6), np.log10(20.0), 25)
        pairs = ["q/delta_lon"]
        ref = fidelity.frequency_response(default_lti, pairs, omega)
        # the reduced model lacks the state index; address via its own output rows
        model = fidelity.frequency_response(default_reduced, ["pitch_link_load/delta_lon"], omega)
        ref2 = fidelity.frequency_response(default_lti, ["pitch_link_load/delta_lon"], omega)
        rep = fidelity.fidelity_cost(model, ref2)
        assert 0.0 < rep.average < 100.0  # acceptable-accuracy band


class TestCsvRoundTrip:
    def test_round_trip(self, tmp_path, default_reduced):
        omega = np.logspace(-1, 1, 7)
        fr = fidelity.frequency_response(
            default_reduced, ["pitch_link_load/delta_lon", "pitch_link_load.1c/delta_lon"], omega
        )
        path = tmp_path / "fr.csv"
        fidelity.export_frequency_response(fr, path)
        back = fidelity.import_frequency_response(path)
        assert back.pairs == fr.pairs
        np.testing.assert_allclose(back.response, fr.response, atol=1e-12)
        assert back.coherence is None

    def test_round_trip_with_coherence(self, tmp_path):
        omega = np.array([1.0, 2.0])
        fr = fr_from_values(omega, [1 + 1j, 2 - 0.5j], coherence=[0.9, 0.4])
        path = tmp_path / "fr.csv"
        fidelity.export_frequency_response(fr, path)
        back = fidelity.import_frequency_response(path)
        np.testing.assert_allclose(back.coherence, fr.coherence, atol=1e-15)
