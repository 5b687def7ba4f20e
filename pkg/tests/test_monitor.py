"""Monitored-evolution series: first-visit probabilities and their sums."""

import numpy as np
import pytest

import qhit
from qhit.errors import SpectralObstructionError

RNG = np.random.default_rng(11)


def test_step_prob_hadamard_first_step(hadamard):
    # |<e1|U e2>|^2 = 1/2
    p1 = qhit.step_prob(hadamard["S"], hadamard["V"], hadamard["rho_phi"], 1)
    assert abs(p1 - 0.5) < 1e-12


def test_step_prob_matches_first_series_term(sec5):
    # before any monitoring has occurred the two notions coincide at r = 1
    ser = qhit.first_visit_series(sec5["S"], sec5["V"], sec5["rho_phi"])
    p1 = qhit.step_prob(sec5["S"], sec5["V"], sec5["rho_phi"], 1)
    assert ser.terms[0][0] == 1
    assert abs(ser.terms[0][1] - p1) < 1e-12


def test_step_prob_identity_channel_state_in_V(sec5):
    S_id = qhit.identity_superop(2)
    psi = sec5["psi"]
    for r in (1, 3, 7):
        assert abs(qhit.step_prob(S_id, sec5["V"], np.outer(psi, psi), r) - 1.0) < 1e-12


def test_series_tau_six(sec5):
    ser = qhit.first_visit_series(sec5["S"], sec5["V"], sec5["rho_phi"])
    assert ser.converged
    assert abs(ser.cumulative_prob - 1.0) < 1e-9
    assert abs(ser.tau - 6.0) < 1e-8


def test_series_tau_hadamard(hadamard):
    ser = qhit.first_visit_series(hadamard["S"], hadamard["V"], hadamard["rho_phi"])
    assert abs(ser.tau - 2.0) < 1e-10


def test_series_infinite_when_hitting_prob_below_one(hadamard):
    alpha = 0.5 * np.sqrt(2 + np.sqrt(2))
    beta = np.sqrt(1 - alpha**2)
    Vbad = qhit.GoalSubspace.from_vectors([[alpha, beta]])
    rho = qhit.pure_density([beta, -alpha])
    ser = qhit.first_visit_series(hadamard["S"], Vbad, rho)
    assert ser.cumulative_prob < 1 - 1e-6
    assert ser.tau == np.inf


def test_series_respects_max_steps(sec5):
    cfg = qhit.SeriesConfig(max_steps=10)
    ser = qhit.first_visit_series(sec5["S"], sec5["V"], sec5["rho_phi"], config=cfg)
    assert ser.truncated_at <= 10
    assert not ser.converged


def test_site_visit_series_matches_channel_series(sec5):
    # monitoring site 0 of the induced chain reproduces subspace monitoring
    q = sec5["q"]
    V = sec5["V"]
    rho = sec5["rho_phi"]
    state = qhit.VecState.from_blocks([np.zeros((2, 2)), V.Q @ rho @ V.Q])
    ser_q = qhit.site_visit_series(q, 0, state)
    ser_c = qhit.first_visit_series(sec5["S"], V, rho)
    assert abs(ser_q.tau - ser_c.tau) < 1e-8


def test_generating_function_at_one_matches_resolvent(sec5):
    G1 = qhit.generating_function(sec5["S"], sec5["V"], 1.0)
    QQ = sec5["V"].QQ
    expected = sec5["S"].mat @ np.linalg.inv(np.eye(4) - QQ @ sec5["S"].mat)
    assert np.allclose(G1.mat, expected)


def test_generating_function_at_zero_is_zero(sec5):
    G0 = qhit.generating_function(sec5["S"], sec5["V"], 0.0)
    assert np.max(np.abs(G0.mat)) == 0.0


def test_generating_function_obstruction(hadamard):
    alpha = 0.5 * np.sqrt(2 + np.sqrt(2))
    Vbad = qhit.GoalSubspace.from_vectors([[alpha, np.sqrt(1 - alpha**2)]])
    with pytest.raises(SpectralObstructionError):
        qhit.generating_function(hadamard["S"], Vbad, 1.0)
