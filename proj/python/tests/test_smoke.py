import math

import pytest

import smid


def test_variation_bound():
    tr = smid.ParameterTrajectory.sinusoid(-2.0, 0.5, 750.0)
    assert smid.variation_bound_of(tr) == pytest.approx(math.pi / 750.0, rel=1e-15)
    assert smid.ParameterTrajectory.constant(0.25).variation_bound == 0.0


def test_simulate_and_snr():
    trs = [smid.ParameterTrajectory.sinusoid(0.2, 0.4, 500.0),
           smid.ParameterTrajectory.constant(0.0),
           smid.ParameterTrajectory.sinusoid(-2.0, 0.5, 750.0)]
    d = smid.simulate(trs, 1, 1, 200, delta_eta=0.01, delta_zeta=0.02, seed=3)
    assert len(d) == 200
    assert max(abs(e) for e in d.eta) <= 0.01
    assert smid.snr_db(d.x, d.zeta) > 0.0
    assert smid.delta_for_snr([1.0] * 100, 10.0) == pytest.approx(math.sqrt(0.3))
    assert math.isinf(smid.snr_db([1.0, 2.0], [0.0, 0.0]))


def test_envelope_rows():
    rows = smid.envelope((-1.0, 1.0), (-1.0, 1.0))
    assert len(rows) == 4
    # Rows are w-isolated, so at x = y = 0 each bound on w is its rhs.
    lower = max(r[4] for r in rows if r[3] == ">=")
    upper = min(r[4] for r in rows if r[3] == "<=")
    assert (lower, upper) == (-1.0, 1.0)
    assert smid.m_term_bounds((0.1, 0.5), 0.1) == smid.envelope((0.1, 0.5), (-0.1, 0.1))


def test_solve_lp():
    sol = smid.solve_lp([1.0, 1.0], [([1.0, 1.0], ">=", 2.0)], [(0.0, 3.0), (0.0, 3.0)])
    assert sol["status"] == "optimal"
    assert sol["objective"] == pytest.approx(2.0)
    bad = smid.solve_lp([1.0], [([1.0], ">=", 2.0)], [(0.0, 1.0)])
    assert bad["status"] == "infeasible"


def test_measurement_update_and_oracle():
    args = dict(y_now=0.4, y_past=[0.8], u_lags=[0.3, -0.5],
                boxes=[(-0.6, 0.2), (0.0, 0.0), (-2.0, -0.4)], delta_eta=0.01, delta_zeta=0.01)
    relaxed = smid.measurement_update(**args)
    signed = smid.measurement_update(**args, method="rsm-s", signs=[-1, 1, -1])
    inner = smid.oracle_pui(**args, grid=21)
    for r, o in zip(relaxed, inner):
        assert r[0] <= o[0] + 1e-7 and o[1] <= r[1] + 1e-7
    assert len(signed) == 3
    with pytest.raises(smid.ConfigError):
        smid.measurement_update(**args, method="rsm-s")
    with pytest.raises(smid.EmptyFps):
        smid.measurement_update(**{**args, "y_now": 50.0})


def test_presets():
    assert "example1" in smid.preset_names()
    res = smid.identify("example1", seed=2)
    assert res["containment_rate"] == 1.0
    assert len(res["steps"]) == 1500
    assert smid.compare("example2-low") <= 1e-6
