import math

import numpy as np
import pytest

from magnomech.errors import ConfigError, NumericError
from magnomech.model import baseline_params
from magnomech.sweep import (
    CSV_HEADER,
    Axis,
    PointReport,
    SweepRow,
    SweepSpec,
    SweepTable,
    apply_setting,
    argmax_measure,
    evaluate_point,
    grid_sweep,
    refine_optimum,
    support,
    table_to_csv,
    temperature_scan,
    tripartite_scan,
    vanishing_temperature,
)


def test_baseline_point():
    rep = evaluate_point(baseline_params())
    assert rep.stable and rep.margin < 0
    assert rep.E_cm > 0.1
    assert rep.R_tau_min is None
    assert rep.lyapunov_residual <= 1e-10
    assert rep.measure("E_cm") == rep.E_cm


def test_tripartite_and_matrices():
    rep = evaluate_point(baseline_params(), tripartite=True, keep_matrices=True)
    assert rep.R_tau_min is not None and rep.R_tau_min >= 0
    assert set(rep.matrices) == {"A", "D", "C"}
    assert rep.matrices["C"].shape == (6, 6)


def test_unstable_point_has_no_measures():
    rep = evaluate_point(baseline_params(gain_G=1.4e7, theta=math.pi / 2))
    assert not rep.stable
    assert rep.E_cm is rep.E_cb is rep.E_mb is rep.lyapunov_residual is None


def test_unknown_measure():
    with pytest.raises(ValueError):
        evaluate_point(baseline_params()).measure("E_xx")


def test_decoupled_magnon_is_unentangled():
    rep = evaluate_point(baseline_params(G_mb=0.0))
    assert rep.E_cm == 0.0 and rep.E_cb == 0.0 and rep.E_mb == 0.0


def test_theta_irrelevant_without_gain():
    a = evaluate_point(baseline_params(theta=0.0), tripartite=True)
    b = evaluate_point(baseline_params(theta=2.4), tripartite=True)
    for name in ("E_cm", "E_cb", "E_mb", "R_tau_min"):
        assert b.measure(name) == pytest.approx(a.measure(name), abs=1e-12)


def test_apply_setting_normalized():
    p = apply_setting(baseline_params(), "delta_c_over_omega_b", -0.5)
    assert p.delta_c == -0.5 * p.omega_b
    p = apply_setting(p, "Gmb_over_gmc", 1.5)
    assert p.G_mb == 1.5 * p.g_mc
    assert apply_setting(p, "temperature", 0.2).temperature == 0.2
    with pytest.raises(ConfigError):
        apply_setting(p, "nonsense", 1.0)


def test_axis_parse():
    ax = Axis.parse("delta_c_over_omega_b:-2:0:5")
    assert ax.values.tolist() == [-2.0, -1.5, -1.0, -0.5, 0.0]
    for bad in ("delta_c_over_omega_b:-2:0", "bogus:0:1:3", "delta_c:0:1:1", "delta_c:a:1:3"):
        with pytest.raises(ConfigError):
            Axis.parse(bad)


def small_spec(**kw):
    return SweepSpec(baseline_params(), Axis("delta_c_over_omega_b", -1.2, -0.6, 3),
                     Axis("delta_m_over_omega_b", 0.6, 1.2, 4), **kw)


def test_grid_order():
    table = grid_sweep(small_spec())
    assert len(table) == 12
    xs = [r.x for r in table.rows]
    ys = [r.y for r in table.rows]
    assert xs == pytest.approx([-1.2] * 4 + [-0.9] * 4 + [-0.6] * 4)
    assert ys[:4] == pytest.approx([0.6, 0.8, 1.0, 1.2])
    assert table.grid("E_cm").shape == (3, 4)
    p = table.rows[5].report.params
    assert p.delta_c == pytest.approx(-0.9 * p.omega_b)
    assert p.delta_m_eff == pytest.approx(0.8 * p.omega_b)


def test_threads_do_not_change_results():
    serial = table_to_csv(grid_sweep(small_spec()))
    assert table_to_csv(grid_sweep(small_spec(), threads=4)) == serial
    assert table_to_csv(grid_sweep(small_spec(), threads=0)) == serial


def test_overrides_applied():
    table = grid_sweep(small_spec(overrides={"temperature": 0.0}))
    assert all(r.report.params.temperature == 0.0 for r in table.rows)


def test_csv_format():
    table = grid_sweep(SweepSpec(baseline_params(), Axis("delta_c_over_omega_b", -0.9, 0.5, 2)))
    lines = table_to_csv(table).splitlines()
    assert lines[0] == CSV_HEADER
    first = lines[1].split(",")
    assert first[0] == "-0.9" and first[1] == "" and first[2] == "true"
    assert first[7] == ""
    assert len(lines) == 3 and all(len(l.split(",")) == 9 for l in lines)


def test_argmax_single_and_ties():
    rep = evaluate_point(baseline_params())
    one = SweepTable("x", None, [SweepRow(0.0, None, rep)])
    assert argmax_measure(one, "E_cm") == (one.rows[0], rep.E_cm)
    tied = SweepTable("x", None, [SweepRow(0.0, None, rep), SweepRow(1.0, None, rep)])
    assert argmax_measure(tied, "E_cm")[0].x == 0.0


def test_argmax_all_unstable():
    rep = PointReport(baseline_params(), False, 1.0)
    table = SweepTable("x", None, [SweepRow(0.0, None, rep)])
    with pytest.raises(NumericError):
        argmax_measure(table, "E_cm")


def test_support_floor():
    reps = [PointReport(baseline_params(), True, -1.0, E_cm=v) for v in (0.0, 0.02, 0.2)]
    reps.append(PointReport(baseline_params(), False, 1.0))
    table = SweepTable("x", None, [SweepRow(float(i), None, r) for i, r in enumerate(reps)])
    assert support(table, "E_cm").tolist() == [1.0, 2.0]
    assert support(table, "E_cm", 0.1).tolist() == [2.0]


def test_temperature_scan_single_point():
    table = temperature_scan(baseline_params(), 0.05, 0.05, 1)
    assert len(table) == 1 and table.rows[0].x == 0.05
    with pytest.raises(ConfigError):
        temperature_scan(baseline_params(), -0.1, 0.1, 3)
    with pytest.raises(ConfigError):
        temperature_scan(baseline_params(), 0.0, 0.1, 0)


def test_temperature_monotone_decay():
    col = temperature_scan(baseline_params(), 0.0, 0.3, 7).column("E_cm")
    assert all(b <= a for a, b in zip(col, col[1:]))
    assert col[-1] < col[0]


def test_vanishing_temperature_is_a_crossing():
    p = baseline_params()
    T0 = vanishing_temperature(p)
    assert 0.01 < T0 < 1.0
    assert evaluate_point(p.with_(temperature=T0 * 0.98)).E_cm > 0
    assert evaluate_point(p.with_(temperature=T0 * 1.02)).E_cm == 0.0


def test_vanishing_temperature_without_entanglement():
    with pytest.raises(NumericError):
        vanishing_temperature(baseline_params(G_mb=0.0))


def test_refine_optimum_improves():
    p = baseline_params()
    start = evaluate_point(p).E_cm
    best, value = refine_optimum(p, xatol=1e-3)
    assert value >= start
    assert evaluate_point(best).E_cm == pytest.approx(value, rel=1e-12)


def test_tripartite_scan_axis():
    table = tripartite_scan(baseline_params(), Axis("delta_c_over_omega_b", -1.5, -0.5, 3))
    col = table.column("R_tau_min")
    assert len(col) == 3 and np.all(col[np.isfinite(col)] >= 0)
