import csv
import math

import numpy as np
import pytest

from modeit import analytic
from modeit.experiments import (
    DELTA_GRID_ENVELOPE,
    DELTA_GRID_STRONG,
    DELTA_GRID_WEAK,
    ExperimentSpec,
    decay_figure_setup,
    reproduce_figure,
    sweep,
    window_width,
    write_csv,
)
from modeit.model import DecaySpec, Mode, ModulationSchedule, SystemParams


def read_csv(path):
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    return rows[0], np.array(rows[1:], dtype=float)


class TestSpec:
    def test_unknown_figure(self):
        with pytest.raises(ValueError, match="unknown figure"):
            ExperimentSpec("fig9")

    def test_override_coercion(self):
        spec = ExperimentSpec("fig5", overrides={"tau": 0.2, "delta": "0.1", "decay": "lindblad:0.5,0.5"})
        assert spec.overrides["tau"] == (0.2,)
        assert spec.overrides["delta"] == 0.1
        assert spec.overrides["decay"] == DecaySpec.lindblad(0.5, 0.5)

    @pytest.mark.parametrize("overrides", [{"gamma": 1}, {"delta": "abc"}, {"tau": []}, {"decay": "weird"}])
    def test_override_rejected(self, overrides):
        with pytest.raises(ValueError):
            ExperimentSpec("fig2", overrides=overrides)

    def test_grids(self):
        assert len(DELTA_GRID_WEAK) == 81 and DELTA_GRID_WEAK[40] == 0.0
        assert len(DELTA_GRID_STRONG) == 121 and DELTA_GRID_STRONG[0] == -3.0
        assert 0.0 in DELTA_GRID_ENVELOPE
        assert DELTA_GRID_ENVELOPE[1] - DELTA_GRID_ENVELOPE[0] == pytest.approx(0.0125)


class TestSweep:
    def test_single_point(self):
        res = sweep(ModulationSchedule(Mode.DOUBLE, 0.1), SystemParams(), "delta", [0.0], "envelope")
        assert res.values.shape == (1, 1)
        assert res.column("value")[0] == pytest.approx(3 * 0.1 / 32)

    def test_envelope_minimum_at_resonance(self):
        grid = np.linspace(-0.2, 0.2, 33)
        res = sweep(ModulationSchedule(Mode.DOUBLE, 0.1), SystemParams(), "delta", grid, "envelope")
        assert res.axis[np.argmin(res.column("value"))] == 0.0

    def test_double_center_rises_as_tau_falls(self):
        taus = [1.9, 1.5, 1.0, 0.5, 0.1]
        res = sweep(ModulationSchedule(Mode.DOUBLE), SystemParams(), "tau", taus, "osc_stats")
        center = res.column("center")
        assert np.all(np.diff(center) > 0) and center[-1] > 0.999

    def test_parallel_matches_serial(self):
        p = SystemParams(1.0, 1.0, 0.0, DecaySpec.projector(1.0))
        grid = np.linspace(-0.3, 0.3, 5)
        s = ModulationSchedule(Mode.DOUBLE, 0.5)
        a = sweep(s, p, "delta", grid, "plateau", probe=20.0)
        b = sweep(s, p, "delta", grid, "plateau", probe=20.0, jobs=3)
        np.testing.assert_array_equal(a.values, b.values)

    @pytest.mark.parametrize(
        "kwargs, match",
        [
            ({"grid": []}, "non-empty"),
            ({"grid": [0.1, 0.3, 0.2]}, "monotone"),
            ({"axis": "omega"}, "axis"),
            ({"observable": "area"}, "observable"),
            ({"observable": "plateau"}, "probe"),
        ],
    )
    def test_errors(self, kwargs, match):
        args = dict(schedule=ModulationSchedule(Mode.DOUBLE, 0.1), params=SystemParams(), axis="delta", grid=[0.0, 0.1], observable="envelope")
        args.update(kwargs)
        with pytest.raises(ValueError, match=match):
            sweep(**args)

    def test_envelope_rejects_single(self):
        with pytest.raises(ValueError, match="double"):
            sweep(ModulationSchedule(Mode.SINGLE, 0.1), SystemParams(), "delta", [0.0], "envelope")


class TestWindowWidth:
    def test_triangular_dip(self):
        d = np.linspace(-1, 1, 2001)
        assert window_width(d, 3 + 2 * np.abs(d)) == pytest.approx(1.0, abs=1e-9)


    def test_fig5_window_width_stable(self):
        params, rho0, schedules, d = decay_figure_setup("fig5")
        widths = []
        for sched in schedules[:4]:
            res = sweep(sched, params, "delta", DELTA_GRID_WEAK, "plateau", probe=d.t_probe, initial=rho0, jobs=4)
            widths.append(window_width(res.axis, res.column("value")))
        assert (max(widths) - min(widths)) / min(widths) < 0.25


class TestCsv:
    def test_format(self, tmp_path):
        p = write_csv(tmp_path / "x.csv", ["t", "value"], [[0.0, 0.1], [1 / 3, 2e-20]])
        assert p.read_bytes() == b"t,value\n0,0.333333333333\n0.1,2e-20\n"


class TestFigures:
    def test_fig2_schema_and_agreement(self, tmp_path):
        files = reproduce_figure(ExperimentSpec("fig2", tmp_path))
        assert [f.name for f in files] == ["fig2a.csv", "fig2b.csv", "fig2c.csv", "fig2d.csv", "fig2e.csv"]
        header, data = read_csv(tmp_path / "fig2d.csv")
        assert header == ["t", "F_numeric", "F_analytic"]
        assert data[-1, 0] == pytest.approx(60.0)
        assert np.max(np.abs(data[:, 1] - data[:, 2])) <= 1e-3
        header, data = read_csv(tmp_path / "fig2e.csv")
        assert header == ["tau", "t", "F_numeric", "F_analytic"]
        assert sorted(set(data[:, 0])) == [0.1, 0.5, 0.8, 1.6, 1.9]

    def test_deterministic(self, tmp_path):
        a = reproduce_figure(ExperimentSpec("fig4_te", tmp_path / "a", {"t_end": 30}))
        b = reproduce_figure(ExperimentSpec("fig4_te", tmp_path / "b", {"t_end": 30}))
        for x, y in zip(a, b):
            assert x.read_bytes() == y.read_bytes()

    def test_fig4_am_resonant_value(self, tmp_path):
        files = reproduce_figure(ExperimentSpec("fig4_am", tmp_path, {"tau": [0.01]}))
        assert [f.name for f in files] == ["fig4_am_tau0.01.csv"]
        header, data = read_csv(files[0])
        assert header == ["delta", "value"]
        assert data[data[:, 0] == 0.0, 1][0] == pytest.approx(9.375e-4, abs=1e-12)

    def test_fig3_small(self, tmp_path):
        files = reproduce_figure(ExperimentSpec("fig3", tmp_path, {"tau": [0.1, 0.5]}))
        header, amp = read_csv(files[0])
        assert header == ["tau", "single_numeric", "single_analytic", "double_numeric", "double_analytic"]
        np.testing.assert_allclose(amp[:, 1], amp[:, 2], atol=0.02)
        np.testing.assert_allclose(amp[:, 3], amp[:, 4], atol=0.02)

    def test_decay_figure_small_with_svg(self, tmp_path):
        spec = ExperimentSpec("fig7", tmp_path, {"tau": [0.5], "delta_grid": [-0.2, 0.0, 0.2], "t_end": 20, "t_probe": 16}, svg=True)
        files = reproduce_figure(spec)
        names = sorted(f.name for f in files)
        assert names == ["fig7a_standard.csv", "fig7a_tau0.5.csv", "fig7b_standard.csv", "fig7b_tau0.5.csv"]
        assert (tmp_path / "fig7a.svg").read_text().startswith("<svg")
        header, data = read_csv(tmp_path / "fig7a_tau0.5.csv")
        assert header == ["t", "absorption_numeric"]
        assert data[1, 0] == pytest.approx(0.05)  # ten samples per cycle

    def test_decay_setups(self):
        params, rho0, schedules, d = decay_figure_setup("fig6")
        assert params.omega_c == pytest.approx(math.sqrt(99)) and params.decay == DecaySpec.projector(5.0)
        np.testing.assert_allclose(np.diag(rho0).real, [0, 0.99, 0.01])
        assert [s.tau for s in schedules] == [0.8, 0.5, 0.2, 0.01, 0.1]
        assert schedules[-1].mode is Mode.STANDARD
        assert d.t_probe == 8.0
        params, _, _, d = decay_figure_setup("fig5")
        assert params.delta == -0.1 and d.t_probe == 80.0

    def test_unwritable(self, tmp_path):
        blocker = tmp_path / "file"
        blocker.write_text("x")
        with pytest.raises(OSError):
            reproduce_figure(ExperimentSpec("fig4_am", blocker / "sub"))
