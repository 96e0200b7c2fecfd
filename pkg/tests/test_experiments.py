import xml.etree.ElementTree as ET

import numpy as np
import pytest

from lossy_cavity import experiments as ex
from lossy_cavity.linalg import ContractError
from lossy_cavity.model import InitialState, SystemParams


@pytest.fixture(scope="module")
def fig1_k0():
    return ex.run(ex.scenarios_by_name()["fig1_kappa0"])


@pytest.fixture(scope="module")
def fig4_identical():
    return ex.run(ex.scenarios_by_name()["fig4_identical"])


def test_scenario_catalogue():
    names = ex.scenarios_by_name()
    assert len(names) >= 24
    for k in ("0", "0.02", "0.2", "2", "20"):
        for prefix in ("fig1", "fig2", "fig3_identical", "fig3_unidentical"):
            assert f"{prefix}_kappa{k}" in names
    for k in ("0", "0.2", "2", "20"):
        assert f"fig5_kappa{k}" in names and f"fig6_kappa{k}" in names
    assert {"fig4_identical", "fig4_unidentical"} <= set(names)


def test_scenario_settings():
    s = ex.scenarios_by_name()
    assert s["fig1_kappa2"].params == SystemParams(1, 1, 5, -5, 2)
    assert s["fig2_kappa2"].params == SystemParams(1, 1, 5, 5, 2)
    assert s["fig3_identical_kappa0.2"].initial is InitialState.EG1
    assert s["fig5_kappa20"].initial is InitialState.BELL_PLUS1
    assert s["fig5_kappa20"].t_max == 30
    assert s["fig1_kappa0"].columns == ("C", "B", "D", "I", "J")


def test_select_groups():
    assert len(ex.select("fig1")) == 5
    assert len(ex.select("fig3")) == 10
    assert [s.name for s in ex.select("fig4_identical")] == ["fig4_identical"]
    with pytest.raises(ContractError):
        ex.select("fig9")


def test_scenario_rejects_bad_outputs():
    with pytest.raises(ContractError):
        ex.Scenario("x", InitialState.EE0, SystemParams(), outputs=frozenset())
    with pytest.raises(ContractError):
        ex.Scenario("x", InitialState.EE0, SystemParams(), outputs=frozenset({"Q"}))


def test_fig1_without_decay(fig1_k0):
    sm = fig1_k0.summary
    assert 0.15 <= sm["D"]["max"] <= 0.21
    assert sm["C"]["max"] <= 1e-5
    assert sm["B"]["max"] <= 2 + 1e-9


def test_fig3_identical_strong_decay_settles():
    r = ex.run(ex.scenarios_by_name()["fig3_identical_kappa20"])
    assert 0.49 <= r.summary["C"]["final"] <= 0.51
    assert 0.40 <= r.summary["D"]["final"] <= 0.42


def test_fig5_bell_without_decay():
    r = ex.run(ex.scenarios_by_name()["fig5_kappa0"])
    assert 0.58 <= r.summary["C"]["min"] <= 0.68
    assert 2.1 <= r.summary["B"]["min"] <= 2.3
    assert 0.53 <= r.summary["D"]["min"] <= 0.63


def test_fig4_columns(fig4_identical):
    assert set(fig4_identical.channels) == {
        *ex.POPULATION_COLUMNS, *ex.COHERENCE_COLUMNS, "purity", "C", "D"
    }
    assert fig4_identical.summary["rho88"]["final"] == pytest.approx(0.5, abs=1e-3)
    assert fig4_identical.summary["abs_rho35"]["final"] == pytest.approx(0.25, abs=1e-3)


def test_csv_shape_and_round_trip(fig1_k0, tmp_path):
    path = ex.emit(fig1_k0, "csv", tmp_path / "out" / "fig1.csv")
    lines = path.read_text().splitlines()
    assert lines[0] == "t,C,B,D,I,J"
    assert len(lines) == 1 + 5001
    assert all(len(line.split(",")) == 6 for line in lines)
    back = ex.read_csv(path)
    np.testing.assert_array_equal(back["t"], fig1_k0.times)
    for name, v in fig1_k0.channels.items():
        np.testing.assert_array_equal(back[name], v)
    # the summary is recoverable exactly from the file
    recomputed = ex.summarize(back["t"], {k: v for k, v in back.items() if k != "t"})
    assert recomputed == fig1_k0.summary


def test_runs_are_deterministic(tmp_path):
    s = ex.scenarios_by_name()["fig6_kappa2"]
    a = ex.emit(ex.run(s), "csv", tmp_path / "a.csv").read_bytes()
    b = ex.emit(ex.run(s), "csv", tmp_path / "b.csv").read_bytes()
    assert a == b


def test_every_requested_channel_present_and_finite(fig4_identical):
    for name in fig4_identical.scenario.columns:
        v = fig4_identical.channels[name]
        assert len(v) == len(fig4_identical.times)
        assert np.all(np.isfinite(v))


def test_fmt():
    assert ex.fmt(-0.0) == "0"
    assert ex.fmt(1 / 3) == "0.333333333"
    assert ex.fmt(2.5e-12) == "2.5e-12"


def test_emit_errors(fig1_k0, tmp_path):
    with pytest.raises(ContractError, match="unknown output format"):
        ex.emit(fig1_k0, "png", tmp_path / "x.png")
    with pytest.raises(ContractError, match="channel 'Q'"):
        ex.emit(fig1_k0, "csv", tmp_path / "x.csv", channels=["Q"])
    blocker = tmp_path / "file"
    blocker.write_text("")
    with pytest.raises(OSError, match="cannot write csv"):
        ex.emit(fig1_k0, "csv", blocker / "x.csv")


def test_svg_is_self_contained(fig1_k0, tmp_path):
    path = ex.emit(fig1_k0, "svg", tmp_path / "fig1.svg", channels=["C", "D"])
    text = path.read_text()
    root = ET.fromstring(text)
    ns = "{http://www.w3.org/2000/svg}"
    assert root.tag == f"{ns}svg"
    panels = [g for g in root.iter(f"{ns}g") if g.get("id", "").startswith("panel-")]
    assert [g.get("id") for g in panels] == ["panel-C", "panel-D"]
    assert "href" not in text
    labels = [t.text for t in root.iter(f"{ns}text")]
    assert "gt" in labels and "discord D" in labels


def test_failed_integration_names_scenario():
    s = ex.Scenario("unstable", InitialState.EG1, SystemParams.identical(5, 20), 10.0, 0.5)
    with pytest.raises(ex.ScenarioError, match="scenario unstable"):
        ex.run(s, dt=0.5)
