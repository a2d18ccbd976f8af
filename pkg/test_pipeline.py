"""Tests for scenarios, the scenario pipeline, report validation and the CLI"""

import json
import math

import numpy as np
import pytest

from main import main
from src.models.specs import ModelKind, ModelSpec
from src.pipeline.scenario import OutputFormat, Scenario, ScenarioReport, TaskKind
from src.pipeline.scenario_pipeline import (
    default_compare_states,
    default_cutoffs,
    matrix_table,
    run_batch,
    run_scenario,
)
from src.propagator.integrator import TransitionMatrix
from src.reporting.report_writer import emit_report, report_json, table_csv, write_summary
from src.utils.error_handling import (
    EXIT_IO,
    EXIT_NUMERICAL,
    EXIT_OK,
    EXIT_VALIDATION,
    ParameterError,
    ReportIOError,
    ReportValidationError,
    ScenarioError,
    UnsupportedFormat,
)
from src.utils.settings import ROOT, Settings
from src.validation.report_validator import ReportValidator

BOWTIE = {"kind": "BowTie", "p": [0.4, 0.3, 0.5], "r": [1.0, -0.5, 2.0]}
EQUAL_SLOPE = {"kind": "EqualSlope", "p": [0.3, 0.4, 0.2], "a": [-1.0, 0.5, 1.5], "b": 1.0}


def _scenario(name="bowtie_n4", model=BOWTIE, tasks=("VerifyCommutant", "Spectrum"), **extra):
    return Scenario.model_validate({"name": name, "model": model, "tasks": list(tasks), "seed": 7, **extra})


def _write(path, data):
    path.write_text(json.dumps(data), encoding="utf-8")
    return path


# scenario documents

def test_scenario_defaults_and_partial_propagation():
    s = _scenario(propagation={"horizon": 50.0})
    assert s.schema_version == 1
    assert s.tasks == [TaskKind.VERIFY_COMMUTANT, TaskKind.SPECTRUM]
    assert s.propagation.horizon == 50.0
    assert s.propagation.method == "DOP853"
    assert s.output.format == OutputFormat.JSON


def test_scenario_validation():
    with pytest.raises(ScenarioError):
        _scenario(tasks=())
    with pytest.raises(ScenarioError):
        _scenario(schema_version=2)
    with pytest.raises(ScenarioError):
        _scenario(tasks=("CompareClosedForm",))
    with pytest.raises(ScenarioError):
        _scenario(model={"kind": "Oscillator", "g_o": 0.3, "cutoff": 20}, tasks=("Spectrum",))


def test_scenario_from_file(tmp_path):
    path = _write(tmp_path / "s.json", {"schema_version": 1, "name": "x", "model": BOWTIE, "tasks": ["Spectrum"]})
    assert Scenario.from_file(str(path)).name == "x"

    broken = tmp_path / "broken.json"
    broken.write_text("{not json", encoding="utf-8")
    with pytest.raises(ScenarioError):
        Scenario.from_file(str(broken))

    nameless = _write(tmp_path / "nameless.json", {"model": BOWTIE, "tasks": ["Spectrum"]})
    with pytest.raises(ScenarioError):
        Scenario.from_file(str(nameless))

    with pytest.raises(ReportIOError):
        Scenario.from_file(str(tmp_path / "missing.json"))


def test_bundled_scenarios_parse():
    files = sorted((ROOT / "config" / "scenarios").glob("*.json"))
    assert len(files) >= 8
    for path in files:
        scenario = Scenario.from_file(str(path))
        assert scenario.name == path.stem


def test_default_cutoff_pairs():
    chain = ModelSpec(kind=ModelKind.LINEAR_CHAIN, g_lc=0.3, n_min=-20, n_max=20)
    assert default_compare_states(chain) == [-2, -1, 0, 1, 2]
    assert default_cutoffs(chain) == [10, 15, 20]
    osc = ModelSpec(kind=ModelKind.OSCILLATOR, g_o=0.3, cutoff=40)
    assert default_compare_states(osc) == [0, 1, 2, 3, 4]
    assert default_cutoffs(osc) == [20, 30, 40]


# pipeline

def test_bowtie_scenario_passes():
    report = run_scenario(_scenario(), Settings(), threads=1)
    assert report.passed
    commutant = report.results["VerifyCommutant"]
    assert commutant["max_commutator_norm"] <= 1e-10
    assert set(commutant["identities"]) == {"sum_I", "sum_rI", "sum_I_over_r"}
    assert all(v <= 1e-10 for v in commutant["identities"].values())
    assert commutant["shared_symmetry_dim"] == 1

    spectrum = report.results["Spectrum"]
    assert spectrum["max_root_residual"] <= 1e-10
    assert spectrum["zero_multiplicity"] == 2
    assert len(report.tables["Spectrum"]) == Settings().verification.u_samples
    assert report.results["validation"]["is_valid"]


def test_equal_slope_embedding_recorded():
    report = run_scenario(_scenario("es", EQUAL_SLOPE), Settings(), threads=1)
    assert report.passed
    embedding = report.results["VerifyCommutant"]["embedding"]
    assert len(embedding["roots"]) == 4
    assert embedding["reconstruction_error"] <= 1e-9
    assert "zero_multiplicity" not in report.results["Spectrum"]


def test_report_json_is_deterministic():
    first = report_json(run_scenario(_scenario(), Settings(), threads=1))
    second = report_json(run_scenario(_scenario(), Settings(), threads=2))
    assert first == second
    data = json.loads(first)
    assert data["seed"] == 7
    assert "timings" not in data
    assert list(data["results"]) == sorted(data["results"])


def test_different_seed_changes_samples():
    a = run_scenario(_scenario(tasks=("Spectrum",)), Settings(), threads=1)
    b = run_scenario(_scenario(tasks=("Spectrum",), seed=8), Settings(), threads=1)
    assert a.tables["Spectrum"][0]["u"] != b.tables["Spectrum"][0]["u"]


def test_report_refuses_non_finite_values():
    with pytest.raises(ReportValidationError):
        ScenarioReport(scenario="x", model={}, seed=0, propagation={}, results={"Spectrum": {"gap": float("nan")}})
    with pytest.raises(ReportValidationError):
        ScenarioReport(scenario="x", model={}, seed=0, propagation={}, tables={"Propagate": [{"1": math.inf}]})


# report writing

def test_matrix_table_csv():
    tm = TransitionMatrix(np.array([[0.7, 0.3], [0.3, 0.7]]))
    lines = table_csv(matrix_table(tm)).decode("utf-8").splitlines()
    assert lines[0] == "from,1,2"
    assert lines[1] == "1,0.7,0.3"
    assert lines[2] == "2,0.3,0.7"
    assert lines[3].startswith("row_defect,")
    assert lines[4].startswith("col_defect,")
    assert len(lines) == 5


def test_emit_report_files(tmp_path):
    report = run_scenario(_scenario(), Settings(), threads=1)
    files = emit_report(report, "csv", tmp_path / "out" / "bt")
    assert sorted(files) == ["bt_Spectrum.csv", "bt_VerifyCommutant.csv"]
    assert (tmp_path / "out" / "bt_Spectrum.csv").exists()

    files = emit_report(report, OutputFormat.JSON, tmp_path / "out" / "bt")
    assert list(files) == ["bt.json"]
    assert json.loads((tmp_path / "out" / "bt.json").read_text())["scenario"] == "bowtie_n4"

    with pytest.raises(UnsupportedFormat):
        emit_report(report, "xml")


def test_summary_lists_scenarios(tmp_path):
    report = run_scenario(_scenario(), Settings(), threads=1)
    path = write_summary([report], tmp_path / "summary.md")
    text = path.read_text(encoding="utf-8")
    assert "bowtie_n4" in text
    assert "1 / 1" in text


# validation

def test_validator_flags_impossible_probabilities():
    results = {"Propagate": {"P": [[1.2, -0.2], [-0.2, 1.2]], "row_defect": 0.0, "col_defect": 0.0}}
    report = ScenarioReport(scenario="x", model={}, seed=0, propagation={}, results=results)
    outcome = ReportValidator(Settings()).validate(report)
    assert not outcome.is_valid
    assert not outcome.detailed_checks["check_probability_range"]


def test_validator_warns_on_unitarity_and_tail():
    results = {
        "Propagate": {"P": [[0.5, 0.5], [0.5, 0.5]], "row_defect": 1e-3, "col_defect": 0.0, "tail_estimate": 0.1},
    }
    report = ScenarioReport(scenario="x", model={}, seed=0, propagation={}, results=results)
    outcome = ReportValidator(Settings()).validate(report)
    assert outcome.is_valid
    assert len(outcome.warnings) == 2


def test_validator_checks_comparison_residuals():
    entry = {"from": "1", "to": "2", "closed_form": 0.4, "numeric": 0.5, "residual": 0.3}
    report = ScenarioReport(
        scenario="x", model={}, seed=0, propagation={}, results={"CompareClosedForm": {"entries": [entry]}}
    )
    outcome = ReportValidator(Settings()).validate(report)
    assert not outcome.detailed_checks["check_comparison_entries"]


# batch

def test_batch_collects_failures(tmp_path):
    _write(tmp_path / "a.json", {"name": "a", "model": BOWTIE, "tasks": ["VerifyCommutant"]})
    _write(tmp_path / "b.json", {"name": "b", "model": EQUAL_SLOPE, "tasks": ["Spectrum"]})
    _write(tmp_path / "c.json", {"name": "c", "model": BOWTIE, "tasks": []})
    reports, collector = run_batch(str(tmp_path), Settings(), threads=2)
    assert sorted(reports) == ["a", "b"]
    assert collector.exit_code() == EXIT_VALIDATION
    assert collector.get_summary()["errors_by_type"] == {"ScenarioError": 1}


def test_batch_records_tolerance_breaches(tmp_path):
    _write(tmp_path / "a.json", {"name": "a", "model": BOWTIE, "tasks": ["Spectrum"]})
    strict = Settings(verification={"root_rel_tol": 1e-300})
    reports, collector = run_batch(str(tmp_path), strict, threads=1)
    assert not reports["a"].passed
    assert collector.get_summary()["errors_by_type"] == {"ToleranceBreach": 1}
    assert collector.exit_code() == EXIT_NUMERICAL


def test_validator_warns_on_unconverged_propagation():
    results = {
        "Propagate": {"P": [[0.5, 0.5], [0.5, 0.5]], "row_defect": 0.0, "col_defect": 0.0, "converged": False},
        "ConvergenceStudy": {"study": "horizon", "horizons": [50.0, 100.0, 200.0], "converged": False},
    }
    report = ScenarioReport(scenario="x", model={}, seed=0, propagation={}, results=results)
    outcome = ReportValidator(Settings()).validate(report)
    assert outcome.is_valid
    assert not outcome.detailed_checks["check_convergence"]
    assert len(outcome.warnings) == 2


def test_batch_needs_files(tmp_path):
    with pytest.raises(ParameterError):
        run_batch(str(tmp_path), Settings())


# command line

def test_cli_model(capsys):
    assert main(["model", "--model", json.dumps(BOWTIE)]) == EXIT_OK
    out = json.loads(capsys.readouterr().out)
    assert out["spec"]["kind"] == "BowTie"
    assert len(out["pencil"]["labels"]) == 4


def test_cli_spectrum_csv(tmp_path):
    out = tmp_path / "spec"
    assert main(["spectrum", "--model", json.dumps(BOWTIE), "--format", "csv", "--out", str(out)]) == EXIT_OK
    assert (tmp_path / "spec_Spectrum.csv").exists()


def test_cli_invalid_input(tmp_path):
    oscillator = json.dumps({"kind": "Oscillator", "g_o": 0.3, "cutoff": 20})
    assert main(["verify", "--model", oscillator]) == EXIT_VALIDATION
    assert main(["verify", "--model", "{not json"]) == EXIT_VALIDATION
    assert main(["verify", "--model", json.dumps({"kind": "BowTie", "p": [0.0], "r": [1.0]})]) == EXIT_VALIDATION
    assert main(["report", str(tmp_path / "missing.json")]) == EXIT_IO


def test_cli_tolerance_breach(tmp_path):
    config = tmp_path / "strict.yaml"
    config.write_text("verification:\n  root_rel_tol: 1.0e-300\n", encoding="utf-8")
    code = main(["spectrum", "--model", json.dumps(BOWTIE), "--config", str(config), "--out", str(tmp_path / "s")])
    assert code == EXIT_NUMERICAL
    data = json.loads((tmp_path / "s.json").read_text())
    assert data["breaches"]


def test_cli_batch(tmp_path):
    scenarios = tmp_path / "scenarios"
    scenarios.mkdir()
    _write(scenarios / "a.json", {"name": "a", "model": BOWTIE, "tasks": ["Spectrum"]})
    _write(scenarios / "b.json", {"name": "b", "model": {"kind": "BowTie", "p": [0.3]}, "tasks": ["Spectrum"]})
    out = tmp_path / "out"
    assert main(["batch", str(scenarios), "--out", str(out), "--threads", "2"]) == EXIT_VALIDATION
    assert (out / "a.json").exists()
    summary = (out / "summary.md").read_text(encoding="utf-8")
    assert "Failed scenarios" in summary


@pytest.mark.slow
def test_two_level_scenario_matches_closed_form():
    scenario = Scenario.from_file(str(ROOT / "config" / "scenarios" / "lz2.json"))
    report = run_scenario(scenario, Settings(), threads=2)
    assert report.passed
    assert report.results["CompareClosedForm"]["max_residual"] <= 1e-3
    assert report.results["Propagate"]["row_defect"] <= 1e-6
