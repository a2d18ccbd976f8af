"""
Scenario Pipeline
Runs the tasks of a scenario in order and assembles a ScenarioReport
"""

import logging
import time
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path
from typing import Any, Dict, List, Optional, Tuple

import numpy as np

from src.closedform.probabilities import transition_table
from src.commutant.families import (
    CommutingFamily,
    bowtie_identity_residuals,
    bowtie_quadratic_family,
    embed_equal_slope,
    gbt_minimal_family,
    maximal_linear_family,
)
from src.commutant.verification import (
    commutator_norm,
    nontrivial_partner_count,
    sample_u,
    shared_symmetry_dim,
    triviality_residual,
)
from src.models.builders import build
from src.models.pencils import MatrixPencil
from src.models.specs import TRUNCATED_KINDS, ModelKind, ModelSpec
from src.pipeline.scenario import Scenario, ScenarioReport, TaskKind
from src.propagator.convergence import basis_position, cutoff_convergence, horizon_extrapolation
from src.propagator.integrator import TransitionMatrix, transition_matrix, transition_rows
from src.spectra.degeneracy import degeneracy_profile, level_crossing_scan, multiplicity_of
from src.spectra.secular import check_roots, secular_spec_for
from src.utils.error_handling import ErrorCollector, ParameterError, ToleranceBreach, with_task_context
from src.utils.progress import ProgressTracker
from src.utils.settings import Settings, load_settings
from src.validation.report_validator import ReportValidator

logger = logging.getLogger(__name__)

CROSSING_GRID_POINTS = 201
DEFAULT_PROBE_COUNT = 5


def default_compare_states(spec: ModelSpec) -> List[int]:
    """Lowest physical states of a truncated model: n = 0..4, or sites -2..2 on the chain."""
    if spec.kind == ModelKind.LINEAR_CHAIN:
        half = DEFAULT_PROBE_COUNT // 2
        return list(range(-half, half + 1))
    return list(range(DEFAULT_PROBE_COUNT))


def default_cutoffs(spec: ModelSpec) -> List[int]:
    base = min(-spec.n_min, spec.n_max) if spec.kind == ModelKind.LINEAR_CHAIN else spec.cutoff
    return [base // 2, (3 * base) // 4, base]


class ScenarioPipeline:
    """Executes the tasks of one scenario sequentially"""

    def __init__(self, scenario: Scenario, settings: Optional[Settings] = None, threads: Optional[int] = None):
        self.scenario = scenario
        self.settings = settings or load_settings()
        self.threads = threads or self.settings.threads
        self.spec = scenario.model
        self.cfg = scenario.propagation
        self.pencil = build(self.spec)
        self.u_samples = sample_u(
            self.settings.verification.u_samples,
            scenario.seed,
            self.settings.verification.u_min,
            self.settings.verification.u_max,
        )
        self._matrix: Optional[TransitionMatrix] = None
        self.breaches: List[str] = []

        self._steps = {
            TaskKind.VERIFY_COMMUTANT: self.verify_commutant,
            TaskKind.SPECTRUM: self.spectrum,
            TaskKind.PROPAGATE: self.propagate,
            TaskKind.COMPARE_CLOSED_FORM: self.compare_closed_form,
            TaskKind.CONVERGENCE_STUDY: self.convergence_study,
        }

    def run(self) -> ScenarioReport:
        s = self.scenario
        logger.info(f"Starting scenario '{s.name}' ({self.spec.kind.value}, N={self.spec.dim})")
        results: Dict[str, Dict[str, Any]] = {}
        tables: Dict[str, List[Dict[str, Any]]] = {}
        timings: Dict[str, float] = {}

        for step, task in enumerate(s.tasks, start=1):
            logger.info(f"Step {step}/{len(s.tasks)}: {task.value}")
            started = time.perf_counter()
            result, table = with_task_context(s.name, task.value)(self._steps[task])()
            timings[task.value] = time.perf_counter() - started
            results[task.value] = result
            tables[task.value] = table

        report = ScenarioReport(
            scenario=s.name,
            model=self.spec.model_dump(mode="json"),
            seed=s.seed,
            propagation=self.cfg.model_dump(mode="json"),
            results=results,
            tables=tables,
            breaches=list(self.breaches),
            timings=timings,
        )
        validation = ReportValidator(self.settings).validate(report)
        report.results["validation"] = validation.to_dict()
        report.breaches.extend(validation.errors)
        for warning in validation.warnings:
            logger.warning(f"{s.name}: {warning}")
        logger.info(f"Scenario '{s.name}' finished: {'passed' if report.passed else 'FAILED'}")
        return report

    def _breach(self, message: str) -> None:
        logger.warning(f"{self.scenario.name}: {message}")
        self.breaches.append(message)

    # ------------------------------------------------------------------
    # VerifyCommutant
    # ------------------------------------------------------------------

    def _family(self) -> Tuple[MatrixPencil, CommutingFamily, Dict[str, Any]]:
        """Model pencil in its real gauge, a commuting family containing it (up to u-scaling and shifts)."""
        spec = self.spec
        hamiltonian = build(spec.model_copy(update={"coupling_phases": None}))
        extra: Dict[str, Any] = {}
        if spec.kind == ModelKind.EQUAL_SLOPE:
            embedding = embed_equal_slope(spec.p, spec.a, spec.b)
            family = maximal_linear_family(embedding.params[0])
            # H(u) = H_1(b u) + x Id, so the rescaled members commute with H(u)
            family.members = [MatrixPencil((m.coeffs[0], spec.b * m.coeffs[1])) for m in family.members]
            extra["embedding"] = {
                "roots": list(embedding.roots),
                "reconstruction_error": embedding.reconstruction_error,
            }
        elif spec.kind == ModelKind.BOW_TIE:
            family = bowtie_quadratic_family(spec.p, spec.r)
            extra["identities"] = bowtie_identity_residuals(family, self.u_samples)
        else:
            family = gbt_minimal_family(spec.p, spec.r, spec.epsilon)
        return hamiltonian, family, extra

    def verify_commutant(self) -> Tuple[Dict[str, Any], List[Dict[str, Any]]]:
        hamiltonian, family, extra = self._family()
        vt = self.settings.verification
        u = self.u_samples

        pairwise = family.max_pairwise_commutator(u)
        partners = [(l, m) for l, m in zip(family.labels, family.members) if l != "H"]
        rows = []
        for label, member in partners:
            norm = commutator_norm(hamiltonian, member, u)
            report = triviality_residual(member, hamiltonian, tol=vt.triviality_tol)
            rows.append({
                "member": label,
                "degree": member.degree,
                "commutator_norm": norm,
                "triviality_residual": report.residual,
                "verdict": report.verdict.value,
            })
        worst = max([pairwise] + [r["commutator_norm"] for r in rows])
        if worst > vt.commutator_tol:
            self._breach(f"commutator norm {worst:.2e} exceeds {vt.commutator_tol:.0e}")

        degree = 2 if self.spec.kind == ModelKind.BOW_TIE else 1
        result = {
            "construction": family.construction.value,
            "members": family.labels,
            "max_pairwise_commutator": pairwise,
            "max_commutator_norm": worst,
            "partners": rows,
            "shared_symmetry_dim": shared_symmetry_dim([hamiltonian], vt.symmetry_rank_tol),
            "nontrivial_partner_degree": degree,
            "nontrivial_partner_count": nontrivial_partner_count(hamiltonian, degree),
            **extra,
        }
        logger.info(f"commutant: max commutator {worst:.2e}, {result['nontrivial_partner_count']} nontrivial partners")
        return result, rows

    # ------------------------------------------------------------------
    # Spectrum
    # ------------------------------------------------------------------

    def spectrum(self) -> Tuple[Dict[str, Any], List[Dict[str, Any]]]:
        secular = secular_spec_for(self.spec)
        tol = self.settings.verification.root_rel_tol
        rows = []
        worst = 0.0
        for u in sorted(float(x) for x in self.u_samples):
            check = check_roots(secular, self.pencil, u)
            scale = max(1.0, float(np.linalg.norm(self.pencil.at(u), 2)))
            worst = max(worst, check.max_residual / scale)
            row = {"u": u}
            row.update({f"root_{i + 1}": x for i, x in enumerate(check.roots)})
            row["max_residual"] = check.max_residual
            rows.append(row)
        if worst > tol:
            self._breach(f"secular roots deviate from eigvalsh by {worst:.2e} (relative)")

        result: Dict[str, Any] = {"secular_kind": secular.kind.value, "max_root_residual": worst, "roots": rows}
        if self.spec.kind != ModelKind.EQUAL_SLOPE:
            profile = degeneracy_profile(self.pencil, 0.0)
            result["degeneracy_at_zero"] = [{"eigenvalue": e, "multiplicity": m} for e, m in profile]
            result["zero_multiplicity"] = multiplicity_of(profile, 0.0)
        vt = self.settings.verification
        scan = level_crossing_scan(self.pencil, np.linspace(vt.u_min, vt.u_max, CROSSING_GRID_POINTS))
        result["min_gap"] = {"u": scan.u_min, "gap": scan.min_gap}
        return result, rows

    # ------------------------------------------------------------------
    # Propagate
    # ------------------------------------------------------------------

    def propagate(self) -> Tuple[Dict[str, Any], List[Dict[str, Any]]]:
        result: Dict[str, Any] = {}
        if self.scenario.horizons:
            study = horizon_extrapolation(self.pencil, self.cfg, self.scenario.horizons, self.threads)
            matrix = study.matrices[-1]
            result["extrapolation"] = {
                "horizons": study.horizons,
                "differences": study.differences,
                "tail_estimate": study.tail_estimate,
                "converged": study.converged,
                "P": study.extrapolated.tolist(),
            }
        else:
            matrix = transition_matrix(self.pencil, self.cfg, self.threads)
        self._matrix = matrix
        result.update(matrix.to_dict())
        return result, matrix_table(matrix)

    # ------------------------------------------------------------------
    # CompareClosedForm
    # ------------------------------------------------------------------

    def _compare_positions(self) -> List[int]:
        if self.spec.kind not in TRUNCATED_KINDS:
            return list(range(self.spec.dim))
        labels = self.scenario.compare_states or default_compare_states(self.spec)
        return [basis_position(self.spec, label) for label in labels]

    def compare_closed_form(self) -> Tuple[Dict[str, Any], List[Dict[str, Any]]]:
        positions = self._compare_positions()
        closed = transition_table(self.spec)
        if self._matrix is not None:
            numeric = self._matrix.P[positions]
        else:
            numeric = transition_rows(self.pencil, self.cfg, positions, self.threads)

        labels = self.pencil.state_labels
        rows = []
        for a, i in enumerate(positions):
            for j in positions:
                rows.append({
                    "from": labels[i],
                    "to": labels[j],
                    "closed_form": float(closed[i, j]),
                    "numeric": float(numeric[a, j]),
                    "residual": abs(float(closed[i, j]) - float(numeric[a, j])),
                })
        worst = max(r["residual"] for r in rows)
        ct = self.settings.comparison
        tol = ct.truncated_probability_tol if self.spec.kind in TRUNCATED_KINDS else ct.probability_tol
        if worst > tol:
            self._breach(f"closed form vs numeric residual {worst:.2e} exceeds {tol:.0e}")

        result: Dict[str, Any] = {"max_residual": worst, "tolerance": tol, "entries": rows}
        if self.spec.kind not in TRUNCATED_KINDS:
            result["closed_form_row_defect"] = float(np.max(np.abs(closed.sum(axis=1) - 1.0)))
            result["closed_form_col_defect"] = float(np.max(np.abs(closed.sum(axis=0) - 1.0)))
        logger.info(f"closed form comparison over {len(rows)} entries: max residual {worst:.2e}")
        return result, rows

    # ------------------------------------------------------------------
    # ConvergenceStudy
    # ------------------------------------------------------------------

    def convergence_study(self) -> Tuple[Dict[str, Any], List[Dict[str, Any]]]:
        if self.spec.kind in TRUNCATED_KINDS:
            cutoffs = self.scenario.cutoffs or default_cutoffs(self.spec)
            states = self.scenario.compare_states or default_compare_states(self.spec)
            probes = [(states[0], s) for s in states]
            table = cutoff_convergence(
                self.spec, cutoffs, probes, self.cfg, self.threads, self.settings.comparison.convergence_tol
            )
            rows = table.to_rows()
            result = {
                "study": "cutoff",
                "cutoffs": table.cutoffs,
                "converged": table.converged,
                "tolerance": table.tol,
                "limit": table.limit.tolist(),
                "entries": rows,
            }
            return result, rows

        horizon = self.cfg.horizon
        horizons = self.scenario.horizons or [horizon / 2, 3 * horizon / 4, horizon]
        study = horizon_extrapolation(self.pencil, self.cfg, horizons, self.threads)
        rows = [{"horizon": h, "max_change": None if i == 0 else study.differences[i - 1]} for i, h in enumerate(study.horizons)]
        result = {
            "study": "horizon",
            "horizons": study.horizons,
            "differences": study.differences,
            "tail_estimate": study.tail_estimate,
            "converged": study.converged,
            "extrapolated": study.extrapolated.tolist(),
        }
        return result, rows


def matrix_table(matrix: TransitionMatrix) -> List[Dict[str, Any]]:
    """CSV rows: one per initial state, then defect footer rows."""
    rows = []
    for label, row in zip(matrix.labels, matrix.P):
        rows.append({"from": label, **{to: float(v) for to, v in zip(matrix.labels, row)}})
    first = matrix.labels[0]
    rows.append({"from": "row_defect", first: matrix.row_defect})
    rows.append({"from": "col_defect", first: matrix.col_defect})
    if matrix.tail_estimate is not None:
        rows.append({"from": "tail_estimate", first: matrix.tail_estimate})
    return rows


def run_scenario(scenario: Scenario, settings: Optional[Settings] = None, threads: Optional[int] = None) -> ScenarioReport:
    return ScenarioPipeline(scenario, settings, threads).run()


def run_batch(
    directory: str,
    settings: Optional[Settings] = None,
    threads: Optional[int] = None,
) -> Tuple[Dict[str, ScenarioReport], ErrorCollector]:
    """Run every *.json scenario in ``directory`` concurrently.

    Failures are collected rather than raised; reports come back keyed by
    scenario name in file order.
    """
    settings = settings or load_settings()
    threads = threads or settings.threads
    files = sorted(Path(directory).glob("*.json"))
    if not files:
        raise ParameterError(f"no scenario files in {directory}")

    collector = ErrorCollector()
    tracker = ProgressTracker(f"batch {directory}", len(files))

    def run_one(path: Path) -> Optional[ScenarioReport]:
        try:
            report = run_scenario(Scenario.from_file(str(path)), settings, threads=1)
            if not report.passed:
                breach = ToleranceBreach("; ".join(report.breaches))
                collector.add_exception(breach, {"scenario": report.scenario})
            tracker.update()
            return report
        except Exception as e:
            collector.add_exception(e, {"scenario_file": str(path)})
            tracker.update(success=False)
            return None

    with ThreadPoolExecutor(max_workers=threads) as pool:
        outcomes = list(pool.map(run_one, files))
    tracker.finish()

    reports = {r.scenario: r for r in outcomes if r is not None}
    logger.info(f"batch finished: {len(reports)}/{len(files)} scenarios completed")
    return reports, collector
