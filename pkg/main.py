#!/usr/bin/env python3
"""
Command line entry point

    python main.py model --model '{"kind": "BowTie", "p": [0.5, 0.3], "r": [1.0, -1.0]}'
    python main.py verify --model bowtie.json
    python main.py propagate --model spin.json --horizon 200 --extrapolate --format csv --out outputs/spin
    python main.py report config/scenarios/lz2.json --out outputs/lz2
    python main.py batch config/scenarios --threads 4

Exit codes: 0 success, 2 invalid input, 3 numerical failure or tolerance
breach, 4 I/O failure.
"""

import argparse
import json
import logging
import sys
from pathlib import Path
from typing import List, Optional

from pydantic import ValidationError

from src.models.builders import build
from src.models.specs import ModelSpec
from src.pipeline.scenario import OutputFormat, Scenario, ScenarioReport, TaskKind
from src.pipeline.scenario_pipeline import run_batch, run_scenario
from src.propagator.config import PropagationConfig
from src.reporting.report_writer import emit_report, write_summary
from src.utils.error_handling import EXIT_IO, EXIT_OK, EXIT_VALIDATION, LZError, ToleranceBreach
from src.utils.settings import Settings

logger = logging.getLogger("main")

SINGLE_TASK = {
    "verify": TaskKind.VERIFY_COMMUTANT,
    "spectrum": TaskKind.SPECTRUM,
    "propagate": TaskKind.PROPAGATE,
    "compare": TaskKind.COMPARE_CLOSED_FORM,
}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="settings YAML (default config/defaults.yaml)")
    common.add_argument("--out", help="output path stem; stdout when omitted")
    common.add_argument("--format", choices=[f.value for f in OutputFormat], default=None)
    common.add_argument("--seed", type=int, help="seed for random u-samples")
    common.add_argument("--threads", type=int, help="worker threads")
    common.add_argument("--log-level", help="DEBUG, INFO, WARNING, ...")

    model = argparse.ArgumentParser(add_help=False)
    model.add_argument("--model", required=True, help="ModelSpec JSON, inline or a file path")
    model.add_argument("--horizon", type=float)
    model.add_argument("--rel-tol", type=float)
    model.add_argument("--abs-tol", type=float)

    parser = argparse.ArgumentParser(description="Multistate Landau-Zener integrability checks")
    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("model", parents=[common, model], help="build a model and print its pencil")
    sub.add_parser("verify", parents=[common, model], help="commuting family and triviality checks")
    sub.add_parser("spectrum", parents=[common, model], help="secular roots against eigvalsh")
    prop = sub.add_parser("propagate", parents=[common, model], help="numeric transition matrix")
    prop.add_argument("--extrapolate", action="store_true", help="extrapolate over horizons T/2, 3T/4, T")
    sub.add_parser("compare", parents=[common, model], help="closed form against propagation")
    report = sub.add_parser("report", parents=[common], help="run one scenario file")
    report.add_argument("scenario")
    batch = sub.add_parser("batch", parents=[common], help="run every scenario in a directory")
    batch.add_argument("directory")
    return parser


def load_model(value: str) -> ModelSpec:
    text = value if value.lstrip().startswith("{") else Path(value).read_text(encoding="utf-8")
    return ModelSpec.model_validate(json.loads(text))


def write_output(data: bytes, out: Optional[str]) -> None:
    if out:
        Path(out).parent.mkdir(parents=True, exist_ok=True)
        Path(out).write_bytes(data)
    else:
        sys.stdout.write(data.decode("utf-8"))


def emit(report: ScenarioReport, fmt: OutputFormat, out: Optional[str]) -> None:
    if out:
        emit_report(report, fmt, out)
        return
    for content in emit_report(report, fmt).values():
        sys.stdout.write(content.decode("utf-8"))


def require_passed(report: ScenarioReport) -> None:
    """Raise ToleranceBreach once the report has been written."""
    if not report.passed:
        raise ToleranceBreach(f"{report.scenario}: {'; '.join(report.breaches)}")


def single_task(args, settings: Settings) -> int:
    spec = load_model(args.model)
    if args.command == "model":
        payload = {"spec": spec.model_dump(mode="json"), "pencil": build(spec).to_dict()}
        write_output((json.dumps(payload, indent=2) + "\n").encode("utf-8"), args.out)
        return EXIT_OK

    cfg = PropagationConfig.from_settings(
        settings, horizon=args.horizon, rel_tol=args.rel_tol, abs_tol=args.abs_tol
    )
    horizons = None
    if getattr(args, "extrapolate", False):
        horizons = [cfg.horizon / 2, 3 * cfg.horizon / 4, cfg.horizon]
    scenario = Scenario(
        name=f"{args.command}_{spec.kind.value}",
        model=spec,
        tasks=[SINGLE_TASK[args.command]],
        propagation=cfg,
        seed=args.seed if args.seed is not None else settings.verification.seed,
        horizons=horizons,
    )
    report = run_scenario(scenario, settings, args.threads)
    emit(report, OutputFormat(args.format or "json"), args.out)
    require_passed(report)
    return EXIT_OK


def scenario_file(args, settings: Settings) -> int:
    scenario = Scenario.from_file(args.scenario)
    if args.seed is not None:
        scenario = scenario.model_copy(update={"seed": args.seed})
    report = run_scenario(scenario, settings, args.threads)
    fmt = OutputFormat(args.format) if args.format else scenario.output.format
    out = args.out or scenario.output.path
    emit(report, fmt, out)
    if out:
        write_summary([report], Path(out).parent / f"{Path(out).stem}_summary.md")
    require_passed(report)
    return EXIT_OK


def batch_directory(args, settings: Settings) -> int:
    reports, collector = run_batch(args.directory, settings, args.threads)
    out_dir = Path(args.out or settings.output_dir)
    fmt = OutputFormat(args.format or "json")
    for name, report in reports.items():
        emit_report(report, fmt, out_dir / name)
    summary = write_summary(reports.values(), out_dir / "summary.md", collector.get_summary())
    logger.info(f"summary written to {summary}")
    return collector.exit_code()


def main(argv: Optional[List[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        settings = Settings.load(args.config)
    except LZError as e:
        logging.basicConfig(level=logging.INFO)
        logger.error(str(e))
        return e.exit_code
    if args.threads is not None:
        settings = settings.model_copy(update={"threads": args.threads})

    logging.basicConfig(
        level=getattr(logging, (args.log_level or settings.log_level).upper(), logging.INFO),
        format="%(asctime)s - %(name)s - %(levelname)s - %(message)s",
    )

    try:
        if args.command == "report":
            return scenario_file(args, settings)
        if args.command == "batch":
            return batch_directory(args, settings)
        return single_task(args, settings)
    except LZError as e:
        logger.error(f"{type(e).__name__}: {e}")
        return e.exit_code
    except (ValidationError, json.JSONDecodeError) as e:
        logger.error(f"invalid input: {e}")
        return EXIT_VALIDATION
    except OSError as e:
        logger.error(f"I/O failure: {e}")
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
