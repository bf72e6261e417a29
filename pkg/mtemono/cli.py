import argparse
import json
import logging
import sys
from pathlib import Path
from typing import Dict, List, Optional, Tuple

from pydantic import ValidationError

from mtemono.core.errors import MteMonoError, ScenarioError, TaskError
from mtemono.core.harness.reporting import write_json
from mtemono.core.harness.scenario import run_scenario
from mtemono.core.harness.theorem_check import summary_table, theorem_check
from mtemono.core.population.builder import normalize
from mtemono.core.population.codec import load_population
from mtemono.models.population_model import Population
from mtemono.models.scenario_model import TaskName, TheoremCheckConfig

logger = logging.getLogger("mtemono")

EXIT_OK = 0
EXIT_INVALID = 2
EXIT_TASK_FAILED = 3

# parts whose condition needs no instrument pair, so a bare population is a witness
_WITNESS_PARTS = ("i", "ii", "iii")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="mtemono",
        description="Oracle, estimands and Monte Carlo checks for LIV/Wald "
        "estimands under weak monotonicity.",
    )
    parser.add_argument(
        "--log-level",
        default="INFO",
        choices=["DEBUG", "INFO", "WARNING", "ERROR"],
        help="Logging verbosity (default INFO).",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="Run every task of a scenario file.")
    run.add_argument("scenario", type=Path)

    mc = sub.add_parser("mc", help="Run only the Monte Carlo task of a scenario.")
    mc.add_argument("scenario", type=Path)

    check = sub.add_parser(
        "theorem-check", help="Forward and converse identification checks."
    )
    check.add_argument(
        "--modes",
        default="i,ii,iii,iv",
        help="Comma-separated parts among i, ii, iii, iv, prop2.",
    )
    check.add_argument("--trials", type=int, required=True)
    check.add_argument("--seed", type=int, required=True)
    check.add_argument("--out", type=Path, required=True, help="Output directory.")
    check.add_argument("--workers", type=int, default=1)
    check.add_argument(
        "--witness",
        action="append",
        default=[],
        metavar="PART=FILE",
        help="Population JSON to try first as a converse witness (parts i-iii).",
    )
    return parser


def _parse_witnesses(items: List[str]) -> Dict[str, Tuple[Population, None]]:
    witnesses = {}
    for item in items:
        part, sep, path = item.partition("=")
        if not sep or part not in _WITNESS_PARTS:
            raise ScenarioError(
                f"--witness expects PART=FILE with PART in {_WITNESS_PARTS}",
                field="witness",
            )
        if not Path(path).is_file():
            raise ScenarioError(f"witness file not found: {path}", field="witness")
        witnesses[part] = (normalize(load_population(path)), None)
    return witnesses


def _theorem_check(args: argparse.Namespace) -> None:
    try:
        config = TheoremCheckConfig(
            modes=[m.strip() for m in args.modes.split(",") if m.strip()],
            trials=args.trials,
            seed=args.seed,
            workers=args.workers,
        )
    except ValidationError as e:
        first = e.errors()[0]
        field = ".".join(str(part) for part in first["loc"]) or None
        raise ScenarioError(
            first["msg"].removeprefix("Value error, "), field=field
        ) from e
    witnesses = _parse_witnesses(args.witness)
    try:
        results = theorem_check(config, args.out, witnesses)
    except MteMonoError as e:
        raise TaskError("theorem-check", e) from e

    table = summary_table(results)
    args.out.mkdir(parents=True, exist_ok=True)
    table.to_csv(args.out / "theorem_check.csv", index=False)
    write_json(
        [r.model_dump(mode="json") for r in results], args.out / "theorem_check.json"
    )
    print(table.to_string(index=False))


def _report_error(error: dict) -> None:
    print(json.dumps({"error": error}), file=sys.stderr)


def main(argv: Optional[List[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(
        level=getattr(logging, args.log_level),
        format="%(asctime)s - %(name)s - %(levelname)s - %(message)s",
    )

    try:
        if args.command == "run":
            report = run_scenario(args.scenario)
            print(f"Tasks completed: {', '.join(report['tasks'])}")
        elif args.command == "mc":
            report = run_scenario(args.scenario, only=[TaskName.MONTECARLO])
            print(f"Monte Carlo completed for scenario '{report['scenario']}'")
        else:
            _theorem_check(args)
    except TaskError as e:
        logger.error(str(e))
        _report_error(e.to_dict())
        return EXIT_TASK_FAILED
    except ScenarioError as e:
        logger.error(str(e))
        _report_error(e.to_dict())
        return EXIT_INVALID
    except MteMonoError as e:
        logger.error(str(e))
        error = ScenarioError(str(e)).to_dict()
        error["type"] = type(e).__name__
        _report_error(error)
        return EXIT_INVALID
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
