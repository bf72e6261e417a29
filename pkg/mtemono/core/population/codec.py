import hashlib
import json
import logging
from pathlib import Path
from typing import Any, Dict, Union

from pydantic import ValidationError

from mtemono.core.errors import PopulationError
from mtemono.core.population.builder import _first_error, build_population
from mtemono.models.population_model import (
    InstrumentGrid,
    Population,
    ResponseType,
    StratumSpec,
)

logger = logging.getLogger(__name__)

_STRATUM_KEYS = ("pattern", "mass", "mu0", "mu1")


def population_from_dict(doc: Dict[str, Any]) -> Population:
    """Build an un-normalized population from the documented JSON shape:
    {"grid": {"points", "weights"}, "strata": [{"pattern", "mass", "mu0",
    "mu1", "sd0", "sd1"}, ...]}."""
    if not isinstance(doc, dict):
        raise PopulationError("population document must be a JSON object")
    grid_doc = doc.get("grid")
    if not isinstance(grid_doc, dict):
        raise PopulationError("missing field 'grid'")
    strata_doc = doc.get("strata")
    if not isinstance(strata_doc, list):
        raise PopulationError("missing field 'strata'")

    try:
        grid = InstrumentGrid(
            points=grid_doc.get("points", ()), weights=grid_doc.get("weights", ())
        )
    except ValidationError as e:
        raise PopulationError(f"grid: {_first_error(e)}") from e

    strata = []
    for i, entry in enumerate(strata_doc):
        if not isinstance(entry, dict):
            raise PopulationError(f"strata[{i}] must be an object")
        missing = [key for key in _STRATUM_KEYS if key not in entry]
        if missing:
            raise PopulationError(f"strata[{i}] missing field '{missing[0]}'")
        try:
            strata.append(
                StratumSpec(
                    response=ResponseType(pattern=entry["pattern"]),
                    mass=entry["mass"],
                    mu0=entry["mu0"],
                    mu1=entry["mu1"],
                    noise_sd0=entry.get("sd0", 0.0),
                    noise_sd1=entry.get("sd1", 0.0),
                )
            )
        except ValidationError as e:
            raise PopulationError(f"strata[{i}]: {_first_error(e)}") from e
    return build_population(strata, grid)


def population_to_dict(pop: Population) -> Dict[str, Any]:
    return {
        "grid": {
            "points": list(pop.grid.points),
            "weights": list(pop.grid.weights),
        },
        "strata": [
            {
                "pattern": list(s.response.pattern),
                "mass": s.mass,
                "mu0": s.mu0,
                "mu1": s.mu1,
                "sd0": s.noise_sd0,
                "sd1": s.noise_sd1,
            }
            for s in pop.strata
        ],
    }


def load_population(path: Union[str, Path]) -> Population:
    path = Path(path)
    logger.info(f"Loading population from {path}")
    with open(path, "r", encoding="utf-8") as f:
        try:
            doc = json.load(f)
        except json.JSONDecodeError as e:
            raise PopulationError(
                f"{path.name}: invalid JSON at line {e.lineno}, column {e.colno}"
            ) from e
    return population_from_dict(doc)


def dump_population(pop: Population, path: Union[str, Path]) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8") as f:
        json.dump(population_to_dict(pop), f, indent=2)
        f.write("\n")
    return path


def population_id(pop: Population) -> str:
    """Short content hash identifying a population across files and samples."""
    canonical = json.dumps(population_to_dict(pop), sort_keys=True)
    return hashlib.sha256(canonical.encode("utf-8")).hexdigest()[:12]
