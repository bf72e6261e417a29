import json
import logging
import traceback
from typing import Optional

from fastapi import APIRouter, File, HTTPException, Query, UploadFile

from mtemono.core.errors import MteMonoError
from mtemono.core.estimation.estimands import estimand_report
from mtemono.core.harness.reporting import comparison_rows
from mtemono.core.oracle.monotonicity import monotonicity_summary
from mtemono.core.oracle.parameters import true_params
from mtemono.core.population.builder import normalize, outcome_curve
from mtemono.core.population.codec import population_from_dict, population_id
from mtemono.models.population_model import Population

router = APIRouter()
logger = logging.getLogger(__name__)


@router.post("/analyze")
async def analyze_population(file: UploadFile = File(...)):
    logger.info(f"Received analysis request for file: {file.filename}")

    try:
        content = await file.read()
        pop = _parse_population(content)

        return {
            "population_id": population_id(pop),
            "monotonicity": [
                report.model_dump(mode="json") for report in monotonicity_summary(pop)
            ],
            "true_params": true_params(pop).model_dump(mode="json"),
        }

    except HTTPException as he:
        raise he
    except MteMonoError as e:
        logger.warning(f"Rejected population: {e}")
        raise HTTPException(status_code=400, detail={"message": str(e)})
    except Exception as e:
        error_trace = traceback.format_exc()
        logger.error(f"Error during analysis: {e}")
        logger.error(error_trace)
        raise HTTPException(
            status_code=500, detail={"message": str(e), "trace": error_trace}
        )


@router.post("/estimate")
async def estimate_population(
    file: UploadFile = File(...),
    degree: Optional[int] = Query(None, ge=1),  # ATE extrapolation degree
):
    logger.info(
        f"Received estimation request for file: {file.filename} (degree: {degree})"
    )

    try:
        content = await file.read()
        pop = _parse_population(content)
        report = estimand_report(outcome_curve(pop), degree)
        rows = comparison_rows(report, pop)

        return {
            "population_id": population_id(pop),
            "report": report.model_dump(mode="json"),
            "comparison": [row.model_dump(mode="json") for row in rows],
        }

    except HTTPException as he:
        raise he
    except MteMonoError as e:
        logger.warning(f"Rejected population: {e}")
        raise HTTPException(status_code=400, detail={"message": str(e)})
    except Exception as e:
        error_trace = traceback.format_exc()
        logger.error(f"Error during estimation: {e}")
        logger.error(error_trace)
        raise HTTPException(
            status_code=500, detail={"message": str(e), "trace": error_trace}
        )


def _parse_population(content: bytes) -> Population:
    logger.info(f"File size: {len(content)} bytes")

    try:
        doc = json.loads(content)
    except (json.JSONDecodeError, UnicodeDecodeError) as e:
        logger.warning(f"Upload is not valid JSON: {e}")
        raise HTTPException(status_code=400, detail="Upload is not a JSON document.")

    pop = normalize(population_from_dict(doc))
    logger.info(f"Parsed population with {len(pop.strata)} strata.")
    return pop
