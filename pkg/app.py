"""
FastAPI Web Service for the Potential Workbench
Exposes REST API endpoints for deriving relations, Gröbner bases, dimensions and canonical forms.
"""

import os
import json
import logging
from typing import Any, Dict, List, Optional

from fastapi import FastAPI, HTTPException
from fastapi.middleware.cors import CORSMiddleware
from pydantic import BaseModel, ConfigDict, Field

from classify import classify_potential
from errors import ResourceCapExceeded, WorkbenchError
from expr_parser import parse_field_label, parse_poly, parse_relations
from nc_core import MonomialOrder, OrderMode
from potential import DerivativeMode, Potential, relations_of
from quotient import dimension_of
from rewrite import complete, unresolved_ambiguities
from settings import WorkbenchSettings, get_settings

# Set up logging
logging.basicConfig(level=logging.INFO)
logger = logging.getLogger(__name__)

# Check if running in development mode (for error detail control)
DEVELOPMENT_MODE = os.getenv("DEVELOPMENT_MODE", "false").lower() == "true"

app = FastAPI(
    title="Potential Workbench API",
    description="Noncommutative Gröbner bases and dimensions of two-generator potential algebras",
    version="1.0.0",
)

# Origins come from ALLOWED_ORIGINS as a JSON array
allowed_origins_env = os.getenv("ALLOWED_ORIGINS")
if allowed_origins_env:
    try:
        allowed_origins = json.loads(allowed_origins_env)
        if not isinstance(allowed_origins, list):
            raise ValueError("ALLOWED_ORIGINS must be a JSON array")
    except ValueError as e:
        logger.warning(f"Invalid ALLOWED_ORIGINS environment variable: {e}. Falling back to ['*'].")
        allowed_origins = ["*"]
else:
    allowed_origins = ["*"]

app.add_middleware(
    CORSMiddleware,
    allow_origins=allowed_origins,
    allow_credentials=allowed_origins != ["*"],
    allow_methods=["GET", "POST"],
    allow_headers=["*"],
)


def get_workbench_settings() -> WorkbenchSettings:
    """Get the process-wide settings, loading config.json on first use."""
    return get_settings()


class PotentialRequest(BaseModel):
    potential: str = Field(..., min_length=1)
    mode: DerivativeMode = DerivativeMode.SIMPLE
    field: str = "QQ"
    cap: Optional[int] = Field(None, ge=1)

    model_config = ConfigDict(
        json_schema_extra={
            "example": {
                "potential": "x^3 + y^3 + cyc(x y x y)",
                "mode": "simple",
                "field": "QQ",
                "cap": 12,
            }
        }
    )


class GroebnerRequest(BaseModel):
    potential: Optional[str] = None
    relations: Optional[str] = None
    order: str = "xy"
    mode: OrderMode = OrderMode.LOCAL
    field: str = "QQ"
    cap: Optional[int] = Field(None, ge=1)

    model_config = ConfigDict(
        json_schema_extra={
            "example": {
                "relations": "x y + y x, x^2 + y^3",
                "order": "xy",
                "mode": "local",
                "cap": 10,
            }
        }
    )


class RelationsResponse(BaseModel):
    potential: str
    mode: str
    field: str
    relations: List[str]

    model_config = ConfigDict(
        json_schema_extra={
            "example": {
                "potential": "x^2 y + x y x + y x^2 + y^4",
                "mode": "simple",
                "field": "QQ",
                "relations": ["x y + y x", "x^2 + y^3"],
            }
        }
    )


class StatusResponse(BaseModel):
    status: str
    message: str
    default_cap: int


def _fail(e: WorkbenchError, action: str) -> HTTPException:
    status = 422 if isinstance(e, ResourceCapExceeded) else 400
    logger.error(f"Error while {action}: {e}")
    detail = f"{type(e).__name__}: {e}" if DEVELOPMENT_MODE or status == 400 else f"Resource limit reached while {action}"
    return HTTPException(status_code=status, detail=detail)


def _potential(request: PotentialRequest, settings: WorkbenchSettings) -> Potential:
    cap = request.cap or settings.default_cap
    return Potential(parse_poly(request.potential, parse_field_label(request.field), cap), request.mode)


@app.get("/health", response_model=StatusResponse)
async def health_check():
    """
    Health check endpoint for monitoring service status.
    """
    return {"status": "healthy", "message": "Service is running", "default_cap": get_workbench_settings().default_cap}


@app.post("/derive", response_model=RelationsResponse)
async def derive(request: PotentialRequest):
    """
    The two cyclic derivatives of a potential.
    """
    try:
        F = _potential(request, get_workbench_settings())
        rx, ry = relations_of(F)
    except WorkbenchError as e:
        raise _fail(e, "deriving relations")
    return {"potential": F.render(), "mode": F.derivative_mode.value, "field": F.field.label,
            "relations": [rx.render(), ry.render()]}


@app.post("/gb")
async def groebner(request: GroebnerRequest) -> Dict[str, Any]:
    """
    Truncated Gröbner basis of a potential's relations or of an explicit relation list.
    """
    settings = get_workbench_settings()
    if bool(request.potential) == bool(request.relations):
        raise HTTPException(status_code=400, detail="Give exactly one of potential or relations")
    try:
        field = parse_field_label(request.field)
        cap = request.cap or settings.default_cap
        if request.potential:
            rels = list(relations_of(Potential(parse_poly(request.potential, field, cap))))
        else:
            rels = parse_relations(request.relations or "", field, cap)
        G = complete(rels, MonomialOrder(request.order, request.mode), cap, settings=settings)
        record = G.to_record()
        record["unresolved"] = len(unresolved_ambiguities(G))
    except WorkbenchError as e:
        raise _fail(e, "completing")
    return record


@app.post("/dim")
async def dimension(request: PotentialRequest) -> Dict[str, Any]:
    """
    Hilbert function, total dimension and nilpotency index of the potential algebra.
    """
    settings = get_workbench_settings()
    try:
        F = _potential(request, settings)
        Q = dimension_of(relations_of(F), F.cap, settings=settings)
    except WorkbenchError as e:
        raise _fail(e, "counting dimensions")
    return {**Q.summary(), "potential": F.render(), "mode": F.derivative_mode.value}


@app.post("/canon")
async def canonical_form(request: PotentialRequest) -> Dict[str, Any]:
    """
    Cubic class, cleanup trail and canonical potential (rationals only).
    """
    settings = get_workbench_settings()
    try:
        F = _potential(request, settings)
        report = classify_potential(F, F.cap, settings=settings)
    except WorkbenchError as e:
        raise _fail(e, "classifying")
    return report.to_dict()


if __name__ == "__main__":
    import uvicorn

    # Get port from environment variable or default to 8000
    port = int(os.environ.get("PORT", 8000))

    uvicorn.run(
        "app:app",
        host="0.0.0.0",
        port=port,
        reload=False,
    )
