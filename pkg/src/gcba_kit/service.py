"""HTTP service exposing the toolkit.

Stateless JSON-in/JSON-out endpoints: every request carries the space
description inline, mirroring the shared file vocabulary, and every
response is a plain report document.  Verdict failures are data;
only malformed input (400) and broken internal invariants (500) are
errors.
"""

from __future__ import annotations

import math
from typing import Optional

from fastapi import FastAPI, Request
from fastapi.responses import JSONResponse
from pydantic import BaseModel, Field

from . import analysis, geodesy, regularity, retraction
from .cones import ConeSpace, cone_distance
from .errors import InputError, InternalConsistencyError
from .regularity import Collection
from .retraction import FiberSpec
from .spaces import SphericalGraph, build_space, make_space, validate_space

app = FastAPI(title="gcba-kit", version="0.1.0",
              description="Geodesically complete CAT(0)/CAT(1) model-space toolkit")


@app.exception_handler(InputError)
async def _input_error(_req: Request, exc: InputError):
    return JSONResponse(status_code=400,
                        content={"error": str(exc), "kind": "input",
                                 "type": type(exc).__name__})


@app.exception_handler(InternalConsistencyError)
async def _internal_error(_req: Request, exc: InternalConsistencyError):
    return JSONResponse(status_code=500,
                        content={"error": str(exc), "kind": "internal",
                                 "type": type(exc).__name__})


def _graph(doc: dict) -> SphericalGraph:
    space = make_space(doc)
    if not isinstance(space, SphericalGraph):
        raise InputError("this operation needs a spherical graph")
    return space


def _cone(doc: dict) -> ConeSpace:
    space = make_space(doc)
    if not isinstance(space, ConeSpace):
        raise InputError("this operation needs a cone space")
    return space


def _fiber_spec(req: "FiberRequest") -> tuple[ConeSpace, FiberSpec]:
    K = _cone(req.space)
    spec = FiberSpec(K, K.parse_point(req.p), [K.parse_point(a) for a in req.a_list],
                     K.parse_point(req.b), req.eps, req.delta, req.rho, req.c)
    return K, spec


# ---------------------------------------------------------------------------
# request / response models


class SpaceRequest(BaseModel):
    space: dict


class ValidateRequest(SpaceRequest):
    quadruples: int = 10_000
    seed: int = 20_260_811


class ValidateResponse(BaseModel):
    passed: bool
    checks: list[dict]


class DistanceRequest(SpaceRequest):
    x: dict
    y: dict
    truncated: bool = True


class DistanceResponse(BaseModel):
    value: float
    x: dict
    y: dict


class AntipodesRequest(SpaceRequest):
    xi: dict


class AntipodesResponse(BaseModel):
    segments: list[dict]
    points: list[dict]


class AntipodalDistanceRequest(SpaceRequest):
    xi: dict
    eta: dict


class AntipodalDistanceResponse(BaseModel):
    value: float
    method_gap: float
    xi: dict
    eta: dict


class MarginResponse(BaseModel):
    eps: float
    delta: float
    k: int
    eps_margin: float
    delta_margin: Optional[float]
    verdict: bool
    pair_antipodal: list[float]
    eta_antipodal: list[float]
    method_gap_max: float
    aux: dict


class CheckRequest(SpaceRequest):
    """Collection mode on graphs (xis/eta) or map mode on cones
    (p/a_list/b, with rho switching to the comparison-angle form)."""

    xis: Optional[list[dict]] = None
    eta: Optional[dict] = None
    p: Optional[dict] = None
    a_list: Optional[list[dict]] = None
    b: Optional[dict] = None
    eps: float = 0.1
    delta: float = 0.05
    rho: Optional[float] = None
    resolution: float = 0.05
    verify_ball: bool = False


class SearchEtaRequest(SpaceRequest):
    xis: list[dict]


class SearchEtaResponse(BaseModel):
    eta: dict
    margin: float
    aux: dict


class FindVRequest(SpaceRequest):
    xis: list[dict]
    eta: dict
    eps: float = 0.1
    delta: float = 0.05


class FindVResponse(BaseModel):
    v: dict
    m1: float
    m2: float
    d_xi1: float
    d_eta: float
    d_equalities: list[float]
    eq_residual: float


class FiberRequest(SpaceRequest):
    p: dict
    a_list: list[dict]
    b: dict
    eps: float = 0.1
    delta: float = 0.2
    rho: float = 0.5
    c: float = 0.5


class RetractRequest(FiberRequest):
    x: dict
    r: Optional[float] = None


class RetractResponse(BaseModel):
    y: dict
    fiber_residual: float
    distance_from_p: float
    constants: dict
    classification: dict


class SampleFiberRequest(FiberRequest):
    r: float = 0.05
    n: int = 8


class SampleFiberResponse(BaseModel):
    points: list[dict]
    radii: list[float]
    max_radius: float
    witness_scale: float


class ContractRequest(FiberRequest):
    r: float = 0.05
    n_points: int = 8
    steps: int = 10


class ContractResponse(BaseModel):
    r: float
    max_residual: float
    max_reach: float
    points: int
    traces: list[dict]


class OpennessRequest(FiberRequest):
    r_list: list[float] = Field(default_factory=lambda: [0.1, 0.05])
    n_samples: int = 6
    n_targets: int = 32
    seed: int = 7
    verify_targets: int = 0
    injectivity_pairs: int = 0


class OpennessResponse(BaseModel):
    c_emp: float
    radii: list[float]
    n_samples: int
    n_targets: int
    per_radius: list[dict]
    verification: Optional[dict]
    injectivity: Optional[dict]


class FiberSphereRequest(FiberRequest):
    r_list: list[float] = Field(default_factory=lambda: [0.4, 0.2, 0.1])
    n: int = 12


class FiberSphereResponse(BaseModel):
    rows: list[dict]


class SweepRequest(BaseModel):
    k: int = 2
    theta_min: float = 0.0
    theta_max: float = 1.2
    step: float = 0.01


class SweepResponse(BaseModel):
    rows: list[dict]


class SphereMapRequest(SpaceRequest):
    xis: list[dict]
    eta: dict
    eps: float = 0.1
    delta: float = 0.05
    resolution: float = 1e-3


class SphereMapResponse(BaseModel):
    hypotheses_ok: bool
    hypothesis_report: dict
    winding: Optional[int]
    distortion: Optional[float]
    lipschitz: Optional[float]
    inverse_lipschitz: Optional[float]
    density_margin: Optional[float]
    density_slack: Optional[float]
    bijective: Optional[bool]
    resolution: float
    table: list[dict]


# ---------------------------------------------------------------------------
# endpoints


@app.get("/healthz")
def healthz() -> dict:
    return {"status": "ok"}


@app.post("/validate", response_model=ValidateResponse)
def validate(req: ValidateRequest):
    space = build_space(req.space)
    report = validate_space(space, quadruples=req.quadruples, seed=req.seed)
    return ValidateResponse(**report.to_json())


@app.post("/distance", response_model=DistanceResponse)
def distance(req: DistanceRequest):
    g = _graph(req.space)
    x, y = g.parse_point(req.x), g.parse_point(req.y)
    val = geodesy.distance(g, x, y, truncated=req.truncated)
    return DistanceResponse(value=val, x=g.external_locus(x), y=g.external_locus(y))


@app.post("/antipodes", response_model=AntipodesResponse)
def antipodes(req: AntipodesRequest):
    g = _graph(req.space)
    aset = geodesy.antipode_set(g, g.parse_point(req.xi))
    return AntipodesResponse(**aset.to_json())


@app.post("/antipodal-distance", response_model=AntipodalDistanceResponse)
def antipodal_distance(req: AntipodalDistanceRequest):
    g = _graph(req.space)
    xi, eta = g.parse_point(req.xi), g.parse_point(req.eta)
    value, gap = geodesy.antipodal_distance(g, xi, eta)
    return AntipodalDistanceResponse(value=value, method_gap=gap,
                                     xi=g.external_locus(xi), eta=g.external_locus(eta))


@app.post("/check-noncritical", response_model=MarginResponse)
def check_noncritical(req: CheckRequest):
    space = make_space(req.space)
    if isinstance(space, ConeSpace):
        if req.p is None or req.a_list is None or req.b is None:
            raise InputError("cone map check needs p, a_list, and b")
        p = space.parse_point(req.p)
        a_list = [space.parse_point(a) for a in req.a_list]
        b = space.parse_point(req.b)
        if req.rho is not None:
            rep = regularity.check_map_rho(space, p, a_list, b, req.eps, req.delta,
                                           req.rho, req.resolution, req.verify_ball)
        else:
            rep = regularity.check_map_at_point(space, p, a_list, b, req.eps, req.delta)
    else:
        if req.xis is None or req.eta is None:
            raise InputError("graph collection check needs xis and eta")
        coll = Collection(space, [space.parse_point(x) for x in req.xis],
                          space.parse_point(req.eta))
        rep = regularity.check_collection(space, coll, req.eps, req.delta)
    return MarginResponse(**rep.to_json())


@app.post("/search-eta", response_model=SearchEtaResponse)
def search_eta(req: SearchEtaRequest):
    g = _graph(req.space)
    xis = [g.parse_point(x) for x in req.xis]
    eta, margin, aux = regularity.search_regular_direction(g, xis)
    return SearchEtaResponse(eta=g.external_locus(eta), margin=margin, aux=aux)


@app.post("/find-v", response_model=FindVResponse)
def find_v(req: FindVRequest):
    g = _graph(req.space)
    coll = Collection(g, [g.parse_point(x) for x in req.xis], g.parse_point(req.eta))
    v, margins = regularity.find_v(g, coll, req.eps, req.delta)
    return FindVResponse(v=g.external_locus(v), **margins)


@app.post("/retract", response_model=RetractResponse)
def retract_endpoint(req: RetractRequest):
    K, spec = _fiber_spec(req)
    x = K.parse_point(req.x)
    y = retraction.retract(spec, x, r=req.r)
    cl = retraction.classify(spec, x)
    return RetractResponse(
        y=K.external_locus(y),
        fiber_residual=spec.fiber_residual(y),
        distance_from_p=cone_distance(K, spec.p, y),
        constants={"s": spec.s, "L": spec.L, "c": spec.c},
        classification=cl.to_json(),
    )


@app.post("/sample-fiber", response_model=SampleFiberResponse)
def sample_fiber_endpoint(req: SampleFiberRequest):
    K, spec = _fiber_spec(req)
    pts = retraction.sample_fiber(spec, req.r, req.n)
    radii = [cone_distance(K, spec.p, q) for q in pts]
    return SampleFiberResponse(points=[K.external_locus(q) for q in pts],
                               radii=radii, max_radius=max(radii),
                               witness_scale=req.r / (2.0 * spec.L))


@app.post("/contract", response_model=ContractResponse)
def contract_endpoint(req: ContractRequest):
    K, spec = _fiber_spec(req)
    result = retraction.contract_fiber_ball(spec, req.r, req.n_points, req.steps)
    return ContractResponse(**result.to_json())


@app.post("/openness", response_model=OpennessResponse)
def openness_endpoint(req: OpennessRequest):
    K = _cone(req.space)
    rep = analysis.openness_estimate(
        K, K.parse_point(req.p), [K.parse_point(a) for a in req.a_list],
        K.parse_point(req.b), req.eps, req.delta, req.r_list,
        n_samples=req.n_samples, n_targets=req.n_targets, seed=req.seed,
        verify_targets=req.verify_targets, injectivity_pairs=req.injectivity_pairs)
    return OpennessResponse(**rep.to_json())


@app.post("/fiber-sphere", response_model=FiberSphereResponse)
def fiber_sphere_endpoint(req: FiberSphereRequest):
    _K, spec = _fiber_spec(req)
    rows = analysis.fiber_sphere_check(spec, req.r_list, n=req.n)
    return FiberSphereResponse(rows=rows)


@app.post("/example14", response_model=SweepResponse)
def example14_endpoint(req: SweepRequest):
    if req.step <= 0:
        raise InputError("step must be positive")
    n = int(math.floor((req.theta_max - req.theta_min) / req.step + 1e-9)) + 1
    grid = [req.theta_min + i * req.step for i in range(n)]
    rows = analysis.example14_sweep(grid, req.k)
    return SweepResponse(rows=[r.to_json() for r in rows])


@app.post("/sphere-map", response_model=SphereMapResponse)
def sphere_map_endpoint(req: SphereMapRequest):
    g = _graph(req.space)
    xis = [g.parse_point(x) for x in req.xis]
    eta = g.parse_point(req.eta)
    res = analysis.sphere_map(g, xis, eta, req.eps, req.delta, req.resolution)
    return SphereMapResponse(**res.to_json())
