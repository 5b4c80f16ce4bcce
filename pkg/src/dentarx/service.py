"""HTTP service exposing parse, recommend, what-if, graph lookup and health
endpoints over a loaded graph and trained classifier.

All handlers are pure functions of the request body plus startup-time
immutable state (graph, classifier, config), so identical requests always
yield byte-identical responses and no request mutates server state.
"""

from __future__ import annotations

import logging
import os
from contextlib import asynccontextmanager
from dataclasses import dataclass, replace

from fastapi import FastAPI, Request
from fastapi.exceptions import RequestValidationError
from fastapi.responses import JSONResponse
from pydantic import BaseModel, Field, model_validator

from .embedding import FusionGate
from .kg import KnowledgeGraph, load_graph
from .parsing import extract
from .recommend import RecommenderConfig, kg_template_generate, recommend
from .records import MAX_AGE_MONTHS, ClinicalRecord, PatientProfile
from .retrieval import build_context
from .safety import (
    DEFAULT_TAU,
    DEFAULT_WEIGHTS,
    SafetyClassifier,
    SafetyWeights,
    synthesize_training_set,
    train_safety_classifier,
    validate,
)

log = logging.getLogger("dentarx.service")

DEFAULT_MAX_BODY_BYTES = 1_048_576


@dataclass(frozen=True)
class ServiceConfig:
    kg_path: str
    classifier_path: str | None = None
    weights: tuple[float, float, float] = DEFAULT_WEIGHTS
    tau: float = DEFAULT_TAU
    k: int = 10
    m: int = 3
    alpha: float = 0.5
    host: str = "127.0.0.1"
    port: int = 8000
    max_body_bytes: int = DEFAULT_MAX_BODY_BYTES

    def __post_init__(self):
        self.safety_weights()  # range-check weights and tau
        FusionGate(self.alpha)  # range-check alpha
        if self.k < 1 or self.m < 1:
            raise ValueError("k and m must be >= 1")
        if self.max_body_bytes < 1:
            raise ValueError("max_body_bytes must be >= 1")

    def safety_weights(self) -> SafetyWeights:
        return SafetyWeights(*self.weights, tau=self.tau)

    def to_dict(self) -> dict:
        return {
            "kg_path": self.kg_path,
            "classifier_path": self.classifier_path,
            "weights": list(self.weights),
            "tau": self.tau,
            "k": self.k,
            "m": self.m,
            "alpha": self.alpha,
            "max_body_bytes": self.max_body_bytes,
        }

    @classmethod
    def from_env(cls, **overrides) -> "ServiceConfig":
        """Build a config from DENTARX_* environment variables; explicit
        keyword overrides win over the environment."""
        env = os.environ
        values: dict = {}
        if "DENTARX_KG" in env:
            values["kg_path"] = env["DENTARX_KG"]
        if "DENTARX_CLASSIFIER" in env:
            values["classifier_path"] = env["DENTARX_CLASSIFIER"]
        if "DENTARX_WEIGHTS" in env:
            parts = env["DENTARX_WEIGHTS"].split(",")
            values["weights"] = tuple(float(p) for p in parts)
        for key, name, cast in (
            ("tau", "DENTARX_TAU", float),
            ("k", "DENTARX_TOPK", int),
            ("m", "DENTARX_M", int),
            ("alpha", "DENTARX_ALPHA", float),
            ("host", "DENTARX_HOST", str),
            ("port", "DENTARX_PORT", int),
            ("max_body_bytes", "DENTARX_MAX_BODY_BYTES", int),
        ):
            if name in env:
                values[key] = cast(env[name])
        values.update(overrides)
        return cls(**values)


# -- request models ------------------------------------------------------------


class ProfileBody(BaseModel):
    age_months: int = Field(ge=0, le=MAX_AGE_MONTHS)
    weight_kg: float = Field(gt=1.0, lt=150.0)
    allergies: list[str] = []
    current_medications: list[str] = []
    comorbidities: list[str] = []

    def to_profile(self) -> PatientProfile:
        return PatientProfile(
            age_months=self.age_months,
            weight_kg=self.weight_kg,
            allergies=frozenset(self.allergies),
            current_medications=frozenset(self.current_medications),
            comorbidities=frozenset(self.comorbidities),
        )


class RecordBody(BaseModel):
    record_id: str = Field(min_length=1)
    chief_complaint: str = ""
    exam_notes: str = ""
    radiographic_report: str = ""
    profile: ProfileBody

    @model_validator(mode="after")
    def _some_text(self):
        if not (self.chief_complaint or self.exam_notes or self.radiographic_report):
            raise ValueError("at least one text section must be non-empty")
        return self

    def to_record(self) -> ClinicalRecord:
        return ClinicalRecord(
            record_id=self.record_id,
            chief_complaint=self.chief_complaint,
            exam_notes=self.exam_notes,
            radiographic_report=self.radiographic_report,
            profile=self.profile.to_profile(),
        )


class ProfileOverrides(BaseModel):
    age_months: int | None = Field(default=None, ge=0, le=MAX_AGE_MONTHS)
    weight_kg: float | None = Field(default=None, gt=1.0, lt=150.0)
    allergies: list[str] | None = None
    current_medications: list[str] | None = None
    comorbidities: list[str] | None = None


class WhatIfOverrides(BaseModel):
    profile: ProfileOverrides = ProfileOverrides()
    tau: float | None = Field(default=None, ge=0.0, le=1.0)
    weights: tuple[float, float, float] | None = None
    alpha: float | None = Field(default=None, ge=0.0, le=1.0)

    @model_validator(mode="after")
    def _weights_valid(self):
        if self.weights is not None:
            SafetyWeights(*self.weights)  # nonnegative, sum to 1
        return self


class WhatIfBody(BaseModel):
    record: RecordBody
    overrides: WhatIfOverrides = WhatIfOverrides()


# -- app state and handlers ------------------------------------------------------


class EngineState:
    """Immutable-after-startup bundle shared by all request handlers."""

    def __init__(self, config: ServiceConfig):
        self.config = config
        self.loaded = False
        self.graph: KnowledgeGraph | None = None
        self.classifier: SafetyClassifier | None = None

    def load(self) -> None:
        self.graph = load_graph(self.config.kg_path)
        if self.config.classifier_path:
            self.classifier = SafetyClassifier.load(self.config.classifier_path)
        else:
            examples = synthesize_training_set(self.graph, 2000, seed=7)
            self.classifier = train_safety_classifier(examples, self.graph, seed=7)
        self.loaded = True

    def recommender_config(self) -> RecommenderConfig:
        return RecommenderConfig(
            weights=self.config.safety_weights(),
            alpha=self.config.alpha,
            k=self.config.k,
            m=self.config.m,
        )


_SUBSCORE_FIELDS = ("s_dose", "s_allergy", "s_interaction", "s_safety")


def _run_arm(
    record: ClinicalRecord,
    state: EngineState,
    config: RecommenderConfig,
) -> tuple[dict, dict[str, dict]]:
    """One what-if arm: the full recommendation payload plus per-drug safety
    sub-scores for every candidate the generator can produce."""
    graph = state.graph
    findings = extract(record, graph)
    context = build_context(
        record, graph, FusionGate(config.alpha), k=config.k, m=config.m
    )
    outcome = recommend(
        record, graph, config, state.classifier, findings=findings, context=context
    )
    drug_scores: dict[str, dict] = {}
    if findings.top_diagnosis is not None:
        candidates = kg_template_generate(
            findings, record.profile, context, frozenset(), 10, graph, config
        )
        for candidate, _score in candidates:
            report = validate(candidate, record.profile, graph, config.weights, state.classifier)
            payload = report.to_dict()
            drug_scores[candidate.drug] = {f: payload[f] for f in _SUBSCORE_FIELDS}
            drug_scores[candidate.drug]["hard_violations"] = payload["hard_violations"]
    return outcome.to_dict(), drug_scores


def _apply_overrides(
    record: ClinicalRecord, base: RecommenderConfig, overrides: WhatIfOverrides
) -> tuple[ClinicalRecord, RecommenderConfig]:
    p = record.profile
    po = overrides.profile
    profile = PatientProfile(
        age_months=po.age_months if po.age_months is not None else p.age_months,
        weight_kg=po.weight_kg if po.weight_kg is not None else p.weight_kg,
        allergies=frozenset(po.allergies) if po.allergies is not None else p.allergies,
        current_medications=(
            frozenset(po.current_medications)
            if po.current_medications is not None
            else p.current_medications
        ),
        comorbidities=(
            frozenset(po.comorbidities) if po.comorbidities is not None else p.comorbidities
        ),
    )
    weights = base.weights
    if overrides.weights is not None or overrides.tau is not None:
        triple = overrides.weights or (weights.w_dose, weights.w_allergy, weights.w_interaction)
        weights = SafetyWeights(
            *triple, tau=overrides.tau if overrides.tau is not None else weights.tau
        )
    config = replace(
        base,
        weights=weights,
        alpha=overrides.alpha if overrides.alpha is not None else base.alpha,
    )
    return replace(record, profile=profile), config


def _subscore_deltas(baseline: dict[str, dict], modified: dict[str, dict]) -> list[dict]:
    deltas = []
    for drug in sorted(set(baseline) | set(modified)):
        b, m = baseline.get(drug), modified.get(drug)
        entry = {"drug": drug, "baseline": b, "modified": m}
        entry["delta"] = (
            {f: m[f] - b[f] for f in _SUBSCORE_FIELDS} if b and m else None
        )
        deltas.append(entry)
    return deltas


class BodySizeLimitMiddleware:
    """Reject request bodies larger than the configured limit with 413."""

    def __init__(self, app, max_bytes: int):
        self.app = app
        self.max_bytes = max_bytes

    async def __call__(self, scope, receive, send):
        if scope["type"] != "http":
            await self.app(scope, receive, send)
            return
        headers = dict(scope.get("headers") or ())
        length = headers.get(b"content-length")
        if length is not None and int(length) > self.max_bytes:
            await self._reject(send)
            return
        seen = 0

        async def limited_receive():
            nonlocal seen
            message = await receive()
            if message["type"] == "http.request":
                seen += len(message.get("body", b""))
                if seen > self.max_bytes:
                    raise _BodyTooLarge()
            return message

        try:
            await self.app(scope, limited_receive, send)
        except _BodyTooLarge:
            # request bodies are consumed before any response bytes are sent,
            # so it is safe to start the 413 response here
            await self._reject(send)

    @staticmethod
    async def _reject(send):
        body = b'{"code":"body_too_large"}'
        await send(
            {
                "type": "http.response.start",
                "status": 413,
                "headers": [
                    (b"content-type", b"application/json"),
                    (b"content-length", str(len(body)).encode()),
                ],
            }
        )
        await send({"type": "http.response.body", "body": body})


class _BodyTooLarge(Exception):
    pass


def create_app(config: ServiceConfig | None = None) -> FastAPI:
    config = config or ServiceConfig.from_env(
        kg_path=os.environ.get("DENTARX_KG", _default_kg_path())
    )
    state = EngineState(config)

    @asynccontextmanager
    async def lifespan(app: FastAPI):
        state.load()
        log.info("loaded graph %s: %d nodes, %d edges",
                 config.kg_path, len(state.graph.nodes), len(state.graph.edges))
        yield

    app = FastAPI(title="dentarx", version="0.1.0", lifespan=lifespan)
    app.state.engine = state
    app.add_middleware(BodySizeLimitMiddleware, max_bytes=config.max_body_bytes)

    @app.exception_handler(RequestValidationError)
    async def validation_handler(request: Request, exc: RequestValidationError):
        errors = [
            {
                "field": ".".join(str(p) for p in err["loc"] if p != "body"),
                "message": err["msg"],
            }
            for err in exc.errors()
        ]
        if any(err["type"] == "json_invalid" for err in exc.errors()):
            return JSONResponse(
                status_code=400, content={"code": "malformed_json", "errors": errors}
            )
        return JSONResponse(
            status_code=422, content={"code": "invalid_request", "errors": errors}
        )

    @app.middleware("http")
    async def request_log(request: Request, call_next):
        response = await call_next(request)
        log.info(
            '{"method": "%s", "path": "%s", "status": %d}',
            request.method, request.url.path, response.status_code,
        )
        return response

    def require_loaded() -> EngineState | JSONResponse:
        if not state.loaded:
            return JSONResponse(status_code=503, content={"code": "not_loaded"})
        return state

    @app.post("/v1/parse")
    async def parse(body: RecordBody):
        ready = require_loaded()
        if isinstance(ready, JSONResponse):
            return ready
        record = body.to_record()
        findings = extract(record, state.graph)
        config_ = state.recommender_config()
        context = build_context(
            record, state.graph, FusionGate(config_.alpha), k=config_.k, m=config_.m
        )
        return {
            "record_id": record.record_id,
            "findings": findings.to_dict(),
            "retrieval": context.to_dict(),
        }

    @app.post("/v1/recommend")
    async def recommend_endpoint(body: RecordBody):
        ready = require_loaded()
        if isinstance(ready, JSONResponse):
            return ready
        record = body.to_record()
        outcome = recommend(record, state.graph, state.recommender_config(), state.classifier)
        return {"record_id": record.record_id, **outcome.to_dict()}

    @app.post("/v1/whatif")
    async def whatif(body: WhatIfBody):
        ready = require_loaded()
        if isinstance(ready, JSONResponse):
            return ready
        record = body.record.to_record()
        base_config = state.recommender_config()
        baseline_outcome, baseline_scores = _run_arm(record, state, base_config)
        mod_record, mod_config = _apply_overrides(record, base_config, body.overrides)
        modified_outcome, modified_scores = _run_arm(mod_record, state, mod_config)
        return {
            "record_id": record.record_id,
            "baseline": baseline_outcome,
            "modified": modified_outcome,
            "deltas": _subscore_deltas(baseline_scores, modified_scores),
        }

    @app.get("/v1/kg/nodes/{node_id}")
    async def kg_node(node_id: str):
        ready = require_loaded()
        if isinstance(ready, JSONResponse):
            return ready
        node = state.graph.nodes.get(node_id)
        if node is None:
            return JSONResponse(status_code=404, content={"code": "unknown_node", "id": node_id})
        incident = sorted(
            (
                e
                for e in state.graph.edges
                if e.src == node_id or e.dst == node_id
            ),
            key=lambda e: (e.src, e.rel.value, e.dst),
        )
        return {
            "id": node.id,
            "kind": node.kind.value,
            "name": node.name,
            "synonyms": list(node.synonyms),
            "attrs": dict(node.attrs),
            "edges": [
                {"src": e.src, "rel": e.rel.value, "dst": e.dst, "attrs": dict(e.attrs)}
                for e in incident
            ],
        }

    @app.get("/v1/health")
    async def health():
        return {
            "status": "ok" if state.loaded else "loading",
            "version": "0.1.0",
            "config": config.to_dict(),
        }

    return app


def _default_kg_path() -> str:
    from .fixtures import fixture_path

    return str(fixture_path("kg_mini.jsonl"))
