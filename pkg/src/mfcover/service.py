"""HTTP service around the library.  Every endpoint is a thin wrapper over `handle`,
which the command-line client also calls in-process."""

from typing import Dict, List, Literal, Optional, Tuple

from fastapi import FastAPI
from fastapi.responses import JSONResponse
from pydantic import BaseModel, Field as PField

from . import __version__, approx, homalg, semigroup
from .catalog import load_catalog
from .mf import (BranchedCoverSpec, MatrixFactorization, branched_cover, format_mf, parse_mf, strip_with_rank,
                 tensor_hat, validate)
from .repro import run_repro, sigma_ideals
from .series import Field, Ring, TruncatedSeries, make_rng

SCHEMA = "v1"
EXIT = {"pass": 0, "fail": 1, "inconclusive": 2, "error": 3}


class UsageError(ValueError):
    pass


class SessionConfig(BaseModel):
    field: str = "fp:32003"
    prec: Optional[int] = None
    seed: int = 0
    cache: bool = True
    catalog_path: Optional[str] = None

    def make_field(self):
        try:
            return Field.parse(self.field)
        except ValueError as exc:
            raise UsageError(str(exc)) from None


class MFInput(BaseModel):
    mf: str = PField(description="matrix factorization in the line-oriented text format")


class VerifyRequest(MFInput):
    pass


class TensorRequest(BaseModel):
    left: str
    right: str


class CoverRequest(MFInput):
    n: int = 2
    var: str = "y"


class DecomposeRequest(MFInput):
    catalog: Optional[str] = None


class ApproxRequest(MFInput):
    k: int = 1
    side: Literal["right", "left"] = "right"
    catalog: Optional[str] = None


class SigmaRequest(MFInput):
    catalog: Optional[str] = None


class QuiverRequest(BaseModel):
    ring: Optional[Tuple[int, int]] = None
    ideals: Optional[Dict[str, List[int]]] = None
    catalog: Optional[str] = None
    ring_vertex: bool = True


class ResolveRequest(BaseModel):
    catalog: str = "E6"
    vertex: str
    steps: int = 5


class BoundsRequest(BaseModel):
    exponents: List[int]
    cover_exponents: Optional[List[int]] = None
    sweep: int = 0


class ReproRequest(BaseModel):
    label: Literal["e6", "e8", "E6", "E8"]


class Envelope(BaseModel):
    config: SessionConfig = SessionConfig()
    params: dict = {}


REQUESTS = {"verify": VerifyRequest, "tensor": TensorRequest, "cover": CoverRequest, "decompose": DecomposeRequest,
            "approx": ApproxRequest, "sigma": SigmaRequest, "quiver": QuiverRequest, "resolve": ResolveRequest,
            "bounds": BoundsRequest, "repro": ReproRequest}


# ---------------------------------------------------------------- helpers

def _read_mf(text, cfg):
    field = cfg.make_field()
    if cfg.prec is not None:
        lines = [f"prec {cfg.prec}" if ln.strip().startswith("prec ") else ln for ln in text.splitlines()]
        text = "\n".join(lines) + "\n"
    try:
        X = parse_mf(text, field)
    except (ValueError, KeyError) as exc:
        raise UsageError(f"cannot parse factorization: {exc}") from None
    return X


def _catalog(name, cfg, X=None):
    field = cfg.make_field()
    if name:
        try:
            return load_catalog(name, field, cfg.catalog_path)
        except KeyError as exc:
            raise UsageError(f"unknown catalog {name!r}") from exc
    if X is None:
        return None
    for label in ("E6", "E8"):
        cat = load_catalog(label, field)
        if str(cat.potential) == str(X.potential) and cat.potential.ring.names == X.ring.names:
            return cat
    if X.ring.nvars == 1:
        terms = list(X.potential.terms.items())
        if len(terms) == 1:
            (mono, _), = terms
            return load_catalog(f"A:{mono[0]}", field)
    return None


def _mf_out(X):
    return {"size": X.size, "text": format_mf(X)}


# ---------------------------------------------------------------- command handlers

def cmd_verify(req, cfg):
    X = _read_mf(req.mf, cfg)
    rep = validate(X)
    return ("pass" if rep.valid else "fail"), rep.as_dict()


def cmd_tensor(req, cfg):
    X, Y = _read_mf(req.left, cfg), _read_mf(req.right, cfg)
    if set(X.ring.names) & set(Y.ring.names):
        raise UsageError("the two factorizations must use disjoint variables")
    T = tensor_hat(X, Y)
    ok = validate(T).valid
    return ("pass" if ok else "fail"), {"mf": _mf_out(T), "valid": ok, "reduced": T.reduced}


def cmd_cover(req, cfg):
    X = _read_mf(req.mf, cfg)
    try:
        X.field.check_unit(req.n)
        spec = BranchedCoverSpec(X.potential, req.n, req.var)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    if not X.reduced:
        raise UsageError("branched cover needs a reduced factorization")
    C = branched_cover(X, spec)
    cat = _catalog(None, cfg, C)
    match = cat.match(C) if cat else None
    return "pass", {"mf": _mf_out(C), "potential": str(C.potential), "match": match}


def cmd_decompose(req, cfg):
    X = _read_mf(req.mf, cfg)
    cat = _catalog(req.catalog, cfg, X)
    D = homalg.decompose(X, cat, make_rng(cfg.seed))
    X0, _, _ = strip_with_rank(X)
    back = D.recompose(X.potential)
    B0, _, _ = strip_with_rank(back)
    ok = X0.size == B0.size and (X0.size == 0 or homalg.is_isomorphic(X0, B0, make_rng(cfg.seed)).isomorphic)
    return ("pass" if ok else "fail"), {"decomposition": D.as_dict(), "free_rank": D.free_rank,
                                        "catalog": cat.label if cat else None, "recomposes": ok}


def cmd_approx(req, cfg):
    X = _read_mf(req.mf, cfg)
    cat = _catalog(req.catalog, cfg, X)
    var = cat.cover["var"] if cat and cat.cover else "y"
    fn = approx.right_approximation if req.side == "right" else approx.left_approximation
    try:
        W = fn(X, req.k, cat, var)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    return "pass", W.as_dict()


def cmd_sigma(req, cfg):
    X = _read_mf(req.mf, cfg)
    cat = _catalog(req.catalog, cfg, X)
    var = cat.cover["var"] if cat and cat.cover else "y"
    rep = approx.sigma_report(X, cat, var)
    return "pass", rep.as_dict()


def _ideals_from(req, cfg):
    if req.catalog:
        cat = _catalog(req.catalog, cfg)
        if not cat.semigroup:
            raise UsageError(f"catalog {cat.label} has no semigroup model")
        ideals = sigma_ideals(cat)
        if not req.ring_vertex:
            ideals.pop(semigroup.R_SHARP)
        return ideals
    if not req.ring or not req.ideals:
        raise UsageError("give --ring a,b and --ideals, or --catalog")
    try:
        S = semigroup.SemigroupRing(*req.ring)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    ideals = {k: semigroup.FractionalIdeal(S, v) for k, v in req.ideals.items()}
    if req.ring_vertex and semigroup.R_SHARP not in ideals:
        ideals[semigroup.R_SHARP] = semigroup.FractionalIdeal(S, [0])
    return ideals


def cmd_quiver(req, cfg):
    try:
        Q = semigroup.irreducible_arrows(_ideals_from(req, cfg))
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    out = Q.as_dict()
    out["text"] = Q.to_text()
    out["dot"] = Q.to_dot()
    return "pass", out


def cmd_resolve(req, cfg):
    cat = _catalog(req.catalog, cfg)
    if req.steps < 2:
        raise UsageError("--steps must be at least 2")
    ideals = sigma_ideals(cat)
    if req.vertex not in ideals:
        raise UsageError(f"unknown vertex {req.vertex!r}; choose from {sorted(ideals)}")
    tr = semigroup.simple_resolution(ideals, req.vertex, req.steps, cat, var=cat.cover["var"])
    ok = tr.terminates or (tr.period in (1, 2) and tr.onset is not None and tr.onset <= 2)
    out = tr.as_dict()
    out["text"] = tr.text()
    return ("pass" if ok else "fail"), out


def cmd_bounds(req, cfg):
    try:
        rec = approx.bph_bounds(req.exponents, req.cover_exponents)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    out = rec.as_dict()
    ok = rec.cover_sum <= rec.bfk
    if req.sweep:
        sweep = approx.random_exponent_sweep(req.sweep, cfg.seed)
        out["sweep"] = {"count": len(sweep), "violations": [r.as_dict() for r in sweep if r.cover_sum > r.bfk]}
        ok = ok and not out["sweep"]["violations"]
    return ("pass" if ok else "fail"), out


def cmd_repro(req, cfg):
    rep = run_repro(req.label.upper(), cfg.make_field())
    return ("pass" if rep.passed else "fail"), rep.as_dict()


HANDLERS = {"verify": cmd_verify, "tensor": cmd_tensor, "cover": cmd_cover, "decompose": cmd_decompose,
            "approx": cmd_approx, "sigma": cmd_sigma, "quiver": cmd_quiver, "resolve": cmd_resolve,
            "bounds": cmd_bounds, "repro": cmd_repro}


def handle(command, params, config=None):
    """Run one command; always returns a JSON-ready report with a `status`."""
    cfg = config if isinstance(config, SessionConfig) else SessionConfig(**(config or {}))
    report = {"schema": SCHEMA, "command": command, "config": cfg.model_dump()}
    try:
        if command not in HANDLERS:
            raise UsageError(f"unknown command {command!r}")
        req = REQUESTS[command](**params)
        report["params"] = {k: v for k, v in req.model_dump().items() if k not in ("mf", "left", "right")}
        homalg.set_cache(cfg.cache)
        status, result = HANDLERS[command](req, cfg)
        report["status"] = status
        report["result"] = result
    except homalg.Inconclusive as exc:
        report["status"] = "inconclusive"
        report["error"] = {"type": "inconclusive", "message": str(exc)}
    except (UsageError, ValueError, TypeError, KeyError) as exc:
        report["status"] = "error"
        report["error"] = {"type": type(exc).__name__, "message": str(exc)}
    return report


# ---------------------------------------------------------------- FastAPI app

app = FastAPI(title="mfcover", version=__version__)


@app.get("/v1/health")
def health():
    return {"status": "ok", "version": __version__, "schema": SCHEMA}


@app.post("/v1/{command}")
def run_command(command: str, body: Envelope):
    report = handle(command, body.params, body.config)
    code = 200
    if report["status"] == "error":
        code = 404 if command not in HANDLERS else 422
    return JSONResponse(report, status_code=code)
