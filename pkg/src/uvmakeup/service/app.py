"""HTTP facade over the transfer pipeline.

Routes:
    GET  /api/health                      readiness and model inventory
    GET  /api/styles                      list stored styles
    POST /api/styles                      upload + precompute a style
    GET  /api/styles/{id}/{artifact}      stored style artifact (PNG)
    POST /api/transfer                    run a transfer, store artifacts
    GET  /api/result/{id}                 artifact listing for a request
    GET  /api/result/{id}/{artifact}      stored request artifact

All error bodies are {"category", "message", "detail"}. Models and
geometry are immutable after startup; every transfer is stateless, so
concurrent requests never interact.
"""

import base64
import io
import json
import os
import uuid
from pathlib import Path

import numpy as np
from fastapi import FastAPI, File, Form, Request, UploadFile
from fastapi.exceptions import RequestValidationError as HTTPValidationError
from fastapi.responses import FileResponse, JSONResponse
from PIL import Image, UnidentifiedImageError

from .. import __version__
from ..errors import (
    GeometryError,
    ModelMissingError,
    UVMakeupError,
)
from ..errors import RequestValidationError as BadRequestError
from ..fusion import TransferRequest
from ..pipeline.models import load_models
from ..pipeline.transfer import dump_intermediates, transfer
from ..uvgeom.io import file_sha256
from .library import ARTIFACTS, StyleLibrary

DEFAULT_MAX_UPLOAD = 8_000_000  # bytes, per uploaded file

_TRUE = {"true", "1", "yes", "on"}
_FALSE = {"false", "0", "no", "off"}


def _error(status, category, message, detail=None):
    return JSONResponse(
        status_code=status,
        content={"category": category, "message": message, "detail": detail or {}},
    )


def _status_for(exc: UVMakeupError):
    if isinstance(exc, ModelMissingError):
        return 503
    if isinstance(exc, GeometryError):
        return 422
    return 400


def _parse_bool(raw, field):
    low = str(raw).strip().lower()
    if low in _TRUE:
        return True
    if low in _FALSE:
        return False
    raise BadRequestError(
        "%s must be a boolean, got %r" % (field, raw), detail={"field": field}
    )


def _parse_float(raw, field):
    try:
        return float(raw)
    except (TypeError, ValueError):
        raise BadRequestError(
            "%s must be a number, got %r" % (field, raw), detail={"field": field}
        )


def _decode_upload(data, field, max_bytes):
    if len(data) > max_bytes:
        raise BadRequestError(
            "%s exceeds the %d byte upload limit" % (field, max_bytes),
            detail={"field": field, "size": len(data), "limit": max_bytes},
        )
    try:
        with Image.open(io.BytesIO(data)) as im:
            arr = np.asarray(im.convert("RGB"), dtype=np.uint8)
    except UnidentifiedImageError:
        raise BadRequestError(
            "%s is not a decodable image" % field, detail={"field": field}
        )
    return arr.astype(np.float32) / 255.0


def create_app(
    models_dir=None,
    styles_dir=None,
    results_dir=None,
    bundle=None,
    provider=None,
    max_upload=None,
):
    """Build the service app.

    Directory arguments fall back to UVMAKEUP_MODELS / UVMAKEUP_STYLES /
    UVMAKEUP_RESULTS / UVMAKEUP_MAX_UPLOAD environment overrides, then to
    ./models and ./styles. A prebuilt ModelBundle skips disk loading.
    """
    if bundle is None:
        bundle = load_models(
            models_dir or os.environ.get("UVMAKEUP_MODELS", "models"),
            provider=provider,
        )
    styles_dir = Path(styles_dir or os.environ.get("UVMAKEUP_STYLES", "styles"))
    results_dir = Path(
        results_dir or os.environ.get("UVMAKEUP_RESULTS", styles_dir / ".results")
    )
    results_dir.mkdir(parents=True, exist_ok=True)
    if max_upload is None:
        max_upload = int(os.environ.get("UVMAKEUP_MAX_UPLOAD", DEFAULT_MAX_UPLOAD))

    library = StyleLibrary(styles_dir)
    app = FastAPI(title="uvmakeup", version=__version__)
    app.state.bundle = bundle
    app.state.library = library
    app.state.results_dir = results_dir

    @app.exception_handler(UVMakeupError)
    async def _uvmakeup_error(request: Request, exc: UVMakeupError):
        return _error(_status_for(exc), exc.category, exc.message, exc.detail)

    @app.exception_handler(HTTPValidationError)
    async def _framework_error(request: Request, exc: HTTPValidationError):
        return _error(400, "request", "invalid request payload", {"errors": exc.errors()})

    @app.get("/api/health")
    def health():
        loaded = bundle.loaded()
        return {
            "ready": "color" in loaded and "pattern" in loaded,
            "models": {b: (b in loaded) for b in ("color", "pattern")},
            "geometry": type(bundle.provider).__name__,
            "styles": len(library.ids()),
            "version": __version__,
        }

    @app.get("/api/styles")
    def list_styles():
        return {"styles": library.entries()}

    @app.post("/api/styles", status_code=201)
    async def add_style(image: UploadFile = File(...), name: str = Form(None)):
        arr = _decode_upload(await image.read(), "image", max_upload)
        return library.add(arr, bundle, name=name)

    @app.get("/api/styles/{style_id}/{artifact}")
    def style_artifact(style_id: str, artifact: str):
        if not library.has(style_id):
            return _error(404, "style", "unknown style id %r" % style_id)
        try:
            path = library.artifact_path(style_id, artifact)
        except KeyError:
            return _error(404, "style", "unknown artifact %r" % artifact)
        return FileResponse(path)

    def _resolve_reference(which, style_id, upload_bytes):
        """One side of the transfer: either a stored style or a raw upload.

        Returns (image, position, mask) where position and mask are only
        set for styles; raw uploads run geometry and segmentation live.
        """
        if style_id is not None and upload_bytes is not None:
            raise BadRequestError(
                "give either %s_style_id or a %s image, not both" % (which, which),
                detail={"field": which},
            )
        if style_id is not None:
            if not library.has(style_id):
                return None  # caller maps to 404
            return (
                library.load_reference(style_id),
                library.load_position(style_id),
                library.load_mask(style_id),
            )
        if upload_bytes is not None:
            return (_decode_upload(upload_bytes, which, max_upload), None, None)
        return (None, None, None)

    @app.post("/api/transfer")
    async def run_transfer(
        source: UploadFile = File(...),
        reference: UploadFile = File(None),
        style_id: str = Form(None),
        reference2: UploadFile = File(None),
        style_id2: str = Form(None),
        alpha: str = Form("1.0"),
        regions: str = Form("full"),
        use_color: str = Form("true"),
        use_pattern: str = Form("true"),
        pattern_source: str = Form("reference"),
        seed: str = Form(None),
    ):
        src = _decode_upload(await source.read(), "source", max_upload)

        ref_bytes = await reference.read() if reference is not None else None
        resolved = _resolve_reference("reference", style_id, ref_bytes)
        if resolved is None:
            return _error(404, "style", "unknown style id %r" % style_id)
        ref, ref_pos, ref_mask = resolved
        if ref is None:
            raise BadRequestError(
                "a reference is required: style_id or reference image",
                detail={"field": "reference"},
            )

        ref2_bytes = await reference2.read() if reference2 is not None else None
        resolved2 = _resolve_reference("reference2", style_id2, ref2_bytes)
        if resolved2 is None:
            return _error(404, "style", "unknown style id %r" % style_id2)
        ref2, ref2_pos, ref2_mask = resolved2

        seed_val = None
        if seed not in (None, ""):
            try:
                seed_val = int(seed)
            except ValueError:
                raise BadRequestError(
                    "seed must be an integer, got %r" % seed, detail={"field": "seed"}
                )
        request_obj = TransferRequest(
            use_color=_parse_bool(use_color, "use_color"),
            use_pattern=_parse_bool(use_pattern, "use_pattern"),
            alpha=_parse_float(alpha, "alpha"),
            regions=tuple(p.strip() for p in regions.split(",") if p.strip()),
            pattern_source=pattern_source,
            seed=seed_val,
        )

        # precomputed masks make style-based requests skip segmentation
        override = None
        if request_obj.use_pattern:
            override = ref2_mask if request_obj.pattern_source == "reference2" else ref_mask

        result = transfer(
            src,
            ref,
            request_obj,
            bundle,
            reference2=ref2,
            reference_position=ref_pos,
            reference2_position=ref2_pos,
            pattern_mask_override=override,
        )

        request_id = uuid.uuid4().hex[:12]
        out_dir = results_dir / request_id
        dump_intermediates(result, out_dir)
        params = {
            "style_id": style_id,
            "style_id2": style_id2,
            "alpha": request_obj.alpha,
            "regions": list(request_obj.regions),
            "use_color": request_obj.use_color,
            "use_pattern": request_obj.use_pattern,
            "pattern_source": request_obj.pattern_source,
            "seed": request_obj.seed,
        }
        png = (out_dir / "output.png").read_bytes()
        record = {
            "request_id": request_id,
            "params": params,
            "metadata": result.metadata,
            "artifacts": sorted(p.name for p in out_dir.iterdir()),
            "sha256": {
                p.name: file_sha256(p)
                for p in sorted(out_dir.iterdir())
                if p.suffix in (".png", ".uvpm")
            },
        }
        (out_dir / "request.json").write_text(json.dumps(record, indent=2) + "\n")
        return {"image_base64": base64.b64encode(png).decode("ascii"), **record}

    @app.get("/api/result/{request_id}")
    def get_result(request_id: str):
        record_path = results_dir / request_id / "request.json"
        if not record_path.exists():
            return _error(404, "result", "unknown request id %r" % request_id)
        return json.loads(record_path.read_text())

    @app.get("/api/result/{request_id}/{artifact}")
    def get_result_artifact(request_id: str, artifact: str):
        out_dir = results_dir / request_id
        if not (out_dir / "request.json").exists():
            return _error(404, "result", "unknown request id %r" % request_id)
        path = out_dir / artifact
        if Path(artifact).name != artifact or not path.exists():
            return _error(404, "result", "unknown artifact %r" % artifact)
        return FileResponse(path)

    return app
