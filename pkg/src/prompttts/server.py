"""HTTP inference service: one prompt in, audio plus measured style out."""
from __future__ import annotations

import base64
import hashlib
import os
from pathlib import Path

from fastapi import FastAPI, HTTPException
from pydantic import BaseModel

from prompttts.models.tts import WEIGHTS_NAME
from prompttts.pipeline import SynthesisPipeline
from prompttts.dsp import wav_bytes
from prompttts.textfront import split_prompt

RUN_DIR_ENV = "PROMPTTTS_RUN_DIR"


class SynthesizeRequest(BaseModel):
    prompt: str | None = None
    style_prompt: str | None = None
    content_prompt: str | None = None


def _model_version(run_dir: Path | None) -> str | None:
    if run_dir is None:
        return None
    ckpt = Path(run_dir) / WEIGHTS_NAME
    if not ckpt.exists():
        return None
    return hashlib.sha256(ckpt.read_bytes()).hexdigest()[:12]


def create_app(pipeline: SynthesisPipeline | None = None, run_dir=None) -> FastAPI:
    """Build the service; the model comes from an injected pipeline, an explicit
    run directory, or the PROMPTTTS_RUN_DIR environment variable."""
    app = FastAPI(title="prompttts")
    resolved = Path(run_dir) if run_dir else (
        Path(os.environ[RUN_DIR_ENV]) if os.environ.get(RUN_DIR_ENV) else None)
    if pipeline is None and resolved is not None and resolved.exists():
        pipeline = SynthesisPipeline.from_run_dir(resolved)
    app.state.pipeline = pipeline
    app.state.model_version = _model_version(resolved) or (
        "injected" if pipeline is not None else None)

    @app.get("/health")
    def health():
        return {"status": "ok", "model_version": app.state.model_version}

    @app.post("/synthesize")
    def synthesize(request: SynthesizeRequest):
        if app.state.pipeline is None:
            raise HTTPException(status_code=503, detail="model not loaded")
        if request.prompt is not None:
            try:
                style, content = split_prompt(request.prompt)
            except ValueError as exc:
                raise HTTPException(status_code=400, detail=str(exc))
        else:
            style, content = request.style_prompt, request.content_prompt
            if not style or not content:
                raise HTTPException(
                    status_code=400,
                    detail="provide either 'prompt' or both 'style_prompt' and 'content_prompt'")
        try:
            result = app.state.pipeline.synthesize(style, content)
        except ValueError as exc:
            raise HTTPException(status_code=400, detail=str(exc))
        m = result.measurement
        return {
            "audio": base64.b64encode(wav_bytes(result.waveform)).decode("ascii"),
            "measurement": {"f0_mean": m.f0_mean, "rate": m.rate, "rms": m.rms},
            "predicted_factors": result.predicted_factors.as_dict(),
            "timing_ms": result.timing_ms,
        }

    return app
