"""Run one ExperimentConfig and record what was written."""

from __future__ import annotations

import json
import os
import time
from dataclasses import asdict, dataclass, field
from pathlib import Path

from . import __version__
from .config import ExperimentConfig
from .scenarios import PIPELINES, pipeline_for

OUTPUT_ENV = "ROTORKIT_OUTPUT_DIR"


@dataclass
class RunManifest:
    version: str
    config_sha256: str
    scenario: str
    seed: int
    wall_time: float
    outputs: list[str] = field(default_factory=list)
    config: dict = field(default_factory=dict)
    output_dir: str = ""

    def to_json(self) -> str:
        return json.dumps(asdict(self), indent=2)


def resolve_output_dir(cfg: ExperimentConfig, override: str | None = None) -> Path:
    """An explicit override wins, then the environment, then the config."""
    return Path(override or os.environ.get(OUTPUT_ENV) or cfg.output_dir)


def run(cfg: ExperimentConfig, output_dir: str | None = None) -> RunManifest:
    """Validate, compute everything in memory, then write outputs and manifest.

    A config or numerical error leaves the output directory untouched.
    """
    cfg.validate()
    start = time.perf_counter()
    files = PIPELINES[pipeline_for(cfg)](cfg)
    wall = time.perf_counter() - start
    out = resolve_output_dir(cfg, output_dir)
    out.mkdir(parents=True, exist_ok=True)
    files = {"config.json": cfg.to_json() + "\n", **files}
    for name, text in files.items():
        (out / name).write_text(text)
    manifest = RunManifest(
        __version__, cfg.digest(), cfg.scenario, cfg.seed, wall, sorted(files), cfg.to_dict(), str(out)
    )
    (out / "manifest.json").write_text(manifest.to_json() + "\n")
    return manifest
