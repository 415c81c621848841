from datetime import datetime
from typing import Any, Dict, Optional

from pydantic import BaseModel, Field


class RunManifest(BaseModel):
    """Provenance record written once per CLI run."""

    subcommand: str
    config: Dict[str, Any] = Field(description="Fully resolved subcommand options")
    settings: Dict[str, Any] = Field(description="Numerical settings in effect")
    ensemble: Optional[Dict[str, Any]] = Field(
        default=None, description="Degree distributions in ensemble JSON form"
    )
    version: str
    seed: Optional[int] = None
    started_at: datetime
    wall_clock_s: float = Field(ge=0.0)
    inputs: Dict[str, str] = Field(
        default_factory=dict, description="Input file path -> sha256"
    )
    outputs: Dict[str, str] = Field(
        default_factory=dict, description="Output file path -> sha256"
    )
    exit_code: int = 0
