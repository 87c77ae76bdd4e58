from __future__ import annotations

import os
from typing import List, Literal, Mapping, Optional

from pydantic import BaseModel, Field, ValidationError

from .errors import InputError
from .utils.cyclotomic import set_conductor_cap

ENV_PREFIX = "CLIFFNORM_"


class Settings(BaseModel):
    max_order: int = Field(ge=1, default=10_000)
    max_assignments: int = Field(ge=1, default=10_000_000)
    conductor_cap: int = Field(ge=1, default=7920)
    full_verify_limit: int = Field(ge=0, default=200)
    numeric_tol: float = Field(gt=0, default=1e-9)
    unitarize_tol: float = Field(gt=0, default=1e-9)
    seed: int = 0
    workers: int = Field(ge=1, default=1)
    odd_dihedral: List[int] = Field(default_factory=lambda: [3, 5, 7])
    gm_values: List[int] = Field(default_factory=lambda: [1, 2, 3, 4])
    output_format: Literal["human", "structured"] = "human"

    @classmethod
    def from_env(cls, prefix: str = ENV_PREFIX, environ: Optional[Mapping[str, str]] = None, **overrides) -> "Settings":
        """Defaults, then <prefix><FIELD> environment variables, then explicit overrides."""
        environ = os.environ if environ is None else environ
        values = {}
        for name in cls.model_fields:
            raw = environ.get(prefix + name.upper())
            if raw is None:
                continue
            if name in ("odd_dihedral", "gm_values"):
                values[name] = [part.strip() for part in raw.split(",") if part.strip()]
            else:
                values[name] = raw
        values.update({k: v for k, v in overrides.items() if v is not None})
        try:
            return cls(**values)
        except ValidationError as exc:
            raise InputError(f"invalid settings: {exc}") from exc

    def apply(self) -> "Settings":
        set_conductor_cap(self.conductor_cap)
        return self
