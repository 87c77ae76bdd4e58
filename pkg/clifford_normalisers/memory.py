from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional

from .settings import Settings

logger = logging.getLogger("clifford_normalisers")


@dataclass
class RunMemory:
    settings: Settings = field(default_factory=Settings)
    groups: Dict[str, Any] = field(default_factory=dict)
    tensor_squares: Dict[int, Any] = field(default_factory=dict)
    conjugation_tables: Dict[tuple, Any] = field(default_factory=dict)
    history: List[str] = field(default_factory=list)

    def log(self, message: str, level: int = logging.INFO) -> None:
        self.history.append(message)
        logger.log(level, message)

    def warn(self, message: str) -> None:
        self.log(f"warning: {message}", logging.WARNING)


def ensure_memory(memory: Optional[RunMemory]) -> RunMemory:
    return memory if memory is not None else RunMemory()
