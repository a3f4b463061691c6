"""Run settings for numeric and reporting parameters."""

from dataclasses import dataclass, fields, replace
from typing import Any, Dict, Optional

SCHEMA_VERSION = "1.0"


@dataclass(frozen=True)
class RunSettings:
    """Numeric knobs shared by the CLI subcommands."""

    nodes: int = 4096
    tol: float = 1e-6
    max_order: int = 2
    degree_bound: Optional[int] = None
    seed: int = 0
    max_nodes: int = 1 << 16
    workers: Optional[int] = None

    def merged(self, *layers: Dict[str, Any]) -> "RunSettings":
        """
        Overlay settings layers, later layers winning; None values are skipped.

        Args:
            layers: Dictionaries of field overrides (problem file, then CLI flags)

        Returns:
            New RunSettings instance
        """
        known = {f.name for f in fields(self)}
        updates: Dict[str, Any] = {}
        for layer in layers:
            for key, value in layer.items():
                if key in known and value is not None:
                    updates[key] = value
        return replace(self, **updates)
