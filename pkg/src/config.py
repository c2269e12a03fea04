"""
Solver Configuration

Tunable knobs for the reduction, oracle, kernelization and DP stages,
plus a few named presets.
"""

from dataclasses import dataclass, replace
from typing import Dict, Optional


@dataclass(frozen=True)
class SolverConfig:
    """
    Configuration shared by the pipeline entry points.

    Attributes:
        oracle_cap: Largest vertex count the subset-DP oracle accepts (2^cap table)
        allow_empty_remainder: Let Rules 4/5 delete every remaining vertex
                               (an empty graph then counts as connected)
        use_shortcuts: Run the kernelizer's degree/danger YES shortcuts
        strict_forest_plan: Reject forest-of-cliques plans breaking the
                            one-2-block-per-component / one-isolated-vertex limits
        jobs: Worker processes for the U-ordering enumeration (1 = in-process)
        verbose: Print progress lines
    """
    name: str = 'default'
    oracle_cap: int = 20
    allow_empty_remainder: bool = False
    use_shortcuts: bool = True
    strict_forest_plan: bool = True
    jobs: int = 1
    verbose: bool = False


PRESETS: Dict[str, SolverConfig] = {
    'default': SolverConfig(),
    'debug': SolverConfig(name='debug', verbose=True),
    'no-shortcuts': SolverConfig(name='no-shortcuts', use_shortcuts=False),
    'parallel': SolverConfig(name='parallel', jobs=4),
}

DEFAULT_CONFIG = PRESETS['default']


def get_config(name: Optional[str] = None, **overrides) -> SolverConfig:
    """
    Look up a preset and apply field overrides.

    Args:
        name: Preset name (default 'default')
        **overrides: SolverConfig fields to replace; None values are ignored

    Returns:
        New SolverConfig

    Raises:
        ValueError: If the preset is unknown
    """
    key = name or 'default'
    if key not in PRESETS:
        raise ValueError(f"Unknown preset: {key} (choose from {sorted(PRESETS)})")

    changes = {field: value for field, value in overrides.items() if value is not None}
    return replace(PRESETS[key], **changes)
