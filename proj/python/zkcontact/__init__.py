"""Decentralized proof-of-contact protocol: simulator and circuit tools.

Research prototype; see the repository README for the security caveats that
apply to every artifact this package produces.
"""

from ._core import (
    ZkError,
    ZkParseError,
    __version__,
    canonical_scenario,
    circuit_stats,
    run,
    run_file,
    verify_registry_log,
)

__all__ = [
    "ZkError",
    "ZkParseError",
    "__version__",
    "canonical_scenario",
    "circuit_stats",
    "run",
    "run_file",
    "verify_registry_log",
]
