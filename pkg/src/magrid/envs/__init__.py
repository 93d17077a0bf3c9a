"""The shipped environments."""

from .cleanup import CleanupConfig, CleanupState, build_cleanup
from .treasure_hunt import TreasureHuntConfig, build_treasure_hunt

__all__ = [
    "CleanupConfig",
    "CleanupState",
    "build_cleanup",
    "TreasureHuntConfig",
    "build_treasure_hunt",
]
