"""Stock protocol roles and the default role registry."""

from ..framework import RoleRegistry
from . import bb84, cascade, entanglement


def default_registry() -> RoleRegistry:
    """Registry holding every stock role under its published name."""
    registry = RoleRegistry()
    bb84.register(registry)
    cascade.register(registry)
    entanglement.register(registry)
    return registry


__all__ = ["default_registry", "bb84", "cascade", "entanglement"]
