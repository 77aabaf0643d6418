"""Disjoint paths on graphs with a small feedback vertex set."""
from .graph import Graph, Instance, Mode, PathSeq, Routing, normalize_instance, verify_routing

__all__ = ["Graph", "Instance", "Mode", "PathSeq", "Routing", "normalize_instance", "verify_routing"]
