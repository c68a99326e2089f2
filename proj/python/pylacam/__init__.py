"""Anytime multi-agent pathfinding on grid maps."""

from pathlib import Path

from ._core import (
    ContractViolation,
    GridMap,
    Instance,
    Objective,
    OracleRefusal,
    ParseError,
    SolveOutcome,
    Status,
    TracePoint,
    coords,
    is_solvable,
    load_instance,
    optimal_cost,
    parse_solution,
    random_instance,
    run_cli,
    serialize_solution,
    solution_cost,
    solve,
    validate,
)

__all__ = [
    "ContractViolation",
    "GridMap",
    "Instance",
    "Objective",
    "OracleRefusal",
    "ParseError",
    "SolveOutcome",
    "Status",
    "TracePoint",
    "coords",
    "is_solvable",
    "load_files",
    "load_instance",
    "optimal_cost",
    "parse_solution",
    "random_instance",
    "run_cli",
    "serialize_solution",
    "solution_cost",
    "solve",
    "validate",
]


def load_files(map_path, scen_path, n):
    """Reads a .map/.scen pair from disk and keeps the first n agents."""
    return load_instance(Path(map_path).read_text(), Path(scen_path).read_text(), n)
