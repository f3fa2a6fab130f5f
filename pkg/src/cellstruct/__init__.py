"""Finite-depth verification of cell structures and g-cell structures.

The package models inverse sequences of finite cellular graphs (cells plus a
reflexive-symmetric relation plus a finite topology per level), checks the
structure axioms and map conditions of that theory at an explicit truncation
depth, runs the constructive procedures (induced thread maps, induced class
maps, lifts, set-valued map constructions), and ships generators for the
canonical example structures.
"""

from .common import CheckResult, HypothesisFailure, StructureError
from .graphs import (
    BALL_RADII,
    Cell,
    CellId,
    CellularGraph,
    FiniteTopology,
    Relation,
    ball,
    ball_of_set,
    close_relation,
    is_continuous_map,
    is_open,
    khalimsky_topology,
    monotone_witness,
)
from .sequences import (
    BondingFamily,
    CellSequence,
    CellStructureReport,
    InverseSequence,
    QuotientSpace,
    Thread,
    ThreadRelation,
    ValidationReport,
    boundary_separated_classes,
    check_cell_structure,
    compose_bonding,
    converges_to,
    enumerate_threads,
    find_limit,
    is_cauchy,
    is_close,
    quotient,
    thread_relation,
    thread_topology,
    validate_sequence,
)
from .maps import (
    ConstructReport,
    DTCellMap,
    GCellMap,
    GCellMapReport,
    LevelMapFamily,
    LiftReport,
    QuotientInduction,
    QuotientMap,
    SingletonContinuityReport,
    WeakGCellMap,
    WeakInduction,
    cell_image,
    check_closeness_preservation,
    check_gcell_map,
    check_quotient_map_continuity,
    check_semicontinuity,
    check_singleton_continuity,
    check_thread_map_continuity,
    check_weak_gcell,
    construct_gcell_from_quotient_map,
    dt_induce_weak,
    family_to_gcell,
    gcell_induce_weak,
    image_at,
    induce_quotient_map,
    lift_quotient_map,
)
from .generators import (
    GENERATOR_NAMES,
    GeneratorSpec,
    MapFixture,
    cantor,
    dyadic_interval,
    full_image_fixture,
    generate,
    jump_map_fixture,
    khalimsky_interval,
    sine_curve,
    sine_lift_fixture,
    spiked_interval,
    unit_interval,
)

__version__ = "0.1.0"
