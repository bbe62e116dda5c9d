"""cuttree: random-tree edge destruction, cut-trees, and Monte Carlo
verification of their scaling limits."""

from .cut_tree import CutTree, build_cut_tree
from .destruction import (
    CutSchedule,
    DestructionTrace,
    MultiIsolation,
    multi_isolation,
    multi_isolation_profile,
    permutation_schedule,
    run_destruction,
    sample_schedule,
    schedule_from_order,
)
from .families import (
    Family,
    gen_bary,
    gen_bst,
    gen_cayley,
    gen_merged,
    gen_regular,
    gen_scale_free,
    gen_urt,
    make_family,
)
from .limits import LimitModel, limit_model, model_for
from .rng import stream
from .stats import EmpiricalSample, TestReport, energy_distance, ks_statistic
from .trees import RootedTree

__all__ = [
    "CutSchedule",
    "CutTree",
    "DestructionTrace",
    "EmpiricalSample",
    "Family",
    "LimitModel",
    "MultiIsolation",
    "RootedTree",
    "TestReport",
    "build_cut_tree",
    "energy_distance",
    "gen_bary",
    "gen_bst",
    "gen_cayley",
    "gen_merged",
    "gen_regular",
    "gen_scale_free",
    "gen_urt",
    "ks_statistic",
    "limit_model",
    "make_family",
    "model_for",
    "multi_isolation",
    "multi_isolation_profile",
    "permutation_schedule",
    "run_destruction",
    "sample_schedule",
    "schedule_from_order",
    "stream",
]

__version__ = "0.1.0"
