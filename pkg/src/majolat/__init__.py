"""Majorization lattice on finite probability vectors: meet, join, entropic
inequalities and randomized checks of them."""

from .core import (
    FLOAT,
    RATIONAL,
    Backend,
    ComparisonResult,
    Distribution,
    LorenzCurve,
    WeightVector,
    compare,
    direct_sum,
    halve,
    lorenz,
    majorized_by,
    make_distribution,
    pad,
    parse_distribution,
    point_mass,
    tensor,
    uniform,
)
from .functionals import kl, lattice_distance, renyi, shannon, tsallis, w_phi
from .lattice import TTransform, beta, decompose_ttransforms, join, meet, meet_join
from .sampling import SampleConfig, sample_incomparable_pair, sample_simplex, search_counterexample
from .verify import InequalityId, InequalityReport, batch_verify, check

__version__ = "0.1.0"

__all__ = [name for name in dir() if not name.startswith("_")]
