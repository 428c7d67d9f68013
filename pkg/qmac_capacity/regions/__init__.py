"""
Capacity-region computation: geometry, single-letter evaluation, optimizer
and closed-form regions
"""

from .geometry import (
    Pentagon,
    RatePoint,
    RateRegion,
    pareto_frontier,
    region_contains,
    time_share
)

from .evaluation import (
    SimultaneousBounds,
    cq_point,
    erasure_single_letter_bound,
    evaluate_cq,
    evaluate_qq,
    product_ensemble,
    qq_corners,
    qq_rectangle,
    simultaneous_bounds
)

from .optimizer import (
    OptimizerConfig,
    default_ensemble_size,
    optimize_cq_region,
    optimize_qq_region,
    regularized_region
)

from .analytic import (
    analytic_erasure_region,
    analytic_phase_flip_region
)

__all__ = [
    'Pentagon',
    'RatePoint',
    'RateRegion',
    'pareto_frontier',
    'region_contains',
    'time_share',
    'SimultaneousBounds',
    'cq_point',
    'erasure_single_letter_bound',
    'evaluate_cq',
    'evaluate_qq',
    'product_ensemble',
    'qq_corners',
    'qq_rectangle',
    'simultaneous_bounds',
    'OptimizerConfig',
    'default_ensemble_size',
    'optimize_cq_region',
    'optimize_qq_region',
    'regularized_region',
    'analytic_erasure_region',
    'analytic_phase_flip_region'
]
