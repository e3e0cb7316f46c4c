"""Pinned tolerances and empirical constants, in one place.

The *_TOL values are contracts promised by the operations; the *_EMP
values were measured once on the pinned seeded ensembles in the test
suite and are asserted as regression bounds thereafter (the underlying
inequalities carry unspecified constants, so a measured bound is the
honest numerical stand-in).
"""

from __future__ import annotations

# transform / projection contracts
TRANSFORM_ROUNDTRIP_TOL = 1e-12
DIVFREE_TOL = 1e-12
MULTIPLIER_COMMUTE_TOL = 1e-14

# dyadic decomposition contracts
PARTITION_UNITY_TOL = 1e-15
RECONSTRUCTION_TOL = 1e-12
LOWPASS_CONSISTENCY_TOL = 1e-13

# single-shell norm inequality: measured max ratio over the pinned
# 100-shell ensemble is ~0.11 (s=2 -> r=inf); 8 is the asserted bound
BERNSTEIN_RATIO_BOUND = 8.0

# flux diagnostics
FLUX_ORACLE_TOL = 1e-10
FLUX_VANISH_TOL = 1e-10
# max |flux| / estimate over the pinned 200-field ensemble (n=32, all q)
# measured 0.01745 at first pinning; the asserted bound adds headroom
FLUX_ESTIMATE_C_MEASURED = 0.0175
FLUX_ESTIMATE_C_EMP = 0.05

# balance budgets
BALANCE_REL_TOL = 1e-6
SHEAR_DECAY_TOL = 1e-8
CONVERGENCE_RATIO_MIN = 3.5
FLUX_DECAY_FACTOR_MIN = 10.0

# time-direction norms
WEAK_NORM_REL_TOL = 0.05
EXCEPTIONAL_MEASURE_REL_TOL = 0.02

# heuristics
CASCADE_SLOPE_REL_TOL = 0.02
INTERMITTENCY_D_TOL = 0.3

# solver
CFL_LIMIT = 0.5

# the desk-scale reference run used by the acceptance suite
REFERENCE_RUN = {
    "init": "taylor-green",
    "n": 64,
    "nu": 0.1,
    "dt": 1e-3,
    "t_end": 1.0,
    "snapshot_stride": 5,
}


def as_dict() -> dict:
    out = {}
    for name, value in sorted(globals().items()):
        if name.isupper():
            out[name] = value
    return out
