"""fglab: formal groups over Z_p at fixed precision.

The public names below cover p-adic scalars and extension rings, truncated
power series, formal groups and their endomorphisms, torsion computations,
and the series document format.
"""
from .errors import *  # noqa: F401,F403
from .padic import PAdicNum, PrimeConfig, add, divide_exact, inv, mul, neg, val_p
from .extring import (
    ExtElem,
    ExtRing,
    base_ring,
    cyclotomic_ring,
    eisenstein_ring,
    eval_poly,
    hensel_lift,
    val_ext,
)
from .series import (
    TruncatedSeries,
    comp_inverse,
    compose,
    derivative,
    embed,
    eval_at,
    identity,
    iterate,
    linear_part,
    reciprocal,
    restrict,
    scale,
    series_add,
    series_mul,
    weierstrass_degree,
    weierstrass_prep,
)
from .formal_groups import (
    Endomorphism,
    FormalGroup,
    PrecisionBudget,
    Stability,
    Verdict,
    additive_group,
    check_axioms,
    check_endomorphism,
    check_homomorphism,
    commutator_difference,
    conjugate_group,
    decompose_commuting,
    formal_group_from,
    formal_log,
    is_stable,
    lt_solve,
    mul_by,
    multiplicative_group,
    rebuild_sum,
    solve_commutant,
)
from .dynamics import (
    NotTorsionAtCap,
    Report,
    TorsionCertificate,
    is_torsion,
    iterate_at,
    reduce_report,
    rigidity_witness,
    shared_torsion_demo,
    shared_torsion_series,
    theorem_A_witness,
)
from .serialize import emit_series, parse_series
from ._kernels import BACKEND as KERNEL_BACKEND

__version__ = "0.1.0"
