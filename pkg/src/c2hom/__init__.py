"""Exact C2-equivariant homological algebra over Z and Z/m.

Layers, bottom up: ``zlin`` (presentations and Smith normal form),
``mackey`` (Lewis diagrams, box products), ``homalg`` (complexes, sigma
shifts, derived tensors, towers), ``slices`` (slice tables, the
sigma-sums filtration), ``models`` (the named homology models), plus the
``codec``/``cases``/``cli`` harness.
"""

from .zlin import BaseRing, CombineKind, FgModule, ModuleHom, SubquotientKind
from .mackey import (
    MackeyFunctor,
    MackeyHom,
    StandardKind,
    box,
    box_over_green,
    burnside,
    constant,
    constant_unit,
    finite_mackey_skeleton,
    fixed_point,
    induced,
    make_standard,
    p0,
    pointwise_subquotient,
    validate,
)
from .homalg import (
    FiltrationTower,
    MackeyComplex,
    homology,
    mod_pk_tower,
    resolve_and_derived_tensor,
    sigma_shift,
    tensor_total,
    tower_gr_and_completeness,
)
from .slices import SliceTable, rho_table, sigma_filtration, vanishing_test
from .models import (
    WeightGradedComplex,
    cofiber_u_check,
    hr_conjugation_plane,
    hr_polynomial,
    hr_sign_laurent,
    thr_perfectoid_model,
)

__version__ = "0.1.0"
