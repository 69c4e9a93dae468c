"""bordcalc: equivariant surface bordism of finite groups.

Computes the unitary and oriented equivariant bordism groups of surfaces,
the toral quotient of second homology (the obstruction group for free
surface actions to bound), and two-dimensional cut-and-paste groups of
classifying spaces, for finite groups given by tables, permutations, or
finite presentations.
"""

__version__ = "0.1.0"

from .bogomolov import (
    BogomolovResult,
    SurfaceTuple,
    WitnessReport,
    bogomolov,
    bogomolov_auto,
    lhs_h1_crosscheck,
    surface_cycle,
    toral_cycles,
    witness_search,
    witness_verify,
)
from .bordism import (
    BordismReport,
    ClassContribution,
    adjacent_table_dim2,
    adjacent_table_dim3,
    hominj_orbit_counts,
    omega2,
    sk2,
    sk_point,
    torsion_omega2,
)
from .errors import (
    BordcalcError,
    EliminationOverflowError,
    InputError,
    InvalidActionError,
    NotNormalError,
    PreconditionError,
    PresentationSyntaxError,
    ResourceLimitError,
)
from .groups import (
    FiniteGroup,
    GroupMap,
    SpecialShape,
    SubgroupHandle,
    alternating_group,
    builtin,
    center,
    centralizer,
    classify_special,
    conj_action_on_cyclic,
    cyclic_group,
    dihedral_group,
    direct_product,
    from_permutations,
    g64_group,
    generated_subgroup,
    normalizer,
    quaternion_group,
    quotient,
    semidirect_product,
    subgroup,
    subgroup_as_group,
    symmetric_group,
)
from .homology import (
    INTEGERS,
    Cycle2,
    H2Presentation,
    Integers,
    ModPrimePower,
    cycle_check,
    d3_column,
    default_modular_ring,
    h1,
    h2,
    quotient_classes,
)
from .lattice import (
    Lattice,
    SubgroupClass,
    brute_force_subgroups,
    subgroup_classes,
    weyl,
)
from .presentation import (
    CosetTable,
    Presentation,
    Word,
    coset_table_to_group,
    g243_group,
    parse_presentation,
    parse_word,
    realize_presentation,
    todd_coxeter,
)
from .smith import (
    AbelianGroupDescriptor,
    ColumnEchelon,
    SmithResult,
    SparseIntMat,
    smith_normal_form,
    snf_dense,
    torsion_structure,
)

__all__ = [name for name in dir() if not name.startswith("_")]
