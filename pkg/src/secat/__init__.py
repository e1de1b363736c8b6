"""Exact sectional-category calculator for finite topological spaces."""

from __future__ import annotations

__version__ = "0.1.0"

from .posets import (  # noqa: F401
    FiniteSpace,
    PosetMap,
    Subset,
    add_beat_point,
    build_space,
    check_map,
    components,
    compose,
    constant_map,
    core,
    diagonal,
    identity,
    map_product,
    pairing,
    product,
    singleton,
    subset,
    subspace,
)
from .homotopy import Fence, hom_components, homotopic, nullhomotopic  # noqa: F401
from .engine import (  # noqa: F401
    INFINITE,
    Cospan,
    CoverCertificate,
    InvariantValue,
    generalized_relative_secat,
    is_sectional,
    relative_secat,
)
from .cohomology import (  # noqa: F401
    betti_numbers,
    dimension_bound,
    induced_map,
    order_complex,
    weighted_cup_length,
)
from .invariants import (  # noqa: F401
    cat_map,
    homotopic_distance,
    mw_secat,
    secat,
    subspace_tc,
    tc,
    tc_mixed,
    tc_mw,
    tc_pair,
    tc_scott,
)
from .propcheck import (  # noqa: F401
    CheckReport,
    GeneratorConfig,
    check_homotopy_invariance,
    check_inequalities,
    check_product,
    make_extras,
    random_cospan,
    run_fuzz,
)
from .cli_io import (  # noqa: F401
    DiskCache,
    load_instance,
    parse_instance,
    run_problem,
    serialize_instance,
    validate_certificate,
)
