from .circle import (
    CircleFunction,
    HypercubeLift,
    Interval,
    IntervalScheme,
    MembershipError,
    build_interval_scheme,
    circle_function,
    hypercube_lift,
    spread_marks,
)
from .descriptors import DescriptorError, build_function, catalog_text, format_function, parse_descriptor
from .functions import (
    BlockFunction,
    BlockLayout,
    BooleanFunction,
    Constant,
    Dictator,
    IncrementalState,
    LevelFunction,
    Majority,
    Parity,
    PinnedModification,
    StripedModification,
    TruthTableFunction,
    block_function,
    block_multiplicity,
    constant,
    default_block_lengths,
    dictator,
    majority,
    parity,
    pinned_modification,
    random_function,
    stripe_spacing,
    striped_modification,
)
