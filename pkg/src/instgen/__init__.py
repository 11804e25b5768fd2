"""Learn symbol statistics from observed quantifier instantiations and
generate new candidate ground terms from them."""

from .errors import InstGenError
from .generator import (
    Effort,
    GenConfig,
    Pick,
    TermMaker,
    generate_batch,
    invert_weights,
    make_rng,
    make_term,
    pick,
    sample_categorical,
)
from .harness import (
    Aggregate,
    CoverRow,
    GridSpec,
    ResultsMatrix,
    aggregate_vs_reference,
    enumerate_grid,
    greedy_cover,
    load_results,
)
from .replay import EffortLevel, InstRecord, Round, SessionReport, Trace, parse_trace, run_session, should_fire
from .stats import StatsStore, dump_stats, load_stats, observe_term, weights_global, weights_path
from .terms import (
    GroundTerm,
    Signature,
    Sort,
    SymbolDecl,
    parse_signature,
    parse_term,
    print_term,
    symbols_of_sort,
    validate_term,
)

__version__ = "0.1.0"
