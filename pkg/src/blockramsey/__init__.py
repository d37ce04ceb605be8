"""Block-sequence partial semigroups, variable words, and Ramsey witness search."""

from .vectors import (
    SIGNED,
    UNSIGNED,
    BlockSequence,
    BlockVector,
    RealVector,
    block_lt,
    block_sum,
    embed_delta,
    in_fattening,
    linf_dist,
    negate,
    net_defect,
    seq_dist,
    span,
    support,
    tetris,
)
from .words import (
    Alphabet,
    Decomposition,
    Letter,
    Segment,
    Var,
    VarWordSequence,
    Word,
    approx_negT,
    classify,
    compatible,
    compose,
    concat,
    dist_seqs,
    dist_words,
    halve,
    is_block_subseq,
    is_rapidly_increasing,
    lift_double,
    parse_support,
    reflect_word,
    span_letters,
    span_negT,
    span_words,
    substitute,
    tetris_word,
)
from .encodings import (
    DerivedPair,
    ParamMatrix,
    PerfectSetDescription,
    bit_letter,
    bitstring_alphabet,
    decode_witness,
    derive_B,
    derived_pair,
    perfect_set,
    phi_encode,
    product_to_sigmas,
    psi_encode,
)
from .search import (
    Colouring,
    Exhausted,
    PipelineBounds,
    PipelineResult,
    SearchProblem,
    VerifyReport,
    Witness,
    enumerate_universe,
    parametrized_pipeline,
    search_approx,
    search_exact,
    search_ghj,
    verify_witness,
)

__version__ = "0.1.0"
