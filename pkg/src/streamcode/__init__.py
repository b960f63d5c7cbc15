"""streamcode: low-delay streaming erasure codes for burst-plus-arbitrary loss.

Builds rate-optimal systematic convolutional codes by diagonal interleaving
of verified block codes, checks achievability exhaustively over maximal
erasure patterns, and benchmarks codes over Gilbert-Elliott / Fritchman
channel models.
"""

from .block import (
    BlockCodeword, BlockDecodeResult, ReceivedBlock,
    block_encode, decode_oracle, decode_sequential,
)
from .channels import (
    Fritchman, FritchmanParams, GEParams, GilbertElliott, IidErasures,
    ReplaySequence, fritchman_average_loss_rate, fritchman_step,
    ge_average_loss_rate, ge_step, make_channel,
)
from .construct import (
    CodeParams, ConstructionResult, GeneratorMatrix, GeneratorTemplate,
    baseline_martinian_sundberg, baseline_mds, build_template, capacity,
    construct_random, construct_verified, field_size_bound,
    find_achievability_witness, verify_achievable,
)
from .conv import (
    ConvCode, DiagonalSolver, PacketDecision, StreamDecoder, StreamEncoder,
    decode_trace, encode_stream, interleave,
)
from .erasures import (
    ErasurePattern, WbnSpec, dominating_pattern, enumerate_maximal_patterns,
    is_valid_wbn_sequence, mask_columns, window_admissible,
)
from .errors import (
    ConfigError, ConstructionExhaustedError, DimensionError,
    FieldTooSmallError, ParameterError, SearchBudgetError, StreamCodeError,
)
from .gf import (
    FieldMatrix, PrimeField, in_column_space, is_prime, mds_parity,
    next_prime_above, rank, solve,
)
from .metrics import (
    DistanceReport, check_optimal, column_distance_bruteforce,
    column_span_bruteforce, erasure_probe_bounds, truncated_generator,
)
from .sim import (
    CodeSpec, LossStats, RunConfig, SweepPoint, burst_histogram,
    count_losses, run_loss_sweep, success_rate_experiment, sweep_csv, table_csv,
)

__version__ = "0.1.0"
