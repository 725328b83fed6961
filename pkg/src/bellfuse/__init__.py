"""bellfuse: measurement-based building blocks for encoded Clifford computation.

Minimal resource states for encoders, decoders, gates and code switchers are
synthesized as stabilizer states, composed at runtime by Bell measurements
with full byproduct/syndrome tracking, and analyzed under local depolarizing
noise (exact logical-channel enumeration, concatenation thresholds, Monte
Carlo).
"""

from .blocks import (
    ClusterPattern,
    GadgetBlock,
    ResourceBlock,
    choi_state,
    code_switch_block,
    decoder_block,
    ec_block,
    encoder_block,
    fuse_blocks,
    reduce_cluster,
    rotation_gadget,
)
from .codes import CodeSpec, get_code
from .graphstate import GraphStateFrame, stabilizer_to_graph
from .noise import (
    LogicalChannel,
    MonteCarloResult,
    NoiseSpec,
    ThresholdReport,
    concatenation_fixed_point,
    effective_input_noise,
    exact_logical_channel,
    magic_state_check,
    monte_carlo_logical_error,
    sample_ldn,
    threshold_report,
)
from .pipeline import PauliFrame, PipelineSpec, PipelineStep, SyndromeRecord, run_pipeline
from .stabilizer import (
    CliffordCircuit,
    PauliOperator,
    StabilizerState,
    apply_clifford,
    states_equal,
)

__version__ = "0.1.0"
