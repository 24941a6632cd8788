"""Supcast: superposed video multicast link simulator with Softcast-style baselines."""

from .channel import ChannelState, UserGeometry, pack_complex, sample_gain, transmit_pair, unpack_complex
from .layering import LayerPlan, bisect_layers, plan_bandwidth
from .matching import (
    Matching,
    PreferenceLists,
    becma,
    build_preferences,
    exhaustive_match,
    is_stable,
    random_match,
    total_distortion,
)
from .pipeline import (
    RunResult,
    Scenario,
    Sweep,
    TransmissionPlan,
    encode_noma_ra,
    encode_softcast,
    encode_supcast,
    mean_psnr,
    run_experiment,
    system_psnr,
    simulate_user,
)
from .power import (
    LinkParams,
    PairBudget,
    ScalingPair,
    distortion_far,
    distortion_near,
    pair_distortion,
    preallocate,
    reallocate_pair,
    softcast_allocate,
)
from .transform import Chunk, CoeffVolume, assemble_chunks, forward_3d_dct, inverse_3d_dct, partition_chunks
from .video_io import Frame, Gop, load_raw_video, psnr, synthetic_gop

__version__ = "0.1.0"

__all__ = [
    "ChannelState",
    "Chunk",
    "CoeffVolume",
    "Frame",
    "Gop",
    "LayerPlan",
    "LinkParams",
    "Matching",
    "PairBudget",
    "PreferenceLists",
    "RunResult",
    "ScalingPair",
    "Scenario",
    "Sweep",
    "TransmissionPlan",
    "UserGeometry",
    "assemble_chunks",
    "becma",
    "bisect_layers",
    "build_preferences",
    "distortion_far",
    "distortion_near",
    "encode_noma_ra",
    "encode_softcast",
    "encode_supcast",
    "exhaustive_match",
    "forward_3d_dct",
    "inverse_3d_dct",
    "is_stable",
    "load_raw_video",
    "mean_psnr",
    "pack_complex",
    "pair_distortion",
    "partition_chunks",
    "plan_bandwidth",
    "preallocate",
    "psnr",
    "random_match",
    "reallocate_pair",
    "run_experiment",
    "sample_gain",
    "simulate_user",
    "softcast_allocate",
    "system_psnr",
    "synthetic_gop",
    "total_distortion",
    "transmit_pair",
    "unpack_complex",
]
