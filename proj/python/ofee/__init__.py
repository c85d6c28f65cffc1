"""Python bindings for the oracle-free event extraction pipeline."""

from ofee._core import (
    ArgumentPair,
    ContextInstance,
    EventFrame,
    OfeeError,
    ToyBackend,
    Trigger,
    build_argument_prompt,
    build_trigger_prompt,
    decode_argument_output,
    decode_trigger_candidate,
    encode_argument_target,
    encode_trigger_target,
    evaluate_corpus,
    f1_from_counts,
    fuse_scores,
    hinge_loss,
    load_corpus,
    run_pipeline,
    select,
    softmax,
    write_synthetic_bundle,
)

__all__ = [
    "ArgumentPair",
    "ContextInstance",
    "EventFrame",
    "OfeeError",
    "ToyBackend",
    "Trigger",
    "build_argument_prompt",
    "build_trigger_prompt",
    "decode_argument_output",
    "decode_trigger_candidate",
    "encode_argument_target",
    "encode_trigger_target",
    "evaluate_corpus",
    "f1_from_counts",
    "fuse_scores",
    "hinge_loss",
    "load_corpus",
    "run_pipeline",
    "select",
    "softmax",
    "write_synthetic_bundle",
]
