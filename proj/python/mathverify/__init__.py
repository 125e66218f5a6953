"""Math answer verification: extraction, symbolic baseline, pass@k metrics."""

from ._core import (
    baseline_equivalent,
    curve,
    extract_final_answer,
    f1,
    normalize_answer_key,
    pass_at_k,
    split_seed,
)

__all__ = [
    "baseline_equivalent",
    "curve",
    "extract_final_answer",
    "f1",
    "normalize_answer_key",
    "pass_at_k",
    "split_seed",
]
