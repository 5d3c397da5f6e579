"""Taxonomy-guided topic mining over joint spherical text and tree embeddings."""

from ._josh import (
    classification_f1,
    classify_corpus,
    embeddings,
    log_bessel_i,
    log_vmf_density,
    log_vmf_normalizer,
    mine,
    synth,
    topic_coherence,
    train,
)

__all__ = [
    "classification_f1",
    "classify_corpus",
    "embeddings",
    "log_bessel_i",
    "log_vmf_density",
    "log_vmf_normalizer",
    "mine",
    "synth",
    "topic_coherence",
    "train",
]
