"""Encoder exports for the reduction app."""

from reduction.af import AF, Semantics
from reduction.kexpr import KExpr

from .acceptance import assert_acceptance
from .base import Encoding, EncodingBuilder
from .dnf import dnf_convert, to_dnf_matrix
from .first_level import encode_admissible, encode_complete, encode_conflict_free, encode_stable
from .second_level import encode_preferred, encode_semi_stable, encode_stage

ENCODERS = {
    Semantics.CONFLICT_FREE: encode_conflict_free,
    Semantics.ADMISSIBLE: encode_admissible,
    Semantics.COMPLETE: encode_complete,
    Semantics.STABLE: encode_stable,
    Semantics.PREFERRED: encode_preferred,
    Semantics.SEMI_STABLE: encode_semi_stable,
    Semantics.STAGE: encode_stage,
}


def encode(af: AF, x: KExpr, sigma: Semantics) -> Encoding:
    return ENCODERS[Semantics(sigma)](af, x)
