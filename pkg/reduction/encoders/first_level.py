"""Encodings whose models biject with the extensions."""
from __future__ import annotations

from reduction.af import AF, Semantics
from reduction.encoders.base import Encoding, EncodingBuilder
from reduction.encoders.layers import (
    attack_layer,
    defeat_ge_layer,
    defeat_layer,
    extension_layer,
    out_layer,
)
from reduction.kexpr import KExpr


def admissible_layers(bld: EncodingBuilder, starred: bool = False) -> None:
    extension_layer(bld, starred)
    defeat_layer(bld, starred)
    attack_layer(bld, starred)


def encode_conflict_free(af: AF, x: KExpr) -> Encoding:
    bld = EncodingBuilder(af, x)
    extension_layer(bld)
    return bld.finish(Semantics.CONFLICT_FREE)


def encode_stable(af: AF, x: KExpr) -> Encoding:
    bld = EncodingBuilder(af, x)
    extension_layer(bld)
    defeat_layer(bld, root_units=True)
    return bld.finish(Semantics.STABLE)


def encode_admissible(af: AF, x: KExpr) -> Encoding:
    bld = EncodingBuilder(af, x)
    admissible_layers(bld)
    return bld.finish(Semantics.ADMISSIBLE)


def encode_complete(af: AF, x: KExpr) -> Encoding:
    bld = EncodingBuilder(af, x)
    admissible_layers(bld)
    defeat_ge_layer(bld)
    out_layer(bld)
    return bld.finish(Semantics.COMPLETE)
