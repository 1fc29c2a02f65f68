"""Encodings checked against a universally quantified copy.

The outer part describes a candidate (admissible, or conflict-free for
stage); the inner part, over starred copies, describes a competitor that
beats it. A candidate is an extension when no competitor exists.
"""
from __future__ import annotations

from reduction.af import AF, Semantics
from reduction.encoders.base import Encoding, EncodingBuilder
from reduction.encoders.first_level import admissible_layers
from reduction.encoders.layers import defeat_layer, extension_layer, range_layers, subset_layer
from reduction.kexpr import KExpr


def encode_preferred(af: AF, x: KExpr) -> Encoding:
    bld = EncodingBuilder(af, x, starred_arguments=True)
    admissible_layers(bld)
    bld.begin_inner()
    admissible_layers(bld, starred=True)
    subset_layer(bld)
    return bld.finish(Semantics.PREFERRED)


def encode_semi_stable(af: AF, x: KExpr) -> Encoding:
    bld = EncodingBuilder(af, x, starred_arguments=True)
    admissible_layers(bld)
    bld.begin_inner()
    admissible_layers(bld, starred=True)
    range_layers(bld)
    return bld.finish(Semantics.SEMI_STABLE)


def encode_stage(af: AF, x: KExpr) -> Encoding:
    bld = EncodingBuilder(af, x, starred_arguments=True)
    extension_layer(bld)
    defeat_layer(bld)
    bld.begin_inner()
    extension_layer(bld, starred=True)
    defeat_layer(bld, starred=True)
    range_layers(bld)
    return bld.finish(Semantics.STAGE)
