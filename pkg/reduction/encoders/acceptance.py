from __future__ import annotations

import dataclasses

from django.core.exceptions import ValidationError

from reduction.af import AcceptanceMode
from reduction.encoders.base import Encoding
from reduction.formula import CNF, Provenance


def assert_acceptance(enc: Encoding, argument: str, mode: AcceptanceMode) -> Encoding:
    """Credulous adds ``e_a``; skeptical adds ``not e_a`` and flips the answer."""
    if argument not in enc.extension_vars:
        raise ValidationError(f"Unknown argument {argument!r}.")
    skeptical = AcceptanceMode(mode) == AcceptanceMode.SKEPTICAL
    var = enc.extension_vars[argument]
    unit = (-var,) if skeptical else (var,)
    provenance = [*(enc.cnf.provenance or []), Provenance(enc.expression.leaves[argument], "acc")]
    cnf = CNF(enc.table, [*enc.cnf.clauses, unit], provenance)
    return dataclasses.replace(enc, cnf=cnf, negate_answer=skeptical)
