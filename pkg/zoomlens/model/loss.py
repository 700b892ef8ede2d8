from __future__ import annotations

from zoomlens.constants import GRADES
from zoomlens.exceptions import InvalidArgumentError
from zoomlens.tensor import Tensor, add, cross_entropy

PHASE_HEADS = {1: ("m",), 2: ("a",), 3: ("m", "a", "c")}


def active_heads(phase: int) -> tuple[str, ...]:
    try:
        return PHASE_HEADS[phase]
    except KeyError:
        raise InvalidArgumentError(f"Phase must be 1, 2 or 3, got {phase}.")


def training_loss(
    y_m: Tensor | None,
    y_a: Tensor | None,
    y_c: Tensor | None,
    grade: int,
    phase: int = 3,
) -> Tensor:
    """
    Sum of the cross-entropies of the heads trained in 'phase'. Heads are
    probability vectors; y_a is the softmax of the sum-pooled gated scores.
    """
    if grade not in GRADES:
        raise InvalidArgumentError(f"Grade must be in 0..4, got {grade}.")

    heads = {"m": y_m, "a": y_a, "c": y_c}
    terms = []
    for key in active_heads(phase):
        if heads[key] is None:
            raise InvalidArgumentError(f"Phase {phase} needs the y_{key.upper()} head.")
        terms.append(cross_entropy(heads[key], grade))

    return add(*terms) if len(terms) > 1 else terms[0]
