"""
Scalar evaluation of information quantities from state and channel files
"""

import logging
from typing import Any, Dict, Optional, Sequence

from ..errors import ValidationError
from ..quantum import information
from ..quantum.channels import QuantumChannel
from ..quantum.states import CqqState, DensityMatrix
from .base import BaseCommand

logger = logging.getLogger(__name__)

QUANTITIES = ("entropy", "mi", "ic", "cond_ic", "fidelity", "trace_distance", "channel_ic")


def _labels(value: Optional[Sequence[str]]):
    if value is None:
        return None
    return tuple(value)


class EvalCommand(BaseCommand):
    name: str = "eval"
    description: str = "Evaluates one information quantity or distance on states read from JSON files."

    def _run(self, quantity: str, state=None, other: Optional[DensityMatrix] = None,
             channel: Optional[QuantumChannel] = None, source: Optional[Sequence[str]] = None,
             target: Optional[Sequence[str]] = None, float_format: str = "%.12f") -> Dict[str, Any]:
        """
        Args:
            quantity: One of entropy, mi, ic, cond_ic, fidelity, trace_distance, channel_ic
            state: Primary state (a CqqState for cond_ic)
            other: Second state for fidelity and trace_distance
            channel: Channel for channel_ic
            source: First subsystem group (A in I_c(A>B), X in I(X;B))
            target: Second subsystem group

        Returns:
            Result dictionary with ``value`` and its formatted ``text``
        """
        if quantity not in QUANTITIES:
            raise ValidationError(f"Unknown quantity '{quantity}' (choose from {', '.join(QUANTITIES)})")
        if state is None:
            raise ValidationError(f"'{quantity}' needs a state file")
        source, target = _labels(source), _labels(target)

        if quantity == "cond_ic":
            if not isinstance(state, CqqState):
                raise ValidationError("cond_ic needs a cqq state file (with 'probs' and 'blocks')")
            value = information.conditional_coherent_information(state, source, target)
        elif isinstance(state, CqqState):
            raise ValidationError(f"'{quantity}' needs a density matrix or pure state file")
        elif quantity == "entropy":
            value = information.entropy(state)
        elif quantity == "mi":
            value = information.mutual_information(state, source, target)
        elif quantity == "ic":
            value = information.coherent_information(state, source, target)
        elif quantity == "channel_ic":
            if channel is None:
                raise ValidationError("channel_ic needs a channel")
            value = information.channel_coherent_information(state, channel)
        else:
            if other is None or isinstance(other, CqqState):
                raise ValidationError(f"'{quantity}' needs a second density matrix file")
            if quantity == "fidelity":
                value = information.fidelity(state, other)
            else:
                value = information.trace_distance(state, other)

        logger.debug(f"{quantity} = {value}")
        return {"quantity": quantity, "value": float(value), "text": float_format % value}
