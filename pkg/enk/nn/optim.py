"""Adam with bias correction"""

from typing import Dict

import numpy as np
from pydantic import BaseModel, ConfigDict, Field

from ..errors import ParameterError


class AdamState(BaseModel):
    """Moment estimates keyed by parameter name plus the step counter."""

    model_config = ConfigDict(arbitrary_types_allowed=True)

    lr: float = Field(default=1e-3, ge=0)
    beta1: float = Field(default=0.9, ge=0, lt=1)
    beta2: float = Field(default=0.999, ge=0, lt=1)
    epsilon: float = Field(default=1e-8, gt=0)
    step: int = 0
    m: Dict[str, np.ndarray] = Field(default_factory=dict)
    v: Dict[str, np.ndarray] = Field(default_factory=dict)


def adam_step(state: AdamState, params: Dict[str, np.ndarray], grads: Dict[str, np.ndarray]) -> Dict[str, np.ndarray]:
    """Update ``params`` in place and return them.

    Parameters are visited in sorted-name order, so the result does not depend
    on the order in which they were registered.
    """
    for name in params:
        if name not in grads:
            raise ParameterError(f"missing gradient for parameter '{name}'")
        if grads[name].shape != params[name].shape:
            raise ParameterError(
                f"gradient for '{name}' has shape {list(grads[name].shape)}, parameter has {list(params[name].shape)}"
            )

    state.step += 1
    bc1 = 1.0 - state.beta1 ** state.step
    bc2 = 1.0 - state.beta2 ** state.step
    step_size = state.lr / bc1

    for name in sorted(params):
        param, g = params[name], grads[name]
        if name not in state.m:
            state.m[name] = np.zeros_like(param)
            state.v[name] = np.zeros_like(param)
        m, v = state.m[name], state.v[name]
        m *= state.beta1
        m += (1.0 - state.beta1) * g
        v *= state.beta2
        v += (1.0 - state.beta2) * (g * g)
        param -= (step_size * m / (np.sqrt(v / bc2) + state.epsilon)).astype(param.dtype, copy=False)
    return params
