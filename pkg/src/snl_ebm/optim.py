"""Adam and SGD steps as pure functions on flat parameter vectors.

Both return the *ascent* increment for a gradient of an objective being
maximized; callers add it to the parameters. Adam follows the standard
update with bias correction:

    m_t = beta1 m_{t-1} + (1 - beta1) g
    v_t = beta2 v_{t-1} + (1 - beta2) g^2
    step = lr * (m_t / (1 - beta1^t)) / (sqrt(v_t / (1 - beta2^t)) + eps)

so the very first step has magnitude ~= lr in every coordinate.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

ADAM_BETA1 = 0.9
ADAM_BETA2 = 0.999
ADAM_EPS = 1e-8


def check_finite_gradient(grad: np.ndarray) -> None:
    bad = ~np.isfinite(grad)
    if bad.any():
        idx = int(np.argmax(bad))
        raise ValueError(f"gradient has non-finite entry {grad[idx]!r} at coordinate {idx}")


@dataclass
class AdamState:
    m: np.ndarray
    v: np.ndarray
    t: int = 0

    @classmethod
    def fresh(cls, n: int) -> "AdamState":
        return cls(m=np.zeros(n), v=np.zeros(n), t=0)


def adam_step(state: AdamState, grad: np.ndarray, lr: float) -> tuple[AdamState, np.ndarray]:
    """One Adam step; returns (new state, increment to add to the parameters)."""
    check_finite_gradient(grad)
    t = state.t + 1
    m = ADAM_BETA1 * state.m + (1.0 - ADAM_BETA1) * grad
    v = ADAM_BETA2 * state.v + (1.0 - ADAM_BETA2) * grad * grad
    m_hat = m / (1.0 - ADAM_BETA1**t)
    v_hat = v / (1.0 - ADAM_BETA2**t)
    step = lr * m_hat / (np.sqrt(v_hat) + ADAM_EPS)
    return AdamState(m=m, v=v, t=t), step


def sgd_step(grad: np.ndarray, lr: float) -> np.ndarray:
    check_finite_gradient(grad)
    return lr * grad
