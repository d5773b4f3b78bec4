"""Small fully-connected networks with hand-written reverse mode.

All architectures in this package are fixed, shallow MLPs, so rather than pull
in an autodiff framework we keep explicit (W, b) arrays per layer and write
the backward pass by hand. ``forward`` returns a cache; ``backward`` consumes
it together with an output cotangent and produces the flat parameter gradient
(and optionally the gradient with respect to the inputs, which is what lets
separate nets be chained, e.g. feature extractor -> energy head).

Parameter layout: theta = concat(W1.ravel(), b1, W2.ravel(), b2, ...), row-major,
layer order first-to-last. ReLU derivative at exactly 0 is taken to be 0.
"""

from __future__ import annotations

import numpy as np

from .rng import PortableRng


class Mlp:
    """ReLU MLP. Hidden layers are always ReLU; the output layer is linear
    unless ``relu_output`` is set (used for feature branches whose output is
    itself a hidden representation of a larger network).

    Weights are initialized uniformly in +-1/sqrt(fan_in); biases start at 0,
    so a freshly built net with ``rng=None`` (all-zero weights) outputs 0.
    """

    def __init__(self, widths: list[int], rng: PortableRng | None = None, relu_output: bool = False):
        if len(widths) < 2:
            raise ValueError("need at least input and output widths")
        self.widths = list(int(w) for w in widths)
        self.relu_output = bool(relu_output)
        self.weights: list[np.ndarray] = []
        self.biases: list[np.ndarray] = []
        for fan_in, fan_out in zip(self.widths[:-1], self.widths[1:]):
            if rng is None:
                w = np.zeros((fan_in, fan_out))
            else:
                bound = 1.0 / np.sqrt(fan_in)
                w = rng.uniform((fan_in, fan_out), -bound, bound)
            self.weights.append(w)
            self.biases.append(np.zeros(fan_out))

    @property
    def n_params(self) -> int:
        return sum(w.size + b.size for w, b in zip(self.weights, self.biases))

    @property
    def theta(self) -> np.ndarray:
        parts = []
        for w, b in zip(self.weights, self.biases):
            parts.append(w.ravel())
            parts.append(b)
        return np.concatenate(parts)

    @theta.setter
    def theta(self, flat: np.ndarray) -> None:
        flat = np.asarray(flat, dtype=np.float64)
        if flat.shape != (self.n_params,):
            raise ValueError(f"expected {self.n_params} parameters, got {flat.shape}")
        pos = 0
        for i, (w, b) in enumerate(zip(self.weights, self.biases)):
            self.weights[i] = flat[pos : pos + w.size].reshape(w.shape).copy()
            pos += w.size
            self.biases[i] = flat[pos : pos + b.size].copy()
            pos += b.size

    def forward(self, x: np.ndarray) -> tuple[np.ndarray, list]:
        """Returns (output (n, out_width), cache for backward)."""
        h = np.asarray(x, dtype=np.float64)
        if h.ndim != 2 or h.shape[1] != self.widths[0]:
            raise ValueError(f"expected input shape (n, {self.widths[0]}), got {h.shape}")
        inputs = []
        masks = []
        last = len(self.weights) - 1
        for i, (w, b) in enumerate(zip(self.weights, self.biases)):
            inputs.append(h)
            z = h @ w + b
            if i < last or self.relu_output:
                mask = z > 0.0
                h = np.where(mask, z, 0.0)
                masks.append(mask)
            else:
                h = z
        return h, [inputs, masks]

    def backward(self, cache: list, cotangent: np.ndarray, need_input_grad: bool = False):
        """Reverse pass. ``cotangent`` has shape (n, out_width).

        Returns the flat parameter gradient, or (flat gradient, input gradient)
        when ``need_input_grad`` is set. Gradients are of sum_n <cotangent_n, out_n>.
        """
        inputs, masks = cache
        g = np.asarray(cotangent, dtype=np.float64)
        last = len(self.weights) - 1
        grads_w: list[np.ndarray] = [None] * len(self.weights)
        grads_b: list[np.ndarray] = [None] * len(self.weights)
        for i in range(last, -1, -1):
            if i < last or self.relu_output:
                g = g * masks[i]
            grads_w[i] = inputs[i].T @ g
            grads_b[i] = g.sum(axis=0)
            if i > 0 or need_input_grad:
                g = g @ self.weights[i].T
        parts = []
        for gw, gb in zip(grads_w, grads_b):
            parts.append(gw.ravel())
            parts.append(gb)
        flat = np.concatenate(parts)
        if need_input_grad:
            return flat, g
        return flat
