"""Energy models: closed-form exponential-family oracles and MLP energies.

A model is E_theta(x) plus an optional base density d(x) and a declared
reference measure. Two conventions coexist and are made explicit per model:

* carrier base (``base_is_carrier = True``): the base is the model's
  reference measure. It scales importance weights (w = e^{-E} d / q) and the
  normalizer Z = integral e^{-E} d dx, but reported log-densities and
  log-likelihoods are relative to d(x) dx, so the data term is -E alone.
  The closed-form oracles follow this convention.
* tilt (``base_is_carrier = False``): the base is part of the density and
  values are relative to Lebesgue measure; the data term is -E + log d.
  MLP energies with a Gaussian base follow this convention.

Either way ``weight_log_numerator`` (-E + log d, or -E without a base) is
what importance weights compare against the proposal density, and
``unnorm_log_density`` is what enters data terms and reports.
"""

from __future__ import annotations

import numpy as np

from .errors import UnsupportedExactFormError
from .nets import Mlp
from .proposals import StandardGaussian
from .rng import PortableRng

DENSITY_WIDTHS = [2, 200, 100, 50, 50, 1]


class EnergyModel:
    """Contract shared by all unconditional energy models."""

    dim: int
    base = None
    base_is_carrier = False

    def energy(self, x: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def energy_vjp(self, x: np.ndarray, cotangent: np.ndarray) -> np.ndarray:
        """sum_i cotangent_i * dE(x_i)/dtheta as a flat vector."""
        raise NotImplementedError

    @property
    def theta(self) -> np.ndarray:
        raise NotImplementedError

    @theta.setter
    def theta(self, value: np.ndarray) -> None:
        raise NotImplementedError

    @property
    def n_params(self) -> int:
        return self.theta.shape[0]

    def param_gradient(self, x: np.ndarray) -> np.ndarray:
        """Gradient of E at a single point (convenience wrapper over the vjp)."""
        x = np.asarray(x, dtype=np.float64).reshape(1, -1)
        return self.energy_vjp(x, np.ones(1))

    def unnorm_log_density(self, x: np.ndarray) -> np.ndarray:
        u = -self.energy(x)
        if self.base is not None and not self.base_is_carrier:
            u = u + self.base.log_density(x)
        return u

    def weight_log_numerator(self, x: np.ndarray) -> np.ndarray:
        u = -self.energy(x)
        if self.base is not None:
            u = u + self.base.log_density(x)
        return u

    # closed forms; only the oracles implement these
    def exact_log_z(self) -> float:
        raise UnsupportedExactFormError(f"{type(self).__name__} has no closed-form normalizer")

    def exact_log_z_grad(self) -> np.ndarray:
        raise UnsupportedExactFormError(f"{type(self).__name__} has no closed-form normalizer")

    def exact_log_likelihood(self, data: np.ndarray) -> float:
        """mean_i -E(x_i) - log Z, relative to the model's reference measure."""
        return float(np.mean(-self.energy(data))) - self.exact_log_z()


class GaussianMeanModel(EnergyModel):
    """E(x) = -theta x against a standard-Gaussian carrier.

    Z = integral e^{theta x} phi(x) dx = e^{theta^2 / 2} (the Gaussian mgf),
    so the model is N(theta, 1) and the likelihood optimum is theta = x_bar
    with b = x_bar^2 / 2.
    """

    dim = 1
    base_is_carrier = True

    def __init__(self, theta: float = 0.0):
        self._theta = np.array([float(theta)])
        self.base = StandardGaussian(1)

    @property
    def theta(self) -> np.ndarray:
        return self._theta

    @theta.setter
    def theta(self, value: np.ndarray) -> None:
        self._theta = np.asarray(value, dtype=np.float64).reshape(1).copy()

    def energy(self, x: np.ndarray) -> np.ndarray:
        x = np.asarray(x, dtype=np.float64)
        return -self._theta[0] * x[:, 0]

    def energy_vjp(self, x: np.ndarray, cotangent: np.ndarray) -> np.ndarray:
        x = np.asarray(x, dtype=np.float64)
        return np.array([-float(np.dot(cotangent, x[:, 0]))])

    def exact_log_z(self) -> float:
        return 0.5 * float(self._theta[0] ** 2)

    def exact_log_z_grad(self) -> np.ndarray:
        return self._theta.copy()


class BernoulliModel(EnergyModel):
    """E(x) = -theta x on support {0, 1} under counting measure.

    Z = 1 + e^theta; the likelihood optimum is theta = logit(x_bar).
    """

    dim = 1
    base = None
    base_is_carrier = False

    def __init__(self, theta: float = 0.0):
        self._theta = np.array([float(theta)])

    @property
    def theta(self) -> np.ndarray:
        return self._theta

    @theta.setter
    def theta(self, value: np.ndarray) -> None:
        self._theta = np.asarray(value, dtype=np.float64).reshape(1).copy()

    def energy(self, x: np.ndarray) -> np.ndarray:
        x = np.asarray(x, dtype=np.float64)
        return -self._theta[0] * x[:, 0]

    def energy_vjp(self, x: np.ndarray, cotangent: np.ndarray) -> np.ndarray:
        x = np.asarray(x, dtype=np.float64)
        return np.array([-float(np.dot(cotangent, x[:, 0]))])

    def exact_log_z(self) -> float:
        return float(np.logaddexp(0.0, self._theta[0]))

    def exact_log_z_grad(self) -> np.ndarray:
        # d/dtheta log(1 + e^theta) = sigmoid(theta), the model mean.
        return np.array([float(1.0 / (1.0 + np.exp(-self._theta[0])))])

    @staticmethod
    def support() -> np.ndarray:
        return np.array([[0.0], [1.0]])


class MlpEnergy(EnergyModel):
    """Fully-connected energy network, optionally tilted by a base density.

    The default architecture is the 2-D density shape [2, 200, 100, 50, 50, 1]
    (ReLU hidden layers, linear scalar output). With all-zero weights the
    energy is the final bias, i.e. 0 at initialization; the normalizer offset
    b is a separate scalar owned by the training state, not a layer bias.
    """

    base_is_carrier = False

    def __init__(self, widths: list[int] | None = None, base=None, rng: PortableRng | None = None):
        self.net = Mlp(widths if widths is not None else DENSITY_WIDTHS, rng)
        if self.net.widths[-1] != 1:
            raise ValueError("energy networks must end in a scalar output")
        self.dim = self.net.widths[0]
        self.base = base
        if base is not None and getattr(base, "dim", self.dim) != self.dim:
            raise ValueError("base distribution dimension does not match the model")

    @property
    def theta(self) -> np.ndarray:
        return self.net.theta

    @theta.setter
    def theta(self, value: np.ndarray) -> None:
        self.net.theta = value

    @property
    def n_params(self) -> int:
        return self.net.n_params

    def energy(self, x: np.ndarray) -> np.ndarray:
        out, _ = self.net.forward(np.asarray(x, dtype=np.float64))
        return out[:, 0]

    def energy_vjp(self, x: np.ndarray, cotangent: np.ndarray) -> np.ndarray:
        _, cache = self.net.forward(np.asarray(x, dtype=np.float64))
        return self.net.backward(cache, np.asarray(cotangent, dtype=np.float64).reshape(-1, 1))

    def energy_vjp_prepared(self, x: np.ndarray):
        """One forward pass shared between the energy values and later vjp calls."""
        out, cache = self.net.forward(np.asarray(x, dtype=np.float64))

        def vjp(cotangent: np.ndarray) -> np.ndarray:
            return self.net.backward(cache, np.asarray(cotangent, dtype=np.float64).reshape(-1, 1))

        return out[:, 0], vjp
