"""Conditional energy models p(y|x) and their SNL training/evaluation.

The conditional density is p(y|x) = e^{-E(x,y)} / Z_theta(x) with a per-input
normalizer Z_theta(x) = integral e^{-E(x,y)} dy. A normalizer network
b_phi(x) plays the role of b pointwise:

    mean_i [ -E(x_i, y_i) - b_phi(x_i) - e^{-b_phi(x_i)} Z_hat(x_i) + 1 ],

with Z_hat(x_i) the per-point importance estimate from M proposal draws.
Training takes joint gradient steps on (theta, phi); when the proposal is a
mixture density network it is refitted by one interleaved maximum-likelihood
step per energy step, reading the feature vector h_x as a constant.

Architecture: feature extractor 1 -> 10 -> 10 -> 10 (ReLU throughout)
producing h_x; y branch 1 -> 16 -> 32 -> 64 -> 128; joint energy head on
concat(h_x, y-features), 138 -> 10 -> 1; normalizer net 10 -> 10 -> 1 on h_x.

Evaluation reports the importance-sampled conditional log-likelihood

    mean_i [ -E(x_i,y_i) - b_i - log (1/M) sum_m e^{-E(x_i,y_m) - b_i} ]

on one shared set of M draws from an unconditional proposal fitted to the
training targets; the weights are deliberately not divided by the proposal
density, so values are relative to the proposal measure. b_i cancels in the
limit and exactly in the display above; it is kept so the companion linear
bound mean_i [ -E_i - b_i - e^{-b_i} Z_hat_i + 1 ] (same samples, hence never
above the log form pointwise) and the normalization check can be reported.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field

import numpy as np
from scipy.special import expit, log_expit, logsumexp

from .errors import TrainingDivergedError
from .nets import Mlp
from .optim import AdamState, adam_step
from .proposals import MdnProposal, mdn_log_likelihood_and_fit
from .rng import PortableRng

FEATURE_WIDTHS = [1, 10, 10, 10]
Y_WIDTHS = [1, 16, 32, 64, 128]
HEAD_WIDTHS = [FEATURE_WIDTHS[-1] + Y_WIDTHS[-1], 10, 1]
NORMALIZER_WIDTHS = [FEATURE_WIDTHS[-1], 10, 1]


class ConditionalEnergyModel:
    """E(x, y) = head(concat(feature(x), ybranch(y)))."""

    def __init__(self, rng: PortableRng | None = None):
        self.feature_net = Mlp(FEATURE_WIDTHS, rng.split("feature") if rng else None, relu_output=True)
        self.y_net = Mlp(Y_WIDTHS, rng.split("y") if rng else None, relu_output=True)
        self.head = Mlp(HEAD_WIDTHS, rng.split("head") if rng else None)

    @property
    def theta(self) -> np.ndarray:
        return np.concatenate([self.feature_net.theta, self.y_net.theta, self.head.theta])

    @theta.setter
    def theta(self, flat: np.ndarray) -> None:
        sizes = [self.feature_net.n_params, self.y_net.n_params, self.head.n_params]
        if flat.shape != (sum(sizes),):
            raise ValueError("parameter vector has the wrong length")
        a, b = sizes[0], sizes[0] + sizes[1]
        self.feature_net.theta = flat[:a]
        self.y_net.theta = flat[a:b]
        self.head.theta = flat[b:]

    @property
    def n_params(self) -> int:
        return self.feature_net.n_params + self.y_net.n_params + self.head.n_params

    def features(self, x: np.ndarray) -> np.ndarray:
        h, _ = self.feature_net.forward(np.asarray(x, dtype=np.float64).reshape(-1, 1))
        return h

    def energy_pairs(self, x: np.ndarray, y: np.ndarray) -> np.ndarray:
        h = self.features(x)
        g, _ = self.y_net.forward(np.asarray(y, dtype=np.float64).reshape(-1, 1))
        e, _ = self.head.forward(np.column_stack([h, g]))
        return e[:, 0]

    def energy_grid_shared(self, x: np.ndarray, ys: np.ndarray, chunk: int = 64) -> np.ndarray:
        """E(x_i, y_m) for a shared y set, shape (n, m).

        The head's first layer splits over the concat, so the y-branch and
        its head contribution are computed once and broadcast against the
        per-point feature part; points are processed in chunks to bound
        memory at chunk * m * 10 doubles.
        """
        h = self.features(x)
        g, _ = self.y_net.forward(np.asarray(ys, dtype=np.float64).reshape(-1, 1))
        w1, w2 = self.head.weights
        b1, b2 = self.head.biases
        k = h.shape[1]
        h_part = h @ w1[:k]  # (n, 10)
        g_part = g @ w1[k:]  # (m, 10)
        n, m = h.shape[0], g.shape[0]
        out = np.empty((n, m))
        for lo in range(0, n, chunk):
            z = h_part[lo : lo + chunk, None, :] + g_part[None, :, :] + b1
            np.maximum(z, 0.0, out=z)
            out[lo : lo + chunk] = z @ w2[:, 0] + b2[0]
        return out


class NormalizerNet:
    """b_phi on the feature vector h_x."""

    def __init__(self, rng: PortableRng | None = None):
        self.net = Mlp(NORMALIZER_WIDTHS, rng)

    @property
    def phi(self) -> np.ndarray:
        return self.net.theta

    @phi.setter
    def phi(self, flat: np.ndarray) -> None:
        self.net.theta = flat

    def values(self, h: np.ndarray) -> np.ndarray:
        out, _ = self.net.forward(h)
        return out[:, 0]


class BilinearConditionalModel:
    """Closed-form conditional oracle E(x, y) = -theta x y with a standard
    Gaussian carrier over y: Z(x) = E_phi[e^{theta x y}] = e^{(theta x)^2 / 2}."""

    def __init__(self, theta: float = 1.0):
        self.theta = float(theta)

    def energy_pairs(self, x: np.ndarray, y: np.ndarray) -> np.ndarray:
        return -self.theta * np.asarray(x, dtype=np.float64) * np.asarray(y, dtype=np.float64)

    def energy_grid_shared(self, x: np.ndarray, ys: np.ndarray, chunk: int = 64) -> np.ndarray:
        return -self.theta * np.outer(np.asarray(x, dtype=np.float64), np.asarray(ys, dtype=np.float64))

    def exact_log_z(self, x: np.ndarray) -> np.ndarray:
        return 0.5 * (self.theta * np.asarray(x, dtype=np.float64)) ** 2

    def exact_conditional_log_likelihood(self, x: np.ndarray, y: np.ndarray) -> float:
        """mean_i [theta x_i y_i - (theta x_i)^2 / 2], relative to the carrier."""
        return float(np.mean(-self.energy_pairs(x, y) - self.exact_log_z(x)))


def snl_regression_objective(energies: np.ndarray, b_values: np.ndarray, log_z: np.ndarray) -> float:
    """mean_i [ -E_i - b_i - e^{log_z_i - b_i} + 1 ] from per-pair arrays."""
    e = np.asarray(energies, dtype=np.float64)
    b = np.asarray(b_values, dtype=np.float64)
    lz = np.asarray(log_z, dtype=np.float64)
    return float(np.mean(-e - b - np.exp(lz - b) + 1.0))


@dataclass
class RegressionTrainConfig:
    objective: str = "snl"  # "snl" | "nce"
    epochs: int = 40
    learning_rate: float = 1e-3
    batch_size: int = 64
    samples_per_point: int = 16
    seed: int = 0
    nce_nu: float | None = None  # None -> samples_per_point
    mdn_learning_rate: float = 1e-3
    divergence_patience: int = 5

    def validate(self) -> None:
        if self.objective not in ("snl", "nce"):
            raise ValueError(f"unknown objective {self.objective!r}")
        if self.epochs < 0:  # zero epochs legal: returns the initial parameters
            raise ValueError("epochs must be nonnegative")
        for name in ("batch_size", "samples_per_point"):
            if getattr(self, name) <= 0:
                raise ValueError(f"{name} must be positive")


@dataclass(frozen=True)
class RegressionEpochRecord:
    epoch: int
    train_objective: float
    val_snl: float
    seconds: float


@dataclass
class RegressionTrainResult:
    model: ConditionalEnergyModel
    normalizer: NormalizerNet | None
    history: list[RegressionEpochRecord] = field(default_factory=list)
    best_epoch: int = 0
    best_theta: np.ndarray | None = None
    best_phi: np.ndarray | None = None


def _propose(proposal, rng: PortableRng, h: np.ndarray, n: int, m: int):
    """Per-point samples (n, m) with their conditional/unconditional log q."""
    if isinstance(proposal, MdnProposal):
        ys = proposal.sample(rng, h, m)
        log_q = proposal.log_density(h, ys)
    else:
        ys = proposal.sample(rng, n * m).reshape(n, m)
        log_q = proposal.log_density(ys.reshape(-1, 1)).reshape(n, m)
    return ys, log_q


def _regression_step(model, normalizer, x, y, ys, log_q, log_q_data, objective, nu):
    """Objective value, ascent gradient over [theta; phi], and diagnostics.

    ys/log_q are the per-point proposal draws (n, m); log_q_data is q at the
    observed pairs (only read by the ranking loss). The three sub-networks
    are evaluated once; data and sample rows share the y-branch and head
    passes, with data rows first.
    """
    n, m = ys.shape
    h, cache_f = model.feature_net.forward(x.reshape(-1, 1))
    y_all = np.concatenate([y, ys.ravel()]).reshape(-1, 1)
    g_all, cache_y = model.y_net.forward(y_all)
    h_rows = np.concatenate([h, np.repeat(h, m, axis=0)])
    e_all, cache_h = model.head.forward(np.column_stack([h_rows, g_all]))
    e_data = e_all[:n, 0]
    e_samp = e_all[n:, 0].reshape(n, m)

    if normalizer is not None:
        b_out, cache_n = normalizer.net.forward(h)
        b_vals = b_out[:, 0]
    else:
        b_vals, cache_n = np.zeros(n), None

    logw = -e_samp - log_q
    log_z = logsumexp(logw, axis=1) - np.log(m)

    if objective == "snl":
        value = snl_regression_objective(e_data, b_vals, log_z)
        d_e_data = np.full(n, -1.0 / n)
        d_e_samp = np.exp(logw - b_vals[:, None]) / (n * m)
        d_b = (-1.0 + np.exp(log_z - b_vals)) / n
    else:
        # logistic classification of each observed pair against its own nu
        # noise draws, on scores G = -E - b - log q.
        if nu is None:
            nu = float(m)
        if not nu > 0:
            raise ValueError(f"noise ratio nu must be positive, got {nu!r}")
        log_nu = np.log(nu)
        g_data = -e_data - b_vals - log_q_data
        g_samp = -e_samp - b_vals[:, None] - log_q
        loss = float(
            np.mean(-log_expit(g_data - log_nu))
            + nu * np.mean(np.mean(-log_expit(log_nu - g_samp), axis=1))
        )
        value = -loss
        s = expit(log_nu - g_data)
        t = expit(g_samp - log_nu)
        d_e_data = -s / n
        d_e_samp = nu * t / (n * m)
        d_b = (-s + nu * t.mean(axis=1)) / n

    cot = np.concatenate([d_e_data, d_e_samp.ravel()]).reshape(-1, 1)
    g_head, d_input = model.head.backward(cache_h, cot, need_input_grad=True)
    k = h.shape[1]
    d_h_rows, d_g = d_input[:, :k], d_input[:, k:]
    g_y = model.y_net.backward(cache_y, d_g)
    d_h = d_h_rows[:n] + d_h_rows[n:].reshape(n, m, k).sum(axis=1)
    grads = [None, g_y, g_head]
    if normalizer is not None:
        g_norm, d_h_norm = normalizer.net.backward(cache_n, d_b.reshape(-1, 1), need_input_grad=True)
        d_h = d_h + d_h_norm
        grads.append(g_norm)
    grads[0] = model.feature_net.backward(cache_f, d_h)
    diagnostics = (float(np.max(e_samp)) if m else float("nan"), float(np.min(logw)) if m else float("nan"))
    return value, np.concatenate(grads), diagnostics


def _params(model, normalizer):
    parts = [model.theta]
    if normalizer is not None:
        parts.append(normalizer.phi)
    return np.concatenate(parts)


def _set_params(model, normalizer, flat):
    model.theta = flat[: model.n_params]
    if normalizer is not None:
        normalizer.phi = flat[model.n_params :]


def validation_snl(model, normalizer, proposal, x, y, m, rng):
    """Per-point SNL on held-out pairs with fresh proposal draws."""
    h = model.features(x)
    ys, log_q = _propose(proposal, rng, h, x.shape[0], m)
    e_data = model.energy_pairs(x, y)
    e_samp = _pointwise_energies(model, h, ys)
    b_vals = normalizer.values(h) if normalizer is not None else np.zeros(x.shape[0])
    log_z = logsumexp(-e_samp - log_q, axis=1) - np.log(m)
    return snl_regression_objective(e_data, b_vals, log_z)


def _pointwise_energies(model, h, ys):
    """E(x_i, y_im) for per-point y draws, via the split head layer."""
    n, m = ys.shape
    g, _ = model.y_net.forward(ys.reshape(-1, 1))
    w1, w2 = model.head.weights
    b1, b2 = model.head.biases
    k = h.shape[1]
    z = (h @ w1[:k])[:, None, :] + (g @ w1[k:]).reshape(n, m, -1) + b1
    np.maximum(z, 0.0, out=z)
    return z @ w2[:, 0] + b2[0]


def train_regression(model, normalizer, proposal, train_pairs, val_pairs, config):
    """Minibatch ascent on the conditional objective.

    train_pairs/val_pairs are (x, y) tuples of 1-d arrays. The proposal is
    either an MdnProposal on the feature vector (refit by one likelihood step
    after every energy step, against the current features) or any fixed
    unconditional distribution with sample/log_density.
    """
    config.validate()
    x_tr, y_tr = (np.asarray(a, dtype=np.float64) for a in train_pairs)
    x_val, y_val = (np.asarray(a, dtype=np.float64) for a in val_pairs)
    n = x_tr.shape[0]
    root = PortableRng(config.seed)
    shuffle_rng = root.split("shuffle")
    proposal_rng = root.split("proposal")
    val_rng = root.split("validation")
    mdn = proposal if isinstance(proposal, MdnProposal) else None

    opt = AdamState.fresh(_params(model, normalizer).size)
    mdn_opt = AdamState.fresh(mdn.theta.size) if mdn is not None else None
    result = RegressionTrainResult(model=model, normalizer=normalizer)
    best_val = -np.inf
    bad_streak = 0
    step_count = 0
    for epoch in range(config.epochs):
        started = time.perf_counter()
        order = shuffle_rng.split_index(epoch).permutation(n)
        values = []
        for lo in range(0, n, config.batch_size):
            idx = order[lo : lo + config.batch_size]
            x_b, y_b = x_tr[idx], y_tr[idx]
            h_b = model.features(x_b)
            ys, log_q = _propose(proposal, proposal_rng, h_b, idx.size, config.samples_per_point)
            if config.objective == "nce":
                if mdn is not None:
                    log_q_data = mdn.log_density(h_b, y_b[:, None])[:, 0]
                else:
                    log_q_data = proposal.log_density(y_b.reshape(-1, 1))
            else:
                log_q_data = None
            value, grad, diag = _regression_step(
                model, normalizer, x_b, y_b, ys, log_q,
                log_q_data, config.objective, config.nce_nu,
            )
            step_count += 1
            if not (np.isfinite(value) and np.all(np.isfinite(grad))):
                bad_streak += 1
                if bad_streak >= config.divergence_patience:
                    raise TrainingDivergedError(step_count, diag[0], diag[1])
                continue
            bad_streak = 0
            values.append(value)
            opt, step = adam_step(opt, grad, config.learning_rate)
            _set_params(model, normalizer, _params(model, normalizer) + step)
            if mdn is not None:
                _, mdn_grad = mdn.loglik_gradient(h_b, y_b)
                mdn_opt, mdn_step = adam_step(mdn_opt, mdn_grad, config.mdn_learning_rate)
                mdn.theta = mdn.theta + mdn_step
        val = validation_snl(
            model, normalizer, proposal, x_val, y_val,
            config.samples_per_point, val_rng.split_index(epoch),
        )
        result.history.append(RegressionEpochRecord(
            epoch=epoch + 1,
            train_objective=float(np.mean(values)) if values else float("nan"),
            val_snl=float(val),
            seconds=time.perf_counter() - started,
        ))
        if np.isfinite(val) and val > best_val:
            best_val = float(val)
            result.best_epoch = epoch + 1
            result.best_theta = model.theta.copy()
            result.best_phi = normalizer.phi.copy() if normalizer is not None else None
    if result.best_theta is None:
        result.best_theta = model.theta.copy()
        result.best_phi = normalizer.phi.copy() if normalizer is not None else None
    return result


@dataclass(frozen=True)
class RegressionEvalReport:
    l_is: float
    l_is_se: float
    l_snl: float
    l_snl_se: float
    unnormalized: bool
    n_points: int
    n_samples: int

    def lines(self) -> list[str]:
        out = [
            f"l_is {self.l_is:.6f}",
            f"l_is_se {self.l_is_se:.6f}",
            f"l_snl {self.l_snl:.6f}",
            f"l_snl_se {self.l_snl_se:.6f}",
            f"n_points {self.n_points}",
            f"n_samples {self.n_samples}",
        ]
        if self.unnormalized:
            out.append("UNNORMALIZED model normalizer is far from the sampled estimate; "
                       "the log form is not trustworthy as a likelihood")
        return out


def eval_regression_l_is(model, pairs, proposal, n_samples=20000, rng=None,
                         normalizer_fn=None, flag_threshold=50.0, chunk=64):
    """Importance-sampled conditional log-likelihood on shared proposal draws.

    One set of n_samples y draws is scored against every evaluation point;
    the per-point estimates therefore share randomness and the standard
    errors are computed over draws (each draw contributes the across-point
    mean of its self-normalized weight, whose spread drives the error of
    both forms).
    """
    if rng is None:
        rng = PortableRng(0)
    x, y = (np.asarray(a, dtype=np.float64) for a in pairs)
    n = x.shape[0]
    ys = np.asarray(proposal.sample(rng, n_samples), dtype=np.float64).reshape(-1)
    m = ys.shape[0]

    e_data = model.energy_pairs(x, y)
    b_vals = normalizer_fn(x) if normalizer_fn is not None else np.zeros(n)

    logw = -model.energy_grid_shared(x, ys, chunk=chunk)  # values relative to the proposal measure
    log_zq = logsumexp(logw, axis=1) - np.log(m)
    gap = log_zq - b_vals
    a_is = -e_data - b_vals - gap  # b cancels: -E - log Z_hat
    a_snl = -e_data - b_vals - np.exp(gap) + 1.0
    # per-draw across-point means of the (scaled) weights; their spread over
    # the m shared draws drives the Monte Carlo error of each form.
    v_is = np.exp(logw - log_zq[:, None]).mean(axis=0)
    shifted = logw - b_vals[:, None]
    snl_ok = float(np.max(shifted)) < 600.0
    v_snl = np.exp(shifted).mean(axis=0) if snl_ok else np.zeros(m)

    unnormalized = bool(np.any(np.abs(gap) > flag_threshold))
    l_is = float(np.mean(a_is))
    l_snl = float(np.mean(a_snl))
    # delta method: the only randomness is the shared draws. For the log
    # form d l_is = -mean_m v_is dm; for the linear form the weight enters
    # directly.
    l_is_se = float(np.std(v_is, ddof=1) / np.sqrt(m))
    l_snl_se = float(np.std(v_snl, ddof=1) / np.sqrt(m)) if snl_ok else float("nan")
    return RegressionEvalReport(
        l_is=l_is, l_is_se=l_is_se, l_snl=l_snl, l_snl_se=l_snl_se,
        unnormalized=unnormalized, n_points=n, n_samples=m,
    )
