"""Stochastic ascent on (theta, b) for density models.

Each step draws a fresh proposal batch, forms the unbiased SNL gradient (or
the NCE loss gradient) and takes a joint Adam/SGD step on the concatenated
parameter vector [theta; b] with a shared learning rate. b is initialized to
the log mean importance weight at the initial parameters, which keeps the
exp(log w - b) cotangents moderate from the first step.

The per-step objective and gradients are computed in one fused pass (one
forward per array); ``objectives.snl_gradients`` / ``nce_gradients`` remain
the plain reference implementations and the fused path is tested against
them.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field

import numpy as np
from scipy.special import expit, log_expit, logsumexp

from .errors import SnlError, TrainingDivergedError
from .objectives import (
    GradientEstimate,
    ImportanceBatch,
    estimate_z,
    snl_objective,
)
from .optim import AdamState, adam_step, sgd_step
from .proposals import sample_and_score
from .rng import PortableRng


@dataclass
class TrainConfig:
    objective: str = "snl"  # "snl" | "nce"
    epochs: int = 25
    learning_rate: float = 1e-3
    batch_size: int = 128
    proposal_samples: int = 1024  # fresh proposal draws per step
    optimizer: str = "adam"  # "adam" | "sgd"
    seed: int = 0
    nce_nu: float | None = None  # None -> proposal_samples / batch_size
    divergence_patience: int = 5

    def validate(self) -> None:
        if self.objective not in ("snl", "nce"):
            raise ValueError(f"unknown objective {self.objective!r}")
        if self.optimizer not in ("adam", "sgd"):
            raise ValueError(f"unknown optimizer {self.optimizer!r}")
        if self.epochs < 0:  # zero epochs legal: returns the initial state
            raise ValueError("epochs must be nonnegative")
        for name in ("batch_size", "proposal_samples"):
            if getattr(self, name) <= 0:
                raise ValueError(f"{name} must be positive")
        if self.learning_rate <= 0:
            raise ValueError("learning_rate must be positive")


@dataclass
class SnlState:
    model: object
    b: float


@dataclass(frozen=True)
class EpochRecord:
    epoch: int
    train_snl: float
    val_snl: float
    b: float
    seconds: float


@dataclass
class TrainResult:
    state: SnlState
    history: list[EpochRecord] = field(default_factory=list)
    best_epoch: int = 0
    best_theta: np.ndarray | None = None
    best_b: float = 0.0


def init_b(model, batch: ImportanceBatch) -> float:
    """Log mean importance weight at the current parameters (the running log Z)."""
    return estimate_z(model, batch).log_mean_weight


def optimizer_step(
    params: np.ndarray,
    grad: np.ndarray,
    lr: float,
    kind: str = "adam",
    opt_state: AdamState | None = None,
) -> tuple[np.ndarray, AdamState | None]:
    """One ascent step on a flat parameter vector; raises on non-finite grads."""
    if kind == "adam":
        if opt_state is None:
            opt_state = AdamState.fresh(params.shape[0])
        opt_state, step = adam_step(opt_state, grad, lr)
        return params + step, opt_state
    if kind == "sgd":
        return params + sgd_step(grad, lr), opt_state
    raise ValueError(f"unknown optimizer {kind!r}")


def _prepared_vjp(model, x: np.ndarray):
    """(energies, cotangent -> flat grad), reusing the forward pass when the
    model supports it."""
    prepared = getattr(model, "energy_vjp_prepared", None)
    if prepared is not None:
        return prepared(x)
    energies = model.energy(x)
    return energies, lambda cot: model.energy_vjp(x, cot)


def _base_terms(model, x: np.ndarray, cached: np.ndarray | None) -> np.ndarray | float:
    if model.base is None:
        return 0.0
    return cached if cached is not None else model.base.log_density(x)


def fused_step(model, b: float, data: np.ndarray, batch: ImportanceBatch, objective: str, proposal=None, nu: float | None = None):
    """(snl value, ascent gradient, diagnostics) for one minibatch.

    For the NCE objective the returned gradient is the ascent direction on
    the negated loss; the SNL value is still reported for metrics.
    """
    n = data.shape[0]
    m = batch.m
    e_data, vjp_data = _prepared_vjp(model, data)
    e_samp, vjp_samp = _prepared_vjp(model, batch.samples)
    base_data = _base_terms(model, data, None)
    base_samp = _base_terms(model, batch.samples, batch.base_log_densities)
    logw = -e_samp + base_samp - batch.proposal_log_densities
    data_term = float(np.mean(-e_data + (base_data if model.base is not None and not model.base_is_carrier else 0.0)))
    log_mean_w = logsumexp(logw) - np.log(m)
    snl_value = data_term - b - float(np.exp(log_mean_w - b)) + 1.0

    diagnostics = (float(np.max(e_samp, initial=-np.inf)), float(np.exp(np.min(logw, initial=np.inf))))

    if objective == "snl":
        grad_theta = vjp_data(np.full(n, -1.0 / n)) + vjp_samp(np.exp(logw - b) / m)
        grad_b = -1.0 + float(np.exp(log_mean_w - b))
        return snl_value, GradientEstimate(grad_theta, grad_b), diagnostics

    if objective == "nce":
        if nu is None:
            nu = m / n
        if not nu > 0:
            raise ValueError(f"noise ratio nu must be positive, got {nu!r}")
        log_nu = np.log(nu)
        log_q_data = proposal.log_density(data)
        g_data = -e_data + (base_data if model.base is not None else 0.0) - b - log_q_data
        g_noise = logw  # -E + log d - log q, still missing -b
        g_noise = g_noise - b
        loss = -float(np.mean(log_expit(g_data - log_nu)))
        loss -= nu / m * float(np.sum(log_expit(log_nu - g_noise)))
        s = expit(log_nu - g_data)
        t = expit(g_noise - log_nu)
        # ascent direction on -loss
        grad_theta = -(vjp_data(s / n) + vjp_samp(-(nu / m) * t))
        grad_b = -float(np.sum(s) / n - (nu / m) * np.sum(t))
        return snl_value, GradientEstimate(grad_theta, grad_b), diagnostics

    raise ValueError(f"unknown objective {objective!r}")


def train_density(
    model,
    proposal,
    train_data: np.ndarray,
    val_data: np.ndarray,
    config: TrainConfig,
    b: float | None = None,
) -> TrainResult:
    """Run the ascent loop; returns the final state and per-epoch metrics.

    ``b=None`` initializes b from a seeded proposal batch; passing a value
    resumes from an earlier run (optimizer moments start fresh). Validation
    uses one fixed, seeded proposal batch for the whole run. If the step
    objective is non-finite for ``divergence_patience`` consecutive steps the
    run aborts with diagnostics.
    """
    config.validate()
    train_data = np.asarray(train_data, dtype=np.float64)
    val_data = np.asarray(val_data, dtype=np.float64)
    root = PortableRng(config.seed)
    shuffle_rng = root.split("shuffle")
    proposal_rng = root.split("proposal")
    m = config.proposal_samples

    if b is None:
        init_batch = sample_and_score(proposal, root.split("init-b"), m, base=model.base)
        b = init_b(model, init_batch)
    b = float(b)

    val_batch = sample_and_score(proposal, root.split("validation"), m, base=model.base)

    opt_state: AdamState | None = None
    n = train_data.shape[0]
    result = TrainResult(state=SnlState(model, b))
    best_val = -np.inf
    bad_streak = 0
    last_diag = (np.nan, np.nan)
    step_count = 0

    for epoch in range(1, config.epochs + 1):
        started = time.perf_counter()
        order = shuffle_rng.permutation(n)
        step_values = []
        for lo in range(0, n, config.batch_size):
            step_count += 1
            batch_x = train_data[order[lo : lo + config.batch_size]]
            prop = sample_and_score(proposal, proposal_rng, m, base=model.base)
            try:
                value, grads, diag = fused_step(
                    model, b, batch_x, prop, config.objective, proposal=proposal, nu=config.nce_nu
                )
            except SnlError:
                value, grads, diag = np.nan, None, last_diag
            last_diag = diag
            grad_vec = (
                None
                if grads is None
                else np.concatenate([grads.grad_theta, [grads.grad_b]])
            )
            if not np.isfinite(value) or grad_vec is None or not np.all(np.isfinite(grad_vec)):
                bad_streak += 1
                if bad_streak >= config.divergence_patience:
                    raise TrainingDivergedError(
                        step=step_count, max_energy=last_diag[0], min_weight=last_diag[1]
                    )
                continue
            bad_streak = 0
            params = np.concatenate([model.theta, [b]])
            params, opt_state = optimizer_step(params, grad_vec, config.learning_rate, config.optimizer, opt_state)
            model.theta = params[:-1]
            b = float(params[-1])
            step_values.append(value)

        val_snl = np.nan
        try:
            est = estimate_z(model, val_batch)
            val_snl = snl_objective(model, b, val_data, est.log_mean_weight).value
        except SnlError:
            pass
        record = EpochRecord(
            epoch=epoch,
            train_snl=float(np.mean(step_values)) if step_values else np.nan,
            val_snl=float(val_snl),
            b=b,
            seconds=time.perf_counter() - started,
        )
        result.history.append(record)
        if np.isfinite(val_snl) and val_snl > best_val:
            best_val = val_snl
            result.best_epoch = epoch
            result.best_theta = model.theta.copy()
            result.best_b = b

    result.state = SnlState(model, b)
    if result.best_theta is None:
        result.best_theta = model.theta.copy()
        result.best_b = b
    return result
