"""
Hamiltonian Monte Carlo with a fixed number of leapfrog steps, step size
tuned by dual averaging during burn-in and a diagonal mass matrix estimated
in the second half of burn-in.
"""
from typing import Callable, List, Optional, Tuple

import numpy as np

from prefsample.inference.posterior import PosteriorDraws, SamplerConfig
from prefsample.utils.errors import NonFiniteDensityError, SamplerError
from prefsample.utils.logger import get_logger
from prefsample.utils.seed_management import get_generator

LogDensity = Callable[[np.ndarray], Tuple[float, np.ndarray]]

MAX_ENERGY_ERROR = 1000.0
MAX_DIVERGENT_FRACTION = 0.2
STEP_JITTER = 0.1
LOG_STEP_BOUNDS = (-25.0, 10.0)


class DualAveraging:
    """Step size adaptation towards a target acceptance probability"""

    def __init__(self, step_size: float, target_accept: float, gamma: float = 0.05, t0: float = 10.0,
                 kappa: float = 0.75):
        self.target_accept = target_accept
        self.gamma = gamma
        self.t0 = t0
        self.kappa = kappa
        self.restart(step_size)

    def restart(self, step_size: float):
        self.mu = np.log(10.0 * step_size)
        self.h_bar = 0.0
        self.log_step_bar = 0.0
        self.t = 0

    def update(self, accept_prob: float) -> float:
        self.t += 1
        eta = 1.0 / (self.t + self.t0)
        self.h_bar = (1.0 - eta) * self.h_bar + eta * (self.target_accept - accept_prob)
        log_step = self.mu - np.sqrt(self.t) / self.gamma * self.h_bar
        log_step = float(np.clip(log_step, *LOG_STEP_BOUNDS))
        weight = self.t ** (-self.kappa)
        self.log_step_bar = weight * log_step + (1.0 - weight) * self.log_step_bar
        return float(np.exp(log_step))

    @property
    def final_step_size(self) -> float:
        return float(np.exp(self.log_step_bar))


def _evaluate(logpost: LogDensity, theta: np.ndarray) -> Tuple[float, Optional[np.ndarray]]:
    try:
        value, grad = logpost(theta)
    except NonFiniteDensityError:
        return -np.inf, None
    value = float(value)
    grad = np.asarray(grad, dtype=float)
    if not (np.isfinite(value) and np.all(np.isfinite(grad))):
        return -np.inf, None
    return value, grad


def _leapfrog(logpost: LogDensity, theta: np.ndarray, momentum: np.ndarray, grad: np.ndarray, step: float,
              n_steps: int, inv_mass: np.ndarray):
    """Returns (theta, momentum, logp, grad); logp is -inf when the trajectory left the support"""
    theta = theta.copy()
    momentum = momentum + 0.5 * step * grad
    logp = -np.inf
    for i in range(n_steps):
        theta = theta + step * inv_mass * momentum
        logp, grad = _evaluate(logpost, theta)
        if grad is None:
            return theta, momentum, -np.inf, None
        if i < n_steps - 1:
            momentum = momentum + step * grad
    momentum = momentum + 0.5 * step * grad
    return theta, momentum, logp, grad


def _transition(logpost: LogDensity, theta: np.ndarray, logp: float, grad: np.ndarray, step: float,
                n_steps: int, inv_mass: np.ndarray, rng: np.random.Generator):
    """One HMC proposal. Returns (theta, logp, grad, accept_prob, divergent)."""
    momentum = rng.standard_normal(theta.shape[0]) / np.sqrt(inv_mass)
    h0 = logp - 0.5 * np.sum(inv_mass * momentum ** 2)
    new_theta, new_momentum, new_logp, new_grad = _leapfrog(logpost, theta, momentum, grad, step, n_steps, inv_mass)
    if new_grad is None:
        return theta, logp, grad, 0.0, True
    h1 = new_logp - 0.5 * np.sum(inv_mass * new_momentum ** 2)
    log_ratio = h1 - h0
    if not np.isfinite(log_ratio) or -log_ratio > MAX_ENERGY_ERROR:
        return theta, logp, grad, 0.0, True
    accept_prob = float(min(1.0, np.exp(log_ratio)))
    if rng.random() < accept_prob:
        return new_theta, new_logp, new_grad, accept_prob, False
    return theta, logp, grad, accept_prob, False


def _find_reasonable_step(logpost: LogDensity, theta: np.ndarray, logp: float, grad: np.ndarray,
                          inv_mass: np.ndarray, rng: np.random.Generator, max_rounds: int = 50) -> float:
    """Double or halve a unit step until a single leapfrog step crosses acceptance 1/2"""
    step = 1.0

    def one_step_accept(eps: float) -> float:
        momentum = rng.standard_normal(theta.shape[0]) / np.sqrt(inv_mass)
        h0 = logp - 0.5 * np.sum(inv_mass * momentum ** 2)
        _, new_momentum, new_logp, new_grad = _leapfrog(logpost, theta, momentum, grad, eps, 1, inv_mass)
        if new_grad is None:
            return 0.0
        log_ratio = new_logp - 0.5 * np.sum(inv_mass * new_momentum ** 2) - h0
        return float(np.exp(min(log_ratio, 0.0))) if np.isfinite(log_ratio) else 0.0

    accept = one_step_accept(step)
    direction = 1.0 if accept > 0.5 else -1.0
    for _ in range(max_rounds):
        if direction > 0 and not accept > 0.5:
            break
        if direction < 0 and not accept < 0.5:
            break
        candidate = step * 2.0 ** direction
        if not LOG_STEP_BOUNDS[0] <= np.log(candidate) <= LOG_STEP_BOUNDS[1]:
            break
        step = candidate
        accept = one_step_accept(step)
    return step


def _regularized_variance(window: List[np.ndarray]) -> np.ndarray:
    samples = np.asarray(window)
    n = samples.shape[0]
    var = np.var(samples, axis=0, ddof=1)
    # shrink towards 1e-3 like the usual windowed metric adaptation
    return (n / (n + 5.0)) * var + 1e-3 * (5.0 / (n + 5.0))


def hmc_sample(logpost: LogDensity, init: np.ndarray, cfg: SamplerConfig,
               names: Optional[List[str]] = None) -> PosteriorDraws:
    """
    Run one HMC chain.

    :param logpost: theta -> (log density, gradient)
    :param init: starting point, must have a finite log density
    :param cfg: iterations, burn-in, leapfrog steps, target acceptance and seed
    :param names: parameter labels, defaults to theta_1..theta_d
    :raises SamplerError: if the log density is not finite at init, or more than
                          20% of the kept iterations diverged
    """
    logger = get_logger()
    rng = get_generator(cfg.seed)
    theta = np.array(init, dtype=float)
    dim = theta.shape[0]
    names = names or [f"theta_{i + 1}" for i in range(dim)]

    logp, grad = _evaluate(logpost, theta)
    if grad is None:
        raise SamplerError("Log density is not finite at the initial point")

    inv_mass = np.ones(dim)
    step = _find_reasonable_step(logpost, theta, logp, grad, inv_mass, rng)
    adapter = DualAveraging(step, cfg.target_accept)
    window_start, window_end = cfg.n_burn // 2, (3 * cfg.n_burn) // 4
    window: List[np.ndarray] = []

    kept = np.empty((cfg.n_keep, dim))
    accept_sum = 0.0
    n_divergent = 0
    for it in range(cfg.n_iter):
        burning = it < cfg.n_burn
        eps = step if burning else step * rng.uniform(1.0 - STEP_JITTER, 1.0 + STEP_JITTER)
        theta, logp, grad, accept_prob, divergent = _transition(
            logpost, theta, logp, grad, eps, cfg.leapfrog_steps, inv_mass, rng)

        if burning:
            step = adapter.update(accept_prob)
            if window_start <= it < window_end:
                window.append(theta.copy())
            if it == window_end - 1 and len(window) >= 10:
                inv_mass = _regularized_variance(window)
                step = _find_reasonable_step(logpost, theta, logp, grad, inv_mass, rng)
                adapter.restart(step)
                logger.debug(f"hmc_sample: metric updated from {len(window)} draws, restart step {step:.4g}")
            if it == cfg.n_burn - 1:
                step = adapter.final_step_size
                logger.debug(f"hmc_sample: adapted step size {step:.4g}")
        else:
            kept[it - cfg.n_burn] = theta
            accept_sum += accept_prob
            n_divergent += int(divergent)

    divergent_fraction = n_divergent / cfg.n_keep
    if divergent_fraction > MAX_DIVERGENT_FRACTION:
        raise SamplerError(f"{n_divergent} of {cfg.n_keep} kept HMC iterations diverged "
                           f"(step size {step:.3g}); check parameter scales")
    accept_rate = accept_sum / cfg.n_keep
    logger.debug(f"hmc_sample: seed={cfg.seed}, accept={accept_rate:.3f}, divergent={n_divergent}, step={step:.4g}")
    return PosteriorDraws(names=list(names), draws=kept, accept_rate=accept_rate, seed=cfg.seed,
                          step_size=step, n_divergent=n_divergent)
