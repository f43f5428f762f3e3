import numpy as np

from prefsample.inference.posterior import PosteriorDraws, PosteriorSummary

MIN_ESS_DRAWS = 100


def _autocorrelation(x: np.ndarray) -> np.ndarray:
    n = x.shape[0]
    centered = x - np.mean(x)
    size = 1 << int(np.ceil(np.log2(2 * n)))
    spectrum = np.fft.rfft(centered, n=size)
    acov = np.fft.irfft(spectrum * np.conj(spectrum), n=size)[:n] / n
    return acov / acov[0]


def ess(draws: np.ndarray) -> float:
    """
    Effective sample size with the initial positive sequence estimator:
    autocorrelations are summed in adjacent pairs until a pair turns non-positive.
    A constant trace has ess 0; the result never exceeds the number of draws.
    """
    x = np.asarray(draws, dtype=float).ravel()
    n = x.shape[0]
    if n < MIN_ESS_DRAWS:
        raise ValueError(f"ess needs at least {MIN_ESS_DRAWS} draws, got {n}")
    if np.ptp(x) == 0:
        return 0.0
    rho = _autocorrelation(x)
    pair_sum = 0.0
    k = 0
    while 2 * k + 1 < n:
        pair = rho[2 * k] + rho[2 * k + 1]
        if pair <= 0:
            break
        pair_sum += pair
        k += 1
    tau = -1.0 + 2.0 * pair_sum
    if tau <= 0:
        return float(n)
    return float(min(n / tau, n))


def summarize(draws: PosteriorDraws, level: float = 0.90) -> PosteriorSummary:
    """Mean and equal-tailed (1-level)/2, (1+level)/2 quantiles per parameter"""
    if not 0.0 < level < 1.0:
        raise ValueError(f"level must be in (0, 1), got {level}")
    tail = (1.0 - level) / 2.0
    values = draws.draws
    lower, upper = np.quantile(values, [tail, 1.0 - tail], axis=0)
    if values.shape[0] >= MIN_ESS_DRAWS:
        eff = np.array([ess(values[:, j]) for j in range(values.shape[1])])
    else:
        eff = np.full(values.shape[1], np.nan)
    return PosteriorSummary(names=list(draws.names), mean=values.mean(axis=0), lower=lower, upper=upper,
                            ess=eff, level=level)
