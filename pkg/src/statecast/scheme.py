"""End-to-end transmission schemes and their analytic / empirical MSE.

Two schemes share the same architecture (scale the transmitter's best
estimate of the state to the power budget, MMSE-decode the delayed channel
output):

* FullState — the transmitter observes x(t) itself and sends
  z(t) = sqrt(P(t))/sigma_t * x(t).
* NoisyState — the transmitter only sees gamma(t) = c x(t) + d v(t), runs the
  recursive MMSE filter, and transmits its estimate xbreve(t) the same way.

Known means are handled deterministically: encoders scale deviations from the
mean path and decoders add the mean back, so the power budget is spent
entirely on the random part.  With x0 = 0 (the usual setting) this coincides
with scaling the raw state.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from . import kalman
from .model import (
    ROLE_CHANNEL,
    ROLE_MEASUREMENT,
    ROLE_PROCESS,
    _coerce_seed,
    draw_noise,
    mean_trajectory,
    paths_from_noise,
    state_variance,
)


class SchemeKind(enum.Enum):
    FULL_STATE = "FullState"
    NOISY_STATE = "NoisyState"


@dataclass(frozen=True)
class RunResult:
    """Per-step and averaged MSE of one scheme on one configuration.

    Analytic-only results leave the empirical fields as None.  power_used is
    the exact transmit power for analytic runs and the empirical mean of
    z(t)^2 for Monte Carlo runs.
    """

    mse_analytic: np.ndarray
    avg_mse_analytic: float
    power_used: np.ndarray
    samples: int = 0
    mse_empirical: np.ndarray | None = None
    stderr: np.ndarray | None = None
    avg_mse_empirical: float | None = None


@dataclass(frozen=True)
class SchemeSamples:
    """Raw per-sample arrays from one Monte Carlo pipeline run.

    Shapes: x and gamma are (samples, T+1); xbreve is (samples, T+1) for the
    NoisyState scheme and None otherwise; z, y, xhat are (samples, T) with
    y[:, 0] = 0 and column i of z / xhat at time t = i+1.
    """

    x: np.ndarray
    gamma: np.ndarray
    xbreve: np.ndarray | None
    z: np.ndarray
    y: np.ndarray
    xhat: np.ndarray


def _coerce_kind(kind):
    if isinstance(kind, SchemeKind):
        return kind
    return SchemeKind(kind)


def _scalar_chain_ok(params):
    # The transmitter-estimate chain is first order with independent
    # innovations only when process and observation noise are uncorrelated.
    return bool(np.all(params.V[:, 0, 1] == 0.0))


def encode_full_state(params, channel, x):
    """z(t) = sqrt(P(t))/sigma_t * x(t) (deviation form), t = 1 .. T.

    ``x`` has shape (..., T+1); returns shape (..., T).  Steps with
    sigma_t = 0 transmit zero.
    """
    x = np.asarray(x, dtype=float)
    T = params.horizon
    if x.shape[-1] != T + 1:
        raise ValueError(f"x must have {T + 1} entries, got {x.shape[-1]}")
    k = kalman.power_scale(state_variance(params), channel)
    xbar = mean_trajectory(params)
    return k * (x[..., 1:] - xbar[1:])


def encode_noisy_state(params, channel, gamma):
    """Filter the observations, then transmit the scaled estimate.

    Returns (z, xbreve): z(t) = sqrt(P(t))/sigma_t * xbreve(t) with
    sigma_t^2 = E xbreve(t)^2, and xbreve the transmitter-filter output
    (shape (..., T+1)).
    """
    gains = kalman.transmitter_gain_schedule(params)
    xbreve = kalman.transmitter_filter(params, gains, gamma)
    k = kalman.power_scale(gains.sigma_breve_sq, channel)
    xbar = mean_trajectory(params)
    return k * (xbreve[..., 1:] - xbar[1:]), xbreve


def analytic_mse(kind, params, channel):
    """Exact per-step estimation error of the scheme; no sampling.

    FullState: R(t) from the decoder recursion driven by the state variance
    schedule.  NoisyState: the transmitter's filtering error plus the
    decoder's error on the estimate chain — computed by the scalar
    decomposition when process and observation noise are uncorrelated, and by
    the exact coupled recursion otherwise.
    """
    kind = _coerce_kind(kind)
    T = params.horizon
    ww = params.V[:, 0, 0]
    if kind is SchemeKind.FULL_STATE:
        sigma_sq = state_variance(params)
        schedule = kalman.decoder_schedule(
            sigma_sq, channel, params, params.b**2 * ww[:T])
        mse = schedule.R
        live = sigma_sq[1:] > 0
    else:
        gains = kalman.transmitter_gain_schedule(params)
        if _scalar_chain_ok(params):
            schedule = kalman.decoder_schedule(
                gains.sigma_breve_sq, channel, params, gains.beta**2)
            mse = schedule.R + gains.filtered_error_var[1:]
        else:
            mse = kalman.coupled_decoder_schedule(params, channel, gains).mse
        live = gains.sigma_breve_sq[1:] > 0
    power = np.where(live, channel.P, 0.0)
    return RunResult(mse_analytic=mse, avg_mse_analytic=float(np.mean(mse)),
                     power_used=power)


def sample_paths(kind, params, channel, samples, seed):
    """Run the full pipeline (simulate, encode, channel, decode) per sample."""
    kind = _coerce_kind(kind)
    if samples < 1:
        raise ValueError("samples must be >= 1")
    seed = _coerce_seed(seed)
    T = params.horizon

    w, v = draw_noise(params, samples,
                      seed.stream(ROLE_PROCESS), seed.stream(ROLE_MEASUREMENT))
    x, gamma = paths_from_noise(params, w, v)

    if kind is SchemeKind.FULL_STATE:
        z = encode_full_state(params, channel, x)
        xbreve = None
    else:
        z, xbreve = encode_noisy_state(params, channel, gamma)

    n = seed.stream(ROLE_CHANNEL).standard_normal((samples, T)) * np.sqrt(channel.N)
    y = np.zeros_like(z)
    y[:, 1:] = (z + n)[:, :T - 1]

    if kind is SchemeKind.FULL_STATE:
        schedule = kalman.decoder_schedule(
            state_variance(params), channel, params,
            params.b**2 * params.V[:T, 0, 0])
        xhat = kalman.decoder_filter(schedule, params, y)
    else:
        gains = kalman.transmitter_gain_schedule(params)
        if _scalar_chain_ok(params):
            schedule = kalman.decoder_schedule(
                gains.sigma_breve_sq, channel, params, gains.beta**2)
            xhat = kalman.decoder_filter(schedule, params, y)
        else:
            schedule = kalman.coupled_decoder_schedule(params, channel, gains)
            xhat = kalman.coupled_decoder_filter(schedule, params, y)
    return SchemeSamples(x=x, gamma=gamma, xbreve=xbreve, z=z, y=y, xhat=xhat)


def monte_carlo_mse(kind, params, channel, samples, seed):
    """Empirical per-step MSE, its standard error, and empirical power."""
    runs = sample_paths(kind, params, channel, samples, seed)
    analytic = analytic_mse(kind, params, channel)

    sq_err = (runs.x[:, 1:] - runs.xhat) ** 2
    mse_emp = sq_err.mean(axis=0)
    if samples > 1:
        stderr = sq_err.std(axis=0, ddof=1) / np.sqrt(samples)
    else:
        stderr = np.zeros(params.horizon)
    power = (runs.z**2).mean(axis=0)
    return RunResult(
        mse_analytic=analytic.mse_analytic,
        avg_mse_analytic=analytic.avg_mse_analytic,
        power_used=power,
        samples=int(samples),
        mse_empirical=mse_emp,
        stderr=stderr,
        avg_mse_empirical=float(np.mean(mse_emp)),
    )
