"""Recursive MMSE filters for both ends of the link.

Transmitter side: a scalar Kalman filter produces xbreve(t) = E{x(t) | gamma^t}
from the noisy observations, together with its gain/variance schedules.  When
the process and observation noises are correlated (V_wv != 0) the exact filter
also carries a cross gain that predicts the pending process noise w(t) from
the current innovation; with V_wv = 0 the recursions reduce to the familiar
textbook form.

Receiver side: the decoder estimates the transmitted source from the delayed
channel outputs y(0) .. y(t-1).  For a source that is itself a first-order
chain driven by independent innovations (the plant state, or the transmitter
estimate when V_wv = 0) a scalar predict/update recursion is exact.  For the
correlated case an augmented two-state recursion tracks (x(t), p(t)) jointly,
where p(t) is the transmitter's one-step predictor, and remains exact.

All second moments are taken about the deterministic mean path; estimators
are affine around it.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .model import mean_trajectory


@dataclass(frozen=True)
class GainSchedule:
    """Transmitter-filter schedules.

    Lengths: L, Vxi, sigma_breve_sq, innovation_var, cross_gain, pred_var and
    filtered_error_var have T+1 entries (times 0 .. T); beta and pred_gain
    have T entries (entry t couples times t and t+1).
    """

    L: np.ndarray                   # innovation gain of the filtered estimate
    Vxi: np.ndarray                 # one-step prediction error variance E xi(t)^2
    beta: np.ndarray                # innovation scale of the estimate chain, beta(t)^2 = L(t+1)^2 innovation_var(t+1)
    sigma_breve_sq: np.ndarray      # variance of the transmitter estimate xbreve(t)
    innovation_var: np.ndarray      # variance of gamma(t) - c(t) * (predicted xbreve)
    cross_gain: np.ndarray          # gain from innovation to E{w(t) | gamma^t}; zero when V_wv = 0
    pred_gain: np.ndarray           # innovation -> next one-step predictor coefficient
    pred_var: np.ndarray            # variance of the one-step predictor p(t)
    filtered_error_var: np.ndarray  # E (x(t) - xbreve(t))^2


@dataclass(frozen=True)
class DecoderSchedule:
    """Receiver schedules for a scalar source chain; entry i is time t = i+1.

    R(t) is the error variance of the estimate from y^{t-1} (prior), Q(t) the
    error variance after y(t) is also absorbed (posterior), K the encoder
    scale factors, and gain the innovation gain used by the decoder filter.
    """

    K: np.ndarray
    R: np.ndarray
    Q: np.ndarray
    gain: np.ndarray


@dataclass(frozen=True)
class CoupledDecoderSchedule:
    """Exact receiver schedule for the filtered-transmission scheme.

    Tracks the pair (x(t), p(t)) so the recursion stays exact when process
    and observation noise are correlated.  Entry i of ``mse`` is
    E (x(t) - xhat(t))^2 at t = i+1; A, C and gain drive the sample filter
    for the transitions t = 1 .. T-1.
    """

    K: np.ndarray      # encoder scale factors, t = 1 .. T
    mse: np.ndarray    # exact per-step estimation error, t = 1 .. T
    A: np.ndarray      # (T-1, 2, 2) state transitions
    C: np.ndarray      # (T-1, 2) observation rows
    gain: np.ndarray   # (T-1, 2) filter gains


def power_scale(sigma_sq, channel):
    """Per-step encoder scale k_t = sqrt(P(t)) / sigma_t, with k_t = 0 when
    the source variance vanishes (a zero-variance source carries nothing).

    ``sigma_sq`` has T+1 entries (times 0 .. T); the returned schedule has T
    entries, element i for time t = i+1.
    """
    sigma_sq = np.asarray(sigma_sq, dtype=float)
    live = sigma_sq[1:] > 0
    return np.where(live, np.sqrt(channel.P / np.where(live, sigma_sq[1:], 1.0)), 0.0)


def transmitter_gain_schedule(params):
    """Exact gain/variance schedules for estimating x(t) from gamma^t."""
    T = params.horizon
    a, b, c, d = params.a, params.b, params.c, params.d
    ww = params.V[:, 0, 0]
    wv = params.V[:, 0, 1]
    vv = params.V[:, 1, 1]

    L = np.zeros(T + 1)
    Vxi = np.zeros(T + 1)
    vi = np.zeros(T + 1)
    wg = np.zeros(T + 1)
    J = np.zeros(T)
    pred_var = np.zeros(T + 1)
    sbs = np.zeros(T + 1)
    fev = np.zeros(T + 1)

    for t in range(T + 1):
        vi[t] = c[t] ** 2 * Vxi[t] + d[t] ** 2 * vv[t]
        if vi[t] > 0:
            L[t] = c[t] * Vxi[t] / vi[t]
            wg[t] = d[t] * wv[t] / vi[t]
        sbs[t] = pred_var[t] + L[t] ** 2 * vi[t]
        fev[t] = (1.0 - L[t] * c[t]) * Vxi[t]
        if t == T:
            break
        # next predictor p(t+1) = a p(t) + J(t) i(t); the cross gain feeds the
        # innovation's information about w(t) forward.
        J[t] = a[t] * L[t] + b[t] * wg[t]
        Vxi[t + 1] = ((a[t] - J[t] * c[t]) ** 2 * Vxi[t]
                      + b[t] ** 2 * ww[t]
                      - 2.0 * b[t] * J[t] * d[t] * wv[t]
                      + J[t] ** 2 * d[t] ** 2 * vv[t])
        pred_var[t + 1] = a[t] ** 2 * pred_var[t] + J[t] ** 2 * vi[t]

    beta = np.abs(L[1:]) * np.sqrt(vi[1:])
    return GainSchedule(L=L, Vxi=Vxi, beta=beta, sigma_breve_sq=sbs,
                        innovation_var=vi, cross_gain=wg, pred_gain=J,
                        pred_var=pred_var, filtered_error_var=fev)


def transmitter_filter(params, schedule, gamma):
    """Run the transmitter filter on one or many observation paths.

    ``gamma`` has shape (..., T+1); returns xbreve with the same shape,
    where xbreve(t) = E{x(t) | gamma^t} (xbreve(0) = x0).
    """
    gamma = np.asarray(gamma, dtype=float)
    T = params.horizon
    if gamma.shape[-1] != T + 1:
        raise ValueError(f"gamma must have {T + 1} entries, got {gamma.shape[-1]}")
    xbar = mean_trajectory(params)
    gam_c = gamma - params.c * xbar  # centered observations

    xb = np.empty_like(gam_c)
    p = np.zeros_like(gam_c[..., 0])  # centered one-step predictor
    for t in range(T + 1):
        innov = gam_c[..., t] - params.c[t] * p
        xb[..., t] = xbar[t] + p + schedule.L[t] * innov
        if t < T:
            p = params.a[t] * p + schedule.pred_gain[t] * innov
    return xb


def decoder_schedule(sigma_sq, channel, params, source_noise_sq):
    """Receiver schedules for transmitting a scalar source chain.

    ``sigma_sq`` is the variance schedule of the transmitted source (T+1
    entries, entry t for time t); ``source_noise_sq`` (T entries) is the
    per-step innovation variance entering the source between t and t+1.
    Exact when the source chain's innovations are independent of its past.
    """
    sigma_sq = np.asarray(sigma_sq, dtype=float)
    source_noise_sq = np.asarray(source_noise_sq, dtype=float)
    if np.any(sigma_sq < 0) or np.any(source_noise_sq < 0):
        raise ValueError("variance inputs must be non-negative")
    T = channel.horizon
    if sigma_sq.size != T + 1:
        raise ValueError(f"sigma_sq must have {T + 1} entries")
    if source_noise_sq.size != T:
        raise ValueError(f"source_noise_sq must have {T} entries")

    K = power_scale(sigma_sq, channel)
    R = np.zeros(T)
    Q = np.zeros(T)
    gain = np.zeros(T)
    R[0] = sigma_sq[1]
    for t in range(1, T + 1):
        i = t - 1
        denom = K[i] ** 2 * R[i] + channel.N[i]
        Q[i] = R[i] * channel.N[i] / denom
        gain[i] = K[i] * R[i] / denom
        if t < T:
            R[i + 1] = params.a[t] ** 2 * Q[i] + source_noise_sq[t]
    return DecoderSchedule(K=K, R=R, Q=Q, gain=gain)


def decoder_filter(schedule, params, y):
    """Run the scalar decoder on one or many received paths.

    ``y`` has shape (..., T) with y[..., 0] == 0; returns xhat of the same
    shape, where element i is the estimate of the source at time i+1 from
    y(0) .. y(i).  The estimate of the plant mean is propagated separately so
    the recursion applies to centered quantities.
    """
    y = np.asarray(y, dtype=float)
    T = params.horizon
    if y.shape[-1] != T:
        raise ValueError(f"y must have {T} entries, got {y.shape[-1]}")
    xbar = mean_trajectory(params)

    xhat = np.empty_like(y)
    m = np.zeros_like(y[..., 0])  # centered estimate of the source at time t
    xhat[..., 0] = xbar[1] + m
    for t in range(1, T):
        innov = y[..., t] - schedule.K[t - 1] * m
        m = params.a[t] * (m + schedule.gain[t - 1] * innov)
        xhat[..., t] = xbar[t + 1] + m
    return xhat


def coupled_decoder_schedule(params, channel, gains=None):
    """Exact decoder schedule for the filtered-transmission scheme.

    Valid for arbitrary V_wv; with V_wv = 0 its per-step errors coincide with
    the scalar ``decoder_schedule`` driven by the estimate chain.
    """
    if gains is None:
        gains = transmitter_gain_schedule(params)
    T = params.horizon
    a, b, c, d = params.a, params.b, params.c, params.d
    ww = params.V[:, 0, 0]
    wv = params.V[:, 0, 1]
    vv = params.V[:, 1, 1]
    L, J, vi = gains.L, gains.pred_gain, gains.innovation_var
    sbs = gains.sigma_breve_sq

    K = power_scale(sbs, channel)

    def noise_cov(t):
        # exogenous noise entering (x(t+1), p(t+1)): (b w(t), J(t) d v(t));
        # the J c xi(t) part of the innovation is linear in the state.
        return np.array([
            [b[t] ** 2 * ww[t], b[t] * J[t] * d[t] * wv[t]],
            [b[t] * J[t] * d[t] * wv[t], J[t] ** 2 * d[t] ** 2 * vv[t]],
        ])

    mse = np.zeros(T)
    A = np.zeros((max(T - 1, 0), 2, 2))
    C = np.zeros((max(T - 1, 0), 2))
    gain = np.zeros((max(T - 1, 0), 2))

    Sig = noise_cov(0)  # Cov(x(1), p(1)); no channel output has arrived yet
    mse[0] = Sig[0, 0]
    for t in range(1, T):
        kt = K[t - 1]
        # received sample y(t) = kt * xbreve(t) + n(t), xbreve = p + L * innovation
        Ct = kt * np.array([L[t] * c[t], 1.0 - L[t] * c[t]])
        var_zeta = (kt * L[t] * d[t]) ** 2 * vv[t] + channel.N[t - 1]
        At = np.array([[a[t], 0.0], [J[t] * c[t], a[t] - J[t] * c[t]]])
        # correlation between the process noise pair and the observation noise
        U = np.array([b[t] * kt * L[t] * d[t] * wv[t],
                      J[t] * d[t] * kt * L[t] * d[t] * vv[t]])
        S = Ct @ Sig @ Ct + var_zeta
        Kt = (At @ Sig @ Ct + U) / S
        Sig = At @ Sig @ At.T + noise_cov(t) - S * np.outer(Kt, Kt)
        Sig = 0.5 * (Sig + Sig.T)
        mse[t] = Sig[0, 0]
        A[t - 1] = At
        C[t - 1] = Ct
        gain[t - 1] = Kt
    return CoupledDecoderSchedule(K=K, mse=mse, A=A, C=C, gain=gain)


def coupled_decoder_filter(schedule, params, y):
    """Run the exact two-state decoder on one or many received paths."""
    y = np.asarray(y, dtype=float)
    T = params.horizon
    if y.shape[-1] != T:
        raise ValueError(f"y must have {T} entries, got {y.shape[-1]}")
    xbar = mean_trajectory(params)

    xhat = np.empty_like(y)
    s = np.zeros(y[..., 0].shape + (2,))  # centered estimate of (x(t), p(t))
    xhat[..., 0] = xbar[1] + s[..., 0]
    for t in range(1, T):
        innov = y[..., t] - s @ schedule.C[t - 1]
        s = s @ schedule.A[t - 1].T + innov[..., None] * schedule.gain[t - 1]
        xhat[..., t] = xbar[t + 1] + s[..., 0]
    return xhat
