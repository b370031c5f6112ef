"""Tapped-delay-line fading channel with Doppler and AWGN.

The power-delay profile is the 23-cluster CDL-A table (TR 38.901,
normalized delays scaled by the configured delay spread).  Each cluster
fades independently per receive antenna as a sum of `num_sinusoids`
equal-power sinusoids with uniform random arrival angles and phases, so
the ensemble autocorrelation is J0(2*pi*f_d*tau) and the envelope is
Rayleigh.  Cluster delays are rounded to whole samples; total mean
channel power is normalized to one per antenna.

Fading gains are evaluated on a coarse time grid and linearly
interpolated (the fading bandwidth is orders of magnitude below the grid
Nyquist rate); tests may request exact per-sample evaluation.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .phy_tx import SAMPLE_RATE

# CDL-A clusters: (normalized delay, power dB).
CDL_A_PROFILE: tuple[tuple[float, float], ...] = (
    (0.0000, -13.4), (0.3819, 0.0), (0.4025, -2.2), (0.5868, -4.0),
    (0.4610, -6.0), (0.5375, -8.2), (0.6708, -9.9), (0.5750, -10.5),
    (0.7618, -7.5), (1.5375, -15.9), (1.8978, -6.6), (2.2242, -16.7),
    (2.1718, -12.4), (2.4942, -15.2), (2.5119, -10.8), (3.0582, -11.3),
    (4.0810, -12.7), (4.4579, -16.2), (4.5695, -18.3), (4.7966, -18.9),
    (5.0066, -16.6), (5.3043, -19.9), (9.6586, -29.7),
)

_GAIN_GRID_STEP = 128  # samples between exact fading evaluations


@dataclass(frozen=True)
class ChannelConfig:
    doppler_hz: float
    delay_spread_s: float = 30e-9
    n_rx: int = 2
    num_sinusoids: int = 32
    sample_rate: float = SAMPLE_RATE

    def __post_init__(self):
        if self.doppler_hz < 0:
            raise ValueError("doppler must be non-negative")
        if self.n_rx < 1 or self.num_sinusoids < 1:
            raise ValueError("n_rx and num_sinusoids must be positive")


@dataclass(frozen=True)
class ChannelRealization:
    """One draw of the fading process, valid for a whole transmission."""

    config: ChannelConfig
    tap_delays: np.ndarray      # (n_clusters,) int sample delays
    amplitudes: np.ndarray      # (n_clusters,) linear amplitude (sum P = 1)
    cos_aoa: np.ndarray         # (n_clusters, n_rx, num_sinusoids)
    phases: np.ndarray          # (n_clusters, n_rx, num_sinusoids)

    def cluster_gains(self, t: np.ndarray) -> np.ndarray:
        """Exact complex fading gains, (n_clusters, n_rx, len(t)).

        Includes the cluster amplitude; summing |.|^2 over clusters has
        expectation 1 for every antenna and time.
        """
        t = np.asarray(t, dtype=np.float64)
        w = 2.0 * np.pi * self.config.doppler_hz * self.cos_aoa
        phase = w[..., None] * t[None, None, None, :] + self.phases[..., None]
        g = np.exp(1j * phase).sum(axis=2) / np.sqrt(self.config.num_sinusoids)
        return self.amplitudes[:, None, None] * g

    def _grid_gains(self, start: int, length: int):
        """Coarse-grid gains covering samples [start, start+length)."""
        fs = self.config.sample_rate
        n_grid = length // _GAIN_GRID_STEP + 2
        grid_idx = start + np.arange(n_grid) * _GAIN_GRID_STEP
        return grid_idx, self.cluster_gains(grid_idx / fs)

    def apply(self, samples: np.ndarray, start_sample: int = 0,
              exact: bool = False) -> np.ndarray:
        """Pass a waveform through the channel: (n_rx, len(samples)).

        `samples` is the transmission from absolute sample index
        `start_sample`; earlier input is zero.  With exact=True the fading
        is evaluated at every sample instead of interpolated.
        """
        x = np.asarray(samples, dtype=np.complex128)
        n = len(x)
        n_rx = self.config.n_rx
        y = np.zeros((n_rx, n), dtype=np.complex128)
        fs = self.config.sample_rate
        if exact:
            gains = self.cluster_gains((start_sample + np.arange(n)) / fs)
        else:
            grid_idx, gg = self._grid_gains(start_sample, n)
            pos = (start_sample + np.arange(n) - grid_idx[0]) / _GAIN_GRID_STEP
            i0 = np.minimum(pos.astype(np.int64), len(grid_idx) - 2)
            frac = pos - i0
            gains = gg[..., i0] * (1 - frac) + gg[..., i0 + 1] * frac
        for c, d in enumerate(self.tap_delays):
            xd = np.zeros(n, dtype=np.complex128)
            if d < n:
                xd[d:] = x[: n - d] if d else x
            y += gains[c] * xd[None, :]
        return y


def realize_channel(config: ChannelConfig,
                    rng: np.random.Generator) -> ChannelRealization:
    """Draw sinusoid angles/phases for every (cluster, antenna)."""
    n_cl = len(CDL_A_PROFILE)
    delays = tap_sample_delays(config)
    p_lin = np.array([10 ** (p / 10) for _, p in CDL_A_PROFILE])
    p_lin /= p_lin.sum()
    shape = (n_cl, config.n_rx, config.num_sinusoids)
    return ChannelRealization(
        config=config,
        tap_delays=delays,
        amplitudes=np.sqrt(p_lin),
        cos_aoa=np.cos(rng.uniform(0, 2 * np.pi, shape)),
        phases=rng.uniform(0, 2 * np.pi, shape),
    )


def tap_sample_delays(config: ChannelConfig) -> np.ndarray:
    """Per-cluster integer sample delays for the configured delay spread."""
    return np.array(
        [round(d * config.delay_spread_s * config.sample_rate)
         for d, _ in CDL_A_PROFILE],
        dtype=np.int64,
    )


def add_awgn(signal: np.ndarray, snr_db: float, rng: np.random.Generator,
             ref_power: float | None = None):
    """Complex AWGN at the requested SNR.

    Noise variance N0 = P_ref / 10^(snr/10) with P_ref the mean received
    power over all antennas and samples (unit power when the signal is
    silent or ref_power is not finite).  Returns (noisy, n0).
    """
    sig = np.asarray(signal, dtype=np.complex128)
    if ref_power is None:
        ref_power = float(np.mean(np.abs(sig) ** 2))
    if not np.isfinite(ref_power) or ref_power <= 0:
        ref_power = 1.0
    n0 = ref_power / 10 ** (snr_db / 10)
    noise = rng.standard_normal(sig.shape) + 1j * rng.standard_normal(sig.shape)
    return sig + np.sqrt(n0 / 2) * noise, n0
