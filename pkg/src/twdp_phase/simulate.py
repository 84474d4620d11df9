"""Stochastic TWDP generators for validating the phase density.

Two independent routes:

* ``mc_phase_samples``: i.i.d. draws of ``v1 e^{j phi1} + v2 e^{j phi2} + n``.
* ``geo_realization``: a moving receiver with a line-of-sight ray, one
  mirror-image reflection and a sum-of-sinusoids isotropic diffuse field.

Every stream is derived from one master seed through ``SeedSequence``
spawn keys, so chunks and realizations are independent and the result does
not depend on evaluation order.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from typing import Iterator

import numpy as np

from .errors import ConfigError
from .params import ChannelParams, from_normalized, wrap_phase

MC_CHUNK = 1 << 20


@dataclass(frozen=True)
class PhaseHistogram:
    edges: np.ndarray
    density: np.ndarray
    n_samples: int
    circular_mean: float = float("nan")
    circular_variance: float = float("nan")

    @property
    def centers(self) -> np.ndarray:
        return 0.5 * (self.edges[:-1] + self.edges[1:])

    @property
    def width(self) -> np.ndarray:
        return np.diff(self.edges)

    def to_csv(self, path, analytic=None) -> None:
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            head = ["bin_left_rad", "bin_right_rad", "density"]
            if analytic is not None:
                head.append("analytic")
            w.writerow(head)
            for i in range(len(self.density)):
                row = [self.edges[i], self.edges[i + 1], self.density[i]]
                if analytic is not None:
                    row.append(analytic[i])
                w.writerow([f"{v:.17g}" for v in row])


def _bin_edges(n_bins: int) -> np.ndarray:
    return np.linspace(-math.pi, math.pi, n_bins + 1)


def _finish_histogram(counts: np.ndarray, edges: np.ndarray, n: int, resultant: complex) -> PhaseHistogram:
    density = counts / (n * np.diff(edges))
    r = abs(resultant) / n if n else float("nan")
    return PhaseHistogram(edges, density, n, float(np.angle(resultant)), 1.0 - r)


@dataclass(frozen=True)
class McConfig:
    params: ChannelParams
    n_samples: int = 10_000_000
    seed: int = 0
    n_bins: int = 256

    def __post_init__(self):
        if self.n_samples < 1:
            raise ConfigError("n_samples must be >= 1")
        if self.n_bins < 2:
            raise ConfigError("n_bins must be >= 2")
        if not 0 <= self.seed < 2**64:
            raise ConfigError("seed must be a 64-bit unsigned integer")


def mc_phase_chunks(cfg: McConfig) -> Iterator[np.ndarray]:
    """Yield received phases in fixed-size chunks, each from its own spawned stream."""
    p = cfg.params
    sigma = math.sqrt(p.sigma2)
    n_chunks = -(-cfg.n_samples // MC_CHUNK)
    root = np.random.SeedSequence(cfg.seed)
    for i, child in enumerate(root.spawn(n_chunks)):
        n = min(MC_CHUNK, cfg.n_samples - i * MC_CHUNK)
        rng = np.random.Generator(np.random.PCG64(child))
        phi2 = rng.uniform(-math.pi, math.pi, n)
        noise = rng.normal(0.0, sigma, (2, n)) if sigma > 0 else np.zeros((2, n))
        re = p.v1 * math.cos(p.phi1) + p.v2 * np.cos(phi2) + noise[0]
        im = p.v1 * math.sin(p.phi1) + p.v2 * np.sin(phi2) + noise[1]
        yield np.arctan2(im, re)


def mc_phase_samples(cfg: McConfig) -> PhaseHistogram:
    """Density-normalized phase histogram over (-pi, pi] plus circular statistics."""
    edges = _bin_edges(cfg.n_bins)
    counts = np.zeros(cfg.n_bins)
    resultant = 0j
    for ph in mc_phase_chunks(cfg):
        counts += np.histogram(ph, bins=edges)[0]
        resultant += complex(np.sum(np.cos(ph)), np.sum(np.sin(ph)))
    return _finish_histogram(counts, edges, cfg.n_samples, resultant)


def _default_geo_params() -> ChannelParams:
    return from_normalized(10.0, 0.7, 1.0)


@dataclass(frozen=True)
class GeoSimConfig:
    tx_position: tuple = (0.0, 5.0)
    reflector_position: tuple = (3.6633, -4.0613)
    reflector_angle_deg: float = 25.0244
    rx_velocity: float = 10.0
    doppler_max_hz: float = 1000.0
    sample_time_s: float = 1e-5
    duration_s: float = 7.5e-3
    n_realizations: int = 200
    n_scatter_sinusoids: int = 64
    params: ChannelParams = field(default_factory=_default_geo_params)
    seed: int = 0
    # measure phase against the instantaneous LoS phase (ideal recovery of phi1)
    derotate_los: bool = True
    n_bins: int = 256

    def __post_init__(self):
        ratio = self.duration_s / self.sample_time_s
        if self.sample_time_s <= 0 or abs(ratio - round(ratio)) > 1e-6 * ratio or round(ratio) < 2:
            raise ConfigError("duration_s / sample_time_s must be an integer >= 2")
        if self.n_realizations < 1 or self.n_scatter_sinusoids < 1:
            raise ConfigError("n_realizations and n_scatter_sinusoids must be positive")
        if self.doppler_max_hz <= 0 or self.rx_velocity <= 0:
            raise ConfigError("doppler_max_hz and rx_velocity must be positive")
        if not 0 <= self.seed < 2**64:
            raise ConfigError("seed must be a 64-bit unsigned integer")
        if self.n_bins < 2:
            raise ConfigError("n_bins must be >= 2")

    @property
    def n_steps(self) -> int:
        return int(round(self.duration_s / self.sample_time_s))

    @property
    def wavelength_m(self) -> float:
        # f_d = v / lambda fixes the wavelength; the carrier itself is never needed
        return self.rx_velocity / self.doppler_max_hz

    def times(self) -> np.ndarray:
        return np.arange(self.n_steps) * self.sample_time_s


@dataclass(frozen=True)
class FadingRealization:
    samples: np.ndarray
    sample_time_s: float
    # LoS carrier rotation accumulated by the receiver motion since t = 0
    los_phase: np.ndarray = None
    doppler_max_hz: float = float("nan")

    def __post_init__(self):
        if not np.all(np.isfinite(self.samples)):
            raise ConfigError("realization contains non-finite samples")

    @property
    def times(self) -> np.ndarray:
        return np.arange(len(self.samples)) * self.sample_time_s

    def phase(self, derotate: bool = True) -> np.ndarray:
        if derotate and self.los_phase is not None:
            return np.angle(self.samples * np.exp(-1j * self.los_phase))
        return np.angle(self.samples)

    def to_csv(self, path, derotate: bool = True) -> None:
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["t_s", "re", "im", "envelope", "phase_rad"])
            ph = self.phase(derotate)
            for t, z, p in zip(self.times, self.samples, ph):
                w.writerow([f"{v:.17g}" for v in (t, z.real, z.imag, abs(z), p)])


def image_source(cfg: GeoSimConfig) -> np.ndarray:
    """Mirror the transmitter across the reflector line."""
    ang = math.radians(cfg.reflector_angle_deg)
    d = np.array([math.cos(ang), math.sin(ang)])
    p0 = np.asarray(cfg.reflector_position, dtype=float)
    rel = np.asarray(cfg.tx_position, dtype=float) - p0
    return p0 + 2.0 * (rel @ d) * d - rel


def rx_track(cfg: GeoSimConfig) -> np.ndarray:
    t = cfg.times()
    return np.stack([cfg.rx_velocity * t, np.zeros_like(t)], axis=1)


def _check_geometry(cfg: GeoSimConfig) -> None:
    ang = math.radians(cfg.reflector_angle_deg)
    normal = np.array([-math.sin(ang), math.cos(ang)])
    p0 = np.asarray(cfg.reflector_position, dtype=float)
    side_tx = (np.asarray(cfg.tx_position, dtype=float) - p0) @ normal
    side_rx = (rx_track(cfg) - p0) @ normal
    if side_tx == 0 or np.any(side_rx * side_tx <= 0):
        raise ConfigError("receiver track crosses or touches the reflector plane")
    if np.any(np.linalg.norm(rx_track(cfg) - np.asarray(cfg.tx_position, dtype=float), axis=1) == 0):
        raise ConfigError("receiver track passes through the transmitter")


def path_lengths(cfg: GeoSimConfig) -> tuple[np.ndarray, np.ndarray]:
    """Line-of-sight and reflected path lengths along the receiver track."""
    _check_geometry(cfg)
    rx = rx_track(cfg)
    los = np.linalg.norm(rx - np.asarray(cfg.tx_position, dtype=float), axis=1)
    ref = np.linalg.norm(rx - image_source(cfg), axis=1)
    return los, ref


def los_rotation_deg(cfg: GeoSimConfig) -> float:
    """Net LoS carrier phase rotation over the run, in degrees (from the geometry)."""
    los, _ = path_lengths(cfg)
    return abs(los[-1] - los[0]) / cfg.wavelength_m * 360.0


def reflected_rotation_turns(cfg: GeoSimConfig) -> float:
    """Net reflected-ray phase rotation over the run, in full turns."""
    _, ref = path_lengths(cfg)
    return abs(ref[-1] - ref[0]) / cfg.wavelength_m


def clarke_diffuse(t: np.ndarray, doppler_hz: float, n_sinusoids: int, rng: np.random.Generator) -> np.ndarray:
    """Unit-power isotropic Rayleigh process by sums of sinusoids.

    Statistical sum-of-sinusoids form with random arrival angles::

        Xc(t) = sqrt(2/M) sum_n cos(w_d t cos(alpha_n) + phi_n)
        Xs(t) = sqrt(2/M) sum_n cos(w_d t sin(alpha_n) + varphi_n)
        alpha_n = (2 pi n + theta_n) / M,   n = 1..M

    with ``theta_n, phi_n, varphi_n`` i.i.d. uniform on [-pi, pi).  Returns
    ``(Xc + j Xs) / sqrt(2)`` so that ``E|x|**2 = 1``.
    """
    m = n_sinusoids
    n = np.arange(1, m + 1)
    theta = rng.uniform(-math.pi, math.pi, m)
    ph_c = rng.uniform(-math.pi, math.pi, m)
    ph_s = rng.uniform(-math.pi, math.pi, m)
    alpha = (2.0 * math.pi * n + theta) / m
    wd = 2.0 * math.pi * doppler_hz
    arg_c = wd * np.outer(t, np.cos(alpha)) + ph_c
    arg_s = wd * np.outer(t, np.sin(alpha)) + ph_s
    scale = math.sqrt(2.0 / m)
    xc = scale * np.cos(arg_c).sum(axis=1)
    xs = scale * np.cos(arg_s).sum(axis=1)
    return (xc + 1j * xs) / math.sqrt(2.0)


def _realization_rng(cfg: GeoSimConfig, index: int) -> np.random.Generator:
    seq = np.random.SeedSequence(cfg.seed, spawn_key=(int(index),))
    return np.random.Generator(np.random.PCG64(seq))


def geo_realization(cfg: GeoSimConfig, realization_index: int) -> FadingRealization:
    p = cfg.params
    los, ref = path_lengths(cfg)
    lam = cfg.wavelength_m
    rng = _realization_rng(cfg, realization_index)
    phi2 = rng.uniform(-math.pi, math.pi)
    los_phase = p.phi1 - 2.0 * math.pi * (los - los[0]) / lam
    ref_phase = phi2 - 2.0 * math.pi * (ref - ref[0]) / lam
    rho = p.v1 * np.exp(1j * los_phase) + p.v2 * np.exp(1j * ref_phase)
    if p.sigma2 > 0:
        diffuse = clarke_diffuse(cfg.times(), cfg.doppler_max_hz, cfg.n_scatter_sinusoids, rng)
        rho = rho + math.sqrt(2.0 * p.sigma2) * diffuse
    # de-rotation removes only the motion-induced LoS rotation, keeping phi1 as reference
    return FadingRealization(rho, cfg.sample_time_s, wrap_phase(los_phase - p.phi1), cfg.doppler_max_hz)


def geo_phase_histogram(cfg: GeoSimConfig) -> PhaseHistogram:
    """Aggregate phase histogram over all realizations (fixed reduction order)."""
    edges = _bin_edges(cfg.n_bins)
    counts = np.zeros(cfg.n_bins)
    resultant = 0j
    for i in range(cfg.n_realizations):
        ph = geo_realization(cfg, i).phase(cfg.derotate_los)
        counts += np.histogram(ph, bins=edges)[0]
        resultant += complex(np.sum(np.cos(ph)), np.sum(np.sin(ph)))
    return _finish_histogram(counts, edges, cfg.n_realizations * cfg.n_steps, resultant)
