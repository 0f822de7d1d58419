"""Larmor frequency scans, lineshape fitting, trap-frequency acquisition and g extraction."""
from __future__ import annotations

import io
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from .dynamics import PulseParams, two_level_propagator
from .errors import ConfigError, DegenerateData, NonPositiveFrequency
from .fitting import PARAM_NAMES, RabiLineshape, initial_guess, levenberg_marquardt
from .protocol import (
    P_SPIN,
    DetectionParams,
    ProtocolConfig,
    detection_probability,
    make_world,
    spin_detection_protocol,
)
from .readout import seeded_stream
from .sequence import Pulse, Sequence, canonical_detection_sequence
from .state import partial_trace
from .trap import (
    TrapFrequencies,
    eigenfrequencies_from,
    free_cyclotron_frequency,
    invariance_theorem,
    larmor_frequency_truth,
)

CSV_HEADER = "frequency_hz,shots,bright_count,bright_fraction,binomial_stderr"


@dataclass(frozen=True)
class ScanConfig:
    start_hz: float
    stop_hz: float
    points: int = 41
    shots_per_point: int = 200
    drive: PulseParams = PulseParams(theta=math.pi, duration=0.01)
    seed: int = 0

    def __post_init__(self):
        if not self.start_hz < self.stop_hz:
            raise ConfigError("scan needs start_hz < stop_hz")
        if self.points < 3:
            raise ConfigError("scan needs at least 3 points")
        if self.shots_per_point < 1:
            raise ConfigError("shots_per_point must be >= 1")

    @property
    def frequencies(self) -> np.ndarray:
        return np.linspace(self.start_hz, self.stop_hz, self.points)


@dataclass(frozen=True, eq=False)
class ScanResult:
    frequency_hz: np.ndarray
    shots: np.ndarray
    bright_count: np.ndarray
    seed: Optional[int] = None
    # exact per-point Bright-classification probability, when known
    probability: Optional[np.ndarray] = None
    fraction_override: Optional[np.ndarray] = field(default=None, repr=False)

    @property
    def bright_fraction(self) -> np.ndarray:
        if self.fraction_override is not None:
            return np.asarray(self.fraction_override, dtype=float)
        return self.bright_count / self.shots

    @property
    def binomial_stderr(self) -> np.ndarray:
        p = self.bright_fraction
        return np.sqrt(p * (1.0 - p) / self.shots)

    def to_csv(self) -> str:
        out = io.StringIO()
        out.write(CSV_HEADER + "\n")
        for f, n, k, p, s in zip(self.frequency_hz, self.shots, self.bright_count,
                                 self.bright_fraction, self.binomial_stderr):
            out.write(f"{f:.17g},{int(n)},{int(k)},{p:.17g},{s:.17g}\n")
        return out.getvalue()

    @classmethod
    def from_csv(cls, text: str) -> "ScanResult":
        lines = [ln for ln in text.splitlines() if ln.strip()]
        if lines[0] != CSV_HEADER:
            raise ValueError(f"unexpected CSV header {lines[0]!r}")
        rows = [ln.split(",") for ln in lines[1:]]
        return cls(
            np.array([float(r[0]) for r in rows]),
            np.array([int(r[1]) for r in rows]),
            np.array([int(r[2]) for r in rows]),
        )

    @classmethod
    def from_fractions(cls, frequency_hz, fractions, shots=10**6):
        """Synthetic result carrying exact (non-integer) fractions."""
        f = np.asarray(frequency_hz, dtype=float)
        p = np.asarray(fractions, dtype=float)
        n = np.full(f.shape, shots)
        return cls(f, n, np.rint(p * n).astype(int), fraction_override=p)


@dataclass(frozen=True)
class FitReport:
    f_center_hz: float
    rabi_hz: float
    amplitude: float
    baseline: float
    sigma: dict
    chi2_reduced: float
    converged: bool
    iterations: int

    @property
    def params(self) -> np.ndarray:
        return np.array([self.f_center_hz, self.rabi_hz, self.amplitude, self.baseline])


@dataclass(frozen=True)
class GFactorReport:
    f_L: float
    f_L_sigma: float
    f_c: float
    f_c_sigma: float
    g: float
    g_sigma: float
    seed: Optional[int] = None
    config_digest: Optional[str] = None

    def to_dict(self) -> dict:
        return {
            "f_L_hz": self.f_L,
            "f_L_sigma_hz": self.f_L_sigma,
            "f_c_hz": self.f_c,
            "f_c_sigma_hz": self.f_c_sigma,
            "g": self.g,
            "g_sigma": self.g_sigma,
            "seed": self.seed,
            "config_digest": self.config_digest,
        }


# scanning ------------------------------------------------------------------------

def detection_effect(world_factory: Callable, pcfg: ProtocolConfig,
                     params: DetectionParams = DetectionParams()) -> np.ndarray:
    """2x2 operator ``E`` on the proton spin with ``P(Bright) = tr(E rho_spin)``.

    The detection pass is linear in the proton spin input, so four
    informationally complete inputs fix it exactly.
    """
    inputs = {
        "z+": np.diag([0.0, 1.0]),
        "z-": np.diag([1.0, 0.0]),
        "x": np.full((2, 2), 0.5),
        "y": np.array([[0.5, -0.5j], [0.5j, 0.5]]),
    }
    p = {k: detection_probability(world_factory(rho), pcfg, params) for k, rho in inputs.items()}
    # Pauli basis with index 0 = down, 1 = up: sigma_z = diag(-1, 1)
    a = 0.5 * (p["z+"] + p["z-"])
    bz = 0.5 * (p["z+"] - p["z-"])
    bx = p["x"] - a
    by = p["y"] - a
    sx = np.array([[0, 1], [1, 0]], dtype=complex)
    sy = np.array([[0, -1j], [1j, 0]])
    sz = np.diag([-1.0, 1.0]).astype(complex)
    return a * np.eye(2) + bx * sx + by * sy + bz * sz


def shot_sequence(detuning_hz: float, drive: PulseParams, params: DetectionParams = DetectionParams()) -> Sequence:
    """Literal script for one scan shot: Larmor drive then detection."""
    drive_step = Pulse("carrier", "p", drive.theta, drive.phi, detuning_hz, drive.duration)
    det = canonical_detection_sequence(params.bsb_theta, params.exchange_theta, params.raman_theta)
    return Sequence((drive_step,) + det.steps, "larmor-shot")


def default_world_factory(pcfg: ProtocolConfig, residual_nbar: float = 0.0) -> Callable:
    return lambda spin: make_world(pcfg, spin, residual_nbar)


def spin_bright_probabilities(cfg: ScanConfig, world_factory: Callable, pcfg: ProtocolConfig,
                              params: DetectionParams = DetectionParams()) -> np.ndarray:
    """Exact probability, per grid point, that the coolant ends in the Bright spin state."""
    # the previous, unread detection pass leaves the proton (ideally) spin-up
    _, prep = spin_detection_protocol(world_factory("mixed"), pcfg, params, sample=False)
    rho0 = partial_trace(prep.quantum, [P_SPIN]).rho
    effect = detection_effect(world_factory, pcfg, params)
    f_larmor = larmor_frequency_truth(pcfg.particle, pcfg.trap.b_field)
    drive = cfg.drive
    out = np.empty(cfg.points)
    for i, f in enumerate(cfg.frequencies):
        u = two_level_propagator(drive.rabi, 2.0 * math.pi * (f - f_larmor), drive.phi, drive.duration)
        rho = u @ rho0 @ u.conj().T
        out[i] = min(1.0, max(0.0, float(np.real(np.trace(effect @ rho)))))
    return out


def sample_point(p_spin_bright: float, shots: int, pcfg: ProtocolConfig, rng: np.random.Generator) -> int:
    """Bright classifications in ``shots`` independent detections."""
    spin_bright = rng.random(shots) < p_spin_bright
    if not pcfg.photon_sampling:
        return int(spin_bright.sum())
    fp = pcfg.fluorescence
    counts = rng.poisson(np.where(spin_bright, fp.lambda_bright, fp.lambda_dark))
    return int(np.count_nonzero(counts >= fp.threshold))


def sample_scan(cfg: ScanConfig, probabilities: np.ndarray, pcfg: ProtocolConfig, threads: int = 1) -> ScanResult:
    def run(i):
        return sample_point(probabilities[i], cfg.shots_per_point, pcfg, seeded_stream(cfg.seed, i))

    idx = range(cfg.points)
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            counts = list(pool.map(run, idx))
    else:
        counts = [run(i) for i in idx]
    shots = np.full(cfg.points, cfg.shots_per_point)
    return ScanResult(cfg.frequencies, shots, np.array(counts), cfg.seed, probabilities)


def classified_probability(p_spin_bright, pcfg: ProtocolConfig):
    """Probability of a Bright classification including photon-count errors."""
    if not pcfg.photon_sampling:
        return p_spin_bright
    from .readout import discrimination_error

    e_bd, e_db = discrimination_error(pcfg.fluorescence)
    return p_spin_bright * (1.0 - e_bd) + (1.0 - p_spin_bright) * e_db


def larmor_scan(cfg: ScanConfig, world_factory: Optional[Callable], pcfg: ProtocolConfig,
                threads: int = 1, params: DetectionParams = DetectionParams()) -> ScanResult:
    """Scan the Larmor drive across ``cfg.frequencies``.

    Each shot starts from the proton state left by an unread detection pass
    (ideally spin-up), applies the drive at detuning ``2 pi (f - f_L)``, then
    runs the detection sequence and classifies the photon count. The exact
    per-point Bright probability comes from the density operator; shots are
    drawn from the per-point stream ``(seed, point index)``.
    """
    if world_factory is None:
        world_factory = default_world_factory(pcfg)
    p_spin = spin_bright_probabilities(cfg, world_factory, pcfg, params)
    result = sample_scan(cfg, p_spin, pcfg, threads)
    return ScanResult(result.frequency_hz, result.shots, result.bright_count, cfg.seed,
                      classified_probability(p_spin, pcfg))


# fitting -----------------------------------------------------------------------

def fit_lineshape(sr: ScanResult, duration: float) -> FitReport:
    """Weighted Rabi-profile fit.

    Weights are inverse binomial variances with the fraction regularized as
    ``(k + 1) / (n + 2)`` so that points at 0 or 1 keep finite weight.
    """
    f = np.asarray(sr.frequency_hz, dtype=float)
    y = sr.bright_fraction
    n = np.asarray(sr.shots, dtype=float)
    ok = n > 0
    if ok.sum() < 4:
        raise DegenerateData("need at least 4 points with shots > 0")
    f, y, n = f[ok], y[ok], n[ok]
    model = RabiLineshape(duration)
    p0 = initial_guess(f, y, duration)
    p_reg = (y * n + 1.0) / (n + 2.0)
    weights = n / (p_reg * (1.0 - p_reg))
    # fit the center as an offset from the initial guess to keep digits
    f_ref = p0[0]
    shifted = lambda x, q: model(x - f_ref, q)  # noqa: E731
    shifted_jac = lambda x, q: model.jacobian(x - f_ref, q)  # noqa: E731
    p0 = p0.copy()
    p0[0] = 0.0
    res = levenberg_marquardt(shifted, shifted_jac, f, y, weights, p0)
    params = res.params.copy()
    params[0] += f_ref
    sigma = {k: float(v) for k, v in zip(PARAM_NAMES, res.sigma)}
    return FitReport(*(float(v) for v in params), sigma=sigma, chi2_reduced=float(res.chi2_reduced),
                     converged=res.converged, iterations=res.iterations)


# trap frequencies and g ----------------------------------------------------------

def measure_trap_frequencies(pcfg: ProtocolConfig, noise: float, rng: np.random.Generator):
    """Truth eigenfrequencies with multiplicative Gaussian noise.

    Returns ``(TrapFrequencies, sigmas)`` with ``sigmas = noise * f``.
    """
    if noise < 0:
        raise ValueError("noise must be >= 0")
    fc = free_cyclotron_frequency(pcfg.particle, pcfg.trap.b_field)
    truth = eigenfrequencies_from(fc, pcfg.trap.precision_axial_frequency).as_array()
    factors = 1.0 + noise * rng.standard_normal(3)
    measured = truth * factors
    return TrapFrequencies(*measured), noise * measured


def cyclotron_from_measurement(tf: TrapFrequencies, sigmas) -> tuple:
    fc = invariance_theorem(tf)
    grad = tf.as_array() / fc
    return fc, float(np.sqrt(np.sum((grad * np.asarray(sigmas)) ** 2)))


def g_factor(f_L: float, f_L_sigma: float, f_c: float, f_c_sigma: float,
             seed=None, config_digest=None) -> GFactorReport:
    if not f_c > 0:
        raise NonPositiveFrequency(f"free cyclotron frequency must be > 0, got {f_c}")
    f_L, f_L_sigma, f_c, f_c_sigma = float(f_L), float(f_L_sigma), float(f_c), float(f_c_sigma)
    g = 2.0 * f_L / f_c
    rel = math.hypot(f_L_sigma / f_L if f_L else 0.0, f_c_sigma / f_c)
    return GFactorReport(f_L, f_L_sigma, f_c, f_c_sigma, g, abs(g) * rel, seed, config_digest)


@dataclass(frozen=True)
class Measurement:
    report: GFactorReport
    scan: ScanResult
    fit: FitReport
    trap: TrapFrequencies


def run_g_measurement(scan_cfg: ScanConfig, pcfg: ProtocolConfig, trap_noise: float = 0.0,
                      residual_nbar: float = 0.0, threads: int = 1, config_digest=None,
                      params: DetectionParams = DetectionParams()) -> Measurement:
    """Larmor scan and fit, noisy trap-frequency measurement, then ``g = 2 f_L / f_c``."""
    factory = default_world_factory(pcfg, residual_nbar)
    sr = larmor_scan(scan_cfg, factory, pcfg, threads, params)
    fit = fit_lineshape(sr, scan_cfg.drive.duration)
    # stream id past any scan point index
    rng = seeded_stream(scan_cfg.seed, 2**63)
    tf, sig = measure_trap_frequencies(pcfg, trap_noise, rng)
    fc, fc_sigma = cyclotron_from_measurement(tf, sig)
    report = g_factor(fit.f_center_hz, fit.sigma["f_center_hz"], fc, fc_sigma, scan_cfg.seed, config_digest)
    return Measurement(report, sr, fit, tf)
