"""Rabi lineshape model and a damped (Levenberg-Marquardt) weighted least-squares fitter."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DegenerateData, FitDiverged

TWO_PI = 2.0 * np.pi
PARAM_NAMES = ("f_center_hz", "rabi_hz", "amplitude", "baseline")


@dataclass(frozen=True)
class RabiLineshape:
    """``p(f) = baseline + amplitude * P(2 pi rabi_hz, 2 pi (f - f_center), duration)``.

    ``P`` is the two-level transition probability for a square pulse of
    length ``duration``. Parameter vector order is :data:`PARAM_NAMES`.
    """

    duration: float

    def _core(self, f, params):
        f0, rabi_hz, _, _ = params
        omega = TWO_PI * rabi_hz
        delta = TWO_PI * (np.asarray(f, dtype=float) - f0)
        w = np.sqrt(omega * omega + delta * delta)
        half = 0.5 * w * self.duration
        return omega, delta, w, np.sin(half), np.cos(half)

    def transition(self, f, params):
        omega, _, w, s, _ = self._core(f, params)
        with np.errstate(invalid="ignore", divide="ignore"):
            p = np.where(w > 0, (omega / np.where(w > 0, w, 1.0)) ** 2 * s * s, 0.0)
        return p

    def __call__(self, f, params):
        return params[3] + params[2] * self.transition(f, params)

    def jacobian(self, f, params):
        """Analytic derivatives, shape ``(len(f), 4)``."""
        omega, delta, w, s, c = self._core(f, params)
        t = self.duration
        amp = params[2]
        w = np.where(w > 0, w, np.finfo(float).tiny)
        w2, w3, w4 = w * w, w**3, w**4
        dp_domega = 2.0 * omega * delta * delta / w4 * s * s + omega**3 * t / w3 * s * c
        dp_ddelta = -2.0 * omega * omega * delta / w4 * s * s + omega * omega * delta * t / w3 * s * c
        jac = np.empty((np.size(delta), 4))
        jac[:, 0] = amp * dp_ddelta * (-TWO_PI)
        jac[:, 1] = amp * dp_domega * TWO_PI
        jac[:, 2] = (omega * omega / w2) * s * s
        jac[:, 3] = 1.0
        return jac


@dataclass(frozen=True)
class LMResult:
    params: np.ndarray
    covariance: np.ndarray
    chi2: float
    dof: int
    converged: bool
    iterations: int

    @property
    def sigma(self):
        return np.sqrt(np.diag(self.covariance))

    @property
    def chi2_reduced(self):
        return self.chi2 / self.dof if self.dof > 0 else float("nan")


def levenberg_marquardt(model, jacobian, x, y, weights, p0, max_iter=200, xtol=1e-10, lam0=1e-3):
    """Minimize ``sum(weights * (y - model(x, p))**2)``.

    Damping is multiplicative: x10 after a rejected step, /10 after an
    accepted one. Stops once every parameter moves by less than ``xtol``
    relative (absolute for parameters at zero). The covariance is the
    inverse of ``J^T W J`` at the optimum, not rescaled by chi2.
    """
    p = np.asarray(p0, dtype=float).copy()
    y = np.asarray(y, dtype=float)
    wts = np.asarray(weights, dtype=float)

    def chi2_of(q):
        r = y - model(x, q)
        return float(np.sum(wts * r * r)), r

    chi2, r = chi2_of(p)
    lam = lam0
    converged = False
    it = 0
    for it in range(1, max_iter + 1):
        jac = jacobian(x, p)
        a = jac.T @ (wts[:, None] * jac)
        g = jac.T @ (wts * r)
        diag = np.diag(a).copy()
        diag[diag == 0] = 1.0
        while True:
            try:
                step = np.linalg.solve(a + lam * np.diag(diag), g)
            except np.linalg.LinAlgError:
                step = np.full_like(p, np.nan)
            if not np.all(np.isfinite(step)):
                raise FitDiverged("non-finite step in damped least squares")
            trial = p + step
            chi2_new, r_new = chi2_of(trial)
            if np.isfinite(chi2_new) and chi2_new <= chi2:
                break
            lam *= 10.0
            if lam > 1e16:
                break
        small = np.all(np.abs(step) <= xtol * np.maximum(np.abs(p), np.finfo(float).tiny))
        if lam > 1e16:
            # no downhill step at any damping: at the numerical minimum
            converged = True
            break
        p, chi2, r = trial, chi2_new, r_new
        lam = max(lam / 10.0, 1e-12)
        if small or chi2 == 0.0:
            converged = True
            break
    if not np.all(np.isfinite(p)) or not np.isfinite(chi2):
        raise FitDiverged("fit produced non-finite parameters")
    jac = jacobian(x, p)
    a = jac.T @ (wts[:, None] * jac)
    try:
        cov = np.linalg.inv(a)
    except np.linalg.LinAlgError:
        cov = np.full((p.size, p.size), np.inf)
    return LMResult(p, cov, chi2, max(y.size - p.size, 0), converged, it)


def initial_guess(f, y, duration):
    """Argmax center, peak-to-valley amplitude, minimum as baseline, pi-pulse Rabi rate."""
    f = np.asarray(f, dtype=float)
    y = np.asarray(y, dtype=float)
    if np.ptp(y) == 0:
        raise DegenerateData("all bright fractions are equal")
    i = int(np.argmax(y))
    return np.array([f[i], 1.0 / (2.0 * duration), y.max() - y.min(), y.min()])
