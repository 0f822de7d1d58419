"""Independent reference computations used by the tests.

Nothing here imports the code under test beyond plain data types; each
oracle builds its answer a different way (dense matrix exponentials,
finite differences, brute-force sums).
"""
import math

import numpy as np
from scipy import constants
from scipy.linalg import expm


def ladder(dim):
    return np.diag(np.sqrt(np.arange(1, dim)), 1)


def spin_mode_hamiltonian(n_max, sideband, omega, detuning, phi=0.0, n_cal=0):
    """Dense spin (x) mode Hamiltonian, spin index 0 = down, 1 = up.

    ``(delta/2)(|dn><dn| - |up><up|) + (omega/2)/sqrt(n_cal+1) (e^{i phi} sigma_+ a^(dag) + h.c.)``
    for the blue sideband, with ``a`` in place of ``a^dag`` for the red one.
    """
    dm = n_max + 1
    a = ladder(dm)
    sp = np.array([[0, 0], [1, 0]], dtype=complex)  # |up><down|
    sz = np.diag([1.0, -1.0])
    motion = a.T if sideband == "blue" else a
    coupling = np.exp(1j * phi) * np.kron(sp, motion)
    h = 0.5 * detuning * np.kron(sz, np.eye(dm))
    h = h + 0.5 * omega / math.sqrt(n_cal + 1) * (coupling + coupling.conj().T)
    return h


def spin_hamiltonian(omega, detuning, phi=0.0):
    return np.array(
        [[0.5 * detuning, 0.5 * omega * np.exp(-1j * phi)], [0.5 * omega * np.exp(1j * phi), -0.5 * detuning]]
    )


def beam_splitter_hamiltonian(n_max, rate, detuning):
    dm = n_max + 1
    a = ladder(dm)
    A = np.kron(a, np.eye(dm))
    B = np.kron(np.eye(dm), a)
    return 0.5 * detuning * (A.T @ A - B.T @ B) + rate * (A.T @ B + B.T @ A)


def propagate(h, t):
    return expm(-1j * h * t)


def normal_mode_exchange_rate(qa, ma, qb, mb, d, f_common, rel_step=1e-3):
    """Exchange rate from the normal-mode splitting of two Coulomb-coupled wells.

    Particle b sits a distance ``d`` above particle a. The Coulomb Hessian is
    taken by central finite differences; the trap springs are tuned so both
    uncoupled frequencies equal ``f_common`` after the Coulomb self-term.
    Returns ``pi * (f_+ - f_-)``.
    """
    k = 1.0 / (4.0 * math.pi * constants.epsilon_0)

    def v(za, zb):
        return k * qa * qb / (d + zb - za)

    h = rel_step * d
    haa = (v(h, 0) - 2 * v(0, 0) + v(-h, 0)) / h**2
    hbb = (v(0, h) - 2 * v(0, 0) + v(0, -h)) / h**2
    hab = (v(h, h) - v(h, -h) - v(-h, h) + v(-h, -h)) / (4 * h * h)
    w = 2 * math.pi * f_common
    spring = np.diag([ma * w * w - haa, mb * w * w - hbb])
    hess = spring + np.array([[haa, hab], [hab, hbb]])
    minv = np.diag([1 / math.sqrt(ma), 1 / math.sqrt(mb)])
    ev = np.linalg.eigvalsh(minv @ hess @ minv)
    fm, fp = np.sqrt(ev) / (2 * math.pi)
    return math.pi * (fp - fm)


def poisson_cdf_below(lam, threshold):
    """P(X < threshold) by explicit summation."""
    return sum(math.exp(-lam) * lam**k / math.factorial(k) for k in range(threshold))


def random_density_matrix(dim, rng, rank=None):
    rank = rank or dim
    x = rng.normal(size=(dim, rank)) + 1j * rng.normal(size=(dim, rank))
    rho = x @ x.conj().T
    return rho / np.trace(rho).real


def random_pure(dim, rng):
    psi = rng.normal(size=dim) + 1j * rng.normal(size=dim)
    return psi / np.linalg.norm(psi)
