"""Composite spin/oscillator states as density operators.

A :class:`CompositeState` is an immutable density matrix over an ordered list
of registers. The joint basis is the Kronecker product of the register bases
in list order, so the first register is the most significant index. Spin
registers use index 0 for down and 1 for up, everywhere.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping, Sequence

import numpy as np

from .errors import (
    DuplicateLabel,
    IndexOutOfRange,
    InvalidState,
    ShapeMismatch,
    TruncationError,
    UnknownRegister,
    WrongRegisterKind,
)

SPIN = "spin"
MODE = "mode"
DOWN = 0
UP = 1

DEFAULT_N_MAX = 15
LEAK_TOLERANCE = 1e-9
HERMITIAN_TOLERANCE = 1e-12


@dataclass(frozen=True)
class RegisterSpec:
    label: str
    kind: str
    dim: int

    def __post_init__(self):
        if self.kind not in (SPIN, MODE):
            raise ValueError(f"unknown register kind {self.kind!r}")
        if self.dim < 2:
            raise ValueError(f"register {self.label!r} needs dim >= 2, got {self.dim}")
        if self.kind == SPIN and self.dim != 2:
            raise ValueError(f"spin register {self.label!r} must have dim 2")

    @classmethod
    def spin(cls, label: str) -> "RegisterSpec":
        return cls(label, SPIN, 2)

    @classmethod
    def mode(cls, label: str, n_max: int = DEFAULT_N_MAX) -> "RegisterSpec":
        return cls(label, MODE, n_max + 1)

    @property
    def n_max(self) -> int:
        return self.dim - 1


@dataclass(frozen=True, eq=False)
class CompositeState:
    """Density operator over labeled registers.

    Construction checks shape, Hermiticity (max elementwise deviation 1e-12)
    and unit trace. Positivity is only checked by :meth:`check_physical`.
    The matrix is stored read-only; every operation returns a new state.
    """

    registers: tuple
    rho: np.ndarray
    trace_tolerance: float = 1e-10
    leaked_weight: float = field(default=0.0, compare=False)

    def __post_init__(self):
        regs = tuple(self.registers)
        object.__setattr__(self, "registers", regs)
        labels = [r.label for r in regs]
        if len(set(labels)) != len(labels):
            raise DuplicateLabel(f"duplicate register labels in {labels}")
        rho = np.array(self.rho, dtype=complex)
        dim = int(np.prod([r.dim for r in regs]))
        if rho.shape != (dim, dim):
            raise ShapeMismatch(f"rho has shape {rho.shape}, registers need {(dim, dim)}")
        if np.max(np.abs(rho - rho.conj().T), initial=0.0) > HERMITIAN_TOLERANCE:
            raise InvalidState("density matrix is not Hermitian")
        tr = np.trace(rho).real
        if abs(tr - 1.0) > self.trace_tolerance:
            raise InvalidState(f"trace is {tr!r}, expected 1")
        rho.flags.writeable = False
        object.__setattr__(self, "rho", rho)

    @property
    def labels(self) -> list:
        return [r.label for r in self.registers]

    @property
    def dims(self) -> list:
        return [r.dim for r in self.registers]

    @property
    def dim(self) -> int:
        return self.rho.shape[0]

    def register(self, label: str) -> RegisterSpec:
        for r in self.registers:
            if r.label == label:
                return r
        raise UnknownRegister(f"no register {label!r} (have {self.labels})")

    def index(self, label: str) -> int:
        for i, r in enumerate(self.registers):
            if r.label == label:
                return i
        raise UnknownRegister(f"no register {label!r} (have {self.labels})")

    def trace(self) -> float:
        return float(np.trace(self.rho).real)

    def purity(self) -> float:
        return float(np.real(np.vdot(self.rho, self.rho)))

    def check_physical(self, tol: float = 1e-10) -> None:
        """Raise :class:`InvalidState` if the smallest eigenvalue is below ``-tol``."""
        w = np.linalg.eigvalsh(self.rho)
        if w[0] < -tol:
            raise InvalidState(f"density matrix has eigenvalue {w[0]:.3g}")

    def tensor_view(self) -> np.ndarray:
        return self.rho.reshape(self.dims * 2)


def _hermitize(rho):
    return 0.5 * (rho + rho.conj().T)


def _with_rho(s: CompositeState, rho, registers=None) -> CompositeState:
    return CompositeState(
        s.registers if registers is None else registers,
        _hermitize(rho),
        s.trace_tolerance,
        s.leaked_weight,
    )


def _check_label(registers, label):
    labels = {r.label: r for r in registers}
    if set(label) - set(labels):
        raise UnknownRegister(f"unknown registers {sorted(set(label) - set(labels))}")
    for name, idx in label.items():
        if not 0 <= idx < labels[name].dim:
            raise IndexOutOfRange(f"index {idx} out of range for register {name!r} (dim {labels[name].dim})")


def basis_vector(registers: Sequence[RegisterSpec], label: Mapping[str, int]) -> np.ndarray:
    registers = list(registers)
    _check_label(registers, label)
    missing = [r.label for r in registers if r.label not in label]
    if missing:
        raise UnknownRegister(f"label does not assign registers {missing}")
    flat = np.ravel_multi_index([label[r.label] for r in registers], [r.dim for r in registers])
    v = np.zeros(int(np.prod([r.dim for r in registers])), dtype=complex)
    v[flat] = 1.0
    return v


def make_pure_state(registers: Sequence[RegisterSpec], label: Mapping[str, int]) -> CompositeState:
    v = basis_vector(registers, label)
    return CompositeState(tuple(registers), np.outer(v, v.conj()))


def from_vector(registers: Sequence[RegisterSpec], psi) -> CompositeState:
    """Pure state from a (not necessarily normalized) state vector."""
    psi = np.asarray(psi, dtype=complex)
    psi = psi / np.linalg.norm(psi)
    return CompositeState(tuple(registers), np.outer(psi, psi.conj()))


def thermal_populations(nbar: float, n_max: int):
    """Geometric occupation ``nbar**n / (nbar+1)**(n+1)`` truncated at ``n_max``.

    Returns ``(p, leaked)`` where ``p`` is renormalized over ``0..n_max`` and
    ``leaked`` is the weight that fell above the cutoff before renormalizing.
    """
    if not np.isfinite(nbar) or nbar < 0:
        raise ValueError(f"nbar must be finite and >= 0, got {nbar}")
    n = np.arange(n_max + 1)
    if nbar == 0:
        p = (n == 0).astype(float)
        return p, 0.0
    ratio = nbar / (nbar + 1.0)
    p = ratio**n / (nbar + 1.0)
    leaked = float(ratio ** (n_max + 1))
    return p / p.sum(), leaked


def make_thermal_mode(nbar: float, n_max: int = DEFAULT_N_MAX, label: str = "mode") -> CompositeState:
    if n_max < 1:
        raise ValueError("n_max must be >= 1")
    p, leaked = thermal_populations(nbar, n_max)
    if leaked > LEAK_TOLERANCE:
        raise TruncationError(
            f"thermal state nbar={nbar} leaks {leaked:.3g} above n_max={n_max}"
        )
    return CompositeState((RegisterSpec.mode(label, n_max),), np.diag(p).astype(complex), leaked_weight=leaked)


def tensor(a: CompositeState, b: CompositeState) -> CompositeState:
    clash = set(a.labels) & set(b.labels)
    if clash:
        raise DuplicateLabel(f"registers {sorted(clash)} appear in both states")
    return CompositeState(
        a.registers + b.registers,
        np.kron(a.rho, b.rho),
        max(a.trace_tolerance, b.trace_tolerance),
        a.leaked_weight + b.leaked_weight,
    )


def partial_trace(s: CompositeState, keep: Sequence[str]) -> CompositeState:
    keep = list(keep)
    if not keep:
        raise ValueError("keep must name at least one register")
    for lab in keep:
        s.index(lab)
    keep_idx = sorted(s.index(lab) for lab in keep)
    drop_idx = [i for i in range(len(s.registers)) if i not in keep_idx]
    dims = s.dims
    n = len(dims)
    t = s.tensor_view().transpose(keep_idx + drop_idx + [n + i for i in keep_idx] + [n + i for i in drop_idx])
    dk = int(np.prod([dims[i] for i in keep_idx]))
    dd = int(np.prod([dims[i] for i in drop_idx])) if drop_idx else 1
    red = np.einsum("ijkj->ik", t.reshape(dk, dd, dk, dd))
    return _with_rho(s, red, tuple(s.registers[i] for i in keep_idx))


def permute(s: CompositeState, order: Sequence[str]) -> CompositeState:
    """Reorder registers to ``order`` (a permutation of the current labels)."""
    order = list(order)
    if sorted(order) != sorted(s.labels):
        raise UnknownRegister(f"{order} is not a permutation of {s.labels}")
    idx = [s.index(lab) for lab in order]
    n = len(idx)
    t = s.tensor_view().transpose(idx + [n + i for i in idx])
    return CompositeState(
        tuple(s.registers[i] for i in idx), t.reshape(s.rho.shape), s.trace_tolerance, s.leaked_weight
    )


def replace_register(s: CompositeState, label: str, sub: CompositeState) -> CompositeState:
    """Discard register ``label`` and put the single-register state ``sub`` in its place."""
    reg = s.register(label)
    if len(sub.registers) != 1 or sub.registers[0].dim != reg.dim or sub.registers[0].kind != reg.kind:
        raise ShapeMismatch(f"replacement for {label!r} must be one {reg.kind} register of dim {reg.dim}")
    others = [lab for lab in s.labels if lab != label]
    sub = CompositeState((reg,), sub.rho)
    if not others:
        return sub
    joined = tensor(partial_trace(s, others), sub)
    return permute(joined, s.labels)


def population(s: CompositeState, partial: Mapping[str, int]) -> float:
    _check_label(s.registers, partial)
    diag = np.real(np.diagonal(s.rho)).reshape(s.dims)
    index = tuple(partial.get(r.label, slice(None)) for r in s.registers)
    p = float(np.sum(diag[index]))
    return min(1.0, max(0.0, p))


def register_populations(s: CompositeState, label: str) -> np.ndarray:
    """Diagonal of the reduced state of one register."""
    i = s.index(label)
    diag = np.real(np.diagonal(s.rho)).reshape(s.dims)
    axes = tuple(j for j in range(len(s.dims)) if j != i)
    return diag.sum(axis=axes)


def mean_phonon_number(s: CompositeState, label: str) -> float:
    if s.register(label).kind != MODE:
        raise WrongRegisterKind(f"{label!r} is not a mode register")
    p = register_populations(s, label)
    return float(np.dot(np.arange(p.size), p))


_EIG_FLOOR = 1e-14  # relative; eigenvalues below are rounding noise


def _psd_factor(rho):
    """``X`` with ``X X^dag = rho``, dropping noise-level eigenvalues."""
    w, v = np.linalg.eigh(rho)
    keep = w > _EIG_FLOOR * max(w.max(), 1.0)
    return v[:, keep] * np.sqrt(w[keep])


def fidelity(a: CompositeState, b: CompositeState) -> float:
    """Uhlmann fidelity ``(tr sqrt(sqrt(a) b sqrt(a)))**2``.

    Computed as the squared nuclear norm of ``Y^dag X`` for factors
    ``a = X X^dag``, ``b = Y Y^dag``; this avoids square roots of
    rounding-level eigenvalues.
    """
    if a.registers != b.registers:
        raise ShapeMismatch(f"register specs differ: {a.registers} vs {b.registers}")
    m = _psd_factor(b.rho).conj().T @ _psd_factor(a.rho)
    f = float(np.sum(np.linalg.svd(m, compute_uv=False)) ** 2)
    return min(1.0, max(0.0, f))


# local operators -------------------------------------------------------------

def _apply_left(t, op, axes):
    m = len(axes)
    out = np.tensordot(op, t, axes=(list(range(m, 2 * m)), list(axes)))
    return np.moveaxis(out, list(range(m)), list(axes))


def _target_axes(s, labels):
    idx = [s.index(lab) for lab in labels]
    if len(set(idx)) != len(idx):
        raise DuplicateLabel(f"register listed twice in {labels}")
    sub_dims = [s.dims[i] for i in idx]
    return idx, sub_dims


def apply_operator(s: CompositeState, labels: Sequence[str], op: np.ndarray) -> np.ndarray:
    """Raw ``op @ rho @ op.conj().T`` with ``op`` acting on ``labels`` (in that order)."""
    idx, sub_dims = _target_axes(s, labels)
    n = len(s.dims)
    op_t = np.asarray(op, dtype=complex).reshape(sub_dims * 2)
    t = _apply_left(s.tensor_view(), op_t, idx)
    t = _apply_left(t, op_t.conj(), [n + i for i in idx])
    return t.reshape(s.rho.shape)


def apply_unitary(s: CompositeState, labels: Sequence[str], u: np.ndarray) -> CompositeState:
    return _with_rho(s, apply_operator(s, labels, u))


def apply_kraus(s: CompositeState, labels: Sequence[str], kraus: Sequence[np.ndarray]) -> CompositeState:
    out = sum(apply_operator(s, labels, k) for k in kraus)
    return _with_rho(s, out)
