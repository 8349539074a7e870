"""GRAPE synthesis of a piecewise-constant control field realizing a target unitary.

The controlled evolution is U(T) = U_M ... U_1 with
U_k = exp(-i (H_n + eps_k C) dt), hbar = 1, C the control operator. Fidelity
is the global-phase-invariant F = |Tr(U_target' U)|^2 / N^2. Per-slice
gradients use the exact divided-difference derivative of the step
exponential, so they cross-check against finite differences at tight
tolerance.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import ascent
from .spinsys import assert_hermitian


@dataclass(frozen=True)
class ControlField:
    """Piecewise-constant field: amplitude k applies on [k dt, (k+1) dt)."""

    dt: float
    amplitudes: np.ndarray

    def __post_init__(self):
        a = np.asarray(self.amplitudes, dtype=float)
        if a.ndim != 1 or a.size < 1:
            raise ValueError("amplitudes must be a non-empty 1-D array")
        if not (self.dt > 0):
            raise ValueError(f"dt must be positive, got {self.dt}")
        if not np.all(np.isfinite(a)):
            raise ValueError("amplitudes must be finite")
        object.__setattr__(self, "amplitudes", a)

    @property
    def steps(self) -> int:
        return self.amplitudes.size

    @property
    def total_time(self) -> float:
        return self.dt * self.amplitudes.size

    @property
    def times(self) -> np.ndarray:
        """Midpoints of the piecewise-constant slices."""
        return (np.arange(self.amplitudes.size) + 0.5) * self.dt

    def export_csv(self, path) -> None:
        """Two-column headerless CSV (time, amplitude), 17 significant digits."""
        with open(path, "w") as fh:
            for t, a in zip(self.times, self.amplitudes):
                fh.write(f"{t:.17g},{a:.17g}\n")

    @classmethod
    def import_csv(cls, path) -> "ControlField":
        data = np.loadtxt(path, delimiter=",", ndmin=2)
        if data.shape[1] != 2:
            raise ValueError(f"expected 2 columns in {path}, got {data.shape[1]}")
        t, a = data[:, 0], data[:, 1]
        dt = t[1] - t[0] if t.size > 1 else 2.0 * t[0]
        return cls(dt=float(dt), amplitudes=a)


def _step_unitaries(h_n: np.ndarray, control_op: np.ndarray, field: ControlField):
    """Stacked eigendecompositions and step propagators, one per slice."""
    h_stack = h_n[None, :, :] + field.amplitudes[:, None, None] * control_op[None, :, :]
    hs, ws = np.linalg.eigh(h_stack)
    phases = np.exp(-1j * hs * field.dt)
    us = (ws * phases[:, None, :]) @ np.conj(np.swapaxes(ws, 1, 2))
    return hs, ws, us


def _polar_projection(u: np.ndarray) -> np.ndarray:
    a, _, bh = np.linalg.svd(u)
    return a @ bh


def propagate(h_n: np.ndarray, control_op: np.ndarray, field: ControlField,
              reunitarize_every: int = 100) -> np.ndarray:
    """U(T) for the piecewise-constant field, re-unitarized periodically."""
    assert_hermitian(h_n, name="H_n")
    assert_hermitian(control_op, name="control_op")
    if h_n.shape != control_op.shape:
        raise ValueError("H_n and control_op dimensions differ")
    u = np.eye(h_n.shape[0], dtype=np.complex128)
    _, _, us = _step_unitaries(h_n, control_op, field)
    for k, uk in enumerate(us, start=1):
        u = uk @ u
        if reunitarize_every and k % reunitarize_every == 0:
            u = _polar_projection(u)
    return u


def unitary_fidelity(u: np.ndarray, u_target: np.ndarray) -> float:
    """F = |Tr(U_target' U)|^2 / N^2, invariant under a global phase."""
    if u.shape != u_target.shape:
        raise ValueError(f"dimension mismatch: {u.shape} vs {u_target.shape}")
    n = u.shape[0]
    return float(abs(np.vdot(u_target, u)) ** 2) / n**2


def propagate_fidelity(h_n: np.ndarray, control_op: np.ndarray,
                       u_target: np.ndarray, amplitudes: np.ndarray,
                       dt: float) -> float:
    """Fidelity only (the cheap path used inside line searches)."""
    field = ControlField(dt=dt, amplitudes=amplitudes)
    _, _, us = _step_unitaries(h_n, control_op, field)
    u = np.eye(h_n.shape[0], dtype=np.complex128)
    for uk in us:
        u = uk @ u
    return unitary_fidelity(u, u_target)


def fidelity_and_gradient(h_n: np.ndarray, control_op: np.ndarray,
                          u_target: np.ndarray, amplitudes: np.ndarray,
                          dt: float) -> tuple[float, np.ndarray]:
    """Fidelity and its exact gradient over the slice amplitudes."""
    m = amplitudes.size
    n = h_n.shape[0]
    field = ControlField(dt=dt, amplitudes=amplitudes)
    hs, ws, us = _step_unitaries(h_n, control_op, field)
    ws_h = np.conj(np.swapaxes(ws, 1, 2))

    prefix = np.empty((m + 1, n, n), dtype=np.complex128)  # prefix[k] = U_k ... U_1
    prefix[0] = np.eye(n)
    for k in range(m):
        prefix[k + 1] = us[k] @ prefix[k]
    z = np.vdot(u_target, prefix[m])
    fidelity = float(abs(z) ** 2) / n**2

    # divided differences of exp(-i h dt) per slice, stacked
    ew = np.exp(-1j * dt * hs)
    dw = hs[:, :, None] - hs[:, None, :]
    num = ew[:, :, None] - ew[:, None, :]
    with np.errstate(divide="ignore", invalid="ignore"):
        d = np.where(np.abs(dw) > 1e-12, num / np.where(dw == 0, 1.0, dw), 0.0)
    mid = 0.5 * (hs[:, :, None] + hs[:, None, :])
    close = np.abs(dw) <= 1e-12
    d[close] = (-1j * dt * np.exp(-1j * dt * mid))[close]

    ck = ws_h @ control_op[None, :, :] @ ws
    dck_t = np.swapaxes(d * ck, 1, 2)

    grad = np.empty(m)
    suffix = u_target.conj().T  # at k: U_target' U_M ... U_{k+1}
    for k in range(m - 1, -1, -1):
        y = prefix[k] @ suffix  # Tr(suffix dU_k prefix[k]) = Tr(y dU_k)
        yw = ws_h[k] @ y @ ws[k]
        dz = np.sum(yw * dck_t[k])
        grad[k] = 2.0 * (np.conj(z) * dz).real / n**2
        suffix = suffix @ us[k]
    return fidelity, grad


@dataclass
class GrapeOptions:
    target_fidelity: float = 0.999
    max_iter: int = 2000
    grad_tol: float = 1e-12
    stag_tol: float = 1e-12
    stag_window: int = 50
    record_trace: bool = True


@dataclass
class PropagationResult:
    U_final: np.ndarray
    fidelity: float
    fidelity_trace: list[float]
    reason: str
    converged: bool
    stagnated: bool
    iterations: int


def grape_optimize(h_n: np.ndarray, control_op: np.ndarray, u_target: np.ndarray,
                   field0: ControlField, opts: GrapeOptions | None = None
                   ) -> tuple[ControlField, PropagationResult]:
    """Gradient ascent on fidelity over the field amplitudes."""
    opts = opts or GrapeOptions()
    dt = field0.dt

    def fun(x: np.ndarray) -> tuple[float, np.ndarray]:
        return fidelity_and_gradient(h_n, control_op, u_target, x, dt)

    def value(x: np.ndarray) -> float:
        return propagate_fidelity(h_n, control_op, u_target, x, dt)

    res = ascent.maximize(
        fun, field0.amplitudes, value_fun=value,
        grad_tol=opts.grad_tol, max_iter=opts.max_iter,
        stag_tol=opts.stag_tol, stag_window=opts.stag_window,
        target_value=opts.target_fidelity, record_trace=opts.record_trace,
    )
    best = ControlField(dt=dt, amplitudes=res.x)
    u_final = propagate(h_n, control_op, best)
    return best, PropagationResult(
        U_final=u_final, fidelity=unitary_fidelity(u_final, u_target),
        fidelity_trace=res.trace, reason=res.reason,
        converged=res.reason in ("target", "gtol"),
        stagnated=res.reason in ("stagnation", "linesearch"),
        iterations=res.iterations,
    )
