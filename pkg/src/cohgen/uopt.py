"""Static optimization over unitaries U = exp(iV), V Hermitian.

The optimization variable is the real parameter vector of a Hermitian N x N
matrix (N diagonal entries, then the real and imaginary parts of the strict
upper triangle, row-major). Everything here lives in the energy
representation: the thermal input state is its population diagonal, the
target operators (dipole ladders, exp(alpha mu) generators) are given in
ascending energy order, and the returned optimal unitary acts on
energy-representation states.

Three objective kinds:
  "unconstrained"       S_E(U' rho U)  (equals the divergence up to the
                        constant S_vN, which is reported separately)
  "energy_constrained"  S_E - lambda |E - E_f|
  "generalized_target"  Tr(U' rho U O) - lambda |E - E_f|   (lambda may be 0)

The exact gradient uses the divided-difference (Daleckii-Krein) derivative
of exp(iV); central finite differences remain the default and the
cross-check.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Literal

import numpy as np
import scipy.linalg
import scipy.optimize

from .spinsys import EnergyBasis, assert_hermitian
from .states import coherence_value, shannon_entropy, von_neumann_entropy

ObjectiveKind = Literal["unconstrained", "energy_constrained", "generalized_target"]

_LOG_FLOOR = 1e-300  # populations enter ln() floored here; gradients stay finite


def n_parameters(dim: int) -> int:
    return dim * dim


def params_to_hermitian(params: np.ndarray, dim: int) -> np.ndarray:
    params = np.asarray(params, dtype=float)
    if params.shape != (dim * dim,):
        raise ValueError(f"expected {dim * dim} parameters, got {params.shape}")
    m = dim * (dim - 1) // 2
    v = np.diag(params[:dim]).astype(np.complex128)
    iu = np.triu_indices(dim, 1)
    v[iu] = params[dim:dim + m] + 1j * params[dim + m:]
    v[(iu[1], iu[0])] = np.conj(v[iu])
    return v


def hermitian_to_params(v: np.ndarray) -> np.ndarray:
    assert_hermitian(v, name="V")
    dim = v.shape[0]
    iu = np.triu_indices(dim, 1)
    return np.concatenate([np.diag(v).real, v[iu].real, v[iu].imag])


@dataclass(frozen=True)
class HermitianGenerator:
    """Hermitian matrix V parameterizing a candidate unitary exp(iV)."""

    dim: int
    params: np.ndarray

    def __post_init__(self):
        p = np.asarray(self.params, dtype=float)
        if p.shape != (self.dim * self.dim,):
            raise ValueError(f"need {self.dim * self.dim} parameters, got {p.shape}")
        object.__setattr__(self, "params", p)

    @property
    def matrix(self) -> np.ndarray:
        return params_to_hermitian(self.params, self.dim)

    @classmethod
    def from_matrix(cls, v: np.ndarray) -> "HermitianGenerator":
        return cls(dim=v.shape[0], params=hermitian_to_params(v))

    @classmethod
    def random(cls, dim: int, rng: np.random.Generator, scale: float = 1.0) -> "HermitianGenerator":
        """i.i.d. Gaussian entries: diagonal sigma=1, off-diagonal sigma=1/sqrt(2) per component."""
        m = dim * (dim - 1) // 2
        params = np.concatenate([
            rng.normal(0.0, 1.0, dim),
            rng.normal(0.0, 1.0 / math.sqrt(2.0), 2 * m),
        ]) * scale
        return cls(dim=dim, params=params)


def _as_matrix(v: HermitianGenerator | np.ndarray) -> np.ndarray:
    return v.matrix if isinstance(v, HermitianGenerator) else np.asarray(v)


def unitary_from_generator(v: HermitianGenerator | np.ndarray) -> np.ndarray:
    """U = exp(iV) via eigendecomposition."""
    vm = _as_matrix(v)
    assert_hermitian(vm, name="V")
    w, vec = np.linalg.eigh(vm)
    return (vec * np.exp(1j * w)) @ vec.conj().T


def conjugate_state(rho: np.ndarray, u: np.ndarray) -> np.ndarray:
    """rho_f = U' rho U (the paper's ordering convention)."""
    if rho.shape != u.shape:
        raise ValueError(f"dimension mismatch: rho {rho.shape} vs U {u.shape}")
    return u.conj().T @ rho @ u


def dft_unitary(n: int) -> np.ndarray:
    """W_kj = exp(2 pi i k j / n)/sqrt(n): every |W_kj|^2 = 1/n, so conjugating
    any diagonal state yields the uniform diagonal."""
    if n < 2:
        raise ValueError("need n >= 2")
    k = np.arange(n)
    return np.exp(2j * np.pi * np.outer(k, k) / n) / math.sqrt(n)


def hermitian_log_of_unitary(u: np.ndarray) -> np.ndarray:
    """Hermitian V with exp(iV) = U; robust for degenerate eigenphases."""
    t, q = scipy.linalg.schur(u, output="complex")
    phases = np.angle(np.diag(t))
    return (q * phases) @ q.conj().T


def dft_generator(n: int) -> HermitianGenerator:
    return HermitianGenerator.from_matrix(hermitian_log_of_unitary(dft_unitary(n)))


def build_dipole(n: int) -> np.ndarray:
    """Tridiagonal ladder coupling (1 on the first off-diagonals) in ascending
    energy order."""
    if n < 2:
        raise ValueError("need n >= 2")
    mu = np.zeros((n, n), dtype=np.complex128)
    idx = np.arange(n - 1)
    mu[idx, idx + 1] = 1.0
    mu[idx + 1, idx] = 1.0
    return mu


def expm_hermitian(a: np.ndarray) -> np.ndarray:
    w, v = np.linalg.eigh(a)
    return (v * np.exp(w)) @ v.conj().T


def offdiagonal_part(a: np.ndarray) -> np.ndarray:
    return a - np.diag(np.diag(a))


def build_target_operator(coupling: np.ndarray, alpha: float) -> np.ndarray:
    """O = exp(alpha coupling) - diag(exp(alpha coupling)); Hermitian, zero diagonal.

    ``coupling`` is typically the dipole ladder mu or its square mu^2.
    """
    assert_hermitian(coupling, name="coupling")
    return offdiagonal_part(expm_hermitian(alpha * coupling))


@dataclass
class Objective:
    """An optimization target over unitaries for a fixed thermal input state.

    ``rho_T`` is given in the spin basis together with ``basis``; internally
    everything is rotated once into the energy representation.
    """

    kind: ObjectiveKind
    rho_T: np.ndarray
    basis: EnergyBasis
    H_n: np.ndarray
    lam: float = 0.0
    E_f: float | None = None
    target_op: np.ndarray | None = None

    rho_e: np.ndarray = field(init=False, repr=False)
    eigenvalues: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        if self.kind not in ("unconstrained", "energy_constrained", "generalized_target"):
            raise ValueError(f"unknown objective kind {self.kind!r}")
        if self.lam < 0:
            raise ValueError("lambda must be >= 0")
        if self.kind == "energy_constrained" and self.E_f is None:
            raise ValueError("energy_constrained objective needs E_f")
        if self.kind == "generalized_target":
            if self.target_op is None:
                raise ValueError("generalized_target objective needs target_op")
            assert_hermitian(self.target_op, name="target_op")
            if np.max(np.abs(np.diag(self.target_op))) > 1e-12 * max(1.0, np.max(np.abs(self.target_op))):
                raise ValueError("target_op must have zero diagonal")
            if self.lam > 0 and self.E_f is None:
                raise ValueError("penalized generalized_target needs E_f")
        self.rho_e = self.basis.to_energy(self.rho_T)
        self.eigenvalues = np.asarray(self.basis.eigenvalues, dtype=float)

    @property
    def dim(self) -> int:
        return self.eigenvalues.shape[0]


def _populations_of(rho_f: np.ndarray) -> np.ndarray:
    return np.clip(np.diag(rho_f).real, 0.0, None)


def _objective_terms(obj: Objective, u: np.ndarray) -> tuple[float, np.ndarray, np.ndarray, float]:
    """Returns (value, rho_f, populations, energy)."""
    rho_f = u.conj().T @ obj.rho_e @ u
    p = _populations_of(rho_f)
    energy = float(p @ obj.eigenvalues)
    if obj.kind == "generalized_target":
        value = float(np.trace(rho_f @ obj.target_op).real)
    else:
        value = shannon_entropy(p)
    if obj.lam > 0 and obj.E_f is not None:
        value -= obj.lam * abs(energy - obj.E_f)
    return value, rho_f, p, energy


def evaluate_objective(obj: Objective, v: HermitianGenerator | np.ndarray) -> float:
    u = unitary_from_generator(v)
    return _objective_terms(obj, u)[0]


def exp_divided_differences(w: np.ndarray, scale: float = 1.0) -> np.ndarray:
    """Divided differences of x -> exp(i scale x) over the eigenvalues w.

    The Daleckii-Krein first derivative of the matrix exponential: for
    V = W diag(w) W', d exp(i scale V)[dV] = W (D * (W' dV W)) W' entrywise.
    """
    ew = np.exp(1j * scale * w)
    dw = w[:, None] - w[None, :]
    num = ew[:, None] - ew[None, :]
    with np.errstate(divide="ignore", invalid="ignore"):
        d = np.where(np.abs(dw) > 1e-12, num / np.where(dw == 0, 1.0, dw), 0.0)
    mid = 0.5 * (w[:, None] + w[None, :])
    close = np.abs(dw) <= 1e-12
    d[close] = (1j * scale * np.exp(1j * scale * mid))[close]
    return d


def objective_value_and_gradient(obj: Objective, params: np.ndarray) -> tuple[float, np.ndarray]:
    """Exact objective value and gradient over the N^2 real parameters."""
    dim = obj.dim
    vmat = params_to_hermitian(params, dim)
    w, vec = np.linalg.eigh(vmat)
    u = (vec * np.exp(1j * w)) @ vec.conj().T
    value, rho_f, p, energy = _objective_terms(obj, u)

    # Phi = d(value)/d(rho_f) as a Hermitian matrix
    if obj.kind == "generalized_target":
        phi = obj.target_op.copy()
    else:
        phi = np.diag(-(1.0 + np.log(np.maximum(p, _LOG_FLOOR)))).astype(np.complex128)
    if obj.lam > 0 and obj.E_f is not None:
        sgn = float(np.sign(energy - obj.E_f))
        if sgn != 0.0:
            phi = phi - obj.lam * sgn * np.diag(obj.eigenvalues)

    a = phi @ u.conj().T @ obj.rho_e
    b = vec.conj().T @ a @ vec
    k = exp_divided_differences(w) * b.T
    m = vec @ k.T @ vec.conj().T
    g = m + m.conj().T
    iu = np.triu_indices(dim, 1)
    grad = np.concatenate([np.diag(g).real, 2.0 * g[iu].real, 2.0 * g[iu].imag])
    return value, grad


def objective_fd_gradient(obj: Objective, params: np.ndarray, step: float = 1e-5) -> np.ndarray:
    """Central finite-difference gradient; the default optimization route."""
    params = np.asarray(params, dtype=float)
    grad = np.empty_like(params)
    for i in range(params.size):
        hi = params.copy(); hi[i] += step
        lo = params.copy(); lo[i] -= step
        grad[i] = (evaluate_objective(obj, params_to_hermitian(hi, obj.dim))
                   - evaluate_objective(obj, params_to_hermitian(lo, obj.dim))) / (2 * step)
    return grad


@dataclass
class OptimizerOptions:
    max_iter: int = 5000
    grad_tol: float = 1e-8
    fd_step: float = 1e-5
    init_scale: float = 1.0
    gradient: Literal["fd", "exact"] = "fd"
    seed: int | None = None
    record_trace: bool = True


@dataclass
class OptResult:
    generator: HermitianGenerator
    unitary: np.ndarray
    objective_value: float
    iterations: int
    converged: bool
    reason: str
    final_populations: np.ndarray
    final_entropy: float
    final_coherence: float
    coherence_normalized: bool
    final_energy: float
    divergence: float
    seed: int | None
    gradient_norm: float
    trace: list[float] = field(default_factory=list)


def _stop_reason(status: int, message: str) -> str:
    msg = message.upper()
    if status == 1:
        return "maxiter"
    if "PROJECTED GRADIENT" in msg or "PROJECTED_GRADIENT" in msg or "PGTOL" in msg:
        return "gtol"
    if "REL_REDUCTION" in msg or "REL REDUCTION" in msg or "FACTR" in msg:
        return "stagnation"
    if "ABNORMAL" in msg:
        return "linesearch"
    return "maxiter" if status != 0 else "gtol"


def optimize(obj: Objective, v0: HermitianGenerator | np.ndarray,
             opts: OptimizerOptions | None = None,
             seed: int | None = None) -> OptResult:
    """Local maximization of the objective from the starting generator.

    Backend: L-BFGS-B on the negated objective, stopping on the gradient
    infinity-norm (grad_tol) or the iteration budget. "stagnation" (relative
    objective change at the noise floor) and "linesearch" (no improving step,
    the generic stop at the |E - E_f| kink) count as converged; only an
    exhausted iteration budget does not.
    """
    opts = opts or OptimizerOptions()
    dim = obj.dim
    x0 = v0.params if isinstance(v0, HermitianGenerator) else hermitian_to_params(np.asarray(v0))

    if opts.gradient == "exact":
        def negfun(x: np.ndarray) -> tuple[float, np.ndarray]:
            value, grad = objective_value_and_gradient(obj, x)
            return -value, -grad
    else:
        def negfun(x: np.ndarray) -> tuple[float, np.ndarray]:
            value = evaluate_objective(obj, params_to_hermitian(x, dim))
            return -value, -objective_fd_gradient(obj, x, opts.fd_step)

    trace: list[float] = []
    callback = None
    if opts.record_trace:
        trace.append(evaluate_objective(obj, params_to_hermitian(x0, dim)))

        def callback(xk: np.ndarray) -> None:
            trace.append(evaluate_objective(obj, params_to_hermitian(xk, dim)))

    res = scipy.optimize.minimize(
        negfun, x0, jac=True, method="L-BFGS-B", callback=callback,
        options=dict(gtol=opts.grad_tol, ftol=1e-17, maxiter=opts.max_iter,
                     maxcor=30, maxls=60),
    )
    reason = _stop_reason(res.status, str(res.message))

    gen = HermitianGenerator(dim=dim, params=np.asarray(res.x, dtype=float))
    u = unitary_from_generator(gen)
    value, rho_f, p, energy = _objective_terms(obj, u)
    p = p / np.sum(p)
    s_e = shannon_entropy(p)
    c, normalized = coherence_value(rho_f)
    s_vn = von_neumann_entropy(obj.rho_e)
    return OptResult(
        generator=gen, unitary=u, objective_value=value,
        iterations=int(res.nit), converged=reason != "maxiter", reason=reason,
        final_populations=p, final_entropy=s_e,
        final_coherence=c, coherence_normalized=normalized,
        final_energy=energy, divergence=s_e - s_vn,
        seed=seed if seed is not None else opts.seed,
        gradient_norm=float(np.max(np.abs(res.jac))), trace=trace,
    )


def random_start(obj: Objective, seed: int, scale: float = 1.0) -> HermitianGenerator:
    rng = np.random.default_rng(seed)
    return HermitianGenerator.random(obj.dim, rng, scale)
