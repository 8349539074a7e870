"""Density matrices, thermal states, and entropy/coherence metrics.

States are plain complex128 ndarrays (Hermitian, unit trace, PSD); population
vectors are 1-D float arrays. ``basis`` arguments take an
:class:`~cohgen.spinsys.EnergyBasis`; passing ``basis=None`` means the state
is already expressed in the energy representation.

All entropies are in nats. Populations below ``POPULATION_CLIP`` are treated
as exact zeros in entropy sums (0 ln 0 = 0), absorbing eigensolver roundoff.
"""

from __future__ import annotations

import math
import warnings

import numpy as np

from .spinsys import EnergyBasis, assert_hermitian

POPULATION_CLIP = 1e-12


class CoherenceNormalizationWarning(UserWarning):
    """The N=2 coherence prefactor 2N/(N-2) is singular; raw sum reported."""


def validate_density(rho: np.ndarray, tol: float = 1e-12) -> None:
    assert_hermitian(rho, tol=tol, name="rho")
    tr = complex(np.trace(rho))
    if abs(tr - 1.0) > tol:
        raise ValueError(f"Tr(rho) = {tr} is not 1 within {tol:.1e}")
    lo = float(np.min(np.linalg.eigvalsh(rho)))
    if lo < -tol:
        raise ValueError(f"rho has negative eigenvalue {lo:.3e}")


def validate_populations(p: np.ndarray, tol: float = 1e-12) -> None:
    if np.min(p) < -tol:
        raise ValueError(f"population entries must be >= 0, min is {np.min(p):.3e}")
    if abs(float(np.sum(p)) - 1.0) > tol:
        raise ValueError(f"populations sum to {np.sum(p)}, not 1")


def thermal_populations(eigenvalues: np.ndarray, beta: float) -> np.ndarray:
    """Boltzmann weights exp(-beta e_k)/Z over an ascending spectrum."""
    if beta < 0:
        raise ValueError(f"beta must be >= 0, got {beta}")
    e = np.asarray(eigenvalues, dtype=float)
    if math.isinf(beta):
        ground = e - e[0] <= 0.0
        return ground.astype(float) / np.count_nonzero(ground)
    w = np.exp(-beta * (e - e[0]))  # shift guards against overflow at large beta
    return w / np.sum(w)


def thermal_state(basis: EnergyBasis, beta: float) -> np.ndarray:
    """rho_T = exp(-beta H)/Z, diagonal in the energy representation."""
    q = thermal_populations(basis.eigenvalues, beta)
    v = basis.eigenvectors
    return (v * q) @ v.conj().T


def energy_populations(rho: np.ndarray, basis: EnergyBasis | None = None) -> np.ndarray:
    """Diagonal of rho in the energy representation, clipped and renormalized."""
    if basis is not None:
        if rho.shape[0] != basis.dim:
            raise ValueError(f"dimension mismatch: rho is {rho.shape[0]}, basis is {basis.dim}")
        rho = basis.to_energy(rho)
    p = np.clip(np.diag(rho).real, 0.0, None)
    s = float(np.sum(p))
    if abs(s - 1.0) > 1e-10:
        raise ValueError(f"populations sum to {s}, rho is not unit trace")
    return p / s


def shannon_entropy(p: np.ndarray) -> float:
    """-sum p ln p with 0 ln 0 = 0."""
    p = np.asarray(p, dtype=float)
    mask = p > POPULATION_CLIP
    return float(-np.sum(p[mask] * np.log(p[mask])))


def von_neumann_entropy(rho: np.ndarray) -> float:
    """Shannon entropy of the eigenvalue spectrum; unitarily invariant."""
    return shannon_entropy(np.clip(np.linalg.eigvalsh(rho), 0.0, None))


def divergence_to_diagonal(rho: np.ndarray, basis: EnergyBasis | None = None) -> float:
    """D(rho | rho_E) = S_E - S_vN >= 0; zero iff rho commutes with H."""
    return shannon_entropy(energy_populations(rho, basis)) - von_neumann_entropy(rho)


def offdiagonal_square_sum(rho: np.ndarray, basis: EnergyBasis | None = None) -> float:
    """Sum over i<j of |rho_ij|^2 in the energy representation."""
    if basis is not None:
        rho = basis.to_energy(rho)
    n = rho.shape[0]
    iu = np.triu_indices(n, 1)
    return float(np.sum(np.abs(rho[iu]) ** 2))


def coherence_value(rho: np.ndarray, basis: EnergyBasis | None = None) -> tuple[float, bool]:
    """Coherence measure and whether the 2N/(N-2) normalization applied.

    For N = 2 the prefactor is singular and the raw off-diagonal sum is
    returned with ``normalized=False``.
    """
    n = rho.shape[0]
    s = offdiagonal_square_sum(rho, basis)
    if n == 2:
        return s, False
    return 2.0 * n / (n - 2.0) * s, True


def coherence_C(rho: np.ndarray, basis: EnergyBasis | None = None) -> float:
    """Normalized off-diagonal coherence; warns and returns the raw sum at N=2."""
    value, normalized = coherence_value(rho, basis)
    if not normalized:
        warnings.warn(
            "coherence normalization 2N/(N-2) is singular for N=2; "
            "returning the un-normalized off-diagonal sum",
            CoherenceNormalizationWarning,
            stacklevel=2,
        )
    return value


def bhattacharyya_overlap(p: np.ndarray, q: np.ndarray) -> float:
    """sum sqrt(p q); 1 iff the distributions coincide."""
    p = np.asarray(p, dtype=float)
    q = np.asarray(q, dtype=float)
    if p.shape != q.shape:
        raise ValueError(f"length mismatch: {p.shape} vs {q.shape}")
    return min(1.0, float(np.sum(np.sqrt(np.clip(p, 0, None) * np.clip(q, 0, None)))))


def mean_energy(rho: np.ndarray, h: np.ndarray) -> float:
    """Tr(rho H)."""
    if rho.shape != h.shape:
        raise ValueError(f"dimension mismatch: rho {rho.shape} vs H {h.shape}")
    val = complex(np.trace(rho @ h))
    if abs(val.imag) > 1e-10 * max(1.0, abs(val.real)):
        raise ValueError(f"Tr(rho H) has imaginary part {val.imag:.3e}")
    return val.real


def relative_energy_error(e: float, e_target: float) -> float:
    """sigma = (E - E_T)/E_T."""
    if e_target == 0.0:
        raise ValueError("target energy is zero; relative error undefined "
                         "(report the absolute error instead)")
    return (e - e_target) / e_target


def log_partition(eigenvalues: np.ndarray, beta: float) -> float:
    """ln Z = ln sum exp(-beta e_k), overflow-safe."""
    e = np.asarray(eigenvalues, dtype=float)
    shifted = -beta * (e - e[0])
    return float(np.log(np.sum(np.exp(shifted))) - beta * e[0])


def beta_from_energy(eigenvalues: np.ndarray, energy: float,
                     beta_max: float = 1e8, tol: float = 1e-13) -> float:
    """Inverse temperature whose canonical mean energy equals ``energy``.

    The canonical energy decreases monotonically from mean(e) at beta=0 to
    min(e) as beta -> inf; only that branch (beta >= 0) is supported.
    """
    e = np.asarray(eigenvalues, dtype=float)

    def canonical_energy(beta: float) -> float:
        return float(np.dot(thermal_populations(e, beta), e))

    e_hi, e_lo = canonical_energy(0.0), float(e[0])
    if not (e_lo - 1e-12 <= energy <= e_hi + 1e-12):
        raise ValueError(f"energy {energy} outside canonical range [{e_lo}, {e_hi}]")
    lo, hi = 0.0, 1.0
    while canonical_energy(hi) > energy and hi < beta_max:
        lo, hi = hi, hi * 2.0
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if canonical_energy(mid) > energy:
            lo = mid
        else:
            hi = mid
        if hi - lo <= tol * max(1.0, hi):
            break
    return 0.5 * (lo + hi)
