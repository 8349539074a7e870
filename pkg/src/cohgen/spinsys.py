"""Spin-j operator algebra, model Hamiltonian, and energy eigenbasis.

All matrices are dense complex128 ndarrays in the |j,m> basis ordered
m = j ... -j, with hbar = 1. States and operators elsewhere in the package
are expressed either in this basis or in the energy eigenbasis defined by
``eigendecompose``; the ``EnergyBasis`` object performs the change of
representation.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

HERMITICITY_TOL = 1e-12


def _readonly(a: np.ndarray) -> np.ndarray:
    a = np.ascontiguousarray(a)
    a.setflags(write=False)
    return a


def is_half_integer(j: float) -> bool:
    return abs(2 * j - round(2 * j)) < 1e-12


def assert_hermitian(a: np.ndarray, tol: float = HERMITICITY_TOL, name: str = "matrix") -> None:
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError(f"{name} must be square, got shape {a.shape}")
    dev = np.max(np.abs(a - a.conj().T))
    if dev > tol:
        raise ValueError(f"{name} is not Hermitian (max deviation {dev:.3e} > {tol:.1e})")


def build_angular_momentum(j: float) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Spin-j matrices (Jx, Jy, Jz) in the |j,m> basis, m = j ... -j."""
    if not is_half_integer(j) or j < 0.5:
        raise ValueError(f"j must be a half-integer >= 1/2, got {j}")
    n = round(2 * j + 1)
    m = j - np.arange(n)  # j, j-1, ..., -j
    jz = np.diag(m).astype(np.complex128)
    # raising operator: J+ |j,m> = sqrt(j(j+1) - m(m+1)) |j,m+1>
    jp = np.zeros((n, n), dtype=np.complex128)
    for k in range(n - 1):
        mk = m[k + 1]
        jp[k, k + 1] = np.sqrt(j * (j + 1) - mk * (mk + 1))
    jm = jp.conj().T
    jx = (jp + jm) / 2
    jy = (jp - jm) / 2j
    return jx, jy, jz


@dataclass(frozen=True)
class SpinSystem:
    """Angular-momentum operators for a single spin j (dimension N = 2j+1)."""

    j: float
    N: int
    Jx: np.ndarray
    Jy: np.ndarray
    Jz: np.ndarray

    @classmethod
    def make(cls, j: float) -> "SpinSystem":
        jx, jy, jz = build_angular_momentum(j)
        return cls(j=float(j), N=round(2 * j + 1),
                   Jx=_readonly(jx), Jy=_readonly(jy), Jz=_readonly(jz))


def build_model_hamiltonian(sys: SpinSystem, coupling_u: float = 1.0,
                            coupling_delta: float = 1.0) -> np.ndarray:
    """H0 = U Jz^2 + Delta Jx."""
    return coupling_u * (sys.Jz @ sys.Jz) + coupling_delta * sys.Jx


def normalize_hamiltonian(h0: np.ndarray) -> np.ndarray:
    """Hn = H0 / Tr(H0^2); the common energy scale for all system sizes."""
    assert_hermitian(h0, name="H0")
    t = float(np.trace(h0 @ h0).real)
    if t <= 0.0:
        raise ValueError("Tr(H0^2) must be positive; cannot normalize a zero Hamiltonian")
    return h0 / t


@dataclass(frozen=True)
class EnergyBasis:
    """Eigenvalues (ascending) and orthonormal eigenvectors of a Hamiltonian.

    Columns of ``eigenvectors`` carry a deterministic phase (largest-magnitude
    component real positive) so repeated decompositions are bit-identical.
    """

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray

    @property
    def dim(self) -> int:
        return self.eigenvalues.shape[0]

    def hamiltonian(self) -> np.ndarray:
        v = self.eigenvectors
        return (v * self.eigenvalues) @ v.conj().T

    def to_energy(self, a: np.ndarray) -> np.ndarray:
        """Rotate an operator into the energy representation: V† A V."""
        v = self.eigenvectors
        return v.conj().T @ a @ v

    def from_energy(self, a: np.ndarray) -> np.ndarray:
        """Inverse of :meth:`to_energy`."""
        v = self.eigenvectors
        return v @ a @ v.conj().T


def _fix_phase(col: np.ndarray) -> np.ndarray:
    k = int(np.argmax(np.abs(col)))
    z = col[k]
    if abs(z) == 0.0:
        return col
    return col * (z.conj() / abs(z))


def eigendecompose(h: np.ndarray, degeneracy_tol: float = 1e-12) -> EnergyBasis:
    """Hermitian eigendecomposition with a deterministic basis convention.

    Degenerate blocks are re-spanned by Gram-Schmidt over the projections of
    the standard basis vectors (in index order), then every column's
    largest-magnitude component is made real positive.
    """
    assert_hermitian(h, name="H")
    e, v = np.linalg.eigh(h)
    scale = max(1.0, float(np.max(np.abs(e))))
    # group indices of (numerically) equal eigenvalues
    blocks: list[list[int]] = [[0]]
    for i in range(1, e.shape[0]):
        if e[i] - e[blocks[-1][-1]] <= degeneracy_tol * scale:
            blocks[-1].append(i)
        else:
            blocks.append([i])
    v = v.copy()
    for idx in blocks:
        if len(idx) > 1:
            v[:, idx] = _canonical_block_basis(v[:, idx])
    for i in range(v.shape[1]):
        v[:, i] = _fix_phase(v[:, i])
    return EnergyBasis(eigenvalues=_readonly(e), eigenvectors=_readonly(v))


def _canonical_block_basis(block: np.ndarray) -> np.ndarray:
    """Deterministic orthonormal basis of span(block columns)."""
    n, k = block.shape
    proj = block @ block.conj().T
    cols: list[np.ndarray] = []
    for i in range(n):
        w = proj[:, i].copy()
        for c in cols:
            w -= c * (c.conj() @ w)
        norm = np.linalg.norm(w)
        if norm > 1e-8:
            cols.append(w / norm)
        if len(cols) == k:
            break
    if len(cols) != k:
        raise np.linalg.LinAlgError("failed to canonicalize degenerate eigenspace")
    return np.column_stack(cols)


@dataclass(frozen=True)
class ModelSetup:
    """A spin system with its normalized Hamiltonian and energy basis."""

    system: SpinSystem
    H0: np.ndarray = field(repr=False)
    Hn: np.ndarray = field(repr=False)
    basis: EnergyBasis = field(repr=False)

    @classmethod
    def make(cls, j: float, coupling_u: float = 1.0, coupling_delta: float = 1.0) -> "ModelSetup":
        sys = SpinSystem.make(j)
        h0 = build_model_hamiltonian(sys, coupling_u, coupling_delta)
        hn = normalize_hamiltonian(h0)
        return cls(system=sys, H0=_readonly(h0), Hn=_readonly(hn), basis=eigendecompose(hn))
