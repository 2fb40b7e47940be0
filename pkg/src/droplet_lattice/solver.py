"""Eigendecomposition, spectral propagation, perturbation theory, and the
variational droplet ansatz.

All reported eigenvalues are E - E_0b: the rotating-frame eigenvalue plus
the two-excitation detuning carried by the Hamiltonian container.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np
import scipy.sparse as sp
import scipy.sparse.linalg as spla
from scipy.linalg import eigh

from .errors import BasisMismatch, BracketError, ConvergenceError, DegeneracyWarning
from .hamiltonians import BasisKind, FullOperator, HamiltonianMatrix
from .observables import WavepacketState

DENSE_FALLBACK_DIM = 4000
DEGENERACY_GAP = 1e-10


@dataclass
class SpectralDecomposition:
    """Eigenpairs of one Hamiltonian, energies ascending as E - E_0b."""

    kind: BasisKind
    energies: np.ndarray
    vectors: np.ndarray = field(repr=False)
    residual_norms: np.ndarray = field(repr=False)
    energy_offset: float
    dim: int
    dims: dict

    @property
    def is_full(self) -> bool:
        return len(self.energies) == self.dim

    def rotating_frame_energies(self) -> np.ndarray:
        return self.energies - self.energy_offset


def _canonicalize_signs(vectors: np.ndarray) -> np.ndarray:
    """Fix each eigenvector's global phase: largest component positive real."""
    out = vectors.copy()
    lead = np.argmax(np.abs(out), axis=0)
    for col, row in enumerate(lead):
        pivot = out[row, col]
        if np.iscomplexobj(out):
            mag = abs(pivot)
            if mag > 0:
                out[:, col] *= np.conj(pivot) / mag
        elif pivot < 0:
            out[:, col] = -out[:, col]
    return out


def _matvec_of(h: HamiltonianMatrix):
    payload = h.payload
    if isinstance(payload, FullOperator):
        return payload.matvec
    if isinstance(payload, np.ndarray):
        return lambda v: payload @ v
    return lambda v: payload @ v


def eigensolve(
    h: HamiltonianMatrix,
    k_lowest: Optional[int] = None,
    ncv: Optional[int] = None,
    v0: Optional[np.ndarray] = None,
) -> SpectralDecomposition:
    """Diagonalize a tagged Hamiltonian.

    Dense payloads get a full (or index-subset) symmetric decomposition;
    matrix-free and large sparse payloads get an iterative lowest-k solve.
    """
    payload = h.payload
    dim = h.dim
    if isinstance(payload, np.ndarray):
        if k_lowest is None:
            vals, vecs = eigh(payload)
        else:
            vals, vecs = eigh(payload, subset_by_index=[0, min(k_lowest, dim) - 1])
    elif isinstance(payload, sp.spmatrix) and (k_lowest is None or dim <= DENSE_FALLBACK_DIM):
        dense = payload.toarray()
        if k_lowest is None:
            vals, vecs = eigh(dense)
        else:
            vals, vecs = eigh(dense, subset_by_index=[0, min(k_lowest, dim) - 1])
    else:
        if k_lowest is None:
            raise ConvergenceError(
                f"full decomposition of a dim-{dim} matrix-free operator is not supported; "
                "pass k_lowest"
            )
        op = spla.LinearOperator((dim, dim), matvec=_matvec_of(h), dtype=complex)
        if ncv is None:
            ncv = min(dim - 1, max(6 * k_lowest, 80))
        try:
            vals, vecs = spla.eigsh(op, k=k_lowest, which="SA", ncv=ncv, v0=v0, maxiter=20000)
        except spla.ArpackNoConvergence as exc:
            raise ConvergenceError(f"iterative eigensolver stalled: {exc}") from exc
        order = np.argsort(vals)
        vals, vecs = vals[order], vecs[:, order]
    vecs = _canonicalize_signs(vecs)
    matvec = _matvec_of(h)
    residuals = np.array(
        [np.linalg.norm(matvec(vecs[:, i]) - vals[i] * vecs[:, i]) for i in range(vecs.shape[1])]
    )
    scale = max(np.abs(vals).max() if len(vals) else 1.0, 1e-30)
    if residuals.max() > 1e-8 * max(scale, 1.0):
        raise ConvergenceError(
            f"residual {residuals.max():g} too large for spectrum scale {scale:g}",
            residuals=residuals,
        )
    return SpectralDecomposition(
        kind=h.kind,
        energies=vals + h.energy_offset,
        vectors=vecs,
        residual_norms=residuals,
        energy_offset=h.energy_offset,
        dim=dim,
        dims=dict(h.dims),
    )


def propagate(
    decomp: SpectralDecomposition, psi0: WavepacketState, times: Sequence[float]
) -> list[WavepacketState]:
    """Evolve psi0 through the spectral representation at the given times."""
    if psi0.kind != decomp.kind:
        raise BasisMismatch(f"state on {psi0.kind}, decomposition on {decomp.kind}")
    if len(psi0.coefficients) != decomp.dim:
        raise BasisMismatch(
            f"state dim {len(psi0.coefficients)} != decomposition dim {decomp.dim}"
        )
    if not decomp.is_full:
        raise BasisMismatch("propagation needs the full decomposition")
    times = np.asarray(times, dtype=float)
    weights = decomp.vectors.conj().T @ psi0.coefficients
    phases = np.exp(
        -1j * np.outer(decomp.rotating_frame_energies(), times)
    ) * weights[:, None]
    snapshots = decomp.vectors @ phases
    return [
        WavepacketState(
            kind=decomp.kind,
            coefficients=snapshots[:, col],
            time=float(t),
            dims=dict(decomp.dims),
        )
        for col, t in enumerate(times)
    ]


def first_order_perturbation(
    decomp: SpectralDecomposition,
    pair_hop: np.ndarray,
    indices: Optional[Sequence[int]] = None,
) -> np.ndarray:
    """First-order corrected energies E0 + <v|pair_hop|v> for selected states.

    indices are 0-based positions in the decomposition; defaults to all.
    Warns when adjacent levels are closer than the degeneracy gap, where
    the non-degenerate formula stops being meaningful.
    """
    if decomp.kind != BasisKind.SPIN:
        raise BasisMismatch("perturbation theory runs on the spin-model decomposition")
    if indices is None:
        indices = np.arange(len(decomp.energies))
    indices = np.asarray(indices, dtype=int)
    gaps = []
    for n in indices:
        if n > 0:
            gaps.append(abs(decomp.energies[n] - decomp.energies[n - 1]))
        if n + 1 < len(decomp.energies):
            gaps.append(abs(decomp.energies[n + 1] - decomp.energies[n]))
    if gaps and min(gaps) < DEGENERACY_GAP:
        warnings.warn(
            "selected level nearly degenerate; first-order theory unreliable",
            DegeneracyWarning,
            stacklevel=2,
        )
    vecs = decomp.vectors[:, indices]
    corrections = np.einsum("pi,pq,qi->i", vecs.conj(), pair_hop, vecs).real
    return decomp.energies[indices] + corrections


# ---------------------------------------------------------------------------
# variational droplet ansatz
# ---------------------------------------------------------------------------


@dataclass
class VariationalResult:
    """Optimized droplet family: one relative length, one state per mode."""

    length: float
    energies: np.ndarray
    coefficients: np.ndarray = field(repr=False)  # (P, n_max), orthonormal columns
    n_max: int
    energy_offset: float


def variational_vector(h_spin: HamiltonianMatrix, length: float, n: int) -> np.ndarray:
    """Normalized product ansatz: box mode n along the center of mass,
    Lorentzian of the given length along the relative coordinate."""
    basis = h_spin.pair_basis
    if basis is None:
        raise BasisMismatch("spin Hamiltonian lacks its pair basis")
    n_e = basis.n_qubits
    box = np.sqrt(2 / n_e) * np.sin(n * np.pi * basis.centers / n_e)
    lorentz = 2 * np.sqrt(length**3 / np.pi) / (
        (basis.separations - 1) ** 2 + length**2
    )
    vec = box * lorentz
    return vec / np.linalg.norm(vec)


def variational_energy(h_spin: HamiltonianMatrix, length: float, n: int = 1) -> float:
    """Rayleigh quotient of the ansatz, reported as E - E_0b."""
    h_spin.require_kind(BasisKind.SPIN)
    if length <= 0:
        raise BracketError(f"length must be positive, got {length}")
    vec = variational_vector(h_spin, length, n)
    return float(vec @ h_spin.payload @ vec) + h_spin.energy_offset


def golden_section(fun, lo: float, hi: float, xatol: float) -> tuple[float, float]:
    """Deterministic golden-section minimum of a unimodal scalar function."""
    invphi = (np.sqrt(5) - 1) / 2
    a, b = float(lo), float(hi)
    c = b - invphi * (b - a)
    d = a + invphi * (b - a)
    fc, fd = fun(c), fun(d)
    while (b - a) > xatol:
        if fc <= fd:
            b, d, fd = d, c, fc
            c = b - invphi * (b - a)
            fc = fun(c)
        else:
            a, c, fc = c, d, fd
            d = a + invphi * (b - a)
            fd = fun(d)
    x = c if fc <= fd else d
    return x, min(fc, fd)


def minimize_variational(
    h_spin: HamiltonianMatrix,
    n_max: Optional[int] = None,
    bracket: tuple[float, float] = (1.0, 30.0),
    xatol: float = 1e-3,
) -> VariationalResult:
    """Optimize the relative length on the ground mode, then reuse it.

    The same length is shared by all modes since the relative profile is
    mode independent.  The returned family is orthonormalized in order of
    increasing mode number (the ground vector itself is unchanged), so
    overlaps with the family are projections onto its span.
    """
    lo, hi = bracket
    length, _ = golden_section(lambda L: variational_energy(h_spin, L, 1), lo, hi, xatol)
    if length - lo < 5 * xatol or hi - length < 5 * xatol:
        raise BracketError(
            f"variational optimum {length:.4g} sits at the bracket edge {bracket}"
        )
    basis = h_spin.pair_basis
    if n_max is None:
        n_max = max(1, round(basis.n_qubits / length))
    raw = np.stack(
        [variational_vector(h_spin, length, n) for n in range(1, n_max + 1)], axis=1
    )
    ortho, _ = np.linalg.qr(raw)
    # align each orthonormal column with its raw parent
    for col in range(n_max):
        if ortho[:, col] @ raw[:, col] < 0:
            ortho[:, col] = -ortho[:, col]
    energies = (
        np.einsum("pi,pq,qi->i", ortho, h_spin.payload, ortho) + h_spin.energy_offset
    )
    return VariationalResult(
        length=float(length),
        energies=energies,
        coefficients=ortho,
        n_max=n_max,
        energy_offset=h_spin.energy_offset,
    )


def scan_variational(h_spin: HamiltonianMatrix, lengths: Sequence[float], n: int = 1):
    """Energy along a grid of lengths, for unimodality checks and figures."""
    return np.array([variational_energy(h_spin, L, n) for L in lengths])
