"""Measurement-layer quantities: correlations, initial states, overlap
decompositions, droplet classification, and loss estimates."""

from __future__ import annotations

import csv
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .errors import BasisMismatch, DomainError
from .hamiltonians import BasisKind
from .params import J, PairBasis, SystemParams


@dataclass
class WavepacketState:
    """Expansion coefficients of one two-excitation state at one time.

    The pair coefficients always occupy the leading ``dims['pairs']``
    slots; photon-sector slots follow when the basis has them.
    """

    kind: object
    coefficients: np.ndarray = field(repr=False)
    time: float
    dims: dict

    def norm(self) -> float:
        return float(np.linalg.norm(self.coefficients))

    def pair_block(self) -> np.ndarray:
        return self.coefficients[: self.dims["pairs"]]

    def pair_weight(self) -> float:
        return float(np.sum(np.abs(self.pair_block()) ** 2))


@dataclass
class CorrelationRecord:
    """Pair correlation (and optionally the full spin-spin grid)."""

    separations: np.ndarray
    probabilities: np.ndarray
    grid: Optional[np.ndarray] = None

    def peak_separation(self) -> int:
        """argmax over integer separation, ties broken toward smaller values."""
        return int(self.separations[np.argmax(self.probabilities)])


def pair_correlation(
    state: WavepacketState, basis: PairBasis, include_grid: bool = False
) -> CorrelationRecord:
    """Probability that the two excitations sit a given number of qubits apart."""
    weights = np.abs(state.pair_block()) ** 2
    acc = np.bincount(basis.separations, weights=weights, minlength=basis.n_qubits)
    alphas = np.arange(1, basis.n_qubits)
    grid = spin_spin_correlation(state, basis) if include_grid else None
    return CorrelationRecord(separations=alphas, probabilities=acc[1:], grid=grid)


def spin_spin_correlation(state: WavepacketState, basis: PairBasis) -> np.ndarray:
    """|d_ij|^2 on the full (i, j) grid, mirrored across the diagonal and
    zero on it, matching the plotting convention for correlation maps."""
    n_e = basis.n_qubits
    grid = np.zeros((n_e, n_e))
    w = np.abs(state.pair_block()) ** 2
    grid[basis.i_index - 1, basis.j_index - 1] = w
    grid[basis.j_index - 1, basis.i_index - 1] = w
    return grid


def correlation_record(state: WavepacketState, basis: PairBasis) -> CorrelationRecord:
    """Pair correlation together with the full spin-spin grid."""
    return pair_correlation(state, basis, include_grid=True)


def initial_state(kind: str, basis: PairBasis) -> WavepacketState:
    """Normalized partially or fully symmetric two-excitation state."""
    n_e = basis.n_qubits
    coeff = np.zeros(basis.size)
    if kind.lower() == "fs":
        coeff[:] = np.sqrt(2.0 / (n_e * (n_e - 1)))
    elif kind.lower() == "ps":
        nearest = basis.separations == 1
        coeff[nearest] = 1.0 / np.sqrt(n_e - 1)
    else:
        raise BasisMismatch(f"unknown initial state kind {kind!r}; use 'ps' or 'fs'")
    return WavepacketState(
        kind=BasisKind.SPIN, coefficients=coeff, time=0.0, dims={"pairs": basis.size}
    )


def overlap_spectrum(psi0: WavepacketState, decomp) -> tuple[np.ndarray, np.ndarray]:
    """Squared projections of psi0 on each eigenstate, sorted by energy."""
    if psi0.kind != decomp.kind:
        raise BasisMismatch(f"state on {psi0.kind}, decomposition on {decomp.kind}")
    if len(psi0.coefficients) != decomp.dim:
        raise BasisMismatch("state and decomposition dimensions differ")
    weights = np.abs(decomp.vectors.conj().T @ psi0.coefficients) ** 2
    return decomp.energies.copy(), weights


def photonic_fraction(state: WavepacketState) -> float:
    """Total weight outside the qubit-pair block, for photon-carrying bases."""
    if "pairs" not in state.dims or len(state.dims) < 2:
        raise BasisMismatch("state basis has no photon sector")
    total = state.norm() ** 2
    return float(total - state.pair_weight())


def loss_estimates(params: SystemParams, kappa: float) -> tuple[float, float]:
    """Photon admixture of the hybridized single-excitation state and the
    resulting effective loss rate (in units of J and J/hbar)."""
    bracket = 0.5 * (-params.delta + np.sqrt(params.u**2 + 16 * J * J)) - 2 * J
    if bracket <= 0:
        raise DomainError(f"loss estimate undefined: band-edge detuning {bracket:g} <= 0")
    p_ph = params.g**2 / (4 * np.sqrt(J)) * bracket ** (-1.5)
    return float(p_ph), float(p_ph * kappa)


def distribution_drift(p_a: np.ndarray, p_b: np.ndarray) -> float:
    """Sup-norm distance between cumulative pair-correlation profiles.

    Compares two arrays on their common leading separations; mass beyond
    the shorter range counts through the cumulative tail.
    """
    n = min(len(p_a), len(p_b))
    return float(np.abs(np.cumsum(p_a[:n]) - np.cumsum(p_b[:n])).max())


# ---------------------------------------------------------------------------
# droplet classification
# ---------------------------------------------------------------------------


@dataclass
class DropletClassification:
    """Which eigenstates are droplet-like, with their mode assignment."""

    indices: np.ndarray          # 1-based positions in ascending energy order
    mode_numbers: np.ndarray     # best-matching variational mode per state
    overlaps: np.ndarray         # squared overlap with the variational span
    supported: bool              # False when the ansatz is array-size limited

    @property
    def count(self) -> int:
        return len(self.indices)


def classify_droplet_states(
    decomp,
    variational,
    reference=None,
    overlap_threshold: float = 0.9,
    growth_tol: float = 0.10,
) -> DropletClassification:
    """Label eigenstates whose projection onto the variational span is large.

    A droplet family must be self bound, so when a reference optimization
    on an enlarged qubit array is supplied and its optimal length grew by
    more than growth_tol, no state is labeled droplet-like: the ansatz is
    then tracking the array size rather than an intrinsic length.
    """
    if decomp.kind != BasisKind.SPIN:
        raise BasisMismatch("droplet classification runs on the spin-model decomposition")
    if reference is not None:
        growth = reference.length / variational.length - 1.0
        if growth > growth_tol:
            empty = np.array([], dtype=int)
            return DropletClassification(
                indices=empty, mode_numbers=empty, overlaps=np.array([]), supported=False
            )
    span = variational.coefficients
    proj = span.T @ decomp.vectors            # (n_max, n_states)
    totals = np.sum(np.abs(proj) ** 2, axis=0)
    hits = np.nonzero(totals > overlap_threshold)[0]
    modes = np.argmax(np.abs(proj[:, hits]) ** 2, axis=0) + 1 if len(hits) else np.array([], int)
    return DropletClassification(
        indices=hits + 1,
        mode_numbers=np.asarray(modes, dtype=int),
        overlaps=totals[hits],
        supported=True,
    )


# ---------------------------------------------------------------------------
# CSV emitters
# ---------------------------------------------------------------------------


def write_pair_corr_csv(record: CorrelationRecord, path):
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["alpha", "P"])
        for a, p in zip(record.separations, record.probabilities):
            writer.writerow([int(a), f"{p:.12g}"])


def write_overlap_csv(energies, weights, path):
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["E_minus_E0b", "weight"])
        for e, w in zip(energies, weights):
            writer.writerow([f"{e:.12g}", f"{w:.12g}"])


def write_dynamics_csv(times, series: dict, path):
    """Columns: t then one P_alpha<k> column per requested separation."""
    keys = sorted(series)
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["t"] + [f"P_alpha{k}" for k in keys])
        for row, t in enumerate(times):
            writer.writerow([f"{t:.12g}"] + [f"{series[k][row]:.12g}" for k in keys])


def write_corr_snapshot_csv(grid: np.ndarray, path):
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["i", "j", "P"])
        n_e = grid.shape[0]
        for i in range(n_e):
            for j in range(n_e):
                writer.writerow([i + 1, j + 1, f"{grid[i, j]:.12g}"])
