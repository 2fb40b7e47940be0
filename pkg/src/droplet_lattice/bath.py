"""Spectral data of the nonlinear photonic bath.

The single-photon band is the tight-binding dispersion E_k = omega_c -
2J cos(k).  For attractive onsite interaction (u < 0) the two-photon
sector additionally supports a bound band below the scattering continuum
near K = 0.  The bound state at center-of-mass wavevector K is obtained
from the relative-motion problem on the half line m >= 0: a symmetric
tridiagonal operator with effective hopping -2J cos(K/2), onsite u at
m = 0, and a sqrt(2) bosonic symmetrization factor on the hop out of
m = 0.  When the adaptive cutoff m_max reaches the half ring, the exact
periodic wrap term (with parity (-1)^kappa of the momentum index) is
included so that finite arrays are solved exactly.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import eigh_tridiagonal

from .errors import DomainError, NoBoundState
from .params import J, MomentumGrid, SystemParams

TAIL_TARGET = 1e-14


def single_photon_energy(params: SystemParams, k) -> np.ndarray:
    """Dispersion of one photon on the cavity array."""
    return params.omega_c - 2 * J * np.cos(np.asarray(k, dtype=float))


@dataclass(frozen=True)
class RelativeBoundState:
    """Two-photon bound state for one center-of-mass wavevector.

    ``amplitudes[m]`` holds psi(m) for m = 0 ... m_max; the full relative
    wave function is the even extension psi(-m) = psi(m) and is normalized
    over m in [-m_max, m_max].  The global phase is fixed by psi(0) > 0.
    """

    momentum_index: int
    momentum: float
    energy: float
    amplitudes: np.ndarray
    ring_wrapped: bool

    @property
    def m_max(self) -> int:
        return len(self.amplitudes) - 1

    def amplitude(self, m: int) -> float:
        m = abs(int(m))
        return float(self.amplitudes[m]) if m <= self.m_max else 0.0

    def size_second_moment(self) -> float:
        """Mean squared relative distance, a measure of the pair size."""
        m = np.arange(self.m_max + 1, dtype=float)
        w = self.amplitudes**2
        return float(2.0 * np.sum(m[1:] ** 2 * w[1:]))

    def profile_transform(self, k: np.ndarray) -> np.ndarray:
        """sum_m exp(i m (k - K/2)) psi(m), real by the even symmetry of psi."""
        m = np.arange(1, self.m_max + 1)
        phase = np.asarray(k, dtype=float) - self.momentum / 2
        return self.amplitudes[0] + 2.0 * (np.cos(np.outer(phase, m)) @ self.amplitudes[1:])


def solve_bound_state(params: SystemParams, grid: MomentumGrid, kappa_index: int) -> RelativeBoundState:
    """Lowest relative-motion eigenstate below the scattering edge at one K.

    kappa_index is the integer momentum label n with K = 2 pi n / N.
    """
    n = grid.n_cavities
    if n != params.n_cavities:
        raise DomainError(
            f"grid built for {n} cavities, parameters say {params.n_cavities}"
        )
    u = params.u
    k_com = 2 * np.pi * kappa_index / n
    hop = np.cos(k_com / 2)  # effective hopping is -2 J cos(K/2)
    half_ring = (n - 1) // 2

    decay = (np.sqrt(u * u + 16 * J * J * hop * hop) - abs(u)) / (4 * J * hop) if hop > 0 else 0.0
    if 0.0 < decay < 1.0:
        m_max = int(np.ceil(np.log(TAIL_TARGET) / np.log(decay)))
        m_max = min(max(m_max, 4), half_ring)
    else:
        m_max = min(4, half_ring)

    diag = np.full(m_max + 1, 2 * params.omega_c)
    diag[0] += u
    off = np.full(m_max, -2 * J * hop)
    off[0] *= np.sqrt(2)
    wrapped = m_max == half_ring
    if wrapped:
        # psi(m + N) = (-1)^kappa psi(m) closes the ring through the far boundary
        diag[-1] += -2 * J * hop * (-1) ** (kappa_index % 2)

    vals, vecs = eigh_tridiagonal(diag, off, select="i", select_range=(0, 0))
    energy = float(vals[0])
    edge = 2 * params.omega_c - 4 * J * abs(hop)
    if energy >= edge:
        raise NoBoundState(
            f"no state below the scattering edge at K index {kappa_index} "
            f"(E={energy:g}, edge={edge:g})"
        )
    phi = vecs[:, 0]
    if phi[0] < 0:
        phi = -phi
    psi = phi.copy()
    psi[1:] /= np.sqrt(2)
    return RelativeBoundState(
        momentum_index=int(kappa_index),
        momentum=float(k_com),
        energy=energy,
        amplitudes=psi,
        ring_wrapped=wrapped,
    )


@dataclass(frozen=True)
class BathBands:
    """Band data and detunings on the shared momentum grid."""

    grid: MomentumGrid
    single_photon_energies: np.ndarray
    bound_energies: np.ndarray
    single_detunings: np.ndarray  # E_k - omega_e, one photon against one excited qubit
    pair_detunings: np.ndarray    # E_{K,b} - 2 omega_e, bound pair against two excited qubits
    bound_states: tuple = field(repr=False, default=())

    def require_gap(self):
        if np.any(self.single_detunings <= 0):
            raise DomainError("qubit not below the single-photon band (some E_k <= omega_e)")
        if np.any(self.pair_detunings <= 0):
            raise DomainError("two-qubit energy inside the bound band (some pair detuning <= 0)")


def solve_bath(params: SystemParams) -> BathBands:
    """Bound band and detunings for every wavevector on the grid."""
    grid = MomentumGrid(params.n_cavities)
    states = tuple(solve_bound_state(params, grid, idx) for idx in grid.indices)
    e_k = single_photon_energy(params, grid.wavevectors)
    e_b = np.array([s.energy for s in states])
    return BathBands(
        grid=grid,
        single_photon_energies=e_k,
        bound_energies=e_b,
        single_detunings=e_k - params.omega_e,
        pair_detunings=e_b - 2 * params.omega_e,
        bound_states=states,
    )


def bound_energy_closed_form(params: SystemParams, k_com) -> np.ndarray:
    """Infinite-lattice bound-band dispersion, used as a cross-check only."""
    hop = np.cos(np.asarray(k_com, dtype=float) / 2)
    return 2 * params.omega_c - np.sqrt(params.u**2 + 16 * J * J * hop * hop)


def bound_matrix_element(k, cavity: int, state: RelativeBoundState) -> complex:
    """Coupling element between a qubit-photon ket and a bound-pair ket.

    Equals sqrt(2) sum_m exp[i m (k - K/2) + i cavity (K - k)] psi(m),
    truncated at the state's m_max.
    """
    k = np.asarray(k, dtype=float)
    profile = state.profile_transform(k)
    return np.sqrt(2) * np.exp(1j * cavity * (state.momentum - k)) * profile


def profile_table(bands: BathBands) -> np.ndarray:
    """Matrix S[k_idx, K_idx] of relative-profile transforms for all k, K."""
    k = bands.grid.wavevectors
    n = bands.grid.n_cavities
    table = np.empty((n, n))
    for col, state in enumerate(bands.bound_states):
        table[:, col] = state.profile_transform(k)
    return table


def write_band_csv(bands: BathBands, params: SystemParams, path):
    """Dump (K, E_Kb_minus_2wc, size) rows for band plots."""
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["K", "E_Kb_minus_2wc", "size"])
        for state in bands.bound_states:
            writer.writerow(
                [f"{state.momentum:.12g}",
                 f"{state.energy - 2 * params.omega_c:.12g}",
                 f"{state.size_second_moment():.12g}"]
            )
