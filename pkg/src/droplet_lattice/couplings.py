"""Bath-mediated effective interactions between qubits.

Eliminating the single-photon states produces three couplings: the
constrained single-qubit hop matrix ``hop`` (closed-form exponential
profile), the pair-to-bound coupling ``pair_bound`` on (pair index x
wavevector), and the bound-to-bound coupling ``bound_bound``.  A second
elimination of the bound band contracts ``pair_bound`` into the pair-hop
matrix ``pair_hop``, assembled as a negative semidefinite rank-structured
product rather than a quadruple loop.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .bath import BathBands, profile_table
from .errors import DomainError
from .params import J, PairBasis, SystemParams


@dataclass(frozen=True)
class EffectiveCouplings:
    """All effective interactions for one parameter set.

    hop : (N_e, N_e) real, constrained single-qubit hop strengths.
    pair_bound : (P, N) complex, pair ket to bound ket couplings, one
        column per center-of-mass wavevector.  Carries no factor of g;
        the g^2 prefactors enter at Hamiltonian assembly.
    bound_bound : (N, N) complex Hermitian, or None when not requested.
    pair_hop : (P, P) real symmetric negative semidefinite.
    """

    hop: np.ndarray
    pair_bound: np.ndarray
    bound_bound: Optional[np.ndarray]
    pair_hop: np.ndarray
    hop_scale: float
    hop_length: float
    params_hash: str


def hop_scale_and_length(params: SystemParams) -> tuple[float, float]:
    """Onsite hop energy and exponential fall-off length of the hop matrix."""
    ratio = params.cavity_qubit_detuning / (2 * J)
    if ratio <= 1:
        raise DomainError(
            "qubit inside the single-photon band; single-photon elimination invalid"
        )
    root = np.sqrt(ratio * ratio - 1)
    scale = -2 * J * (params.g / (2 * J)) ** 2 / root
    length = -1.0 / np.log(ratio - root)
    return float(scale), float(length)


def constrained_hop_matrix(params: SystemParams, positions: np.ndarray) -> np.ndarray:
    """Hop strengths between all qubit pairs, exponential in cavity distance."""
    scale, length = hop_scale_and_length(params)
    dist = np.abs(positions[:, None] - positions[None, :])
    return scale * np.exp(-dist / length)


def pair_bound_couplings(
    params: SystemParams,
    positions: np.ndarray,
    basis: PairBasis,
    bands: BathBands,
    profiles: Optional[np.ndarray] = None,
) -> np.ndarray:
    """Couplings between two-excited-qubit kets and bound-pair kets.

    Row p, column K holds
      -sum_k (J / (N Delta_k)) [e^{-i k n_i} M^*(k, n_j, K) + (i <-> j)]
    evaluated by first contracting the k sum into T(d, K) =
    sum_k e^{i k d} S_K(k) / Delta_k over the needed distances d.
    """
    if np.any(bands.single_detunings <= 0):
        raise DomainError("single-photon detuning not positive for every k")
    n = params.n_cavities
    k = bands.grid.wavevectors
    if profiles is None:
        profiles = profile_table(bands)
    weighted = profiles / bands.single_detunings[:, None]

    n_i = positions[basis.i_index - 1]
    n_j = positions[basis.j_index - 1]
    # distances present in the pair basis: r * spacing for r = 0 ... N_e - 1
    dist_vals = np.unique(n_j - n_i)
    if dist_vals[0] != 0:
        dist_vals = np.concatenate(([0], dist_vals))
    t_table = np.exp(1j * np.outer(dist_vals, k)) @ weighted
    row_of = {int(d): row for row, d in enumerate(dist_vals)}
    rows = np.array([row_of[int(d)] for d in (n_j - n_i)])
    t_pair = t_table[rows, :]
    return -(np.sqrt(2) * J / n) * (
        np.exp(-1j * np.outer(n_j, k)) * t_pair
        + np.exp(-1j * np.outer(n_i, k)) * np.conj(t_pair)
    )


def bound_bound_couplings(
    params: SystemParams,
    positions: np.ndarray,
    bands: BathBands,
    profiles: Optional[np.ndarray] = None,
) -> np.ndarray:
    """Couplings between bound-pair kets with different wavevectors."""
    if np.any(bands.single_detunings <= 0):
        raise DomainError("single-photon detuning not positive for every k")
    n = params.n_cavities
    k = bands.grid.wavevectors
    if profiles is None:
        profiles = profile_table(bands)
    cross = profiles.T @ (profiles / bands.single_detunings[:, None])
    phases = np.exp(1j * np.outer(positions, k))
    geometry = phases.conj().T @ phases  # sum_j e^{i n_j (K' - K)}
    return -(2 * J / n) * geometry * cross


def pair_hop_matrix(
    params: SystemParams, pair_bound: np.ndarray, bands: BathBands
) -> np.ndarray:
    """Second-elimination pair-hop matrix on the pair basis.

    Assembled as -(g^4 / (N J^2)) A A^H with A = pair_bound / sqrt(pair
    detuning), which is exactly negative semidefinite.  With the real
    bound-state phase convention the result is real.
    """
    if np.any(bands.pair_detunings <= 0):
        raise DomainError("pair detuning not positive for every K; not in the band gap")
    a = pair_bound / np.sqrt(bands.pair_detunings)[None, :]
    y = -(params.g**4 / (params.n_cavities * J * J)) * (a @ a.conj().T)
    scale = np.abs(y.real).max() or 1.0
    imag_max = np.abs(y.imag).max()
    if imag_max > 1e-10 * scale:
        raise DomainError(f"pair-hop matrix unexpectedly complex (max imag {imag_max:g})")
    y = y.real
    return 0.5 * (y + y.T)


def build_effective_couplings(
    params: SystemParams,
    positions: np.ndarray,
    basis: PairBasis,
    bands: BathBands,
    include_bound_bound: bool = False,
) -> EffectiveCouplings:
    """Compute every effective interaction for one parameter set."""
    profiles = profile_table(bands)
    hop = constrained_hop_matrix(params, positions)
    scale, length = hop_scale_and_length(params)
    pair_bound = pair_bound_couplings(params, positions, basis, bands, profiles)
    bound_bound = (
        bound_bound_couplings(params, positions, bands, profiles)
        if include_bound_bound
        else None
    )
    pair_hop = pair_hop_matrix(params, pair_bound, bands)
    return EffectiveCouplings(
        hop=hop,
        pair_bound=pair_bound,
        bound_bound=bound_bound,
        pair_hop=pair_hop,
        hop_scale=scale,
        hop_length=length,
        params_hash=params.content_hash(),
    )


def write_hop_csv(couplings: EffectiveCouplings, path):
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["j", "l", "W"])
        n_e = couplings.hop.shape[0]
        for j in range(n_e):
            for l in range(n_e):
                writer.writerow([j + 1, l + 1, f"{couplings.hop[j, l]:.12g}"])


def write_pair_hop_blocks_csv(
    couplings: EffectiveCouplings, basis: PairBasis, path, max_separation: int = 9
):
    """Pair-hop entries restricted to separations <= max_separation.

    Rows follow the block layout of the pair basis itself (ascending
    separation, ascending left index), so the dump can be rendered
    directly as the block-structured contour map.
    """
    keep = np.nonzero(basis.separations <= max_separation)[0]
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["row", "col", "i", "j", "l", "h", "Y"])
        for a, p in enumerate(keep):
            for b, q in enumerate(keep):
                writer.writerow(
                    [a, b,
                     basis.i_index[p], basis.j_index[p],
                     basis.i_index[q], basis.j_index[q],
                     f"{couplings.pair_hop[p, q]:.12g}"]
                )
