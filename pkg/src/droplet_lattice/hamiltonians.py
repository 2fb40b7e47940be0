"""Hermitian model Hamiltonians on tagged bases.

Every matrix is assembled in the frame rotating at twice the qubit
frequency, so diagonals are detunings and eigenvalues are reported as
E - E_0b (energy above the bottom of the bound band) by adding the
two-excitation detuning as a constant offset.

Basis layouts
-------------
SPIN           pair kets only, dim P = N_e (N_e - 1) / 2
ADIA           pairs then bound-pair kets, dim P + N
FULL           pairs, qubit-photon kets (qubit index major, wavevector
               minor), then bound kets, dim P + N_e N + N
COMPLETE       pairs, qubit-photon kets with a real-space photon, then
               symmetrized photon-pair kets |n <= m>, dim
               P + N_e N + N (N + 1) / 2
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from typing import Optional, Union

import numpy as np
import scipy.sparse as sp

from .bath import BathBands, profile_table
from .couplings import EffectiveCouplings
from .errors import BasisMismatch, SizeError
from .params import J, PairBasis, SystemParams

COMPLETE_DIM_CAP = 40_000
EXPORT_NNZ_CAP = 20_000_000


class BasisKind(Enum):
    SPIN = "spin"
    ADIA = "adia"
    FULL = "full"
    COMPLETE = "complete"


class FullOperator:
    """Matrix-free two-excitation Hamiltonian with truncation to bound pairs.

    Keeps the pair block implicit through the qubit-photon couplings; a
    matvec costs a handful of (N_e x N) by (N x N) products, so iterative
    eigensolvers handle the production array sizes without ever forming
    the 3e7-nonzero sparse matrix.
    """

    def __init__(self, params: SystemParams, positions, basis: PairBasis, bands: BathBands):
        self.params = params
        self.positions = np.asarray(positions)
        self.basis = basis
        self.bands = bands
        n, n_e, p = params.n_cavities, params.n_qubits, basis.size
        self.dim = p + n_e * n + n
        self._profiles = profile_table(bands)
        self._phases = np.exp(1j * np.outer(self.positions, bands.grid.wavevectors))
        self._i0 = basis.i_index - 1
        self._j0 = basis.j_index - 1
        self._pair_slice = slice(0, p)
        self._photon_slice = slice(p, p + n_e * n)
        self._bound_slice = slice(p + n_e * n, self.dim)

    def matvec(self, v: np.ndarray) -> np.ndarray:
        params, basis = self.params, self.basis
        n, n_e, p = params.n_cavities, params.n_qubits, basis.size
        g = params.g
        phases = self._phases
        d = v[self._pair_slice]
        c = v[self._photon_slice].reshape(n_e, n)
        b = v[self._bound_slice]
        out = np.empty_like(v, dtype=complex)

        dmat = np.zeros((n_e, n_e), dtype=complex)
        dmat[self._i0, self._j0] = d
        dmat[self._j0, self._i0] = d

        emit = phases @ c.T  # emit[a, b] = sum_k e^{i k n_a} c_{b k}
        out[self._pair_slice] = (g / np.sqrt(n)) * (
            emit[self._i0, self._j0] + emit[self._j0, self._i0]
        )

        oc = self.bands.single_detunings[None, :] * c
        oc += (g / np.sqrt(n)) * (dmat @ phases.conj())
        bound_in = (phases * b[None, :]) @ self._profiles.T
        oc += (g / n) * np.sqrt(2) * phases.conj() * bound_in
        out[self._photon_slice] = oc.ravel()

        absorb = (phases * c) @ self._profiles
        out[self._bound_slice] = self.bands.pair_detunings * b + (g / n) * np.sqrt(2) * (
            phases.conj() * absorb
        ).sum(axis=0)
        return out

    def to_sparse(self) -> sp.csr_matrix:
        """Explicit sparse matrix; guarded against production array sizes."""
        params, basis = self.params, self.basis
        n, n_e, p = params.n_cavities, params.n_qubits, basis.size
        nnz = p * 4 * n + n_e * n * (n_e + 2 * n) + self.dim
        if nnz > EXPORT_NNZ_CAP:
            raise SizeError(f"sparse form would hold ~{nnz} nonzeros")
        g = params.g
        phases = self._phases
        rows, cols, vals = [], [], []

        def qp(i0, kidx):
            return p + i0 * n + kidx

        kcols = np.arange(n)
        for q in range(p):
            a, bq = self._i0[q], self._j0[q]
            for keep, flip in ((a, bq), (bq, a)):
                amp = (g / np.sqrt(n)) * phases[flip]
                rows.extend([q] * n)
                cols.extend(qp(keep, kcols))
                vals.extend(amp)
                rows.extend(qp(keep, kcols))
                cols.extend([q] * n)
                vals.extend(np.conj(amp))
        for i0 in range(n_e):
            mb = np.sqrt(2) * np.exp(
                1j
                * self.positions[i0]
                * (self.bands.grid.wavevectors[None, :] - self.bands.grid.wavevectors[:, None])
            ) * self._profiles
            block = (g / n) * mb
            r_idx, c_idx = np.nonzero(np.ones_like(block, dtype=bool))
            rows.extend(qp(i0, r_idx))
            cols.extend(p + n_e * n + c_idx)
            vals.extend(block[r_idx, c_idx])
            rows.extend(p + n_e * n + c_idx)
            cols.extend(qp(i0, r_idx))
            vals.extend(np.conj(block[r_idx, c_idx]))
        # pair-block diagonal is zero in the rotating frame; skip those slots
        diag = np.concatenate(
            [np.tile(self.bands.single_detunings, n_e), self.bands.pair_detunings]
        )
        rows.extend(range(p, self.dim))
        cols.extend(range(p, self.dim))
        vals.extend(diag)
        return sp.coo_matrix(
            (np.asarray(vals, complex), (np.asarray(rows), np.asarray(cols))),
            shape=(self.dim, self.dim),
        ).tocsr()


Payload = Union[np.ndarray, sp.spmatrix, FullOperator]


@dataclass
class HamiltonianMatrix:
    """A Hermitian operator plus the metadata needed to interpret it."""

    kind: BasisKind
    payload: Payload = field(repr=False)
    energy_offset: float
    dims: dict
    pair_basis: Optional[PairBasis] = None
    note: str = ""

    @property
    def dim(self) -> int:
        if isinstance(self.payload, FullOperator):
            return self.payload.dim
        return self.payload.shape[0]

    def dense(self) -> np.ndarray:
        if isinstance(self.payload, np.ndarray):
            return self.payload
        if isinstance(self.payload, FullOperator):
            return self.payload.to_sparse().toarray()
        return self.payload.toarray()

    def require_kind(self, *kinds: BasisKind):
        if self.kind not in kinds:
            raise BasisMismatch(f"expected basis {kinds}, got {self.kind}")


def _pair_index_table(basis: PairBasis) -> np.ndarray:
    n_e = basis.n_qubits
    table = np.zeros((n_e, n_e), dtype=np.intp)
    table[basis.i_index - 1, basis.j_index - 1] = np.arange(basis.size)
    table[basis.j_index - 1, basis.i_index - 1] = np.arange(basis.size)
    return table


def _spin_dims(basis: PairBasis) -> dict:
    return {"pairs": basis.size}


def build_constrained_hop(
    couplings: EffectiveCouplings, basis: PairBasis, params: SystemParams
) -> HamiltonianMatrix:
    """Constrained single-excitation hop model on the pair basis.

    Each pair ket couples to the 2(N_e - 2) kets sharing one excited
    qubit; the diagonal carries twice the onsite hop energy (the self
    interaction of each excitation).
    """
    w = couplings.hop
    n_e = basis.n_qubits
    p = basis.size
    table = _pair_index_table(basis)
    i0, j0 = basis.i_index - 1, basis.j_index - 1
    h = np.zeros((p, p))
    rows = np.arange(p)
    for l in range(n_e):
        mask = j0 != l
        np.add.at(h, (rows[mask], table[l, j0[mask]]), w[i0[mask], l])
        mask = i0 != l
        np.add.at(h, (rows[mask], table[i0[mask], l]), w[l, j0[mask]])
    return HamiltonianMatrix(
        kind=BasisKind.SPIN,
        payload=h,
        energy_offset=params.delta,
        dims=_spin_dims(basis),
        pair_basis=basis,
        note="constrained single-qubit hopping",
    )


def build_unconstrained_hop(
    couplings: EffectiveCouplings, basis: PairBasis, params: SystemParams
) -> HamiltonianMatrix:
    """Two-magnon sector of the unconstrained flip-flop model (twice the
    hop matrix contracted with sigma+ sigma-), kept as an independent
    construction for comparison with the constrained variant."""
    w = couplings.hop
    n_e = basis.n_qubits
    p = basis.size
    table = _pair_index_table(basis)
    i0, j0 = basis.i_index - 1, basis.j_index - 1
    h = np.zeros((p, p))
    rows = np.arange(p)
    for l in range(n_e):
        mask = (i0 != l) & (j0 != l)
        np.add.at(h, (rows[mask], table[l, j0[mask]]), 2 * w[l, i0[mask]])
        np.add.at(h, (rows[mask], table[i0[mask], l]), 2 * w[l, j0[mask]])
    h[rows, rows] += 2 * (w[i0, i0] + w[j0, j0])
    return HamiltonianMatrix(
        kind=BasisKind.SPIN,
        payload=h,
        energy_offset=params.delta,
        dims=_spin_dims(basis),
        pair_basis=basis,
        note="unconstrained one-qubit hopping, two-magnon sector",
    )


def build_pair_hop(
    couplings: EffectiveCouplings, basis: PairBasis, params: SystemParams
) -> HamiltonianMatrix:
    return HamiltonianMatrix(
        kind=BasisKind.SPIN,
        payload=couplings.pair_hop.copy(),
        energy_offset=params.delta,
        dims=_spin_dims(basis),
        pair_basis=basis,
        note="pair hopping",
    )


def build_spin_model(
    couplings: EffectiveCouplings, basis: PairBasis, params: SystemParams
) -> HamiltonianMatrix:
    single = build_constrained_hop(couplings, basis, params)
    h = single.payload + couplings.pair_hop
    return HamiltonianMatrix(
        kind=BasisKind.SPIN,
        payload=h,
        energy_offset=params.delta,
        dims=_spin_dims(basis),
        pair_basis=basis,
        note="constrained hopping plus pair hopping",
    )


def build_adiabatic_model(
    couplings: EffectiveCouplings,
    basis: PairBasis,
    params: SystemParams,
    bands: BathBands,
    include_bound_bound: bool = False,
) -> HamiltonianMatrix:
    """Intermediate model after one elimination step: pairs plus bound kets."""
    n, p = params.n_cavities, basis.size
    g = params.g
    h = np.zeros((p + n, p + n), dtype=complex)
    h[:p, :p] = build_constrained_hop(couplings, basis, params).payload
    h[:p, p:] = (g * g / (J * np.sqrt(n))) * couplings.pair_bound
    h[p:, :p] = h[:p, p:].conj().T
    h[p:, p:] = np.diag(bands.pair_detunings).astype(complex)
    if include_bound_bound:
        if couplings.bound_bound is None:
            raise BasisMismatch("couplings were built without the bound-bound block")
        h[p:, p:] += (g * g / (n * J)) * couplings.bound_bound
    return HamiltonianMatrix(
        kind=BasisKind.ADIA,
        payload=h,
        energy_offset=params.delta,
        dims={"pairs": p, "bound": n},
        pair_basis=basis,
        note=f"one elimination step, bound-bound block {'kept' if include_bound_bound else 'dropped'}",
    )


def build_full_model(
    params: SystemParams, positions, basis: PairBasis, bands: BathBands
) -> HamiltonianMatrix:
    """Two-excitation model with explicit photons, truncated to bound pairs."""
    op = FullOperator(params, positions, basis, bands)
    return HamiltonianMatrix(
        kind=BasisKind.FULL,
        payload=op,
        energy_offset=params.delta,
        dims={
            "pairs": basis.size,
            "qubit_photon": params.n_qubits * params.n_cavities,
            "bound": params.n_cavities,
        },
        pair_basis=basis,
        note="pairs, qubit-photon, and bound-pair kets",
    )


def build_complete_sector(
    params: SystemParams, positions, basis: PairBasis, dim_cap: int = COMPLETE_DIM_CAP
) -> HamiltonianMatrix:
    """Literal two-excitation sector with all photon-pair states.

    Validation reference for the bound-pair truncation; photon pairs are
    symmetrized real-space kets |n <= m> with the sqrt(2) normalization on
    doubly occupied sites, so this block reproduces both the scattering
    continuum and the bound band of the bath.
    """
    n, n_e, p = params.n_cavities, params.n_qubits, basis.size
    n_pp = n * (n + 1) // 2
    dim = p + n_e * n + n_pp
    if dim > dim_cap:
        raise SizeError(f"complete sector dimension {dim} exceeds cap {dim_cap}")
    positions = np.asarray(positions)
    g, u = params.g, params.u
    det = params.cavity_qubit_detuning

    def qp(i0, n0):
        return p + i0 * n + n0

    def pp(n1, m1):
        # 1-based n1 <= m1, row-major upper triangle
        return p + n_e * n + (n1 - 1) * n - (n1 - 1) * (n1 - 2) // 2 + (m1 - n1)

    rows, cols, vals = [], [], []

    def add(r, c, v):
        rows.append(r)
        cols.append(c)
        vals.append(v)

    # qubit-photon block: detuning diagonal and periodic photon hopping
    for i0 in range(n_e):
        for n0 in range(n):
            add(qp(i0, n0), qp(i0, n0), det)
            n2 = (n0 + 1) % n
            add(qp(i0, n0), qp(i0, n2), -J)
            add(qp(i0, n2), qp(i0, n0), -J)
    # photon-pair block
    hop_acc: dict = {}
    for n1 in range(1, n + 1):
        for m1 in range(n1, n + 1):
            src = pp(n1, m1)
            add(src, src, 2 * det + (u if n1 == m1 else 0.0))
            pref = 1 / np.sqrt(2) if n1 == m1 else 1.0
            moves = [
                (n1 % n + 1, m1),
                ((n1 - 2) % n + 1, m1),
                (n1, m1 % n + 1),
                (n1, (m1 - 2) % n + 1),
            ]
            for u_, v_ in moves:
                lo, hi = min(u_, v_), max(u_, v_)
                amp = -J * pref * (np.sqrt(2) if u_ == v_ else 1.0)
                key = (src, pp(lo, hi))
                hop_acc[key] = hop_acc.get(key, 0.0) + amp
    for (r, c), v in hop_acc.items():
        add(r, c, v)
    # qubit pairs <-> qubit-photon
    for q in range(p):
        i1, j1 = basis.i_index[q], basis.j_index[q]
        for keep, flip in ((i1, j1), (j1, i1)):
            other = qp(keep - 1, positions[flip - 1] - 1)
            add(q, other, g)
            add(other, q, g)
    # qubit-photon <-> photon pairs
    for i0 in range(n_e):
        ni = positions[i0]
        for n0 in range(1, n + 1):
            src = qp(i0, n0 - 1)
            lo, hi = min(n0, ni), max(n0, ni)
            amp = g * (np.sqrt(2) if n0 == ni else 1.0)
            add(src, pp(lo, hi), amp)
            add(pp(lo, hi), src, amp)
    h = sp.coo_matrix(
        (np.asarray(vals, dtype=float), (rows, cols)), shape=(dim, dim)
    ).tocsr()
    return HamiltonianMatrix(
        kind=BasisKind.COMPLETE,
        payload=h,
        energy_offset=params.delta,
        dims={"pairs": p, "qubit_photon": n_e * n, "photon_pairs": n_pp},
        pair_basis=basis,
        note="all two-excitation kets including the scattering continuum",
    )


def export_triplets(h: HamiltonianMatrix, path):
    """Write the matrix as text triplets: row col re im, one entry per line."""
    payload = h.payload
    if isinstance(payload, FullOperator):
        payload = payload.to_sparse()
    if isinstance(payload, np.ndarray):
        payload = sp.coo_matrix(payload)
    else:
        payload = payload.tocoo()
    if payload.nnz > EXPORT_NNZ_CAP:
        raise SizeError(f"{payload.nnz} nonzeros exceed the export cap")
    with open(path, "w") as fh:
        fh.write("# row col re im\n")
        for r, c, v in zip(payload.row, payload.col, payload.data):
            v = complex(v)
            fh.write(f"{r} {c} {v.real:.16e} {v.imag:.16e}\n")


def hermiticity_defect(h: HamiltonianMatrix, probes: int = 4) -> float:
    """Max deviation from Hermiticity, relative to the largest entry.

    Dense and sparse payloads are checked exactly; matrix-free payloads
    are probed with fixed pseudo-random vectors.
    """
    payload = h.payload
    if isinstance(payload, np.ndarray):
        scale = np.abs(payload).max() or 1.0
        return float(np.abs(payload - payload.conj().T).max() / scale)
    if isinstance(payload, FullOperator):
        rng = np.random.default_rng(1234)
        worst = 0.0
        for _ in range(probes):
            a = rng.normal(size=payload.dim) + 1j * rng.normal(size=payload.dim)
            b = rng.normal(size=payload.dim) + 1j * rng.normal(size=payload.dim)
            lhs = np.vdot(b, payload.matvec(a))
            rhs = np.vdot(payload.matvec(b), a)
            worst = max(worst, abs(lhs - rhs) / max(abs(lhs), 1e-300))
        return worst
    diff = payload - payload.conj().T
    scale = np.abs(payload.data).max() if payload.nnz else 1.0
    return float(np.abs(diff.data).max() / scale) if diff.nnz else 0.0
