import numpy as np
import pytest

from droplet_lattice import (
    SizeError,
    build_adiabatic_model,
    build_complete_sector,
    build_constrained_hop,
    build_full_model,
    build_pair_hop,
    build_spin_model,
    build_unconstrained_hop,
    default_params,
    eigensolve,
)
from droplet_lattice.hamiltonians import export_triplets, hermiticity_defect
from droplet_lattice.oracles import (
    constrained_hop_by_strings,
    pair_hop_by_strings,
    two_photon_bath_sector,
    unconstrained_hop_by_strings,
)
from droplet_lattice.params import PairBasis, qubit_positions


# ---------------------------------------------------------------------------
# spin-sector assemblies against operator strings
# ---------------------------------------------------------------------------


def test_constrained_hop_matches_operator_strings(tiny_stack):
    oracle = constrained_hop_by_strings(tiny_stack.couplings.hop, tiny_stack.basis)
    np.testing.assert_allclose(tiny_stack.h_single.payload, oracle, atol=1e-12)


def test_unconstrained_hop_matches_operator_strings(tiny_stack):
    oracle = unconstrained_hop_by_strings(tiny_stack.couplings.hop, tiny_stack.basis)
    np.testing.assert_allclose(tiny_stack.h_tilde.payload, oracle, atol=1e-12)


def test_pair_hop_matches_operator_strings(tiny_stack):
    h_pair = build_pair_hop(tiny_stack.couplings, tiny_stack.basis, tiny_stack.params)
    oracle = pair_hop_by_strings(tiny_stack.couplings.pair_hop, tiny_stack.basis)
    np.testing.assert_allclose(h_pair.payload, oracle, atol=1e-12)


def test_spin_model_is_sum(tiny_stack):
    total = build_spin_model(tiny_stack.couplings, tiny_stack.basis, tiny_stack.params)
    np.testing.assert_allclose(
        total.payload,
        tiny_stack.h_single.payload + tiny_stack.couplings.pair_hop,
        atol=0,
    )


def test_hop_row_connectivity(small_stack):
    """Each pair ket couples to 2(N_e - 2) partners plus itself."""
    h = small_stack.h_single.payload
    n_e = small_stack.params.n_qubits
    scale, _ = (small_stack.couplings.hop_scale, small_stack.couplings.hop_length)
    for row in (0, 7, small_stack.basis.size - 1):
        nonzero = np.nonzero(np.abs(h[row]) > 0)[0]
        assert len(nonzero) == 2 * (n_e - 2) + 1
        assert h[row, row] == pytest.approx(2 * scale, rel=1e-12)


def test_two_qubit_degenerate_case():
    p = default_params(n_cavities=101, n_qubits=2)
    from droplet_lattice import build_effective_couplings
    from droplet_lattice.bath import solve_bath

    basis = PairBasis(2)
    cpl = build_effective_couplings(p, qubit_positions(p), basis, solve_bath(p))
    h = build_constrained_hop(cpl, basis, p)
    assert h.payload.shape == (1, 1)
    # no partner kets to hop to: only the self-interaction diagonal survives
    assert h.payload[0, 0] == pytest.approx(2 * cpl.hop_scale, rel=1e-12)


def test_constraint_upshift_state_by_state(small_stack):
    single = np.linalg.eigvalsh(small_stack.h_single.payload)
    tilde = np.linalg.eigvalsh(small_stack.h_tilde.payload)
    assert np.all(single >= tilde - 1e-15)


def test_unconstrained_limit_zero_coupling():
    p = default_params(n_cavities=101, n_qubits=8, g=0.0)
    from droplet_lattice import build_effective_couplings
    from droplet_lattice.bath import solve_bath

    basis = PairBasis(8)
    cpl = build_effective_couplings(p, qubit_positions(p), basis, solve_bath(p))
    assert np.abs(build_unconstrained_hop(cpl, basis, p).payload).max() == 0.0


# ---------------------------------------------------------------------------
# adiabatic model
# ---------------------------------------------------------------------------


def test_adiabatic_model_layout(small_stack):
    h = build_adiabatic_model(
        small_stack.couplings, small_stack.basis, small_stack.params, small_stack.bands
    )
    p = small_stack.basis.size
    n = small_stack.params.n_cavities
    assert h.dim == p + n
    assert hermiticity_defect(h) < 1e-12
    np.testing.assert_allclose(h.payload[:p, :p], small_stack.h_single.payload, atol=0)
    np.testing.assert_allclose(
        np.diag(h.payload[p:, p:]).real, small_stack.bands.pair_detunings, atol=0
    )


def test_adiabatic_bound_bound_toggle(small_stack):
    base = build_adiabatic_model(
        small_stack.couplings, small_stack.basis, small_stack.params, small_stack.bands, False
    )
    kept = build_adiabatic_model(
        small_stack.couplings, small_stack.basis, small_stack.params, small_stack.bands, True
    )
    p = small_stack.basis.size
    block = kept.payload[p:, p:] - base.payload[p:, p:]
    assert np.abs(block).max() > 0
    off_block = kept.payload[:p, p:] - base.payload[:p, p:]
    assert np.abs(off_block).max() == 0.0


def test_adiabatic_tracks_spin_model_low_spectrum(small_stack):
    adia = eigensolve(
        build_adiabatic_model(
            small_stack.couplings, small_stack.basis, small_stack.params, small_stack.bands
        ),
        k_lowest=6,
    )
    spin = small_stack.spin_decomp
    rel = np.abs(adia.energies[:6] - spin.energies[:6]) / np.abs(spin.energies[:6])
    assert rel.max() < 0.05


# ---------------------------------------------------------------------------
# explicit-photon models
# ---------------------------------------------------------------------------


def test_full_operator_matches_sparse_form(tiny_stack):
    h = tiny_stack.h_full
    sparse = h.payload.to_sparse()
    rng = np.random.default_rng(7)
    v = rng.normal(size=h.dim) + 1j * rng.normal(size=h.dim)
    np.testing.assert_allclose(h.payload.matvec(v), sparse @ v, atol=1e-12)
    dev = np.abs((sparse - sparse.conj().T)).max()
    assert dev < 1e-12


def test_full_operator_hermiticity_probe(default_stack):
    assert hermiticity_defect(default_stack.h_full) < 1e-12


def test_full_row_sparsity(tiny_stack):
    h = tiny_stack.h_full.payload.to_sparse().tocsr()
    p = tiny_stack.basis.size
    n = tiny_stack.params.n_cavities
    n_e = tiny_stack.params.n_qubits
    counts = np.diff(h.indptr)
    assert counts[:p].max() <= 2 * n
    qp_rows = counts[p : p + n_e * n]
    assert qp_rows.max() <= (n_e - 1) + n + 1


def test_full_decoupled_spectrum():
    p = default_params(n_cavities=41, n_qubits=4, g=0.0)
    from droplet_lattice.bath import solve_bath

    basis = PairBasis(4)
    bands = solve_bath(p)
    h = build_full_model(p, qubit_positions(p), basis, bands)
    dense = h.payload.to_sparse().toarray()
    vals = np.sort(np.linalg.eigvalsh(dense))
    expected = np.sort(
        np.concatenate(
            [np.zeros(basis.size), np.tile(bands.single_detunings, 4), bands.pair_detunings]
        )
    )
    np.testing.assert_allclose(vals, expected, atol=1e-12)


def test_complete_sector_bath_block_reproduces_bound_band(tiny_stack):
    """Pure-photon eigenvalues of the raw model contain the bound band."""
    params = tiny_stack.params
    bath_spec = np.linalg.eigvalsh(two_photon_bath_sector(params))
    worst = max(np.abs(bath_spec - e).min() for e in tiny_stack.bands.bound_energies)
    assert worst < 1e-9


def test_bound_band_bottom_matches_closed_form_at_production_size(default_stack):
    zero = default_stack.bands.grid.zero_index
    assert default_stack.bands.bound_energies[zero] == pytest.approx(
        default_stack.params.bound_band_bottom, abs=1e-9
    )


def test_complete_sector_decoupled_pairs():
    p = default_params(n_cavities=21, n_qubits=3, g=0.0)
    basis = PairBasis(3)
    h = build_complete_sector(p, qubit_positions(p), basis)
    dense = h.dense()
    np.testing.assert_allclose(dense[: basis.size, :], 0.0, atol=0)


def test_complete_sector_size_cap():
    p = default_params(n_cavities=201, n_qubits=4)
    with pytest.raises(SizeError):
        build_complete_sector(p, qubit_positions(p), PairBasis(4), dim_cap=5000)


def test_truncation_against_complete_sector():
    """Dropping the scattering continuum moves the low levels by < 1e-4 J."""
    p = default_params(n_cavities=41, n_qubits=4)
    from droplet_lattice.bath import solve_bath

    basis = PairBasis(4)
    positions = qubit_positions(p)
    complete = eigensolve(build_complete_sector(p, positions, basis), k_lowest=5)
    truncated = eigensolve(build_full_model(p, positions, basis, solve_bath(p)), k_lowest=5)
    np.testing.assert_allclose(complete.energies, truncated.energies, atol=1e-4)
    assert np.abs(complete.energies - truncated.energies).max() < 2e-5


def test_rotating_frame_offset_shift(small_stack):
    """Adding a constant to the diagonal shifts every eigenvalue by it."""
    h = small_stack.h_spin
    shifted = h.payload + 0.37 * np.eye(h.dim)
    base = np.linalg.eigvalsh(h.payload)
    moved = np.linalg.eigvalsh(shifted)
    np.testing.assert_allclose(moved, base + 0.37, atol=1e-12)


def test_export_triplets_roundtrip(tmp_path, tiny_stack):
    path = tmp_path / "matrix.txt"
    export_triplets(tiny_stack.h_spin, path)
    rows = np.loadtxt(path, comments="#")
    rebuilt = np.zeros((tiny_stack.h_spin.dim,) * 2, dtype=complex)
    for r, c, re, im in rows:
        rebuilt[int(r), int(c)] += re + 1j * im
    np.testing.assert_allclose(rebuilt.real, tiny_stack.h_spin.payload, atol=1e-12)


def test_export_size_guard(default_stack):
    with pytest.raises(SizeError):
        export_triplets(default_stack.h_full, "/dev/null")


def test_hop_spectrum_flattening_staircase(default_stack):
    """The lowest group of about N_e states spans a ten times wider window
    than the next group (the visible step); later groups flatten out and the
    steps wash away (measured spreads 5.2e-3, 4.9e-4, 6.5e-4, 6.6e-4)."""
    n_e = default_stack.params.n_qubits
    for energies in (
        default_stack.single_decomp.energies,
        np.linalg.eigvalsh(default_stack.h_tilde.payload),
    ):
        spreads = [
            energies[(g + 1) * n_e - 1] - energies[g * n_e] for g in range(4)
        ]
        assert spreads[1] < 0.15 * spreads[0]
        assert 0.3 * spreads[1] < spreads[2] < 3 * spreads[1]
        assert 0.3 * spreads[2] < spreads[3] < 3 * spreads[2]


def test_bound_bound_block_shift_is_small(default_stack):
    """Keeping the bound-to-bound coupling moves the lowest level by under
    2.5 percent at the default point (measured: 1.78 percent)."""
    import dataclasses

    from droplet_lattice.couplings import bound_bound_couplings

    stack = default_stack
    g_block = bound_bound_couplings(stack.params, stack.positions, stack.bands)
    with_g = dataclasses.replace(stack.couplings, bound_bound=g_block)
    base = eigensolve(
        build_adiabatic_model(stack.couplings, stack.basis, stack.params, stack.bands, False),
        k_lowest=1,
    ).energies[0]
    kept = eigensolve(
        build_adiabatic_model(with_g, stack.basis, stack.params, stack.bands, True),
        k_lowest=1,
    ).energies[0]
    assert abs(kept - base) / abs(base) < 0.025


# ---------------------------------------------------------------------------
# elimination-chain regression pins at the production point
# ---------------------------------------------------------------------------


def test_full_low_spectrum_tracks_spin_model(default_stack, full_decomp_default):
    """The explicit-photon levels sit a few percent above the spin model."""
    spin = default_stack.spin_decomp
    rel = np.abs(full_decomp_default.energies[:10] - spin.energies[:10]) / np.abs(
        spin.energies[:10]
    )
    assert rel.max() < 0.08
    assert np.all(full_decomp_default.energies[:10] > spin.energies[:10])


def test_full_photonic_weight_regression(full_decomp_default):
    from droplet_lattice import WavepacketState, photonic_fraction

    fractions = []
    for col in range(10):
        st = WavepacketState(
            kind=full_decomp_default.kind,
            coefficients=full_decomp_default.vectors[:, col],
            time=0.0,
            dims=full_decomp_default.dims,
        )
        fractions.append(photonic_fraction(st))
    fractions = np.array(fractions)
    assert fractions.max() < 0.25
    assert fractions.min() > 0.0
