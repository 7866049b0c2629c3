"""Acceptance suite: one test per criterion, each printing a PASS line.

Run with ``pytest tests/test_acceptance.py -v -s`` to see one line per
criterion.  Criteria are property-based at desk scale; every tolerance is
pinned here, not configured.
"""

import numpy as np
import pytest
from click.testing import CliRunner

from biherm import (
    build_complexification,
    build_decomposition,
    check_bicommutant_scalar,
    check_genericity_consistency,
    check_proportionality,
    commutant_dimension,
    bicommutant_dimension,
    connecting_operator,
    cyclic_vector,
    hermitian_from_triple,
    complexification_from_j,
    is_cyclic,
    is_generic_by_commutant,
    is_generic_by_spectrum,
    krylov_rank,
    omega_from_g_j,
    phase_biunitary,
    project_to_commutant_blocks,
    sample_biunitary,
    spectral_resolution,
    triple_from_g_omega,
    verify_biunitary,
)
from biherm.cli import main as cli_main
from biherm.matrixio import save_matrix
from conftest import (
    brute_bicommutant_dim,
    hermitian_pair_with_multiplicities,
    random_admissible_pair,
    random_multiplicity_pattern,
)

J2 = np.array([[0.0, -1.0], [1.0, 0.0]])


def _report(num: int, name: str):
    print(f"criterion {num:2d} ({name}): PASS")


@pytest.fixture(scope="module")
def corpus():
    """500 connecting-operator instances with controlled degeneracies."""
    rng = np.random.default_rng(20240901)
    out = []
    for _ in range(500):
        n = int(rng.integers(2, 17))
        mults = random_multiplicity_pattern(rng, n)
        h1, h2, _ = hermitian_pair_with_multiplicities(rng, mults)
        op = connecting_operator(h1, h2)
        out.append((mults, h1, h2, op))
    return out


def test_criterion_01_triple_round_trip():
    rng = np.random.default_rng(101)
    for _ in range(200):
        m = int(rng.integers(1, 17)) * 2  # m <= 32
        g, j = random_admissible_pair(rng, m)
        omega = omega_from_g_j(g, j)
        trip = triple_from_g_omega(g, omega)
        g_scale = np.max(np.abs(g.gram))
        assert np.max(np.abs(trip.j.mat - j.mat)) <= 1e-8
        assert np.max(np.abs(trip.g.gram - g.gram)) <= 1e-8 * g_scale
    _report(1, "triple round-trip")


def test_criterion_02_hermitian_structure():
    rng = np.random.default_rng(102)
    for _ in range(50):
        m = int(rng.integers(1, 17)) * 2
        g, j = random_admissible_pair(rng, m)
        trip = triple_from_g_omega(g, omega_from_g_j(g, j))
        for cmap in (complexification_from_j(j), build_complexification(trip)):
            h = hermitian_from_triple(trip, cmap)
            w = np.linalg.eigvalsh(h.gram)
            assert w[0] > 0
            assert np.max(np.abs(h.gram - h.gram.conj().T)) <= 1e-12 * max(w[-1], 1.0)
        cmap = complexification_from_j(j)
        h = hermitian_from_triple(trip, cmap)
        gg, jj = trip.g.gram, trip.j.mat
        h_scale = np.linalg.norm(h.gram)
        for _ in range(50):
            x = rng.standard_normal(m)
            y = rng.standard_normal(m)
            zx, zy = cmap.to_complex(x), cmap.to_complex(y)
            expected = (x @ gg @ y) + 1j * ((jj @ x) @ gg @ y)
            got = h(zx, zy)
            scale = max(h_scale * np.linalg.norm(zx) * np.linalg.norm(zy), 1e-300)
            assert abs(got - expected) <= 1e-10 * scale
    _report(2, "Hermitian structure pointwise")


def test_criterion_03_connecting_operator():
    rng = np.random.default_rng(103)
    from conftest import random_hpd
    from biherm import HermitianForm

    for _ in range(200):
        n = int(rng.integers(2, 65))
        h1 = HermitianForm(random_hpd(rng, n))
        h2 = HermitianForm(random_hpd(rng, n))
        op = connecting_operator(h1, h2)
        r = op.invariant_residuals()
        assert r["defining"] <= 1e-9
        assert r["selfadjoint_h1"] <= 1e-9
        assert r["selfadjoint_h2"] <= 1e-9
        assert r["min_eigenvalue"] > 0
        c = float(rng.uniform(0.2, 5.0))
        scaled = connecting_operator(h1, HermitianForm(c * h2.gram)).mat
        assert np.linalg.norm(scaled - c * op.mat) <= 1e-9 * c * np.linalg.norm(op.mat)
        swapped = connecting_operator(h2, h1).mat
        inv = np.linalg.inv(op.mat)
        assert np.linalg.norm(swapped - inv) <= 1e-9 * np.linalg.norm(inv)
    _report(3, "connecting operator identities")


def test_criterion_04_biunitary_chain():
    rng = np.random.default_rng(104)
    for _ in range(20):
        n = int(rng.integers(2, 25))
        mults = random_multiplicity_pattern(rng, n)
        h1, h2, _ = hermitian_pair_with_multiplicities(rng, mults)
        op = connecting_operator(h1, h2)
        dec = build_decomposition(op)
        samples = [
            sample_biunitary(dec, seed=int(rng.integers(0, 2**31))) for _ in range(20)
        ]
        tol9 = 1e-9
        for u in samples:
            rep = verify_biunitary(u, h1, h2, connecting=op)
            assert rep.residual_h1 <= tol9
            assert rep.residual_h2 <= tol9
            assert rep.residual_commutator <= tol9
        # group closure: products and inverses stay bi-unitary
        for a, b in zip(samples[:-1:2], samples[1::2]):
            rep = verify_biunitary(a @ b, h1, h2, connecting=op)
            assert max(rep.residual_h1, rep.residual_h2, rep.residual_commutator) <= tol9
        for u in samples[::5]:
            rep = verify_biunitary(np.linalg.inv(u), h1, h2, connecting=op)
            assert max(rep.residual_h1, rep.residual_h2, rep.residual_commutator) <= tol9
    _report(4, "bi-unitarity chain and group closure")


def test_criterion_05_genericity_equivalences(corpus):
    disagreements = 0
    for mults, _, _, op in corpus:
        res = spectral_resolution(op)
        assert res.multiplicities == mults
        d1 = is_generic_by_spectrum(res)
        d2 = is_generic_by_commutant(op, resolution=res)
        cyc = is_cyclic(op, seed=7)
        if not (d1 == d2 == cyc):
            disagreements += 1
        assert commutant_dimension(op) == sum(m * m for m in mults)
        assert bicommutant_dimension(res) == len(mults)
    assert disagreements == 0
    _report(5, "genericity equivalences on 500 instances")


def test_criterion_06_vandermonde_cyclic_vector():
    rng = np.random.default_rng(106)
    for _ in range(100):
        n = int(rng.integers(2, 33))
        h1, h2, _ = hermitian_pair_with_multiplicities(rng, (1,) * n)
        op = connecting_operator(h1, h2)
        res = spectral_resolution(op)
        mu = rng.uniform(0.2, 1.0, size=n) * np.exp(2j * np.pi * rng.random(n))
        x0 = cyclic_vector(res, mu)
        assert krylov_rank(op.mat, x0) == n
    _report(6, "cyclic vector always full rank")


def test_criterion_07_fiber_proportionality(corpus):
    for _, h1, h2, op in corpus:
        dec = build_decomposition(op)
        rep = check_proportionality(dec, h1, h2)
        assert rep.worst <= 1e-9
    _report(7, "fiberwise proportionality")


def test_criterion_08_unidimensional_iff_generic(corpus):
    for mults, _, _, op in corpus:
        dec = build_decomposition(op)
        unidim = check_genericity_consistency(dec, op)  # raises on disagreement
        assert unidim == all(m == 1 for m in mults)
    _report(8, "unidimensional fibers iff generic")


def test_criterion_09_commutant_structure():
    rng = np.random.default_rng(109)
    # block decomposition of commuting operators, with certified off-diagonals
    for _ in range(100):
        n = int(rng.integers(2, 11))
        mults = random_multiplicity_pattern(rng, n)
        h1, h2, _ = hermitian_pair_with_multiplicities(rng, mults)
        op = connecting_operator(h1, h2)
        dec = build_decomposition(op)
        a_tilde = np.zeros((n, n), dtype=complex)
        for s in dec.fiber_slices():
            k = s.stop - s.start
            a_tilde[s, s] = rng.standard_normal((k, k)) + 1j * rng.standard_normal((k, k))
        a = dec.from_fiber_coordinates(a_tilde)
        blocks = project_to_commutant_blocks(a, dec)
        off = dec.to_fiber_coordinates(a).copy()
        for s in dec.fiber_slices():
            off[s, s] = 0.0
        assert np.linalg.norm(off) <= 1e-9 * np.linalg.norm(a)
        assert blocks.block_dims == tuple(f.dim for f in dec.fibers)
    # brute-force double-commutant oracle agrees with the fiber-scalar test
    for _ in range(100):
        n = int(rng.integers(2, 9))
        mults = random_multiplicity_pattern(rng, n)
        h1, h2, _ = hermitian_pair_with_multiplicities(rng, mults)
        op = connecting_operator(h1, h2)
        dec = build_decomposition(op)
        assert brute_bicommutant_dim(op.mat) == dec.n_fibers
        # an independently computed commutant element with a non-scalar
        # block must fail the fiber-scalar test; scalar combinations pass
        b = np.zeros((n, n), dtype=complex)
        for f, c in zip(dec.fibers, 1.0 + rng.random(dec.n_fibers)):
            b += c * (f.basis @ f.basis.conj().T @ h1.gram)
        assert check_bicommutant_scalar(b, dec).passed
        if any(m > 1 for m in mults):
            idx = next(i for i, f in enumerate(dec.fibers) if f.dim > 1)
            nt = np.zeros((n, n), dtype=complex)
            for i, s in enumerate(dec.fiber_slices()):
                k = s.stop - s.start
                nt[s, s] = np.diag(1.0 + np.arange(k)) if i == idx else np.eye(k)
            non_scalar = dec.from_fiber_coordinates(nt)
            rep = check_bicommutant_scalar(non_scalar, dec)
            assert rep.in_commutant and not rep.passed
    _report(9, "commutant block structure vs brute-force oracle")


def test_criterion_10_generic_biunitary_form():
    rng = np.random.default_rng(110)
    for _ in range(20):
        n = int(rng.integers(2, 17))
        h1, h2, _ = hermitian_pair_with_multiplicities(rng, (1,) * n)
        op = connecting_operator(h1, h2)
        dec = build_decomposition(op)
        u = sample_biunitary(dec, seed=int(rng.integers(0, 2**31)))
        u_tilde = dec.to_fiber_coordinates(u)
        diag = np.diagonal(u_tilde)
        assert np.max(np.abs(u_tilde - np.diag(diag))) <= 1e-10
        assert np.max(np.abs(np.abs(diag) - 1.0)) <= 1e-10
        phi1 = rng.uniform(0.0, 2 * np.pi, size=n)
        phi2 = rng.uniform(0.0, 2 * np.pi, size=n)
        lhs = phase_biunitary(dec, phi1) @ phase_biunitary(dec, phi2)
        rhs = phase_biunitary(dec, np.mod(phi1 + phi2, 2.0 * np.pi))
        assert np.max(np.abs(lhs - rhs)) <= 1e-10 * max(np.max(np.abs(rhs)), 1.0)
    _report(10, "generic bi-unitaries are diagonal phases")


def test_criterion_11_cli_determinism(tmp_path):
    runner = CliRunner()
    fix = tmp_path
    save_matrix(fix / "g.json", np.diag([1.0, 4.0]), "real_symmetric")
    save_matrix(fix / "j.json", J2, "real_general")
    save_matrix(fix / "omega.json", np.array([[0.0, 2.0], [-2.0, 0.0]]), "real_antisymmetric")
    save_matrix(fix / "h1.json", np.array([[2.0, 0.5], [0.5, 1.0]]), "complex_hermitian")
    save_matrix(fix / "h2.json", np.array([[3.0, 0.25 + 0.25j], [0.25 - 0.25j, 1.5]]), "complex_hermitian")
    save_matrix(fix / "h2_deg.json", 2.0 * np.array([[2.0, 0.5], [0.5, 1.0]]), "complex_hermitian")
    save_matrix(fix / "swap.json", np.array([[0.0, 1.0], [1.0, 0.0]]), "complex_general")
    (fix / "broken.json").write_text('{"kind": "real_symmetric", "dim": 2, "data": [1, 2, 3]}')

    def run_all():
        """One full sweep; returns (stdout bytes, artifact bytes, exit codes)."""
        outputs, artifacts, codes = [], [], []

        def go(args, expect):
            result = runner.invoke(cli_main, args, catch_exceptions=False)
            codes.append(result.exit_code)
            assert result.exit_code == expect, (args, result.output)
            outputs.append(result.output)

        go(["triple", "--g", str(fix / "g.json"), "--j", str(fix / "j.json"),
            "--out", str(fix / "trip.json")], 0)
        go(["triple", "--g", str(fix / "g.json"), "--omega", str(fix / "omega.json"),
            "--out", str(fix / "trip2.json")], 0)
        go(["hermitian", "--triple", str(fix / "trip.json"), "--out", str(fix / "h3.json")], 0)
        go(["hermitian", "--triple", str(fix / "trip2.json"), "--out", str(fix / "h4.json")], 0)
        go(["connect", "--h1", str(fix / "h1.json"), "--h2", str(fix / "h2.json"),
            "--out", str(fix / "G.json")], 0)
        for fmt in ("json", "text"):
            go(["spectrum", "--h1", str(fix / "h1.json"), "--h2", str(fix / "h2.json"),
                "--format", fmt], 0)
        go(["spectrum", "--h1", str(fix / "h1.json"), "--h2", str(fix / "h2_deg.json")], 0)
        go(["generic", "--h1", str(fix / "h1.json"), "--h2", str(fix / "h2.json")], 0)
        go(["generic", "--h1", str(fix / "h1.json"), "--h2", str(fix / "h2_deg.json")], 0)
        go(["decompose", "--h1", str(fix / "h1.json"), "--h2", str(fix / "h2.json")], 0)
        go(["decompose", "--h1", str(fix / "h1.json"), "--h2", str(fix / "h2_deg.json")], 0)
        go(["sample-u", "--h1", str(fix / "h1.json"), "--h2", str(fix / "h2.json"),
            "--seed", "13", "--out", str(fix / "U.json")], 0)
        go(["verify-u", "--u", str(fix / "U.json"), "--h1", str(fix / "h1.json"),
            "--h2", str(fix / "h2.json")], 0)
        go(["verify-u", "--u", str(fix / "swap.json"), "--h1", str(fix / "h1.json"),
            "--h2", str(fix / "h2.json")], 1)
        go(["connect", "--h1", str(fix / "broken.json"), "--h2", str(fix / "h2.json"),
            "--out", str(fix / "never.json")], 2)
        for name in ("trip.json", "trip2.json", "h3.json", "h4.json", "G.json", "U.json"):
            artifacts.append((fix / name).read_bytes())
        return outputs, artifacts, codes

    first = run_all()
    second = run_all()
    assert first == second
    _report(11, "CLI golden-file determinism")
