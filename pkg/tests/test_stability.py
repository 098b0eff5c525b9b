import numpy as np
import pytest

from afacoustics import (EvolutionConfig, SchemeConfig, analyze, assemble_B,
                         eigenvalues, max_cfl, spectral_radius,
                         symbol_eigenvalues)
from afacoustics.stability import BracketError, embed, extract, step_vector


def scheme(kind="eg2", delta=0.0, nu=0.0, cfl=0.25):
    return SchemeConfig(evolution=EvolutionConfig(kind=kind, delta=delta, nu=nu),
                        cfl=cfl)


class TestEigenBasics:
    def test_identity(self):
        eig = eigenvalues(np.eye(5))
        assert spectral_radius(np.eye(5)) == pytest.approx(1.0)
        np.testing.assert_allclose(np.sort(eig.real), 1.0)

    def test_diagonal(self):
        assert spectral_radius(np.diag([0.5, -0.25])) == pytest.approx(0.5)


class TestAssembly:
    def test_embed_extract_roundtrip(self, rng):
        m = 6
        vec = rng.normal(size=12 * m * m)
        np.testing.assert_array_equal(extract(embed(vec, m), m), vec)

    def test_matrix_matches_step(self, rng):
        m = 8
        cfg = scheme("eg2delta", delta=0.7, cfl=0.35)
        B = assemble_B(cfg, m)
        for _ in range(5):
            vec = rng.normal(size=12 * m * m)
            direct = step_vector(vec, cfg, m)
            scale = np.abs(direct).max()
            np.testing.assert_allclose(B @ vec, direct, atol=1e-12 * scale)

    def test_constant_pressure_state_is_fixed(self):
        m = 8
        B = assemble_B(scheme(cfl=0.2), m)
        vec = np.zeros(12 * m * m)
        vec.reshape(3, 4, m, m)[0] = 1.0      # all p DOFs
        np.testing.assert_allclose(B @ vec, vec, atol=1e-12)

    def test_rejects_small_grid(self):
        with pytest.raises(ValueError):
            assemble_B(scheme(), 4)

    def test_rejects_cweno(self):
        cfg = SchemeConfig(evolution=EvolutionConfig(), recon="cweno", cfl=0.2)
        with pytest.raises(ValueError):
            analyze(cfg, 8)


class TestSymbolDecomposition:
    def test_spectrum_matches_dense(self):
        m = 8
        cfg = scheme("eg2delta", delta=0.7, cfl=0.3)
        dense = eigenvalues(assemble_B(cfg, m))
        sym = symbol_eigenvalues(cfg, m)
        key = lambda lam: (np.round(lam.real, 8), np.round(lam.imag, 8))
        a = sorted(dense, key=key)
        b = sorted(sym, key=key)
        np.testing.assert_allclose(a, b, atol=1e-8)

    def test_rho_one_at_vanishing_cfl(self):
        rep = analyze(scheme(cfl=1e-14), 8)
        assert rep.spectral_radius == pytest.approx(1.0, abs=1e-12)

    def test_conjugation_closure(self):
        eig = symbol_eigenvalues(scheme(cfl=0.25), 8)
        key = lambda lam: (np.round(lam.real, 10), np.round(lam.imag, 10))
        a = sorted(eig, key=key)
        b = sorted(np.conj(eig), key=key)
        np.testing.assert_allclose(a, b, atol=1e-10)


class TestPaperFingerprints:
    def test_eg2_threshold(self):
        # EG2 on a 20 x 20 periodic grid: stable at 0.279, unstable at 0.30
        assert analyze(scheme(cfl=0.279), 20).stable
        rep = analyze(scheme(cfl=0.30), 20)
        assert rep.spectral_radius > 1 + 1e-6

    def test_monotone_verdicts_near_threshold(self):
        star = 0.2792
        assert analyze(scheme(cfl=star - 0.01), 20).stable
        assert not analyze(scheme(cfl=star + 0.01), 20).stable


class TestMaxCfl:
    def test_eg2_value(self):
        def make(cfl):
            return scheme(cfl=cfl)
        star = max_cfl(make, 20, 0.05, 0.6)
        assert star == pytest.approx(0.2791, abs=5e-3)

    def test_bracket_errors(self):
        def make(cfl):
            return scheme(cfl=cfl)
        with pytest.raises(BracketError):
            max_cfl(make, 10, 0.5, 0.6)       # lo already unstable
        with pytest.raises(BracketError):
            max_cfl(make, 10, 0.05, 0.2)      # hi still stable
