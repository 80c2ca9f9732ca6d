import numpy as np
import pytest

from oracles import nn_mean
from toposon.dpp import (
    GinibreKernel,
    Placement,
    _features,
    kernel_matrix,
    sample_conditional,
)
from toposon.geometry import Point, as_rng


class TestKernelMatrix:
    def test_hermitian_psd_with_unit_diagonal_scaling(self):
        ker = GinibreKernel(12, 3.0, 2.0)
        rng = as_rng(0)
        pts = [Point(*rng.uniform(0, 2, 2)) for _ in range(8)]
        K = kernel_matrix(ker, pts)
        assert K.shape == (8, 8)
        assert np.allclose(K, K.conj().T)
        w = np.linalg.eigvalsh(K)
        assert w.min() > -1e-10

    def test_coincident_points_are_degenerate(self):
        ker = GinibreKernel(12, 3.0, 2.0)
        p = Point(1.0, 1.0)
        K = kernel_matrix(ker, [p, p])
        sign, logdet = np.linalg.slogdet(K)
        assert sign == 0 or logdet < -20

    def test_repulsion_shows_in_determinant(self):
        ker = GinibreKernel(12, 3.0, 2.0)
        near = [Point(1.0, 1.0), Point(1.05, 1.0)]
        far = [Point(0.5, 1.0), Point(1.5, 1.0)]
        s_near = np.linalg.slogdet(kernel_matrix(ker, near))
        s_far = np.linalg.slogdet(kernel_matrix(ker, far))
        assert s_far.logabsdet > s_near.logabsdet


class TestKernelValidation:
    def test_bad_parameters(self):
        with pytest.raises(ValueError):
            GinibreKernel(0, 3.0, 2.0)
        with pytest.raises(ValueError):
            GinibreKernel(10, 0.0, 2.0)
        with pytest.raises(ValueError):
            GinibreKernel(10, 3.0, -1.0)


class TestSampleConditional:
    def test_zero_new_points(self):
        ker = GinibreKernel(10, 3.0, 2.0)
        fixed = (Point(0.5, 0.5),)
        out = sample_conditional(ker, fixed, 0, 2.0, rng_seed=0)
        assert out == Placement(fixed, ())

    def test_free_points_inside_square_and_fixed_clamped(self):
        ker = GinibreKernel(16, 4.0, 2.0)
        fixed = (Point(0.2, 0.2), Point(1.8, 1.8))
        out = sample_conditional(ker, fixed, 8, 2.0, rng_seed=3)
        assert out.fixed == fixed
        assert len(out.free) == 8
        for p in out.free:
            assert 0.0 <= p.x <= 2.0 and 0.0 <= p.y <= 2.0

    def test_capacity_checked(self):
        ker = GinibreKernel(5, 3.0, 2.0)
        with pytest.raises(ValueError):
            sample_conditional(ker, (Point(1, 1),), 5, 2.0, rng_seed=0)
        with pytest.raises(ValueError):
            sample_conditional(ker, (), -1, 2.0, rng_seed=0)
        with pytest.raises(ValueError):
            sample_conditional(ker, (), 1, 0.0, rng_seed=0)

    def test_deterministic(self):
        ker = GinibreKernel(12, 3.0, 2.0)
        a = sample_conditional(ker, (), 6, 2.0, rng_seed=11)
        b = sample_conditional(ker, (), 6, 2.0, rng_seed=11)
        assert a == b

    def test_never_coincides_with_fixed_or_itself(self):
        ker = GinibreKernel(14, 3.5, 2.0)
        fixed = (Point(1.0, 1.0),)
        for seed in range(40):
            out = sample_conditional(ker, fixed, 6, 2.0, rng_seed=seed)
            pts = list(fixed) + list(out.free)
            seen = {(p.x, p.y) for p in pts}
            assert len(seen) == len(pts)

    def test_repels_compared_with_uniform(self):
        ker = GinibreKernel(10, 2.5, 2.0)
        dpp = []
        uni = []
        for seed in range(60):
            out = sample_conditional(ker, (), 10, 2.0, rng_seed=seed)
            dpp.append(nn_mean([p.x for p in out.free],
                               [p.y for p in out.free]))
            u = as_rng(seed).uniform(0.0, 2.0, size=(10, 2))
            uni.append(nn_mean(u[:, 0], u[:, 1]))
        assert np.mean(dpp) > 1.05 * np.mean(uni)

    def test_conditioning_repels_from_fixed(self):
        # free points end farther from a clamped point than uniform ones
        ker = GinibreKernel(10, 2.5, 2.0)
        fixed = (Point(1.0, 1.0),)
        d_dpp, d_uni = [], []
        for seed in range(60):
            out = sample_conditional(ker, fixed, 9, 2.0, rng_seed=seed)
            d_dpp.append(
                min(np.hypot(p.x - 1.0, p.y - 1.0) for p in out.free)
            )
            u = as_rng(seed).uniform(0.0, 2.0, size=(9, 2))
            d_uni.append(np.hypot(u[:, 0] - 1.0, u[:, 1] - 1.0).min())
        assert np.mean(d_dpp) > np.mean(d_uni)


class TestSchurFactorisation:
    def test_split_logdet_matches_full_matrix(self):
        # the chain scores states as log det(fixed Gram) + log det of the
        # projected free Gram; that must equal the log det of the full
        # feature Gram, which is det(kernel matrix) of all points
        rng = as_rng(7)
        ker = GinibreKernel(18, 4.0, 2.0)
        for _ in range(25):
            n_fix = int(rng.integers(0, 5))
            n_free = int(rng.integers(1, 6))
            xs = rng.uniform(0, 2, n_fix + n_free)
            ys = rng.uniform(0, 2, n_fix + n_free)

            rows = _features(ker, xs, ys)
            full = rows @ rows.conj().T
            sign_f, want = np.linalg.slogdet(full)
            assert sign_f.real > 0.5

            fixed_rows = rows[:n_fix]
            if n_fix:
                basis, tri = np.linalg.qr(fixed_rows.conj().T)
                log_fixed = 2.0 * float(
                    np.sum(np.log(np.abs(np.diag(tri))))
                )
            else:
                basis = np.zeros((ker.n_modes, 0), dtype=np.complex128)
                log_fixed = 0.0
            psi = rows[n_fix:] - (rows[n_fix:] @ basis) @ basis.conj().T
            sign_s, log_small = np.linalg.slogdet(psi @ psi.conj().T)
            assert sign_s.real > 0.5
            got = log_fixed + log_small
            assert got == pytest.approx(want, abs=1e-9, rel=1e-9)
