import math

import numpy as np
import pytest

import swarmsim as s
from swarmsim.measure import DEFAULT_DICT_SEED, BLDictionary, PhaseGrid
from swarmsim.testfns import default_family


def cloud(n=500, seed=0, spread=0.5):
    rng = np.random.default_rng(seed)
    x = spread * rng.uniform(-1, 1, size=(n, 2))
    v = rng.normal(size=(n, 2))
    return s.EmpiricalSnapshot(t=0.0, x=x, v=v)


class TestIntegrate:
    def test_total_mass(self):
        snap = cloud()
        assert s.integrate(snap, lambda x, v: np.ones(len(x))) == pytest.approx(1.0)

    def test_single_atom(self):
        snap = s.EmpiricalSnapshot(t=0.0, x=np.array([[0.2, 0.3]]),
                                   v=np.array([[1.0, -1.0]]))
        val = s.integrate(snap, lambda x, v: x[:, 0] + v[:, 1])
        assert val == pytest.approx(0.2 - 1.0)

    def test_odd_observable_clt_bound(self):
        n = 1000
        for seed in range(20):
            snap = cloud(n=n, seed=seed)
            centered = snap.x[:, 0] - snap.x[:, 0].mean()
            val = float(np.mean(np.tanh(centered)))
            assert abs(val) <= 4.0 / math.sqrt(n)

    def test_linear_in_phi(self):
        snap = cloud(seed=3)
        f = lambda x, v: np.sin(x[:, 0])
        g = lambda x, v: v[:, 1] ** 2
        lhs = s.integrate(snap, lambda x, v: 2.0 * f(x, v) + 3.0 * g(x, v))
        rhs = 2.0 * s.integrate(snap, f) + 3.0 * s.integrate(snap, g)
        assert lhs == pytest.approx(rhs, rel=1e-12)


class TestBLDictionary:
    def test_members_bounded_and_lipschitz(self):
        d = BLDictionary(2, size=64, bumps=default_family(s.Ball(1.0), 1.0))
        rng = np.random.default_rng(1)
        za = rng.normal(size=(2000, 4))
        zb = za + 0.05 * rng.normal(size=(2000, 4))
        fa = d.member_values(za[:, :2], za[:, 2:])
        fb = d.member_values(zb[:, :2], zb[:, 2:])
        assert np.max(np.abs(fa)) <= 1.0 + 1e-12
        gaps = np.linalg.norm(za - zb, axis=1)
        ratio = np.abs(fa - fb) / gaps[:, None]
        assert np.max(ratio) <= 1.0 + 1e-9

    def test_deterministic_given_seed(self):
        a = BLDictionary(2, seed=DEFAULT_DICT_SEED)
        b = BLDictionary(2, seed=DEFAULT_DICT_SEED)
        np.testing.assert_array_equal(a.omegas, b.omegas)


class TestBLDistance:
    def test_identical_measures(self):
        snap = cloud()
        d = BLDictionary(2, size=64)
        assert s.bl_distance(snap, snap, d) == 0.0

    def test_two_atoms_bounded_by_gap(self):
        d = BLDictionary(2, size=256)
        mu = s.EmpiricalSnapshot(0.0, np.array([[0.0, 0.0]]), np.array([[0.0, 0.0]]))
        nu = s.EmpiricalSnapshot(0.0, np.array([[0.3, 0.0]]), np.array([[0.0, 0.4]]))
        gap = 0.5  # phase-space distance
        assert s.bl_distance(mu, nu, d) <= gap + 1e-12

    def test_matches_plain_python_recomputation(self):
        d = BLDictionary(2, size=32, bumps=default_family(s.Ball(1.0), 1.0))
        mu, nu = cloud(n=40, seed=5), cloud(n=40, seed=6, spread=0.2)
        best = 0.0
        for j in range(32):
            w, th, sc = d.omegas[j], d.thetas[j], d.scales[j]
            tot_mu = sum(math.cos(float(w @ np.r_[x, v]) + th) * sc
                         for x, v in zip(mu.x, mu.v)) / mu.n
            tot_nu = sum(math.cos(float(w @ np.r_[x, v]) + th) * sc
                         for x, v in zip(nu.x, nu.v)) / nu.n
            best = max(best, abs(tot_mu - tot_nu))
        for b, sc in zip(d.bumps, d.bump_scales):
            tot_mu = sc * float(np.mean(b.value(mu.x, mu.v)))
            tot_nu = sc * float(np.mean(b.value(nu.x, nu.v)))
            best = max(best, abs(tot_mu - tot_nu))
        assert s.bl_distance(mu, nu, d) == pytest.approx(best, abs=1e-12)

    def test_pseudometric_properties(self):
        d = BLDictionary(2, size=64)
        snaps = [cloud(n=60, seed=k, spread=0.3 + 0.1 * k) for k in range(3)]
        for a in snaps:
            for b in snaps:
                assert s.bl_distance(a, b, d) == pytest.approx(
                    s.bl_distance(b, a, d), abs=1e-15)
        ab = s.bl_distance(snaps[0], snaps[1], d)
        bc = s.bl_distance(snaps[1], snaps[2], d)
        ac = s.bl_distance(snaps[0], snaps[2], d)
        assert ac <= ab + bc + 1e-12


class TestPhaseHistogram:
    GRID = PhaseGrid(x_lo=np.array([-1, -1]), x_hi=np.array([1, 1]),
                     v_lo=np.array([-3, -3]), v_hi=np.array([3, 3]),
                     bins_x=4, bins_v=4)

    def test_single_atom_single_cell(self):
        snap = s.EmpiricalSnapshot(0.0, np.array([[0.1, 0.1]]), np.array([[0.5, -0.5]]))
        table, _ = s.phase_histogram(snap, self.GRID)
        assert table.sum() == pytest.approx(1.0)
        assert np.count_nonzero(table) == 1

    def test_total_mass_excludes_outside(self):
        x = np.array([[0.0, 0.0], [0.0, 0.0]])
        v = np.array([[0.0, 0.0], [10.0, 0.0]])  # second atom outside the v-box
        snap = s.EmpiricalSnapshot(0.0, x, v)
        table, _ = s.phase_histogram(snap, self.GRID)
        assert table.sum() == pytest.approx(0.5)

    def test_csv_export_roundtrips(self, tmp_path):
        from swarmsim.measure import histogram_to_csv
        snap = s.EmpiricalSnapshot(0.0, np.array([[0.1, 0.1]]), np.array([[0.5, -0.5]]))
        table, _ = s.phase_histogram(snap, self.GRID)
        out = tmp_path / "hist.csv"
        histogram_to_csv(table, out)
        lines = out.read_text().splitlines()
        assert lines[0] == "cell0,cell1,cell2,cell3,mass"
        assert len(lines) == 1 + table.size
        total = sum(float(l.rsplit(",", 1)[1]) for l in lines[1:])
        assert total == pytest.approx(1.0)

    def test_uniform_cloud_multinomial_spread(self):
        rng = np.random.default_rng(8)
        n = 10_000
        grid = PhaseGrid(x_lo=np.array([0.0]), x_hi=np.array([1.0]),
                         v_lo=np.array([0.0]), v_hi=np.array([1.0]),
                         bins_x=4, bins_v=4)
        snap = s.EmpiricalSnapshot(0.0, rng.uniform(size=(n, 1)),
                                   rng.uniform(size=(n, 1)))
        table, _ = s.phase_histogram(snap, grid)
        expected = 1.0 / 16.0
        # Poisson sd per cell ~ sqrt(625)/10000 = 0.25%; 5 sd margin
        assert np.all(np.abs(table - expected) <= 5 * math.sqrt(expected / n))
