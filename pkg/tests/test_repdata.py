import cmath
import math

import numpy as np
import pytest

from lfn.cachefile import read_cache_file, write_cache_file
from lfn.repdata import (
    CoefficientStream,
    DirichletCharacter,
    GammaFactorData,
    analytic_conductor,
    archimedean_size_of,
    characters_mod,
    dirichlet_stream,
    eta_min,
    maass_load,
    mean_square_audit,
    principal_character,
    ramanujan_tau,
    ramanujan_tau_stream,
    twist,
    validate_coefficient_growth,
    validate_langlands_window,
    zeta_stream,
)

from _oracles import character_conductor, tau_sigma_oracle


def phi(q):
    return sum(1 for a in range(1, q + 1) if math.gcd(a, q) == 1)


class TestGammaFactorData:
    def test_length_mismatch(self):
        with pytest.raises(ValueError, match="archimedean parameters"):
            GammaFactorData(2, 1, (0.0,), 1, 1.0)

    def test_kappa_modulus(self):
        with pytest.raises(ValueError, match="kappa"):
            GammaFactorData(1, 1, (0.0,), 1, 1.001)
        # None is allowed: unknown root number
        g = GammaFactorData(1, 1, (0.0,), 1, None)
        assert g.kappa is None

    def test_conductor_positive_integer(self):
        with pytest.raises(ValueError):
            GammaFactorData(1, 1, (0.0,), 0, 1.0)

    def test_dual_conjugates(self):
        g = GammaFactorData(2, 1, (0.25 + 1j, -0.5 - 2j), 7, cmath.exp(0.3j))
        gd = g.dual()
        assert gd.mu == (0.25 - 1j, -0.5 + 2j)
        assert abs(gd.kappa - cmath.exp(-0.3j)) < 1e-15

    def test_analytic_conductor_zeta(self):
        g = zeta_stream().gamma
        assert abs(analytic_conductor(g, 0.5) - 1 / (4 * math.pi)) < 1e-14

    def test_analytic_conductor_even_character(self):
        g = GammaFactorData(1, 1, (0.0,), 5, None)
        assert abs(analytic_conductor(g, 0.5) - 5 / (4 * math.pi)) < 1e-14

    def test_analytic_conductor_vanishes_at_mu(self):
        g = GammaFactorData(2, 1, (0.3 + 1j, -2.0), 3, None)
        assert analytic_conductor(g, 0.3 + 1j) == 0.0

    def test_analytic_conductor_permutation_and_blocks(self):
        rng = np.random.default_rng(7)
        mu = tuple(complex(a, b) for a, b in rng.normal(size=(4, 2)))
        s = 0.5 + 0.7j
        g1 = GammaFactorData(4, 1, mu, 6, None)
        g2 = GammaFactorData(4, 1, mu[::-1], 6, None)
        assert abs(analytic_conductor(g1, s) - analytic_conductor(g2, s)) < 1e-14
        # disjoint union with multiplied conductors factors into the product
        ga = GammaFactorData(2, 1, mu[:2], 2, None)
        gb = GammaFactorData(2, 1, mu[2:], 3, None)
        assert abs(analytic_conductor(g1, s)
                   - analytic_conductor(ga, s) * analytic_conductor(gb, s)) < 1e-14

    def test_eta_min(self):
        assert eta_min(GammaFactorData(1, 1, (0.0,), 1)) == 0.5
        assert eta_min(GammaFactorData(1, 1, (0.5,), 1)) == 0.0
        g = GammaFactorData(2, 1, (10j, -10j), 1)
        assert abs(eta_min(g) - abs(0.5 - 10j)) < 1e-14
        assert abs(eta_min(g) - 10.0124921972) < 1e-9


class TestLanglandsWindow:
    def test_zeta_boundary_pass(self):
        rep = validate_langlands_window(zeta_stream().gamma)
        assert rep["passes"] and rep["bound"] == 0.0

    def test_rank_two_boundary(self):
        ok = GammaFactorData(2, 1, (0.3, 0.0), 1)
        bad = GammaFactorData(2, 1, (0.31, 0.0), 1)
        assert validate_langlands_window(ok)["passes"]
        rep = validate_langlands_window(bad)
        assert not rep["passes"]
        assert rep["violators"][0][0] == 0
        assert abs(rep["bound"] - 0.3) < 1e-15


class TestDirichletCharacters:
    def test_counts_match_phi(self):
        for q in range(1, 31):
            assert len(characters_mod(q)) == phi(q), q

    def test_orthogonality_up_to_30(self):
        # sum over characters chi(a) conj(chi(b)) = phi(q) [a=b coprime to q]
        for q in range(1, 31):
            chars = characters_mod(q)
            V = np.array([[c(n) for n in range(q)] for c in chars])
            G = V.conj().T @ V
            want = np.zeros((q, q), dtype=complex)
            for a in range(q):
                if math.gcd(a if a else q, q) == 1:
                    want[a, a] = phi(q)
            assert np.max(np.abs(G - want)) < 1e-9, q

    def test_multiplicative(self):
        rng = np.random.default_rng(3)
        for q in (7, 12, 16, 21, 27):
            for c in characters_mod(q):
                for _ in range(20):
                    a, b = rng.integers(1, 10 * q, size=2)
                    assert abs(c(a * b) - c(a) * c(b)) < 1e-12

    def test_zero_exactly_off_units(self):
        for q in (8, 9, 15):
            for c in characters_mod(q):
                for n in range(q):
                    if math.gcd(n if n else q, q) == 1:
                        assert abs(abs(c(n)) - 1.0) < 1e-12
                    else:
                        assert c(n) == 0

    def test_primitive_flag_matches_conductor(self):
        for q in range(1, 25):
            for c in characters_mod(q):
                assert c.primitive_flag == (character_conductor(c) == q), q

    def test_parity_is_value_at_minus_one(self):
        for q in (4, 5, 8, 13):
            for c in characters_mod(q):
                assert abs(c(-1) - c.parity) < 1e-12

    def test_gauss_sum_magnitude(self):
        for q in range(2, 31):
            for c in characters_mod(q):
                if c.primitive_flag:
                    assert abs(abs(c.gauss_sum()) - math.sqrt(q)) < 1e-9

    def test_principal_character(self):
        c = principal_character(6)
        assert [c(n) for n in range(6)] == [0, 1, 0, 0, 0, 1]
        assert not c.primitive_flag
        assert principal_character(1)(0) == 1.0

    def test_validation(self):
        with pytest.raises(ValueError):
            DirichletCharacter(3, (1.0, 1.0), False, 1)  # wrong table length
        with pytest.raises(ValueError):
            DirichletCharacter(3, (0, 1.0, 1.0), False, 2)  # bad parity


class TestStreams:
    def test_zeta_stream(self):
        s = zeta_stream()
        assert s.kind == "zeta"
        assert s.coefficient_at(9) == 1.0
        assert s.archimedean_size == 1.0
        assert s.gamma.kappa == 1.0

    def test_lambda_one_enforced(self):
        with pytest.raises(ValueError, match="lambda"):
            CoefficientStream(label="bad", kind="zeta", level=1,
                              archimedean_size=1.0, rule=lambda n: 2.0)

    def test_unknown_kind(self):
        with pytest.raises(ValueError, match="kind"):
            CoefficientStream(label="x", kind="weird", level=1,
                              archimedean_size=1.0, rule=lambda n: 1.0)

    def test_dirichlet_mod4_values(self):
        chi = next(c for c in characters_mod(4) if not c.is_principal)
        s = dirichlet_stream(chi)
        assert [s.coefficient_at(n) for n in (1, 3, 5, 7)] == [1, -1, 1, -1]
        assert s.coefficient_at(2) == 0

    def test_dirichlet_mod4_gamma(self):
        chi = next(c for c in characters_mod(4) if not c.is_principal)
        g = dirichlet_stream(chi).gamma
        assert g.conductor == 4
        assert g.mu == (-1 + 0j,)
        assert abs(g.kappa - 1.0) < 1e-12

    def test_dirichlet_mod5_even_real_kappa(self):
        chi = next(c for c in characters_mod(5)
                   if not c.is_principal
                   and all(abs(c(n).imag) < 1e-12 for c, n in [(c, k) for k in range(5)]))
        assert chi.parity == 1
        g = dirichlet_stream(chi).gamma
        assert g.mu == (0j,)
        assert abs(g.kappa - 1.0) < 1e-12

    def test_dirichlet_nonprimitive_no_gamma(self):
        chi = next(c for c in characters_mod(6) if not c.is_principal)
        s = dirichlet_stream(chi)
        assert s.gamma is None
        assert s.coefficient_at(5) == chi(5)

    def test_principal_mod_one_is_zeta(self):
        s = dirichlet_stream(principal_character(1))
        assert s.kind == "zeta"

    def test_odd_shift_configurable(self):
        chi = next(c for c in characters_mod(4) if not c.is_principal)
        g = dirichlet_stream(chi, odd_shift=-3.0).gamma
        assert g.mu == (-3 + 0j,)

    def test_index_errors(self):
        s = zeta_stream()
        with pytest.raises(ValueError, match="nonzero"):
            s.coefficient_at(0)
        with pytest.raises(ValueError, match="negative"):
            s.coefficient_at(-2)
        t = ramanujan_tau_stream(10)
        with pytest.raises(ValueError, match="n=11"):
            t.coefficient_at(11)


class TestRamanujanTau:
    def test_known_values(self):
        assert ramanujan_tau(1) == 1
        assert ramanujan_tau(2) == -24
        assert ramanujan_tau(3) == 252
        assert ramanujan_tau(6) == ramanujan_tau(2) * ramanujan_tau(3)

    def test_against_divisor_sum_oracle(self):
        for n in range(1, 101):
            assert ramanujan_tau(n, 120) == tau_sigma_oracle(n), n

    def test_hecke_multiplicative_random_pairs(self):
        tab = {n: ramanujan_tau(n, 3000) for n in range(1, 3001)}
        rng = np.random.default_rng(11)
        done = 0
        while done < 200:
            m = int(rng.integers(2, 55))
            n = int(rng.integers(2, 55))
            if math.gcd(m, n) != 1 or m * n > 3000:
                continue
            assert tab[m * n] == tab[m] * tab[n], (m, n)
            done += 1

    def test_hecke_recursion_prime_squares(self):
        for p in (2, 3, 5, 7):
            assert ramanujan_tau(p * p, 100) == ramanujan_tau(p, 100) ** 2 - p ** 11

    def test_normalized_stream(self):
        s = ramanujan_tau_stream(60)
        assert s.coefficient_at(1) == 1.0
        assert abs(s.coefficient_at(2) - (-24) / 2 ** 5.5) < 1e-15
        assert s.gamma.mu == (-5.5 + 0j, -6.5 + 0j)
        assert s.archimedean_size == 7.0

    def test_deligne_bound_spot(self):
        s = ramanujan_tau_stream(100)
        for p in (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53,
                  59, 61, 67, 71, 73, 79, 83, 89, 97):
            assert abs(s.coefficient_at(p)) <= 2.0

    def test_cap_and_range_errors(self):
        with pytest.raises(ValueError):
            ramanujan_tau_stream(10 ** 6 + 1)
        with pytest.raises(ValueError):
            ramanujan_tau(0)


class TestTwist:
    def test_identity_at_zero(self):
        s = zeta_stream()
        g2, s2 = twist(s.gamma, s, 0.0)
        assert g2.mu == s.gamma.mu
        assert g2.kappa == s.gamma.kappa
        assert s2.coefficient_at(17) == 1.0

    def test_zeta_by_one(self):
        s = zeta_stream()
        g2, s2 = twist(s.gamma, s, 1.0)
        assert abs(g2.mu[0] - (-1j)) < 1e-15
        assert abs(s2.coefficient_at(2) - 2 ** (-1j)) < 1e-15

    def test_kappa_scaling(self):
        chi = next(c for c in characters_mod(4) if not c.is_principal)
        s = dirichlet_stream(chi)
        g2, _ = twist(s.gamma, s, 5.0)
        want = s.gamma.kappa * cmath.exp(-5j * math.log(4))
        assert abs(g2.kappa - want) < 1e-14
        assert g2.conductor == 4

    def test_group_law_rule_stream(self):
        chi = next(c for c in characters_mod(4) if not c.is_principal)
        s = dirichlet_stream(chi)
        g1, s1 = twist(s.gamma, s, 0.7)
        g12, s12 = twist(g1, s1, -0.3)
        g_direct, s_direct = twist(s.gamma, s, 0.4)
        assert max(abs(a - b) for a, b in zip(g12.mu, g_direct.mu)) < 1e-12
        assert abs(g12.kappa - g_direct.kappa) < 1e-12
        for n in (1, 3, 9, 11):
            assert abs(s12.coefficient_at(n) - s_direct.coefficient_at(n)) < 1e-12

    def test_group_law_table_stream(self):
        s = ramanujan_tau_stream(40)
        g1, s1 = twist(s.gamma, s, 2.0)
        g2, s2 = twist(g1, s1, -2.0)
        for n in (1, 5, 24, 40):
            assert abs(s2.coefficient_at(n) - s.coefficient_at(n)) < 1e-12
        assert max(abs(a - b) for a, b in zip(g2.mu, s.gamma.mu)) < 1e-12


class TestMaassLoad:
    def _rows(self, count=30, lam1=1.0):
        rows = []
        rng = np.random.default_rng(5)
        for n in range(1, count // 2 + 1):
            v = lam1 if n == 1 else float(rng.normal()) * 0.5
            rows.append((n, v, 0.0))
            rows.append((-n, v * 0.9, 0.0))
        return rows

    def _header(self, **over):
        h = {"form": "test maass", "kind": "maass_cusp", "level": 1,
             "weight_or_eigenvalue": 0.25 + 2.3 ** 2, "normalization": "hecke"}
        h.update(over)
        return h

    def test_roundtrip_and_metadata(self, tmp_path):
        path = tmp_path / "m.coeffs"
        rows = self._rows()
        write_cache_file(path, self._header(), rows)
        s = maass_load(path)
        want = dict(((n, complex(re, im)) for n, re, im in rows))
        assert s.coefficient_at(5) == want[5]
        assert s.coefficient_at(-7) == want[-7]
        assert s.kind == "maass_cusp"
        r = 2.3
        assert abs(s.gamma.mu[0] - 1j * r) < 1e-12
        assert abs(s.archimedean_size - abs(0.5 + 1j * r)) < 1e-12
        assert s.gamma.kappa is None

    def test_lambda_one_warns_but_loads(self, tmp_path):
        path = tmp_path / "m.coeffs"
        write_cache_file(path, self._header(), self._rows(lam1=0.8))
        with pytest.warns(UserWarning, match="lambda"):
            s = maass_load(path)
        assert s.coefficient_at(1) == 0.8

    def test_truncated_row_names_line(self, tmp_path):
        path = tmp_path / "m.coeffs"
        write_cache_file(path, self._header(), self._rows())
        lines = path.read_text().splitlines()
        lines[10] = "5 0.25"  # drop a field
        path.write_text("\n".join(lines) + "\n")
        with pytest.raises(ValueError, match="line 11"):
            maass_load(path)

    def test_count_mismatch(self, tmp_path):
        path = tmp_path / "m.coeffs"
        write_cache_file(path, self._header(), self._rows())
        text = path.read_text().splitlines()
        path.write_text("\n".join(text[:-1]) + "\n")  # drop last row
        with pytest.raises(ValueError, match="count"):
            maass_load(path)

    def test_checksum_mismatch(self, tmp_path):
        path = tmp_path / "m.coeffs"
        write_cache_file(path, self._header(), self._rows())
        text = path.read_text().replace("0.9", "0.91", 1)
        path.write_text(text)
        with pytest.raises(ValueError, match="checksum"):
            maass_load(path)

    def test_missing_eigenvalue_header(self, tmp_path):
        path = tmp_path / "m.coeffs"
        h = self._header()
        del h["weight_or_eigenvalue"]
        rows = self._rows()
        with open(path, "w") as fh:
            for k, v in h.items():
                fh.write(f"# {k}={v}\n")
            fh.write(f"# count={len(rows)}\n")
            for n, re, im in rows:
                fh.write(f"{n} {re!r} {im!r}\n")
        with pytest.raises(ValueError, match="weight_or_eigenvalue"):
            maass_load(path)

    def test_eigenvalue_below_quarter(self, tmp_path):
        path = tmp_path / "m.coeffs"
        write_cache_file(path, self._header(weight_or_eigenvalue=0.2), self._rows())
        with pytest.raises(ValueError, match="1/4"):
            maass_load(path)

    def test_cache_roundtrip_exact(self, tmp_path):
        path = tmp_path / "c.coeffs"
        rows = [(3, 0.1234567890123456, -1.5), (-3, 7e-12, 2.25)]
        write_cache_file(path, {"form": "x", "kind": "maass_cusp", "level": 2,
                                "weight_or_eigenvalue": 1.0,
                                "normalization": "hecke"}, rows)
        cache = read_cache_file(path)
        assert cache.rows == rows


class TestGrowthAudits:
    def test_zeta_growth(self):
        s = zeta_stream()
        rep = validate_coefficient_growth(s, 1.0, [10, 50, 100, 200])
        # lambda = 1: sum is floor(x), ratio x^{-0.1} at conductor 1
        assert abs(rep["sup_ratio"] - 10 / 10 ** 1.1) < 1e-12
        assert rep["witness_x"] == 10

    def test_dirichlet_mod4_growth_pins_sum(self):
        chi = next(c for c in characters_mod(4) if not c.is_principal)
        rep = validate_coefficient_growth(dirichlet_stream(chi), 1.0, [10])
        assert abs(rep["sup_ratio"] - 5 / 10 ** 1.1) < 1e-12

    def test_delta_growth_below_two(self):
        s = ramanujan_tau_stream(1000)
        rep = validate_coefficient_growth(s, 1.0, [100, 500, 1000])
        assert rep["sup_ratio"] < 2.0

    def test_insufficient_coefficients(self):
        s = ramanujan_tau_stream(100)
        with pytest.raises(ValueError, match="no coefficient"):
            validate_coefficient_growth(s, 1.0, [200])

    def test_parameter_validation(self):
        s = zeta_stream()
        with pytest.raises(ValueError):
            validate_coefficient_growth(s, 0.0, [10])
        with pytest.raises(ValueError):
            validate_coefficient_growth(s, 1.0, [10], epsilon=0.0)
        with pytest.raises(ValueError):
            validate_coefficient_growth(s, 1.0, [])

    def test_mean_square_zeta_fifty(self):
        rep = mean_square_audit(zeta_stream(), [50])
        assert abs(rep["sup_ratio"] - 50 / 51) < 1e-12
        assert rep["sup_ratio"] < 1.0

    def test_mean_square_delta(self):
        s = ramanujan_tau_stream(10 ** 4)
        rep = mean_square_audit(s, [10 ** 4])
        assert rep["sup_ratio"] < 3.0

    def test_mean_square_counts_both_signs(self, tmp_path):
        path = tmp_path / "m.coeffs"
        rows = [(1, 1.0, 0.0), (-1, 1.0, 0.0), (2, 1.0, 0.0), (-2, 1.0, 0.0)]
        write_cache_file(path, {"form": "t", "kind": "maass_cusp", "level": 1,
                                "weight_or_eigenvalue": 1.25,
                                "normalization": "hecke"}, rows)
        s = maass_load(path)
        rep = mean_square_audit(s, [2])
        denom = 2 + 1 * s.archimedean_size
        assert abs(rep["sup_ratio"] - 4 / denom) < 1e-12

    def test_mean_square_empty_grid(self):
        with pytest.raises(ValueError):
            mean_square_audit(zeta_stream(), [])

    def test_archimedean_size_helper(self):
        assert archimedean_size_of(zeta_stream().gamma) == 1.0
        g = GammaFactorData(2, 1, (2.3j, -2.3j), 1)
        assert abs(archimedean_size_of(g) - abs(0.5 + 2.3j)) < 1e-14
