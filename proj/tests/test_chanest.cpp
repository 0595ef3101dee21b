// mmwrx - mmWave multiuser receiver simulation: beamforming, low-resolution
// ADC quantization, channel-estimation error and RF front-end power models
// Copyright (C) 2026 the mmwrx authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <filesystem>
#include <random>

#include "mmwrx/chanest.hpp"

using namespace mmwrx;

namespace {

arma::cx_mat random_psd(int n, std::mt19937_64 &rng, double ridge = 0.05)
{
    std::normal_distribution<double> gauss(0.0, 1.0);
    arma::cx_mat g(n, n);
    for (auto &v : g)
        v = cxd(gauss(rng), gauss(rng));
    arma::cx_mat r = g * g.t() / n + ridge * arma::cx_mat(n, n, arma::fill::eye);
    // unit diagonal, as the covariance factors carry
    arma::vec d = arma::sqrt(arma::real(r.diag()));
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            r(i, j) /= d(i) * d(j);
    return symmetrize(r);
}

arma::uvec random_subset(int n, std::mt19937_64 &rng)
{
    std::uniform_int_distribution<int> coin(0, 1);
    std::vector<arma::uword> idx;
    for (int i = 0; i < n; ++i)
        if (coin(rng))
            idx.push_back(i);
    if (idx.empty())
        idx.push_back(std::uniform_int_distribution<int>(0, n - 1)(rng));
    return arma::uvec(idx);
}

} // namespace

TEST_CASE("time correlation basics")
{
    arma::mat r0 = chanest::time_corr(0.0, 4);
    CHECK(arma::abs(r0 - arma::ones(4, 4)).max() < 1e-14);

    arma::mat r = chanest::time_corr(0.37, 6);
    for (int i = 0; i < 6; ++i)
        CHECK(r(i, i) == 1.0);

    // First Bessel zero at 2.4048: doppler * lag = 0.3827
    arma::mat z = chanest::time_corr(0.3827, 2);
    CHECK(std::abs(z(0, 1)) < 1e-3);
}

TEST_CASE("frequency correlation basics")
{
    arma::cx_mat flat = chanest::freq_corr(arma::vec{1.0}, 6);
    CHECK(arma::abs(flat - arma::cx_mat(6, 6, arma::fill::ones)).max() < 1e-13);

    const int k = 8;
    arma::vec uni(k);
    uni.fill(1.0 / k);
    arma::cx_mat white = chanest::freq_corr(uni, k);
    CHECK(arma::abs(white - arma::cx_mat(k, k, arma::fill::eye)).max() < 1e-12);

    arma::cx_mat r = chanest::freq_corr(arma::vec{0.5, 0.3, 0.2}, 8);
    for (int i = 0; i < 8; ++i)
        CHECK(std::real(r(i, i)) == doctest::Approx(1.0).epsilon(1e-13));
    CHECK(hermitian_error(r) < 1e-13);
    CHECK_THROWS_AS(chanest::freq_corr(arma::vec(9, arma::fill::ones), 8),
                    std::invalid_argument);
}

TEST_CASE("spatial correlation basics")
{
    arma::mat r = chanest::spatial_corr(4);
    CHECK(r(0, 0) == 1.0);
    CHECK(r(1, 0) == doctest::Approx(-0.304242).epsilon(1e-4));
    CHECK(arma::abs(r - r.t()).max() == 0.0);

    arma::mat hbf = chanest::spatial_corr(4, true);
    CHECK(arma::abs(hbf - arma::eye(4, 4)).max() == 0.0);
}

TEST_CASE("wiener matrix scalar and identity limits")
{
    arma::cx_mat r1(1, 1, arma::fill::eye);
    arma::cx_mat a = chanest::wiener_matrix(r1, 0.5, arma::uvec{0});
    CHECK(std::abs(a(0, 0) - cxd(1.0 / 1.5, 0.0)) < 1e-13);

    std::mt19937_64 rng(31);
    arma::cx_mat r = random_psd(5, rng);
    arma::uvec all = arma::regspace<arma::uvec>(0, 4);
    arma::cx_mat a0 = chanest::wiener_matrix(r, 1e-12, all);
    CHECK(arma::abs(a0 - arma::cx_mat(5, 5, arma::fill::eye)).max() < 1e-6);
}

TEST_CASE("wiener matrix is a contraction")
{
    std::mt19937_64 rng(13);
    for (int trial = 0; trial < 20; ++trial)
    {
        int n = 3 + trial % 5;
        arma::cx_mat r = random_psd(n, rng);
        arma::uvec pilots = random_subset(n, rng);
        for (double s2 : {1e-3, 0.1, 1.0})
        {
            arma::cx_mat a = chanest::wiener_matrix(r, s2, pilots);
            arma::cx_vec ev;
            arma::eig_gen(ev, a);
            CHECK(arma::abs(ev).max() <= 1.0 + 1e-9);
        }
    }
}

TEST_CASE("reference-signal pattern layout")
{
    chanest::PilotPattern p1 = chanest::dmrs_pattern(1, 8, 14);
    REQUIRE(p1.sym.n_elem == 1);
    CHECK(p1.sym(0) == 2);
    CHECK(arma::all(p1.sc[0] == arma::uvec{0, 2, 4, 6}));

    chanest::PilotPattern p4 = chanest::dmrs_pattern(4, 16, 14);
    // disjoint effective sets
    arma::uvec merged;
    for (int u = 0; u < 4; ++u)
        merged = arma::join_cols(merged, p4.sc[u]);
    arma::uvec uniq = arma::unique(merged);
    CHECK(uniq.n_elem == merged.n_elem);
    // each comb carries k/2 pilots in total
    CHECK(p4.sc[0].n_elem + p4.sc[1].n_elem == 8);
    CHECK(p4.sc[2].n_elem + p4.sc[3].n_elem == 8);

    CHECK_THROWS_AS(chanest::dmrs_pattern(5, 8, 14), std::invalid_argument);
    CHECK_THROWS_AS(chanest::dmrs_pattern(2, 7, 14), std::invalid_argument);
}

TEST_CASE("analytic MSE scalar closed form")
{
    for (double s2 : {0.1, 1.0, 5.0})
    {
        chanest::SeparableCovariance cov;
        cov.s = cov.t = cov.f = arma::cx_mat(1, 1, arma::fill::eye);
        cov.ns = cov.nt = arma::cx_mat(1, 1, arma::fill::eye);
        cov.nf = s2 * arma::cx_mat(1, 1, arma::fill::eye);
        chanest::DimPilots pilots;
        pilots.s = pilots.t = pilots.f = arma::uvec{0};
        arma::cx_mat one(1, 1, arma::fill::eye);
        arma::cx_mat a = chanest::wiener_matrix(one, s2, arma::uvec{0});
        double mse = chanest::analytic_mse_kron(a, one, one, cov, pilots);
        CHECK(mse == doctest::Approx(s2 / (1.0 + s2)).epsilon(1e-12));

        // direct form agrees
        double direct = chanest::analytic_mse_direct(a, one, s2 * one, arma::uvec{0});
        CHECK(direct == doctest::Approx(mse).epsilon(1e-12));
    }
}

TEST_CASE("analytic MSE with a zero estimator equals the channel power")
{
    chanest::SeparableCovariance cov;
    cov.s = arma::cx_mat(2, 2, arma::fill::eye);
    cov.t = arma::cx_mat(3, 3, arma::fill::eye);
    cov.f = arma::cx_mat(4, 4, arma::fill::eye);
    cov.ns = cov.s;
    cov.nt = cov.t;
    cov.nf = 0.3 * arma::cx_mat(4, 4, arma::fill::eye);
    chanest::DimPilots pilots;
    pilots.s = arma::regspace<arma::uvec>(0, 1);
    pilots.t = arma::uvec{0};
    pilots.f = arma::uvec{1, 3};

    arma::cx_mat zs(2, 2, arma::fill::zeros), zt(3, 3, arma::fill::zeros),
        zf(4, 4, arma::fill::zeros);
    CHECK(chanest::analytic_mse_kron(zs, zt, zf, cov, pilots) ==
          doctest::Approx(1.0).epsilon(1e-13));

    // pilot-free pattern behaves like the zero estimator
    chanest::DimPilots none;
    none.s = arma::uvec{};
    none.t = arma::uvec{};
    none.f = arma::uvec{};
    arma::cx_mat as = chanest::wiener_matrix(cov.s, 0.3, none.s);
    CHECK(chanest::analytic_mse_kron(as, zt, zf, cov, none) ==
          doctest::Approx(1.0).epsilon(1e-13));
}

TEST_CASE("factored and direct MSE agree on random instances")
{
    std::mt19937_64 rng(77);
    for (int trial = 0; trial < 10; ++trial)
    {
        const int m = 2, lt = 4, k = 8;
        chanest::SeparableCovariance cov;
        cov.s = random_psd(m, rng);
        cov.t = random_psd(lt, rng);
        cov.f = random_psd(k, rng);
        cov.ns = arma::cx_mat(m, m, arma::fill::eye);
        cov.nt = arma::cx_mat(lt, lt, arma::fill::eye);
        double s2 = 0.05 + 0.4 * (trial % 5);
        cov.nf = s2 * arma::cx_mat(k, k, arma::fill::eye);

        chanest::DimPilots pilots;
        pilots.s = random_subset(m, rng);
        pilots.t = random_subset(lt, rng);
        pilots.f = random_subset(k, rng);

        arma::cx_mat a_s = chanest::wiener_matrix(cov.s, s2, pilots.s);
        arma::cx_mat a_t = chanest::wiener_matrix(cov.t, s2, pilots.t);
        arma::cx_mat a_f = chanest::wiener_matrix(cov.f, s2, pilots.f);

        double kron_mse = chanest::analytic_mse_kron(a_s, a_t, a_f, cov, pilots);

        arma::cx_mat a_stf = kron3(a_s, a_t, a_f);
        arma::cx_mat r_hh = kron3(cov.s, cov.t, cov.f);
        arma::cx_mat r_nn = kron3(cov.ns, cov.nt, cov.nf);
        std::vector<arma::uword> full;
        for (arma::uword im : pilots.s)
            for (arma::uword it : pilots.t)
                for (arma::uword kf : pilots.f)
                    full.push_back(im * lt * k + it * k + kf);
        double direct = chanest::analytic_mse_direct(a_stf, r_hh, r_nn, arma::uvec(full));
        CHECK(kron_mse == doctest::Approx(direct).epsilon(1e-10));
    }
}

TEST_CASE("MSE table is decreasing and floored at zero")
{
    SystemConfig cfg;
    cfg.m_r = 4;
    cfg.m_c = 1;
    cfg.m_rfe = 4;
    cfg.users = 2;
    cfg.l = 8;
    cfg.p = 4;
    cfg.n_f = 16;
    cfg.adc_bits = uniform_bits(4, 4);
    cfg.chanest.l_sym = 14;
    cfg.chanest.snr_step_db = 5.0;
    cfg.validate();
    chanest::MseTable t = chanest::build_mse_table(cfg);
    REQUIRE(t.snr_db.n_elem == 13);
    for (arma::uword i = 0; i + 1 < t.mse.n_elem; ++i)
        CHECK(t.mse(i + 1) < t.mse(i));
    CHECK(t.mse.min() >= 0.0);

    // lookup: clamped ends, interpolation between grid points
    CHECK(t.lookup(-100.0) == t.mse(0));
    CHECK(t.lookup(100.0) == t.mse(t.mse.n_elem - 1));
    double mid = t.lookup(-27.5);
    CHECK(mid < t.mse(0));
    CHECK(mid > t.mse(1));

    // degradation: unity at very low SNR where noise dominates the error
    CHECK(chanest::snr_degradation(t, t.snr_db(0)) > 1.0);

    auto path = std::filesystem::temp_directory_path() / "mmwrx_mse_table_test.csv";
    t.save_csv(path);
    chanest::MseTable t2 = chanest::MseTable::load_csv(path);
    CHECK(arma::abs(t2.mse - t.mse).max() < 1e-15);
    std::filesystem::remove(path);
}

TEST_CASE("matched scalar-grid table reproduces the scalar Wiener curve")
{
    SystemConfig cfg;
    cfg.m_r = 1;
    cfg.m_c = 1;
    cfg.m_rfe = 1;
    cfg.users = 1;
    cfg.l = 1;
    cfg.p = 1;
    cfg.n_f = 2;
    cfg.adc_bits = uniform_bits(1, 4);
    cfg.chanest.doppler_norm = 0.0; // fully correlated in time
    cfg.chanest.l_sym = 3;          // pilot on the last symbol
    cfg.chanest.table_k = 2;        // single tap: fully correlated in frequency
    cfg.chanest.snr_step_db = 10.0;
    cfg.validate();
    chanest::MseTable t = chanest::build_mse_table(cfg);
    for (arma::uword i = 0; i < t.snr_db.n_elem; ++i)
    {
        double s2 = std::pow(10.0, -t.snr_db(i) / 10.0);
        CHECK(t.mse(i) == doctest::Approx(s2 / (1.0 + s2)).epsilon(1e-9));
    }
}

TEST_CASE("estimation error covariance")
{
    arma::cx_mat h1(3, 1, arma::fill::ones);
    SUBCASE("zero MSE gives the zero matrix")
    {
        arma::cx_mat r = chanest::est_error_cov({h1}, arma::vec{0.0});
        CHECK(arma::abs(r).max() == 0.0);
    }
    SUBCASE("flat unit channel scales the identity")
    {
        arma::cx_mat r = chanest::est_error_cov({h1}, arma::vec{0.1});
        CHECK(arma::abs(r - 0.1 * arma::cx_mat(3, 3, arma::fill::eye)).max() < 1e-14);
    }
    SUBCASE("users add")
    {
        arma::cx_mat h2 = 2.0 * h1;
        arma::cx_mat r12 = chanest::est_error_cov({h1, h2}, arma::vec{0.1, 0.2});
        arma::cx_mat r1 = chanest::est_error_cov({h1}, arma::vec{0.1});
        arma::cx_mat r2 = chanest::est_error_cov({h2}, arma::vec{0.2});
        CHECK(arma::abs(r12 - r1 - r2).max() < 1e-14);
        // diagonal and PSD
        CHECK(arma::abs(r12 - arma::diagmat(r12.diag())).max() == 0.0);
        CHECK(arma::real(r12.diag()).min() >= 0.0);
    }
}
