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

#include "mmwrx/montecarlo.hpp"
#include "mmwrx/rng.hpp"

using namespace mmwrx;

TEST_CASE("sampled output correlation matches the one-bit map")
{
    quant::QuantizerSpec q = quant::design_quantizer(1);
    quant::MapCache maps;
    const double c = 4.0 / (arma::datum::pi * arma::datum::pi);
    for (double rho : {0.1, 0.5, 0.9})
    {
        std::mt19937_64 rng(derive_seed(11, 0, int(rho * 10)));
        mc::Estimate est = mc::mc_output_corr(q, q, rho, 1000000, rng);
        CHECK(std::abs(est.value - maps.get(q, q).eval(rho)) < 3.0 * est.std_err);
        CHECK(std::abs(est.value - c * std::asin(rho)) < 3.0 * est.std_err + 1e-3);
    }
}

TEST_CASE("independent inputs give zero output correlation")
{
    quant::QuantizerSpec a = quant::design_quantizer(2);
    quant::QuantizerSpec b = quant::design_quantizer(3);
    std::mt19937_64 rng(5);
    mc::Estimate est = mc::mc_output_corr(a, b, 0.0, 500000, rng);
    CHECK(std::abs(est.value) < 3.0 * est.std_err);
}

TEST_CASE("fully correlated inputs reduce to the deterministic bin sum")
{
    quant::QuantizerSpec a = quant::design_quantizer(2);
    quant::QuantizerSpec b = quant::design_quantizer(5);
    std::mt19937_64 rng(5);
    mc::Estimate est = mc::mc_output_corr(a, b, 1.0, 1000, rng);
    CHECK(est.std_err == 0.0);
    CHECK(est.value == quant::output_corr_at_one(a, b));

    // cross-check the bin sum by sampling a common input
    std::normal_distribution<double> gauss(0.0, 1.0);
    double acc = 0.0;
    const int n = 400000;
    for (int i = 0; i < n; ++i)
    {
        double x = gauss(rng);
        acc += quant::quantize_sample(a, x, 1.0) * quant::quantize_sample(b, x, 1.0);
    }
    CHECK(acc / n == doctest::Approx(est.value).epsilon(0.01));
}

TEST_CASE("sampled Bussgang gain matches the closed form")
{
    for (int b : {1, 3, 6})
    {
        quant::QuantizerSpec q = quant::design_quantizer(b);
        std::mt19937_64 rng(derive_seed(12, 0, b));
        mc::BussgangEstimate est = mc::mc_bussgang(q, 1000000, rng);
        CHECK(std::abs(est.gain - q.gain) < 3.0 * est.gain_std_err);
        CHECK(est.orth_residual < 4.0 * est.orth_std_err);
    }
    quant::QuantizerSpec ideal = quant::design_quantizer(0);
    std::mt19937_64 rng(3);
    mc::BussgangEstimate est = mc::mc_bussgang(ideal, 10000, rng);
    CHECK(est.gain == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(est.orth_residual == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("analytic error covariance matches the sampled one entrywise")
{
    // correlated proper Gaussian input, mixed resolutions
    std::mt19937_64 rng(derive_seed(13, 1, 0));
    std::normal_distribution<double> gauss(0.0, 1.0);
    const int n = 4;
    arma::cx_mat g(n, n);
    for (auto &v : g)
        v = cxd(gauss(rng), gauss(rng));
    arma::cx_mat r_yy = g * g.t() / n + 0.5 * arma::cx_mat(n, n, arma::fill::eye);
    r_yy = symmetrize(r_yy);

    std::vector<quant::QuantizerSpec> bank;
    for (int b : {1, 2, 3, 4})
        bank.push_back(quant::design_quantizer(b));

    quant::MapCache maps;
    arma::cx_mat r_rr = quant::transform_cov(r_yy, bank, maps);
    arma::cx_mat r_ee = quant::quant_error_cov(r_rr, quant::bussgang_gains(bank), r_yy);

    mc::CovEstimate est = mc::mc_quant_error_cov(r_yy, bank, 1000000, rng);
    int off_diag_nonzero = 0;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
        {
            CHECK(std::abs(r_ee(i, j).real() - est.mean(i, j).real()) <
                  3.0 * est.std_err_re(i, j) + 1e-12);
            CHECK(std::abs(r_ee(i, j).imag() - est.mean(i, j).imag()) <
                  3.0 * est.std_err_im(i, j) + 1e-12);
            if (i != j && std::abs(r_ee(i, j)) > 3.0 * est.std_err_re(i, j))
                ++off_diag_nonzero;
        }
    // the point of the full model: off-diagonal error correlation is real
    CHECK(off_diag_nonzero > 0);
}

TEST_CASE("sampled channel-estimation MSE matches the analytic value")
{
    chanest::SeparableCovariance cov;
    cov.s = arma::conv_to<arma::cx_mat>::from(chanest::spatial_corr(2));
    cov.t = arma::conv_to<arma::cx_mat>::from(chanest::time_corr(0.04, 4));
    cov.f = chanest::freq_corr(arma::vec{0.5, 0.35, 0.15}, 8);
    cov.ns = arma::cx_mat(2, 2, arma::fill::eye);
    cov.nt = arma::cx_mat(4, 4, arma::fill::eye);
    chanest::DimPilots pilots;
    pilots.s = arma::regspace<arma::uvec>(0, 1);
    pilots.t = arma::uvec{1};
    pilots.f = arma::uvec{0, 2, 4, 6};

    for (double snr : {-10.0, 0.0, 10.0})
    {
        double s2 = std::pow(10.0, -snr / 10.0);
        cov.nf = s2 * arma::cx_mat(8, 8, arma::fill::eye);
        arma::cx_mat a_s = chanest::wiener_matrix(cov.s, s2, pilots.s);
        arma::cx_mat a_t = chanest::wiener_matrix(cov.t, s2, pilots.t);
        arma::cx_mat a_f = chanest::wiener_matrix(cov.f, s2, pilots.f);
        double analytic = chanest::analytic_mse_kron(a_s, a_t, a_f, cov, pilots);
        std::mt19937_64 rng(derive_seed(14, 2, int(snr) + 30));
        double sampled = mc::mc_channel_est(cov, pilots, a_s, a_t, a_f, s2, 10000, rng);
        CHECK(sampled == doctest::Approx(analytic).epsilon(0.03));
    }
}

TEST_CASE("zero-noise estimation with pilots everywhere is exact")
{
    chanest::SeparableCovariance cov;
    cov.s = arma::cx_mat(1, 1, arma::fill::eye);
    cov.t = arma::cx_mat(2, 2, arma::fill::eye);
    cov.f = chanest::freq_corr(arma::vec{0.7, 0.3}, 4);
    cov.ns = cov.s;
    cov.nt = cov.t;
    cov.nf = 1e-12 * arma::cx_mat(4, 4, arma::fill::eye);
    chanest::DimPilots pilots;
    pilots.s = arma::uvec{0};
    pilots.t = arma::uvec{0, 1};
    pilots.f = arma::regspace<arma::uvec>(0, 3);
    arma::cx_mat a_s(1, 1, arma::fill::eye), a_t(2, 2, arma::fill::eye),
        a_f(4, 4, arma::fill::eye);
    std::mt19937_64 rng(8);
    double mse = mc::mc_channel_est(cov, pilots, a_s, a_t, a_f, 0.0, 2000, rng);
    CHECK(mse < 1e-20);
}

TEST_CASE("zero estimator has unit MSE under unit channel power")
{
    chanest::SeparableCovariance cov;
    cov.s = arma::cx_mat(2, 2, arma::fill::eye);
    cov.t = arma::cx_mat(2, 2, arma::fill::eye);
    cov.f = arma::cx_mat(4, 4, arma::fill::eye);
    cov.ns = cov.s;
    cov.nt = cov.t;
    cov.nf = 0.1 * arma::cx_mat(4, 4, arma::fill::eye);
    chanest::DimPilots pilots;
    pilots.s = arma::regspace<arma::uvec>(0, 1);
    pilots.t = arma::uvec{0};
    pilots.f = arma::uvec{0, 2};
    arma::cx_mat zs(2, 2, arma::fill::zeros), zt(2, 2, arma::fill::zeros),
        zf(4, 4, arma::fill::zeros);
    std::mt19937_64 rng(9);
    double mse = mc::mc_channel_est(cov, pilots, zs, zt, zf, 0.1, 20000, rng);
    CHECK(mse == doctest::Approx(1.0).epsilon(0.03));
}
