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

#include "mmwrx/rate.hpp"
#include "mmwrx/rng.hpp"

using namespace mmwrx;

namespace {

SystemConfig siso_ideal(double snr_db)
{
    SystemConfig cfg;
    cfg.m_r = 1;
    cfg.m_c = 1;
    cfg.m_rfe = 1;
    cfg.users = 1;
    cfg.l = 1;
    cfg.p = 1;
    cfg.n_f = 4;
    cfg.snr_db = snr_db;
    cfg.evm_db.reset();
    cfg.adc_bits = uniform_bits(1, 0); // quantization bypass
    cfg.chanest.enabled = false;
    cfg.validate();
    return cfg;
}

SystemConfig small_cfg(BfMode mode, int bits, double snr_db)
{
    SystemConfig cfg;
    cfg.m_r = 8;
    cfg.mode = mode;
    cfg.m_c = mode == BfMode::hbf ? 2 : 1;
    cfg.m_rfe = cfg.m_r / cfg.m_c;
    cfg.users = 2;
    cfg.l = 8;
    cfg.p = 4;
    cfg.n_f = 16;
    cfg.snr_db = snr_db;
    cfg.adc_bits = uniform_bits(cfg.m_rfe, bits);
    cfg.chanest.enabled = false;
    cfg.validate();
    return cfg;
}

} // namespace

TEST_CASE("effective channel reduces to the plain channel for ideal DBF")
{
    SystemConfig cfg = small_cfg(BfMode::dbf, 0, 10.0);
    std::mt19937_64 rng(1);
    channel::Realization re = channel::sample_channel(cfg, rng);
    arma::cx_mat w(cfg.m_r, cfg.m_r, arma::fill::eye);
    arma::mat f(cfg.m_r, cfg.m_r, arma::fill::eye);
    channel::FreqChannel h = channel::to_frequency(re, cfg.n_f);
    channel::FreqChannel hp = rate::effective_channel(f, w, re, cfg.n_f);
    for (int u = 0; u < cfg.users; ++u)
        for (int s = 0; s < cfg.n_f; ++s)
            CHECK(arma::abs(hp[u].slice(s) - h[u].slice(s)).max() < 1e-13);
}

TEST_CASE("one-bit DBF scales the channel by the Bussgang gain")
{
    SystemConfig cfg = small_cfg(BfMode::dbf, 1, 10.0);
    std::mt19937_64 rng(2);
    channel::Realization re = channel::sample_channel(cfg, rng);
    std::vector<quant::QuantizerSpec> bank = quant::bank_for(cfg);
    arma::mat f = quant::bussgang_gains(bank);
    arma::cx_mat w(cfg.m_r, cfg.m_r, arma::fill::eye);
    channel::FreqChannel h = channel::to_frequency(re, cfg.n_f);
    channel::FreqChannel hp = rate::effective_channel(f, w, re, cfg.n_f);
    const double g = 2.0 / arma::datum::pi;
    for (int s = 0; s < cfg.n_f; ++s)
        CHECK(arma::abs(hp[0].slice(s) - g * h[0].slice(s)).max() < 1e-12);
}

TEST_CASE("aligned subarray gives coherent gain times the Bussgang factor")
{
    const int m_c = 2;
    beamforming::Codebook cb = beamforming::build_codebook(m_c);
    const cxd alpha(0.6, -0.3);
    channel::Realization re;
    channel::UserChannel uc;
    uc.pdp = arma::vec{1.0};
    channel::Tap t;
    t.delay = 0;
    t.gain = alpha;
    t.h = alpha * channel::steering_vector(cb.phases(3), m_c) *
          arma::cx_mat(1, 1, arma::fill::ones);
    uc.taps.push_back(t);
    re.users.push_back(uc);

    beamforming::Allocation al;
    al.user = arma::uvec{0};
    al.beam = arma::uvec{3};
    arma::cx_mat w = beamforming::assemble_combiner(al, cb, BfMode::hbf, m_c);

    quant::QuantizerSpec q = quant::design_quantizer(3);
    arma::mat f(1, 1);
    f(0, 0) = q.gain; // 1 - sigma_q^2 for Lloyd-Max
    channel::FreqChannel hp = rate::effective_channel(f, w, re, 4);
    CHECK(std::abs(hp[0].slice(0)(0, 0)) ==
          doctest::Approx(m_c * (1.0 - q.distortion) * std::abs(alpha)).epsilon(1e-12));
}

TEST_CASE("effective noise covariance limits")
{
    SUBCASE("no quantization, digital combining, white noise")
    {
        arma::cx_mat r(3, 3, arma::fill::eye);
        arma::mat f(3, 3, arma::fill::eye);
        arma::cx_mat w(3, 3, arma::fill::eye);
        arma::cx_mat out = rate::effective_noise_cov(f, w, r, arma::cx_mat(3, 3, arma::fill::zeros));
        CHECK(arma::abs(out - r).max() < 1e-14);
    }
    SUBCASE("one-bit scalar")
    {
        const double g = 2.0 / arma::datum::pi, s2 = 0.7, se = 0.2;
        arma::cx_mat r(1, 1);
        r(0, 0) = s2;
        arma::mat f(1, 1);
        f(0, 0) = g;
        arma::cx_mat w(1, 1, arma::fill::eye);
        arma::cx_mat e(1, 1);
        e(0, 0) = se;
        arma::cx_mat out = rate::effective_noise_cov(f, w, r, e);
        CHECK(std::real(out(0, 0)) == doctest::Approx(g * g * s2 + se).epsilon(1e-13));
    }
    SUBCASE("transmit impairments raise every diagonal entry")
    {
        SystemConfig cfg = small_cfg(BfMode::dbf, 2, 5.0);
        std::mt19937_64 rng(3);
        channel::Realization re = channel::sample_channel(cfg, rng);
        channel::FreqChannel hf = channel::to_frequency(re, cfg.n_f);
        arma::vec p = channel::snr_to_power(cfg, re);
        arma::cx_mat noise(cfg.m_r, cfg.m_r, arma::fill::eye);
        arma::cx_mat no_evm =
            channel::combined_noise_cov(hf, p, 0.0, 0, cfg.n_f - 1, noise);
        arma::cx_mat with_evm =
            channel::combined_noise_cov(hf, p, 0.01, 0, cfg.n_f - 1, noise);
        for (int i = 0; i < cfg.m_r; ++i)
            CHECK(std::real(with_evm(i, i)) > std::real(no_evm(i, i)));
    }
}

TEST_CASE("per-bin mutual information")
{
    SUBCASE("scalar unity link is one bit")
    {
        arma::cx_mat h(1, 1, arma::fill::ones);
        arma::cx_mat r(1, 1, arma::fill::eye);
        CHECK(rate::per_bin_mutual_info(h, arma::vec{1.0}, r) ==
              doctest::Approx(1.0).epsilon(1e-12));
    }
    SUBCASE("zero channel carries nothing")
    {
        arma::cx_mat h(2, 2, arma::fill::zeros);
        arma::cx_mat r(2, 2, arma::fill::eye);
        CHECK(rate::per_bin_mutual_info(h, arma::vec{1.0, 1.0}, r) == 0.0);
    }
    SUBCASE("2x2 instance matches the eigenvalue evaluation")
    {
        std::mt19937_64 rng(17);
        std::normal_distribution<double> gauss(0.0, 1.0);
        for (int trial = 0; trial < 20; ++trial)
        {
            arma::cx_mat h(2, 2), g(2, 2);
            for (auto &v : h)
                v = cxd(gauss(rng), gauss(rng));
            for (auto &v : g)
                v = cxd(gauss(rng), gauss(rng));
            arma::cx_mat r = g * g.t() + 0.5 * arma::cx_mat(2, 2, arma::fill::eye);
            arma::vec p{0.8, 1.7};
            double got = rate::per_bin_mutual_info(h, p, r);
            arma::cx_mat m = arma::cx_mat(2, 2, arma::fill::eye) +
                             arma::inv(r) * h * arma::diagmat(arma::conv_to<arma::cx_vec>::from(p)) * h.t();
            arma::cx_vec ev;
            arma::eig_gen(ev, m);
            double expect = 0.0;
            for (auto &v : ev)
                expect += std::log2(std::abs(v));
            CHECK(got == doctest::Approx(expect).epsilon(1e-10));
        }
    }
    SUBCASE("invariant under a common unitary rotation")
    {
        std::mt19937_64 rng(29);
        std::normal_distribution<double> gauss(0.0, 1.0);
        arma::cx_mat h(3, 2), g(3, 3), q(3, 3), rmat;
        for (auto &v : h)
            v = cxd(gauss(rng), gauss(rng));
        for (auto &v : g)
            v = cxd(gauss(rng), gauss(rng));
        arma::cx_mat r = g * g.t() + arma::cx_mat(3, 3, arma::fill::eye);
        arma::cx_mat qr_r;
        arma::qr(q, qr_r, g);
        arma::vec p{1.0, 0.5};
        double base = rate::per_bin_mutual_info(h, p, r);
        double rotated = rate::per_bin_mutual_info(q * h, p, symmetrize(q * r * q.t()));
        CHECK(rotated == doctest::Approx(base).epsilon(1e-10));
    }
}

TEST_CASE("ideal flat SISO link achieves the Shannon rate")
{
    quant::MapCache maps;
    for (double snr : {-10.0, 0.0, 17.0})
    {
        SystemConfig cfg = siso_ideal(snr);
        std::mt19937_64 rng(derive_seed(4, 0, int(snr) + 20));
        channel::Realization re = channel::sample_channel(cfg, rng);
        rate::RateResult res = rate::sum_rate(cfg, re, nullptr, maps);
        CHECK(res.sum_rate ==
              doctest::Approx(std::log2(1.0 + cfg.snr_linear())).epsilon(1e-9));
        CHECK(res.sum_rate == doctest::Approx(arma::mean(res.per_bin)).epsilon(1e-12));
    }
}

TEST_CASE("mixed bank with equal resolutions reproduces the uniform run exactly")
{
    quant::MapCache maps;
    SystemConfig uni = small_cfg(BfMode::dbf, 5, 10.0);
    SystemConfig mix = small_cfg(BfMode::dbf, 5, 10.0);
    mix.mode = BfMode::dbf_mixed;
    mix.adc_bits = mixed_bits(mix.m_rfe, 3, 5, 5);
    mix.validate();
    std::mt19937_64 rng1(99), rng2(99);
    channel::Realization re1 = channel::sample_channel(uni, rng1);
    channel::Realization re2 = channel::sample_channel(mix, rng2);
    double r1 = rate::sum_rate(uni, re1, nullptr, maps).sum_rate;
    double r2 = rate::sum_rate(mix, re2, nullptr, maps).sum_rate;
    CHECK(r1 == r2); // bit exact
}

TEST_CASE("sum rate is nondecreasing in the ADC resolution per realization")
{
    quant::MapCache maps;
    for (int trial = 0; trial < 30; ++trial)
    {
        std::mt19937_64 rng(derive_seed(5, 1, trial));
        SystemConfig cfg = small_cfg(BfMode::dbf, 1, 8.0);
        channel::Realization re = channel::sample_channel(cfg, rng);
        double prev = -1.0;
        for (int b = 1; b <= 8; ++b)
        {
            cfg.adc_bits = uniform_bits(cfg.m_rfe, b);
            double r = rate::sum_rate(cfg, re, nullptr, maps).sum_rate;
            CHECK(r >= prev - 1e-9);
            prev = r;
        }
    }
}

TEST_CASE("digital beamforming beats the subarray combiner at high SNR on average")
{
    quant::MapCache maps;
    double dbf_acc = 0.0, hbf_acc = 0.0;
    const int n = 30;
    for (int trial = 0; trial < n; ++trial)
    {
        SystemConfig dbf = small_cfg(BfMode::dbf, 4, 20.0);
        SystemConfig hbf = small_cfg(BfMode::hbf, 4, 20.0);
        std::mt19937_64 rng(derive_seed(6, 2, trial));
        channel::Realization re = channel::sample_channel(dbf, rng);
        dbf_acc += rate::sum_rate(dbf, re, nullptr, maps).sum_rate;
        hbf_acc += rate::sum_rate(hbf, re, nullptr, maps).sum_rate;
    }
    CHECK(dbf_acc / n > hbf_acc / n);
}

TEST_CASE("rate decreases when the estimation error grows")
{
    quant::MapCache maps;
    SystemConfig cfg = small_cfg(BfMode::dbf, 6, 12.0);
    cfg.chanest.enabled = true;
    cfg.validate();
    std::mt19937_64 rng(41);
    channel::Realization re = channel::sample_channel(cfg, rng);

    chanest::MseTable low, high;
    low.snr_db = arma::vec{-30.0, 30.0};
    low.mse = arma::vec{0.01, 0.01};
    high.snr_db = arma::vec{-30.0, 30.0};
    high.mse = arma::vec{0.1, 0.1};
    double r_low = rate::sum_rate(cfg, re, &low, maps).sum_rate;
    double r_high = rate::sum_rate(cfg, re, &high, maps).sum_rate;
    double r_none = rate::sum_rate(cfg, re, nullptr, maps).sum_rate;
    CHECK(r_high < r_low);
    CHECK(r_low < r_none);
}
