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

#include "mmwrx/rate.hpp"

#include <cmath>
#include <iostream>
#include <stdexcept>

namespace mmwrx::rate {

channel::FreqChannel effective_channel(const arma::mat &f_gain, const arma::cx_mat &w_r,
                                       const channel::Realization &re, int n_f)
{
    if (f_gain.n_rows != w_r.n_cols)
        throw std::invalid_argument("effective_channel: F and W_R dimension mismatch");
    arma::cx_mat fw = arma::conv_to<arma::cx_mat>::from(f_gain) * w_r.t();

    channel::FreqChannel out;
    out.reserve(re.users.size());
    for (const channel::UserChannel &uc : re.users)
    {
        channel::UserChannel eff;
        eff.pdp = uc.pdp;
        eff.taps.reserve(uc.taps.size());
        for (const channel::Tap &t : uc.taps)
        {
            channel::Tap et = t;
            et.h = fw * t.h;
            eff.taps.push_back(std::move(et));
        }
        out.push_back(channel::to_frequency(eff, n_f));
    }
    return out;
}

arma::cx_mat effective_noise_cov(const arma::mat &f_gain, const arma::cx_mat &w_r,
                                 const arma::cx_mat &r_combined, const arma::cx_mat &r_ee)
{
    if (w_r.n_rows != r_combined.n_rows || f_gain.n_rows != w_r.n_cols ||
        r_ee.n_rows != f_gain.n_rows)
        throw std::invalid_argument("effective_noise_cov: dimension mismatch");
    arma::cx_mat f = arma::conv_to<arma::cx_mat>::from(f_gain);
    arma::cx_mat r = symmetrize(f * w_r.t() * r_combined * w_r * f.t() + r_ee);
    if (min_eigval(r) < -1e-8 * std::abs(arma::trace(r)))
        throw std::runtime_error("effective_noise_cov: result is indefinite beyond tolerance");
    return r;
}

double per_bin_mutual_info(const arma::cx_mat &h_eff, const arma::vec &tx_power,
                           const arma::cx_mat &r_noise)
{
    if (h_eff.n_rows != r_noise.n_rows || h_eff.n_cols != tx_power.n_elem)
        throw std::invalid_argument("per_bin_mutual_info: dimension mismatch");

    arma::cx_mat l;
    if (!arma::chol(l, r_noise, "lower"))
    {
        std::cerr << "per_bin_mutual_info: singular noise covariance, adding ridge\n";
        arma::cx_mat ridged =
            r_noise + 1e-12 * std::abs(arma::trace(r_noise)) *
                          arma::cx_mat(r_noise.n_rows, r_noise.n_rows, arma::fill::eye);
        if (!arma::chol(l, ridged, "lower"))
            throw std::runtime_error("per_bin_mutual_info: noise covariance not positive definite");
    }

    // log2 det(I + L^-1 H P H^H L^-H) with a symmetric PSD argument
    arma::cx_mat b = arma::solve(arma::trimatl(l),
                                 h_eff * arma::diagmat(arma::conv_to<arma::cx_vec>::from(
                                             arma::sqrt(tx_power))));
    arma::cx_mat a = arma::cx_mat(b.n_rows, b.n_rows, arma::fill::eye) + b * b.t();
    arma::cx_mat u;
    if (!arma::chol(u, symmetrize(a)))
        throw std::runtime_error("per_bin_mutual_info: log-det factorization failed");
    double logdet = 0.0;
    for (arma::uword i = 0; i < u.n_rows; ++i)
        logdet += 2.0 * std::log2(std::real(u(i, i)));
    return logdet;
}

RateResult sum_rate(const SystemConfig &cfg, const channel::Realization &re,
                    const chanest::MseTable *mse_table, quant::MapCache &maps)
{
    if (static_cast<int>(re.users.size()) != cfg.users)
        throw std::invalid_argument("sum_rate: realization does not match the config");

    const int n_f = cfg.n_f;
    const int f1 = cfg.f1_bin, f2 = cfg.f2_bin;
    const double evm = cfg.evm_linear();

    arma::vec p_u = channel::snr_to_power(cfg, re);
    channel::FreqChannel hf = channel::to_frequency(re, n_f);

    // Analog combiner: selected per sub-array for HBF, identity otherwise
    arma::cx_mat w_r;
    if (cfg.mode == BfMode::hbf)
    {
        beamforming::Codebook cb = beamforming::build_codebook(cfg.m_c);
        beamforming::PowerTable pt = beamforming::beam_power_table(re, cb, cfg.m_rfe);
        beamforming::Allocation al =
            beamforming::allocate_beams(pt.power, pt.index, cfg.users, cfg.m_rfe);
        w_r = beamforming::assemble_combiner(al, cb, cfg.mode, cfg.m_r);
    }
    else
        w_r = arma::cx_mat(cfg.m_r, cfg.m_r, arma::fill::eye);

    // Band receive covariance at the quantizer inputs (one AGC operating point)
    arma::cx_mat r_nn(cfg.m_r, cfg.m_r, arma::fill::eye);
    arma::cx_mat s_sig = channel::signal_cov(hf, p_u, f1, f2);
    arma::cx_mat r_yy_ant = symmetrize((1.0 + evm) * s_sig + r_nn);
    arma::cx_mat r_comb_ant = symmetrize(evm * s_sig + r_nn);
    arma::cx_mat r_yc = symmetrize(w_r.t() * r_yy_ant * w_r);

    // Quantization model
    std::vector<quant::QuantizerSpec> bank = quant::bank_for(cfg);
    arma::mat f_gain = quant::bussgang_gains(bank);
    arma::cx_mat r_rr = quant::transform_cov(r_yc, bank, maps);
    arma::cx_mat r_ee = quant::quant_error_cov(r_rr, f_gain, r_yc);
    arma::cx_mat r_eff_noise = effective_noise_cov(f_gain, w_r, r_comb_ant, r_ee);

    channel::FreqChannel h_eff = effective_channel(f_gain, w_r, re, n_f);

    // Channel-estimation error from the per-user average per-antenna SNR
    arma::vec sigma2(cfg.users, arma::fill::zeros);
    if (cfg.chanest.enabled && mse_table != nullptr)
        sigma2.fill(mse_table->lookup(cfg.snr_db));

    RateResult res;
    res.per_bin.set_size(f2 - f1 + 1);
    const arma::uword dim = w_r.n_cols;
    std::vector<arma::cx_mat> h_bin(cfg.users);
    arma::cx_mat h_all(dim, static_cast<arma::uword>(cfg.users) * cfg.m_t);
    for (int f = f1; f <= f2; ++f)
    {
        for (int u = 0; u < cfg.users; ++u)
        {
            h_bin[u] = h_eff[u].slice(f);
            h_all.cols(u * cfg.m_t, (u + 1) * cfg.m_t - 1) = h_bin[u];
        }
        arma::cx_mat r_bin = r_eff_noise;
        if (cfg.chanest.enabled && mse_table != nullptr)
            r_bin += chanest::est_error_cov(h_bin, sigma2);
        arma::vec tx_power(h_all.n_cols);
        for (int u = 0; u < cfg.users; ++u)
            tx_power.subvec(u * cfg.m_t, (u + 1) * cfg.m_t - 1).fill(p_u(u));
        res.per_bin(f - f1) = per_bin_mutual_info(h_all, tx_power, r_bin);
    }
    res.sum_rate = arma::mean(res.per_bin);
    return res;
}

} // namespace mmwrx::rate
