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

#ifndef MMWRX_RATE_HPP
#define MMWRX_RATE_HPP

#include <armadillo>
#include <vector>

#include "mmwrx/beamforming.hpp"
#include "mmwrx/chanest.hpp"
#include "mmwrx/channel.hpp"
#include "mmwrx/config.hpp"
#include "mmwrx/quantization.hpp"

namespace mmwrx::rate {

struct RateResult
{
    double sum_rate = 0.0; // bits/s/Hz, mean of per_bin over the band
    arma::vec per_bin;     // mutual information per frequency bin in [f1, f2]
};

// Effective channel through combiner and Bussgang gain: H'[l] = F W_R^H H[l],
// then the length-n_f DFT. One cube per user, slice f = H'_u[f].
channel::FreqChannel effective_channel(const arma::mat &f_gain, const arma::cx_mat &w_r,
                                       const channel::Realization &re, int n_f);

// Effective noise after combining and quantization:
// R = F W_R^H R_combined W_R F^H + R_ee.
arma::cx_mat effective_noise_cov(const arma::mat &f_gain, const arma::cx_mat &w_r,
                                 const arma::cx_mat &r_combined, const arma::cx_mat &r_ee);

// log2 det(I + R^-1 H P H^H) via Cholesky of the symmetrized form; a singular
// noise covariance gets a 1e-12*trace ridge with a warning.
double per_bin_mutual_info(const arma::cx_mat &h_eff, const arma::vec &tx_power,
                           const arma::cx_mat &r_noise);

// End-to-end achievable sum rate of one channel realization: frequency
// transform, band receive covariance, quantization model, combining, estimation
// error as per-bin noise, and the band-averaged log-det.
RateResult sum_rate(const SystemConfig &cfg, const channel::Realization &re,
                    const chanest::MseTable *mse_table, quant::MapCache &maps);

} // namespace mmwrx::rate

#endif
