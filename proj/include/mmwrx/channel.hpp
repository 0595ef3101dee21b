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

#ifndef MMWRX_CHANNEL_HPP
#define MMWRX_CHANNEL_HPP

#include <armadillo>
#include <vector>

#include "mmwrx/config.hpp"
#include "mmwrx/linalg.hpp"
#include "mmwrx/rng.hpp"

namespace mmwrx::channel {

// One multipath ray: at delay `delay` a single ray arrives with complex gain
// `gain` and per-element phase shifts phi_r / phi_t at receiver / transmitter.
struct Tap
{
    int delay = 0;
    cxd gain{};
    double phi_r = 0.0;
    double phi_t = 0.0;
    arma::cx_mat h; // dense m_r x m_t tap matrix
};

struct UserChannel
{
    std::vector<Tap> taps; // ascending delay; taps with zero variance are omitted (H[l] = 0)
    arma::vec pdp;         // length l, sums to 1

    double energy() const; // sum_l ||H[l]||_F^2
};

struct Realization
{
    std::vector<UserChannel> users;
};

// Per-user frequency response, slice f holds the m_r x m_t matrix H_u[f].
using FreqChannel = std::vector<arma::cx_cube>;

// Exponential power delay profile: p distinct delays (delay 0 always present),
// nonzero entries proportional to e^(-beta*l), normalized to sum 1.
arma::vec gen_pdp(int l, int p, double beta, std::mt19937_64 &rng);

// Uniform linear array response, element m = e^(j*m*phi).
arma::cx_vec steering_vector(double phi, int m);

// Draws taps for every user: gain ~ CN(0, v_n(l)); directions theta uniform on
// (-pi, pi) with phi = pi*sin(theta); H[l] = gain/sqrt(m_t) * a_r * a_t^T.
Realization sample_channel(const SystemConfig &cfg, std::mt19937_64 &rng);

// Length-n_f DFT of the tap sequence (zero padded). Parseval:
// (1/n_f) sum_f ||H[f]||_F^2 = sum_l ||H[l]||_F^2.
arma::cx_cube to_frequency(const UserChannel &ch, int n_f);
FreqChannel to_frequency(const Realization &re, int n_f);

// Per-user transmit power meeting the configured per-antenna SNR, assuming
// unit-variance symbols and unit-variance noise per receive antenna.
arma::vec snr_to_power(const SystemConfig &cfg, const Realization &re);

// Band-averaged signal covariance sum_u p_u * H_u[f] H_u[f]^H over [f1, f2].
arma::cx_mat signal_cov(const FreqChannel &hf, const arma::vec &p_u, int f1, int f2);

// Receive covariance (1 + evm) * S + R_nn where S is the band-averaged signal
// covariance; evm_lin is the transmitter impairment power ratio.
arma::cx_mat receive_cov(const FreqChannel &hf, const arma::vec &p_u, double evm_lin, int f1,
                         int f2, const arma::cx_mat &noise_cov);

// Combined receiver-side noise: transmitter impairments filtered through the
// channel plus thermal noise, evm * S + R_nn.
arma::cx_mat combined_noise_cov(const FreqChannel &hf, const arma::vec &p_u, double evm_lin,
                                int f1, int f2, const arma::cx_mat &noise_cov);

} // namespace mmwrx::channel

#endif
