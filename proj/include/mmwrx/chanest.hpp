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

#ifndef MMWRX_CHANEST_HPP
#define MMWRX_CHANEST_HPP

#include <armadillo>
#include <filesystem>
#include <vector>

#include "mmwrx/config.hpp"
#include "mmwrx/linalg.hpp"

namespace mmwrx::chanest {

// Reference-signal layout on a (subcarrier x symbol x antenna) grid. Pilots of
// the full 3-D grid form the product set antennas x sym x sc[user]; the
// vectorized index runs subcarrier fastest, then symbol, then antenna.
struct PilotPattern
{
    int k = 0, l_sym = 0, m = 0;
    std::vector<arma::uvec> sc; // per-user effective subcarrier sets (disjoint)
    arma::uvec sym;             // pilot-bearing symbol indices, shared by the users

    arma::uvec grid_indices(int user) const; // over the k*l_sym plane
    arma::uvec full_indices(int user) const; // over the k*l_sym*m grid
};

// NR type-1 layout: front-loaded pilot symbol (index 2 of each 14-symbol slot),
// users split comb-2 in frequency; two users sharing a comb via the cover code
// are abstracted as disjoint every-4th-subcarrier sets after despreading.
PilotPattern dmrs_pattern(int users, int k, int l_sym);

// Separable channel and noise covariance factors, unit diagonal channel
// factors; the noise scale sits in the frequency factor.
struct SeparableCovariance
{
    arma::cx_mat s, t, f;    // channel: space, time, frequency
    arma::cx_mat ns, nt, nf; // noise factors (identities, nf = sigma^2 I)
};

// Jakes time correlation J0(2 pi doppler_norm (l1 - l2)).
arma::mat time_corr(double doppler_norm, int l_sym);

// Frequency correlation of an impulse response with the given tap variances:
// R_f = W diag(pdp) W^H with W the k-point DFT matrix; unit diagonal when the
// variances sum to one.
arma::cx_mat freq_corr(const arma::vec &pdp, int k);

// Spatial correlation of a half-wavelength ULA with uniform arrival directions:
// Toeplitz J0(pi (m1 - m2)); identity after sub-array analog combining.
arma::mat spatial_corr(int m, bool after_analog_combining = false);

// Per-dimension MMSE interpolator from the pilot positions to all positions,
// embedded as an all x all matrix with zero columns off the pilot set.
arma::cx_mat wiener_matrix(const arma::cx_mat &r, double noise_var, const arma::uvec &pilots);

struct DimPilots
{
    arma::uvec s, t, f;
};

// Analytic estimation MSE per grid element for separable covariances and a
// product pilot set; the pilot pair sums factor per dimension.
double analytic_mse_kron(const arma::cx_mat &a_s, const arma::cx_mat &a_t,
                         const arma::cx_mat &a_f, const SeparableCovariance &cov,
                         const DimPilots &pilots);

// Un-factored full-matrix evaluation of the same trace expression; test-scale
// oracle (refuses grids above 4096 elements).
double analytic_mse_direct(const arma::cx_mat &a_stf, const arma::cx_mat &r_hh,
                           const arma::cx_mat &r_nn, const arma::uvec &pilots_full);

// SNR (dB) to estimation MSE, linear interpolation in dB, clamped at the ends.
struct MseTable
{
    arma::vec snr_db;
    arma::vec mse;

    double lookup(double snr) const;
    void save_csv(const std::filesystem::path &path) const;
    static MseTable load_csv(const std::filesystem::path &path);
};

// Wiener matrices come from the model covariances (with the configured
// delay-spread / Doppler mismatch), the MSE is evaluated against the true ones.
MseTable build_mse_table(const SystemConfig &cfg);

// Effective input-SNR loss when the estimation error acts as extra noise.
double snr_degradation(const MseTable &table, double snr_db);

// Estimation-error covariance at one frequency bin: spatially white, per-row
// power of the stacked user channels times the per-user relative MSE.
arma::cx_mat est_error_cov(const std::vector<arma::cx_mat> &h_users, const arma::vec &sigma2);

} // namespace mmwrx::chanest

#endif
