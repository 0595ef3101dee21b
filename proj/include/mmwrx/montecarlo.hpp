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

#ifndef MMWRX_MONTECARLO_HPP
#define MMWRX_MONTECARLO_HPP

#include <armadillo>
#include <random>

#include "mmwrx/chanest.hpp"
#include "mmwrx/quantization.hpp"

namespace mmwrx::mc {

// Sampling-based estimates with their standard errors; brute-force counterparts
// of the analytic quantities.

struct Estimate
{
    double value = 0.0;
    double std_err = 0.0;
    std::size_t n = 0;
};

// Sample covariance of the two quantizer outputs for correlated unit-variance
// real Gaussian inputs; |rho| = 1 falls back to the exact bin summation.
Estimate mc_output_corr(const quant::QuantizerSpec &a, const quant::QuantizerSpec &b, double rho,
                        std::size_t n, std::mt19937_64 &rng);

struct BussgangEstimate
{
    double gain = 0.0;
    double gain_std_err = 0.0;
    double orth_residual = 0.0; // |E[e y*]| with e = Q(y) - gain_closed_form * y
    double orth_std_err = 0.0;
};

// Empirical Bussgang gain E[Q(y) y*] / E[|y|^2] for complex Gaussian input and
// the orthogonality residual of the closed-form decomposition.
BussgangEstimate mc_bussgang(const quant::QuantizerSpec &spec, std::size_t n,
                             std::mt19937_64 &rng);

// Empirical quantization-error covariance of a bank applied to proper Gaussian
// samples with covariance r_yy; entrywise standard errors for real and
// imaginary parts separately.
struct CovEstimate
{
    arma::cx_mat mean;
    arma::mat std_err_re;
    arma::mat std_err_im;
    arma::cx_mat cross; // E[e y^H], the Bussgang orthogonality residual
    arma::mat cross_std_err;
    std::size_t n = 0;
};

CovEstimate mc_quant_error_cov(const arma::cx_mat &r_yy,
                               const std::vector<quant::QuantizerSpec> &specs, std::size_t n,
                               std::mt19937_64 &rng);

// Simulated pilot observation + separable Wiener interpolation; small grids
// only (k <= 8, l_sym <= 4, m <= 2).
double mc_channel_est(const chanest::SeparableCovariance &cov, const chanest::DimPilots &pilots,
                      const arma::cx_mat &a_s, const arma::cx_mat &a_t, const arma::cx_mat &a_f,
                      double noise_var, std::size_t n_draws, std::mt19937_64 &rng);

} // namespace mmwrx::mc

#endif
