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

#ifndef MMWRX_QUANTIZATION_HPP
#define MMWRX_QUANTIZATION_HPP

#include <armadillo>
#include <filesystem>
#include <map>
#include <memory>
#include <shared_mutex>
#include <vector>

#include "mmwrx/config.hpp"
#include "mmwrx/linalg.hpp"
#include "mmwrx/spline.hpp"

namespace mmwrx::quant {

// Scalar quantizer for a zero-mean unit-variance real Gaussian input. The
// thresholds/levels are symmetric about 0; an AGC loop scales them to the
// actual input power. bits = 0 denotes the quantization bypass (ideal ADC).
struct QuantizerSpec
{
    int bits = 0;
    QuantFamily family = QuantFamily::lloyd_max;
    arma::vec thresholds; // 2^bits - 1 ascending step positions
    arma::vec levels;     // 2^bits representatives
    double distortion = 0.0;   // sigma_q^2 = E[(Q(x) - x)^2]
    double gain = 1.0;         // Bussgang gain E[Q(x) x]; equals 1 - sigma_q^2 for Lloyd-Max
    double output_power = 1.0; // E[Q(x)^2]

    bool identity() const { return bits == 0; }
};

// Designs the 2^bits-level quantizer; Lloyd-Max iterates centroid/midpoint
// updates until they fall below 1e-12, the uniform family optimizes the step.
QuantizerSpec design_quantizer(int bits, QuantFamily family = QuantFamily::lloyd_max);

// Diagonal Bussgang gain matrix F, one entry per RF chain.
arma::mat bussgang_gains(const std::vector<QuantizerSpec> &specs);

// E[Q_a(x) Q_b(x)] for a common unit-variance input, by exact bin summation.
double output_corr_at_one(const QuantizerSpec &a, const QuantizerSpec &b);

// Quantizer-output covariance as a function of the input correlation of two
// unit-variance real Gaussian inputs, tabulated on an adaptive grid over [0, 1]
// and interpolated with a natural cubic spline. Extended to [-1, 0) by odd
// symmetry.
struct CorrelationMap
{
    int bits_a = 0, bits_b = 0;
    QuantFamily family = QuantFamily::lloyd_max;
    double grid_threshold = 0.0;
    arma::vec rho_in, rho_out; // knots; rho_out(0) = 0, strictly increasing
    NaturalCubicSpline spline;

    double eval(double rho) const;
};

// The grid is refined until adjacent rho_out values differ by at most
// grid_threshold; each segment integral uses adaptive quadrature (abs tol
// 1e-8 per unit length). The integrand is singular at rho = 1, so the last
// integrated knot sits at 1 - 1e-6 and the value at 1 is the exact bin sum.
CorrelationMap build_correlation_map(const QuantizerSpec &a, const QuantizerSpec &b,
                                     double grid_threshold = 1e-3);

// Correlation maps keyed by the resolution pair; one map per distinct pair per
// run. Concurrent lookups are safe; a missing map is built under a writer lock.
class MapCache
{
  public:
    explicit MapCache(QuantFamily family = QuantFamily::lloyd_max, double grid_threshold = 1e-3);

    const CorrelationMap &get(const QuantizerSpec &a, const QuantizerSpec &b);

    QuantFamily family() const { return family_; }
    double grid_threshold() const { return grid_threshold_; }
    std::size_t size() const;

    // On-disk cache (one CSV of grid points per map). Files from a different
    // quantizer family or threshold are ignored.
    void save(const std::filesystem::path &dir) const;
    std::size_t load(const std::filesystem::path &dir);

  private:
    QuantFamily family_;
    double grid_threshold_;
    mutable std::shared_mutex mutex_;
    std::map<std::pair<int, int>, std::unique_ptr<const CorrelationMap>> maps_;
};

// Covariance of the quantizer bank output r = Q(y) for proper Gaussian input
// with covariance r_yy: diagonal entries scale by E[Q^2], off-diagonals map the
// four real-pair correlations through the pair's correlation map.
arma::cx_mat transform_cov(const arma::cx_mat &r_yy, const std::vector<QuantizerSpec> &specs,
                           MapCache &maps);

// Quantization-error covariance R_ee = R_rr - F R_yy F^H; throws when the
// result is indefinite beyond tolerance (a bad correlation map).
arma::cx_mat quant_error_cov(const arma::cx_mat &r_rr, const arma::mat &f,
                             const arma::cx_mat &r_yy);

// Maps each sample to the representative of its bin after normalization by
// agc_std, then rescales. A sample on a step goes to the upper bin, so 0 maps
// to the positive representative.
double quantize_sample(const QuantizerSpec &spec, double x, double agc_std);
arma::vec quantize_samples(const QuantizerSpec &spec, const arma::vec &x, double agc_std);

// Complex samples quantize the real and imaginary parts independently;
// agc_std is the per-component standard deviation.
cxd quantize_complex(const QuantizerSpec &spec, cxd x, double agc_std);

// Quantizer bank for a config's per-chain resolutions (memoized designs).
std::vector<QuantizerSpec> bank_for(const SystemConfig &cfg);

} // namespace mmwrx::quant

#endif
