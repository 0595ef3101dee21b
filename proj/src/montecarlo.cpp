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

#include "mmwrx/montecarlo.hpp"

#include <cmath>
#include <stdexcept>

namespace mmwrx::mc {

Estimate mc_output_corr(const quant::QuantizerSpec &a, const quant::QuantizerSpec &b, double rho,
                        std::size_t n, std::mt19937_64 &rng)
{
    if (std::abs(rho) > 1.0)
        throw std::invalid_argument("mc_output_corr: |rho| must be <= 1");
    if (std::abs(rho) == 1.0)
    {
        double v = quant::output_corr_at_one(a, b);
        return {rho < 0.0 ? -v : v, 0.0, 0};
    }

    std::normal_distribution<double> gauss(0.0, 1.0);
    const double w = std::sqrt(1.0 - rho * rho);
    double sum = 0.0, sum2 = 0.0;
    for (std::size_t i = 0; i < n; ++i)
    {
        double z1 = gauss(rng), z2 = gauss(rng);
        double x = z1;
        double y = rho * z1 + w * z2;
        double p = quant::quantize_sample(a, x, 1.0) * quant::quantize_sample(b, y, 1.0);
        sum += p;
        sum2 += p * p;
    }
    double mean = sum / n;
    double var = std::max(0.0, sum2 / n - mean * mean);
    return {mean, std::sqrt(var / n), n};
}

BussgangEstimate mc_bussgang(const quant::QuantizerSpec &spec, std::size_t n,
                             std::mt19937_64 &rng)
{
    std::normal_distribution<double> gauss(0.0, 1.0);
    const double agc = std::sqrt(0.5); // per-component std of a unit-power complex sample

    // Accumulate Q(y) y* (gain numerator) and e y* with the closed-form gain
    double qy_re = 0.0, qy_re2 = 0.0;
    double ey_re = 0.0, ey_re2 = 0.0, ey_im = 0.0, ey_im2 = 0.0;
    double yy = 0.0;
    for (std::size_t i = 0; i < n; ++i)
    {
        cxd y(agc * gauss(rng), agc * gauss(rng));
        cxd q = quant::quantize_complex(spec, y, agc);
        cxd qy = q * std::conj(y);
        cxd ey = (q - spec.gain * y) * std::conj(y);
        qy_re += qy.real();
        qy_re2 += qy.real() * qy.real();
        ey_re += ey.real();
        ey_re2 += ey.real() * ey.real();
        ey_im += ey.imag();
        ey_im2 += ey.imag() * ey.imag();
        yy += std::norm(y);
    }
    const double dn = static_cast<double>(n);
    BussgangEstimate est;
    est.gain = (qy_re / dn) / (yy / dn);
    double var_qy = std::max(0.0, qy_re2 / dn - (qy_re / dn) * (qy_re / dn));
    est.gain_std_err = std::sqrt(var_qy / dn) / (yy / dn);
    double mr = ey_re / dn, mi = ey_im / dn;
    est.orth_residual = std::hypot(mr, mi);
    double vr = std::max(0.0, ey_re2 / dn - mr * mr);
    double vi = std::max(0.0, ey_im2 / dn - mi * mi);
    est.orth_std_err = std::sqrt((vr + vi) / dn);
    return est;
}

CovEstimate mc_quant_error_cov(const arma::cx_mat &r_yy,
                               const std::vector<quant::QuantizerSpec> &specs, std::size_t n,
                               std::mt19937_64 &rng)
{
    const arma::uword dim = r_yy.n_rows;
    if (specs.size() != dim)
        throw std::invalid_argument("mc_quant_error_cov: dimension mismatch");
    arma::cx_mat l = arma::chol(r_yy, "lower");
    arma::vec agc(dim);
    for (arma::uword i = 0; i < dim; ++i)
        agc(i) = std::sqrt(0.5 * std::real(r_yy(i, i)));

    std::normal_distribution<double> gauss(0.0, 1.0);
    arma::cx_mat sum(dim, dim, arma::fill::zeros), xsum(dim, dim, arma::fill::zeros);
    arma::mat sum2_re(dim, dim, arma::fill::zeros), sum2_im(dim, dim, arma::fill::zeros);
    arma::mat xsum2_re(dim, dim, arma::fill::zeros), xsum2_im(dim, dim, arma::fill::zeros);
    arma::cx_vec z(dim), y(dim), e(dim);
    for (std::size_t s = 0; s < n; ++s)
    {
        for (arma::uword i = 0; i < dim; ++i)
            z(i) = cxd(gauss(rng), gauss(rng)) * std::sqrt(0.5);
        y = l * z;
        for (arma::uword i = 0; i < dim; ++i)
            e(i) = quant::quantize_complex(specs[i], y(i), agc(i)) - specs[i].gain * y(i);
        for (arma::uword i = 0; i < dim; ++i)
            for (arma::uword j = 0; j < dim; ++j)
            {
                cxd w = e(i) * std::conj(e(j));
                sum(i, j) += w;
                sum2_re(i, j) += w.real() * w.real();
                sum2_im(i, j) += w.imag() * w.imag();
                cxd x = e(i) * std::conj(y(j));
                xsum(i, j) += x;
                xsum2_re(i, j) += x.real() * x.real();
                xsum2_im(i, j) += x.imag() * x.imag();
            }
    }
    const double dn = static_cast<double>(n);
    CovEstimate est;
    est.mean = sum / dn;
    est.cross = xsum / dn;
    est.std_err_re.set_size(dim, dim);
    est.std_err_im.set_size(dim, dim);
    est.cross_std_err.set_size(dim, dim);
    for (arma::uword i = 0; i < dim; ++i)
        for (arma::uword j = 0; j < dim; ++j)
        {
            double mr = est.mean(i, j).real(), mi = est.mean(i, j).imag();
            est.std_err_re(i, j) = std::sqrt(std::max(0.0, sum2_re(i, j) / dn - mr * mr) / dn);
            est.std_err_im(i, j) = std::sqrt(std::max(0.0, sum2_im(i, j) / dn - mi * mi) / dn);
            double xr = est.cross(i, j).real(), xi = est.cross(i, j).imag();
            double vr = std::max(0.0, xsum2_re(i, j) / dn - xr * xr);
            double vi = std::max(0.0, xsum2_im(i, j) / dn - xi * xi);
            est.cross_std_err(i, j) = std::sqrt((vr + vi) / dn);
        }
    est.n = n;
    return est;
}

double mc_channel_est(const chanest::SeparableCovariance &cov, const chanest::DimPilots &pilots,
                      const arma::cx_mat &a_s, const arma::cx_mat &a_t, const arma::cx_mat &a_f,
                      double noise_var, std::size_t n_draws, std::mt19937_64 &rng)
{
    const arma::uword m = cov.s.n_rows, lt = cov.t.n_rows, k = cov.f.n_rows;
    if (k > 8 || lt > 4 || m > 2)
        throw std::invalid_argument("mc_channel_est: oracle limited to grids up to 8x4x2");

    arma::cx_mat r_hh = kron3(cov.s, cov.t, cov.f);
    arma::cx_mat chol_l = arma::chol(
        r_hh + 1e-12 * arma::cx_mat(r_hh.n_rows, r_hh.n_rows, arma::fill::eye), "lower");
    arma::cx_mat a_stf = kron3(a_s, a_t, a_f);

    // Full-grid pilot set (product of the per-dimension sets)
    std::vector<arma::uword> p_full;
    for (arma::uword im = 0; im < pilots.s.n_elem; ++im)
        for (arma::uword it = 0; it < pilots.t.n_elem; ++it)
            for (arma::uword kf = 0; kf < pilots.f.n_elem; ++kf)
                p_full.push_back(pilots.s(im) * lt * k + pilots.t(it) * k + pilots.f(kf));

    std::normal_distribution<double> gauss(0.0, 1.0);
    const arma::uword dim = r_hh.n_rows;
    const double noise_std = std::sqrt(noise_var);
    arma::cx_vec z(dim), h(dim), obs(dim), err(dim);
    double acc = 0.0;
    for (std::size_t d = 0; d < n_draws; ++d)
    {
        for (arma::uword i = 0; i < dim; ++i)
            z(i) = cxd(gauss(rng), gauss(rng)) * std::sqrt(0.5);
        h = chol_l * z;
        obs.zeros();
        for (arma::uword p : p_full)
            obs(p) = h(p) + noise_std * cxd(gauss(rng), gauss(rng)) * std::sqrt(0.5);
        err = a_stf * obs - h;
        acc += arma::accu(arma::square(arma::abs(err)));
    }
    return acc / (static_cast<double>(n_draws) * dim);
}

} // namespace mmwrx::mc
