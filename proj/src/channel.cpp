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

#include "mmwrx/channel.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace mmwrx::channel {

double UserChannel::energy() const
{
    double e = 0.0;
    for (const Tap &t : taps)
        e += arma::accu(arma::square(arma::abs(t.h)));
    return e;
}

arma::vec gen_pdp(int l, int p, double beta, std::mt19937_64 &rng)
{
    if (l < 1 || p < 1 || p > l)
        throw std::invalid_argument("gen_pdp: need 1 <= p <= l");

    // Delay 0 is always present; the remaining p-1 delays are a uniform subset.
    std::vector<int> rest(l - 1);
    std::iota(rest.begin(), rest.end(), 1);
    std::vector<int> pick;
    pick.reserve(p);
    pick.push_back(0);
    std::sample(rest.begin(), rest.end(), std::back_inserter(pick), p - 1, rng);

    arma::vec v(l, arma::fill::zeros);
    for (int d : pick)
        v(d) = std::exp(-beta * d);
    v /= arma::accu(v);
    return v;
}

arma::cx_vec steering_vector(double phi, int m)
{
    if (m < 1)
        throw std::invalid_argument("steering_vector: m must be >= 1");
    arma::cx_vec a(m);
    for (int i = 0; i < m; ++i)
        a(i) = std::polar(1.0, i * phi);
    return a;
}

Realization sample_channel(const SystemConfig &cfg, std::mt19937_64 &rng)
{
    Realization re;
    re.users.resize(cfg.users);
    std::normal_distribution<double> gauss(0.0, 1.0);
    std::uniform_real_distribution<double> dir(-arma::datum::pi, arma::datum::pi);
    const double tx_scale = 1.0 / std::sqrt(static_cast<double>(cfg.m_t));

    for (UserChannel &uc : re.users)
    {
        uc.pdp = gen_pdp(cfg.l, cfg.p, cfg.beta, rng);
        for (int d = 0; d < cfg.l; ++d)
        {
            if (uc.pdp(d) == 0.0)
                continue;
            Tap t;
            t.delay = d;
            double s = std::sqrt(0.5 * uc.pdp(d));
            t.gain = cxd(s * gauss(rng), s * gauss(rng));
            t.phi_r = arma::datum::pi * std::sin(dir(rng));
            t.phi_t = arma::datum::pi * std::sin(dir(rng));
            t.h = (tx_scale * t.gain) * steering_vector(t.phi_r, cfg.m_r) *
                  arma::strans(steering_vector(t.phi_t, cfg.m_t));
            uc.taps.push_back(std::move(t));
        }
    }
    return re;
}

arma::cx_cube to_frequency(const UserChannel &ch, int n_f)
{
    if (ch.taps.empty())
        throw std::invalid_argument("to_frequency: channel has no taps");
    const int m_r = static_cast<int>(ch.taps.front().h.n_rows);
    const int m_t = static_cast<int>(ch.taps.front().h.n_cols);
    for (const Tap &t : ch.taps)
        if (t.delay >= n_f)
            throw std::invalid_argument("to_frequency: n_f must be >= channel length");

    arma::cx_cube hf(m_r, m_t, n_f, arma::fill::zeros);
    for (int f = 0; f < n_f; ++f)
    {
        arma::cx_mat acc(m_r, m_t, arma::fill::zeros);
        for (const Tap &t : ch.taps)
            acc += t.h * std::polar(1.0, -2.0 * arma::datum::pi * f * t.delay / n_f);
        hf.slice(f) = acc;
    }
    return hf;
}

FreqChannel to_frequency(const Realization &re, int n_f)
{
    FreqChannel hf;
    hf.reserve(re.users.size());
    for (const UserChannel &uc : re.users)
        hf.push_back(to_frequency(uc, n_f));
    return hf;
}

arma::vec snr_to_power(const SystemConfig &cfg, const Realization &re)
{
    const double gamma = cfg.snr_linear();
    arma::vec p(re.users.size());
    for (std::size_t u = 0; u < re.users.size(); ++u)
    {
        if (cfg.snr_scaling == SnrScaling::ensemble)
        {
            // E[sum_l ||H[l]||_F^2] = m_r by the PDP normalization
            p(u) = gamma;
            continue;
        }
        double e = re.users[u].energy();
        if (e <= 0.0)
            throw std::runtime_error("snr_to_power: channel has zero energy");
        p(u) = gamma * cfg.m_r / e;
    }
    return p;
}

arma::cx_mat signal_cov(const FreqChannel &hf, const arma::vec &p_u, int f1, int f2)
{
    if (hf.empty() || hf.size() != p_u.n_elem)
        throw std::invalid_argument("signal_cov: users and powers must match");
    const int m_r = static_cast<int>(hf.front().n_rows);
    const int n_f = static_cast<int>(hf.front().n_slices);
    if (!(0 <= f1 && f1 <= f2 && f2 < n_f))
        throw std::invalid_argument("signal_cov: invalid band");

    arma::cx_mat s(m_r, m_r, arma::fill::zeros);
    for (std::size_t u = 0; u < hf.size(); ++u)
        for (int f = f1; f <= f2; ++f)
            s += p_u(u) * hf[u].slice(f) * hf[u].slice(f).t();
    s /= static_cast<double>(f2 - f1 + 1);
    return symmetrize(s);
}

arma::cx_mat receive_cov(const FreqChannel &hf, const arma::vec &p_u, double evm_lin, int f1,
                         int f2, const arma::cx_mat &noise_cov)
{
    arma::cx_mat s = signal_cov(hf, p_u, f1, f2);
    if (noise_cov.n_rows != s.n_rows || noise_cov.n_cols != s.n_cols)
        throw std::invalid_argument("receive_cov: noise covariance dimension mismatch");
    return symmetrize((1.0 + evm_lin) * s + noise_cov);
}

arma::cx_mat combined_noise_cov(const FreqChannel &hf, const arma::vec &p_u, double evm_lin,
                                int f1, int f2, const arma::cx_mat &noise_cov)
{
    arma::cx_mat s = signal_cov(hf, p_u, f1, f2);
    if (noise_cov.n_rows != s.n_rows || noise_cov.n_cols != s.n_cols)
        throw std::invalid_argument("combined_noise_cov: noise covariance dimension mismatch");
    return symmetrize(evm_lin * s + noise_cov);
}

} // namespace mmwrx::channel
