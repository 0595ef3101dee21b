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

#include "mmwrx/beamforming.hpp"

#include <stdexcept>
#include <vector>

namespace mmwrx::beamforming {

Codebook build_codebook(int m_c)
{
    if (m_c < 1)
        throw std::invalid_argument("build_codebook: m_c must be >= 1");
    Codebook cb;
    cb.m_c = m_c;
    const int n = 4 * m_c;
    cb.phases.set_size(n);
    cb.vectors.set_size(m_c, n);
    for (int j = 0; j < n; ++j)
    {
        cb.phases(j) = -arma::datum::pi + j * 2.0 * arma::datum::pi / n;
        cb.vectors.col(j) = channel::steering_vector(cb.phases(j), m_c);
    }
    return cb;
}

PowerTable beam_power_table(const channel::Realization &re, const Codebook &cb, int m_rfe)
{
    const int users = static_cast<int>(re.users.size());
    const int n_beams = static_cast<int>(cb.vectors.n_cols);
    PowerTable tab;
    tab.power.zeros(users, m_rfe);
    tab.index.zeros(users, m_rfe);

    for (int u = 0; u < users; ++u)
    {
        for (int i = 0; i < m_rfe; ++i)
        {
            const int row0 = i * cb.m_c;
            double best = -1.0;
            int best_j = 0;
            for (int j = 0; j < n_beams; ++j)
            {
                double p = 0.0;
                for (const channel::Tap &t : re.users[u].taps)
                {
                    arma::cx_rowvec r =
                        cb.vectors.col(j).t() * t.h.rows(row0, row0 + cb.m_c - 1);
                    p += arma::accu(arma::square(arma::abs(r)));
                }
                if (p > best) // ties keep the lowest index
                {
                    best = p;
                    best_j = j;
                }
            }
            tab.power(u, i) = best;
            tab.index(u, i) = best_j;
        }
    }
    return tab;
}

Allocation allocate_beams(const arma::mat &power, const arma::umat &index, int users, int m_rfe)
{
    if (users < 1 || m_rfe < 1)
        throw std::invalid_argument("allocate_beams: users and m_rfe must be >= 1");
    if (static_cast<int>(power.n_rows) != users || static_cast<int>(power.n_cols) != m_rfe)
        throw std::invalid_argument("allocate_beams: power table dimension mismatch");

    Allocation al;
    al.user.set_size(m_rfe);
    al.beam.set_size(m_rfe);

    std::vector<bool> user_open(users, true), chain_open(m_rfe, true);
    int users_left = users;
    for (int n = 0; n < m_rfe; ++n)
    {
        double best = -1.0;
        int bu = -1, bi = -1;
        for (int u = 0; u < users; ++u)
        {
            if (!user_open[u])
                continue;
            for (int i = 0; i < m_rfe; ++i)
            {
                if (!chain_open[i])
                    continue;
                if (power(u, i) > best) // ties: lowest user, then lowest chain
                {
                    best = power(u, i);
                    bu = u;
                    bi = i;
                }
            }
        }
        al.user(bi) = bu;
        al.beam(bi) = index(bu, bi);
        chain_open[bi] = false;
        user_open[bu] = false;
        if (--users_left == 0)
        {
            std::fill(user_open.begin(), user_open.end(), true);
            users_left = users;
        }
    }
    return al;
}

arma::cx_mat assemble_combiner(const Allocation &al, const Codebook &cb, BfMode mode, int m_r)
{
    if (mode != BfMode::hbf)
        return arma::cx_mat(m_r, m_r, arma::fill::eye);

    const int m_rfe = static_cast<int>(al.user.n_elem);
    if (m_r != m_rfe * cb.m_c)
        throw std::invalid_argument("assemble_combiner: m_r != m_rfe * m_c");
    arma::cx_mat w(m_r, m_rfe, arma::fill::zeros);
    for (int i = 0; i < m_rfe; ++i)
        w.submat(i * cb.m_c, i, (i + 1) * cb.m_c - 1, i) = cb.vectors.col(al.beam(i));
    return w;
}

} // namespace mmwrx::beamforming
