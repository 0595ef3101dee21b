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

#ifndef MMWRX_BEAMFORMING_HPP
#define MMWRX_BEAMFORMING_HPP

#include <armadillo>

#include "mmwrx/channel.hpp"
#include "mmwrx/config.hpp"

namespace mmwrx::beamforming {

// Phase-shifter codebook for one sub-array: 4*m_c steering vectors with phases
// uniformly spaced over [-pi, pi). Combining applies w^H.
struct Codebook
{
    int m_c = 0;
    arma::vec phases;     // 4*m_c, strictly increasing
    arma::cx_mat vectors; // m_c x 4*m_c, column j = steering_vector(phases[j], m_c)
};

Codebook build_codebook(int m_c);

// Best beam per (user, RF chain): power[u][i] = max_j sum_l ||w_j^H H_u^i[l]||^2
// and the maximizing codebook index (ties to the lowest index).
struct PowerTable
{
    arma::mat power; // users x m_rfe
    arma::umat index;
};

PowerTable beam_power_table(const channel::Realization &re, const Codebook &cb, int m_rfe);

// Resource-fair greedy assignment of RF chains to users.
struct Allocation
{
    arma::uvec user; // per chain: assigned user
    arma::uvec beam; // per chain: selected codebook index
};

Allocation allocate_beams(const arma::mat &power, const arma::umat &index, int users, int m_rfe);

// Block-diagonal analog combiner (m_r x m_rfe); identity for digital beamforming.
arma::cx_mat assemble_combiner(const Allocation &al, const Codebook &cb, BfMode mode, int m_r);

} // namespace mmwrx::beamforming

#endif
