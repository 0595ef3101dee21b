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

#ifndef MMWRX_CONFIG_HPP
#define MMWRX_CONFIG_HPP

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

namespace mmwrx {

enum class BfMode
{
    dbf,      // fully digital, one ADC pair per antenna
    hbf,      // sub-array analog combining, one ADC pair per RF chain
    dbf_mixed // digital with a high/low resolution ADC split
};

enum class SnrScaling
{
    per_realization, // transmit power set so the realized channel meets the target SNR
    ensemble         // transmit power from the channel ensemble average
};

enum class QuantFamily
{
    lloyd_max, // MMSE-optimal scalar quantizer for a unit-variance Gaussian
    uniform    // mid-rise uniform with per-resolution optimal step
};

std::string to_string(BfMode m);
BfMode bf_mode_from_string(const std::string &s);

// Channel-estimation model parameters (MSE table construction).
struct ChanestConfig
{
    bool enabled = true;
    double doppler_norm = 0.01;      // f_D * T_sym
    double doppler_model_mult = 1.0; // model mismatch: Doppler assumed by the Wiener filter
    double delay_model_mult = 1.0;   // model mismatch: delay spread assumed by the Wiener filter
    int l_sym = 14;                  // OFDM symbols in the estimation grid (one slot)
    int table_k = 0;                 // subcarriers in the estimation grid; 0 = use n_f
    double snr_min_db = -30.0;       // MSE table range and step
    double snr_max_db = 30.0;
    double snr_step_db = 1.0;
};

// RF front-end component powers (mW); defaults follow a 60 GHz component survey.
struct PowerConfig
{
    double p_lo_mw = 22.5;
    double p_lna_mw = 5.4;
    double p_mixer_mw = 0.3;
    double p_hybrid_mw = 3.0;
    double p_la_mw = 0.8;
    double p_1bit_adc_mw = 0.0;
    double p_ps_mw = 2.0;
    double p_vga_mw = 2.0;
    double p_adc_uw_per_ghz = 15.0; // per-GHz, scaled by 2^ENOB
    double enob_offset = 0.0;       // ENOB = nominal bits + offset
};

// Full experiment description. Geometry: m_r = m_c * m_rfe receive antennas,
// m_c antennas exclusively wired to each of the m_rfe RF chains.
struct SystemConfig
{
    int m_r = 64;
    int m_c = 1;
    int m_rfe = 64;
    int users = 4;
    int m_t = 1;

    int l = 128;       // max channel length in samples
    int p = 32;        // nonzero taps
    double beta = 0.5; // per-sample exponential decay of the tap power

    double snr_db = 0.0;                      // per-antenna average SNR per user
    std::optional<double> evm_db = -25.0;     // transmitter EVM power ratio; nullopt = ideal TX
    SnrScaling snr_scaling = SnrScaling::per_realization;

    int n_f = 128;   // frequency bins
    int f1_bin = 0;  // band of interest [f1_bin, f2_bin]
    int f2_bin = -1; // -1 = n_f - 1 (resolved by validate())
    double f_s_ghz = 2.0;

    std::vector<int> adc_bits; // per RF chain; 0 = quantization bypass (ideal ADC)
    BfMode mode = BfMode::dbf;

    QuantFamily quant_family = QuantFamily::lloyd_max;
    double grid_threshold = 1e-3; // correlation-map refinement threshold

    int realizations = 30;
    std::uint64_t seed = 1;

    ChanestConfig chanest;
    PowerConfig power;

    int band_bins() const { return f2_bin - f1_bin + 1; }
    double snr_linear() const;
    double evm_linear() const; // 0 when disabled

    // Resolves defaults (f2_bin, adc_bits fill) and throws std::invalid_argument
    // with a named diagnostic on any violated invariant.
    void validate();
};

// Strict JSON binding: unknown keys are errors.
SystemConfig config_from_json(const nlohmann::json &j);
nlohmann::json config_to_json(const SystemConfig &c);

// Convenience: uniform / mixed ADC banks.
std::vector<int> uniform_bits(int m_rfe, int bits);
std::vector<int> mixed_bits(int m_rfe, int m_h, int b_h, int b_l);

} // namespace mmwrx

#endif
