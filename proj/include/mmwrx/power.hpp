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

#ifndef MMWRX_POWER_HPP
#define MMWRX_POWER_HPP

#include <cstdint>

#include "mmwrx/config.hpp"

namespace mmwrx::power {

// Component totals in integer microwatts so the parts always sum exactly.
struct Breakdown
{
    std::int64_t lo_uw = 0;
    std::int64_t lna_uw = 0;
    std::int64_t hybrid_uw = 0;
    std::int64_t mixer_uw = 0;
    std::int64_t ps_uw = 0;
    std::int64_t vga_uw = 0;
    std::int64_t la_uw = 0;
    std::int64_t adc_uw = 0;
    std::int64_t total_uw = 0;
    bool analog_combining = false; // flag_C

    double total_mw() const { return total_uw / 1000.0; }
};

std::int64_t adc_power_uw(double f_s_ghz, double enob, double uw_per_ghz = 15.0);
double adc_power_mw(double f_s_ghz, double enob, double uw_per_ghz = 15.0);

// Receiver front-end power: LO, per-antenna LNA/hybrid/mixers, phase shifters
// when analog combining is used, and per chain either 2 limiting amplifiers
// (1-bit) or 2 VGAs + 2 ADCs. Quantization-bypass chains are not modeled.
Breakdown frontend_power(const SystemConfig &cfg);

// Rate (bits/s/Hz) per front-end watt.
double energy_efficiency(double rate_bps_hz, double p_r_mw);

} // namespace mmwrx::power

#endif
