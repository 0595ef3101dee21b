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

#include "mmwrx/power.hpp"

#include <cmath>
#include <stdexcept>

namespace mmwrx::power {

namespace {
std::int64_t uw(double mw) { return std::llround(mw * 1000.0); }
} // namespace

std::int64_t adc_power_uw(double f_s_ghz, double enob, double uw_per_ghz)
{
    if (!(f_s_ghz >= 0.0))
        throw std::invalid_argument("adc_power: sampling rate must be >= 0");
    return std::llround(uw_per_ghz * f_s_ghz * std::exp2(enob));
}

double adc_power_mw(double f_s_ghz, double enob, double uw_per_ghz)
{
    return adc_power_uw(f_s_ghz, enob, uw_per_ghz) / 1000.0;
}

Breakdown frontend_power(const SystemConfig &cfg)
{
    const PowerConfig &pc = cfg.power;
    Breakdown b;
    b.analog_combining = cfg.m_c > 1;
    b.lo_uw = uw(pc.p_lo_mw);
    b.lna_uw = static_cast<std::int64_t>(cfg.m_r) * uw(pc.p_lna_mw);
    b.hybrid_uw = static_cast<std::int64_t>(cfg.m_r) * uw(pc.p_hybrid_mw);
    b.mixer_uw = static_cast<std::int64_t>(cfg.m_r) * 2 * uw(pc.p_mixer_mw);
    if (b.analog_combining)
        b.ps_uw = static_cast<std::int64_t>(cfg.m_r) * uw(pc.p_ps_mw);

    for (int bits : cfg.adc_bits)
    {
        if (bits < 1)
            throw std::invalid_argument("frontend_power: quantization-bypass chains have no "
                                        "power model");
        if (bits == 1)
        {
            b.la_uw += 2 * uw(pc.p_la_mw);
            b.adc_uw += 2 * uw(pc.p_1bit_adc_mw);
        }
        else
        {
            b.vga_uw += 2 * uw(pc.p_vga_mw);
            b.adc_uw += 2 * adc_power_uw(cfg.f_s_ghz, bits + pc.enob_offset, pc.p_adc_uw_per_ghz);
        }
    }
    b.total_uw =
        b.lo_uw + b.lna_uw + b.hybrid_uw + b.mixer_uw + b.ps_uw + b.vga_uw + b.la_uw + b.adc_uw;
    return b;
}

double energy_efficiency(double rate_bps_hz, double p_r_mw)
{
    if (!(p_r_mw > 0.0))
        throw std::invalid_argument("energy_efficiency: power must be > 0");
    return rate_bps_hz / (p_r_mw / 1000.0);
}

} // namespace mmwrx::power
