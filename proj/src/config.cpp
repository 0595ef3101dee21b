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

#include "mmwrx/config.hpp"

#include <cmath>
#include <set>
#include <stdexcept>

namespace mmwrx {

namespace {

[[noreturn]] void fail(const std::string &msg) { throw std::invalid_argument("config: " + msg); }

void check_keys(const nlohmann::json &j, const std::set<std::string> &allowed, const std::string &scope)
{
    for (auto it = j.begin(); it != j.end(); ++it)
        if (!allowed.count(it.key()))
            fail("unknown key '" + it.key() + "' in " + scope);
}

template <typename T> void get_if(const nlohmann::json &j, const char *key, T &out)
{
    if (j.contains(key))
        out = j.at(key).get<T>();
}

} // namespace

std::string to_string(BfMode m)
{
    switch (m)
    {
    case BfMode::dbf:
        return "dbf";
    case BfMode::hbf:
        return "hbf";
    case BfMode::dbf_mixed:
        return "dbf-mixed";
    }
    return "?";
}

BfMode bf_mode_from_string(const std::string &s)
{
    if (s == "dbf")
        return BfMode::dbf;
    if (s == "hbf")
        return BfMode::hbf;
    if (s == "dbf-mixed")
        return BfMode::dbf_mixed;
    fail("mode must be one of dbf, hbf, dbf-mixed (got '" + s + "')");
}

double SystemConfig::snr_linear() const { return std::pow(10.0, snr_db / 10.0); }

double SystemConfig::evm_linear() const
{
    return evm_db ? std::pow(10.0, *evm_db / 10.0) : 0.0;
}

std::vector<int> uniform_bits(int m_rfe, int bits) { return std::vector<int>(m_rfe, bits); }

std::vector<int> mixed_bits(int m_rfe, int m_h, int b_h, int b_l)
{
    if (m_h < 0 || m_h > m_rfe)
        fail("mixed ADC split needs 0 <= m_h <= m_rfe");
    std::vector<int> v(m_rfe, b_l);
    std::fill(v.begin(), v.begin() + m_h, b_h);
    return v;
}

void SystemConfig::validate()
{
    if (m_r < 1 || m_c < 1 || m_rfe < 1)
        fail("m_r, m_c, m_rfe must be positive");
    if (m_r != m_c * m_rfe)
        fail("m_r != m_c * m_rfe");
    if (mode == BfMode::dbf && m_c != 1)
        fail("mode dbf requires m_c = 1");
    if (mode == BfMode::dbf_mixed && m_c != 1)
        fail("mode dbf-mixed requires m_c = 1");
    if (mode == BfMode::hbf && m_c < 2)
        fail("mode hbf requires m_c > 1");
    if (users < 1)
        fail("users must be >= 1");
    if (m_t < 1)
        fail("m_t must be >= 1");
    if (l < 1 || p < 1 || p > l)
        fail("taps must satisfy 1 <= p <= l");
    if (!(beta > 0.0))
        fail("beta must be > 0");
    if (n_f < l)
        fail("n_f must be >= l");
    if (f2_bin < 0)
        f2_bin = n_f - 1;
    if (!(f1_bin >= 0 && f1_bin <= f2_bin && f2_bin < n_f))
        fail("band must satisfy 0 <= f1_bin <= f2_bin < n_f");
    if (!(f_s_ghz > 0.0))
        fail("f_s_ghz must be > 0");
    if (adc_bits.empty())
        adc_bits = uniform_bits(m_rfe, 4);
    if (static_cast<int>(adc_bits.size()) != m_rfe)
        fail("adc_bits length must equal m_rfe");
    for (int b : adc_bits)
        if (b < 0 || b > 12)
            fail("adc_bits entries must be in 1..12 (0 = bypass)");
    if (!(grid_threshold > 0.0))
        fail("grid_threshold must be > 0");
    if (realizations < 1)
        fail("realizations must be >= 1");
    if (chanest.enabled)
    {
        if (users > 4)
            fail("reference-signal pattern supports at most 4 users");
        int k = chanest.table_k > 0 ? chanest.table_k : n_f;
        if (k % 2 != 0)
            fail("estimation grid subcarrier count must be even");
        if (k < l)
            fail("estimation grid subcarrier count must be >= l");
        if (chanest.l_sym < 1)
            fail("chanest.l_sym must be >= 1");
        if (chanest.doppler_norm < 0.0)
            fail("chanest.doppler_norm must be >= 0");
        if (!(chanest.doppler_model_mult > 0.0) || !(chanest.delay_model_mult > 0.0))
            fail("chanest model-mismatch multipliers must be > 0");
        if (!(chanest.snr_step_db > 0.0) || chanest.snr_min_db >= chanest.snr_max_db)
            fail("chanest SNR grid must be increasing");
    }
}

namespace {

ChanestConfig chanest_from_json(const nlohmann::json &j)
{
    check_keys(j,
               {"enabled", "doppler_norm", "doppler_model_mult", "delay_model_mult", "l_sym",
                "table_k", "snr_min_db", "snr_max_db", "snr_step_db"},
               "chanest");
    ChanestConfig c;
    get_if(j, "enabled", c.enabled);
    get_if(j, "doppler_norm", c.doppler_norm);
    get_if(j, "doppler_model_mult", c.doppler_model_mult);
    get_if(j, "delay_model_mult", c.delay_model_mult);
    get_if(j, "l_sym", c.l_sym);
    get_if(j, "table_k", c.table_k);
    get_if(j, "snr_min_db", c.snr_min_db);
    get_if(j, "snr_max_db", c.snr_max_db);
    get_if(j, "snr_step_db", c.snr_step_db);
    return c;
}

PowerConfig power_from_json(const nlohmann::json &j)
{
    check_keys(j,
               {"p_lo_mw", "p_lna_mw", "p_mixer_mw", "p_hybrid_mw", "p_la_mw", "p_1bit_adc_mw",
                "p_ps_mw", "p_vga_mw", "p_adc_uw_per_ghz", "enob_offset"},
               "power");
    PowerConfig c;
    get_if(j, "p_lo_mw", c.p_lo_mw);
    get_if(j, "p_lna_mw", c.p_lna_mw);
    get_if(j, "p_mixer_mw", c.p_mixer_mw);
    get_if(j, "p_hybrid_mw", c.p_hybrid_mw);
    get_if(j, "p_la_mw", c.p_la_mw);
    get_if(j, "p_1bit_adc_mw", c.p_1bit_adc_mw);
    get_if(j, "p_ps_mw", c.p_ps_mw);
    get_if(j, "p_vga_mw", c.p_vga_mw);
    get_if(j, "p_adc_uw_per_ghz", c.p_adc_uw_per_ghz);
    get_if(j, "enob_offset", c.enob_offset);
    return c;
}

std::vector<int> adc_bits_from_json(const nlohmann::json &j, int m_rfe)
{
    if (j.is_number_integer())
        return uniform_bits(m_rfe, j.get<int>());
    if (j.is_array())
        return j.get<std::vector<int>>();
    if (j.is_object())
    {
        check_keys(j, {"m_h", "b_h", "b_l"}, "adc_bits");
        return mixed_bits(m_rfe, j.at("m_h").get<int>(), j.at("b_h").get<int>(),
                          j.at("b_l").get<int>());
    }
    fail("adc_bits must be an integer, a list, or {m_h, b_h, b_l}");
}

} // namespace

SystemConfig config_from_json(const nlohmann::json &j)
{
    check_keys(j,
               {"m_r", "m_c", "m_rfe", "users", "m_t", "l", "p", "beta", "snr_db", "evm_db",
                "snr_scaling", "n_f", "f1_bin", "f2_bin", "f_s_ghz", "adc_bits", "mode",
                "quantizer", "grid_threshold", "realizations", "seed", "chanest", "power"},
               "config");
    SystemConfig c;
    get_if(j, "m_r", c.m_r);
    get_if(j, "m_c", c.m_c);
    get_if(j, "m_rfe", c.m_rfe);
    get_if(j, "users", c.users);
    get_if(j, "m_t", c.m_t);
    get_if(j, "l", c.l);
    get_if(j, "p", c.p);
    get_if(j, "beta", c.beta);
    get_if(j, "snr_db", c.snr_db);
    if (j.contains("evm_db"))
    {
        if (j.at("evm_db").is_null())
            c.evm_db.reset();
        else
            c.evm_db = j.at("evm_db").get<double>();
    }
    if (j.contains("snr_scaling"))
    {
        std::string s = j.at("snr_scaling").get<std::string>();
        if (s == "per-realization")
            c.snr_scaling = SnrScaling::per_realization;
        else if (s == "ensemble")
            c.snr_scaling = SnrScaling::ensemble;
        else
            fail("snr_scaling must be per-realization or ensemble");
    }
    get_if(j, "n_f", c.n_f);
    get_if(j, "f1_bin", c.f1_bin);
    get_if(j, "f2_bin", c.f2_bin);
    get_if(j, "f_s_ghz", c.f_s_ghz);
    if (j.contains("mode"))
        c.mode = bf_mode_from_string(j.at("mode").get<std::string>());
    if (j.contains("adc_bits"))
        c.adc_bits = adc_bits_from_json(j.at("adc_bits"), c.m_rfe);
    if (j.contains("quantizer"))
    {
        std::string s = j.at("quantizer").get<std::string>();
        if (s == "lloyd-max")
            c.quant_family = QuantFamily::lloyd_max;
        else if (s == "uniform")
            c.quant_family = QuantFamily::uniform;
        else
            fail("quantizer must be lloyd-max or uniform");
    }
    get_if(j, "grid_threshold", c.grid_threshold);
    get_if(j, "realizations", c.realizations);
    get_if(j, "seed", c.seed);
    if (j.contains("chanest"))
        c.chanest = chanest_from_json(j.at("chanest"));
    if (j.contains("power"))
        c.power = power_from_json(j.at("power"));
    c.validate();
    return c;
}

nlohmann::json config_to_json(const SystemConfig &c)
{
    nlohmann::json j;
    j["m_r"] = c.m_r;
    j["m_c"] = c.m_c;
    j["m_rfe"] = c.m_rfe;
    j["users"] = c.users;
    j["m_t"] = c.m_t;
    j["l"] = c.l;
    j["p"] = c.p;
    j["beta"] = c.beta;
    j["snr_db"] = c.snr_db;
    if (c.evm_db)
        j["evm_db"] = *c.evm_db;
    else
        j["evm_db"] = nullptr;
    j["snr_scaling"] =
        c.snr_scaling == SnrScaling::per_realization ? "per-realization" : "ensemble";
    j["n_f"] = c.n_f;
    j["f1_bin"] = c.f1_bin;
    j["f2_bin"] = c.f2_bin;
    j["f_s_ghz"] = c.f_s_ghz;
    j["adc_bits"] = c.adc_bits;
    j["mode"] = to_string(c.mode);
    j["quantizer"] = c.quant_family == QuantFamily::lloyd_max ? "lloyd-max" : "uniform";
    j["grid_threshold"] = c.grid_threshold;
    j["realizations"] = c.realizations;
    j["seed"] = c.seed;
    j["chanest"] = {{"enabled", c.chanest.enabled},
                    {"doppler_norm", c.chanest.doppler_norm},
                    {"doppler_model_mult", c.chanest.doppler_model_mult},
                    {"delay_model_mult", c.chanest.delay_model_mult},
                    {"l_sym", c.chanest.l_sym},
                    {"table_k", c.chanest.table_k},
                    {"snr_min_db", c.chanest.snr_min_db},
                    {"snr_max_db", c.chanest.snr_max_db},
                    {"snr_step_db", c.chanest.snr_step_db}};
    j["power"] = {{"p_lo_mw", c.power.p_lo_mw},
                  {"p_lna_mw", c.power.p_lna_mw},
                  {"p_mixer_mw", c.power.p_mixer_mw},
                  {"p_hybrid_mw", c.power.p_hybrid_mw},
                  {"p_la_mw", c.power.p_la_mw},
                  {"p_1bit_adc_mw", c.power.p_1bit_adc_mw},
                  {"p_ps_mw", c.power.p_ps_mw},
                  {"p_vga_mw", c.power.p_vga_mw},
                  {"p_adc_uw_per_ghz", c.power.p_adc_uw_per_ghz},
                  {"enob_offset", c.power.enob_offset}};
    return j;
}

} // namespace mmwrx
