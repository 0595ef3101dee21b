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

#include "mmwrx/sweep.hpp"

#include <atomic>
#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <exception>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <thread>

#include "mmwrx/power.hpp"
#include "mmwrx/rate.hpp"
#include "mmwrx/rng.hpp"

namespace mmwrx::sweep {

namespace {

std::string fmt9(double v)
{
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.9g", v);
    return buf;
}

std::string fmt_short(double v)
{
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%g", v);
    return buf;
}

std::uint64_t fnv1a64(const std::string &s)
{
    std::uint64_t h = 1469598103934665603ULL;
    for (unsigned char c : s)
    {
        h ^= c;
        h *= 1099511628211ULL;
    }
    return h;
}

template <typename F> void parallel_for(int n, int threads, F &&f)
{
    threads = std::max(1, std::min(threads, n));
    std::atomic<int> next{0};
    std::exception_ptr error;
    std::mutex error_mutex;
    auto worker = [&]() {
        for (int i = next.fetch_add(1); i < n; i = next.fetch_add(1))
        {
            try
            {
                f(i);
            }
            catch (...)
            {
                std::lock_guard<std::mutex> lock(error_mutex);
                if (!error)
                    error = std::current_exception();
            }
        }
    };
    std::vector<std::thread> pool;
    for (int t = 0; t + 1 < threads; ++t)
        pool.emplace_back(worker);
    worker();
    for (auto &th : pool)
        th.join();
    if (error)
        std::rethrow_exception(error);
}

// The MSE table is a function of the array geometry and channel statistics,
// not of the sweep axes; points sharing those share one table.
std::string table_key(const SystemConfig &c)
{
    std::ostringstream os;
    os << (c.mode == BfMode::hbf ? "hbf_m" : "ant_m")
       << (c.mode == BfMode::hbf ? c.m_rfe : c.m_r) << "_u" << c.users << "_l" << c.l << "_b"
       << c.beta << "_d" << c.chanest.doppler_norm << "_dm" << c.chanest.doppler_model_mult
       << "_em" << c.chanest.delay_model_mult << "_k"
       << (c.chanest.table_k > 0 ? c.chanest.table_k : c.n_f) << "_s" << c.chanest.l_sym;
    return os.str();
}

} // namespace

int resolve_threads(int requested)
{
    if (requested > 0)
        return requested;
    if (const char *env = std::getenv("MMWRX_THREADS"))
    {
        int n = std::atoi(env);
        if (n > 0)
            return n;
    }
    unsigned hw = std::thread::hardware_concurrency();
    return hw > 0 ? static_cast<int>(hw) : 1;
}

Plan Plan::from_json(const nlohmann::json &j)
{
    for (auto it = j.begin(); it != j.end(); ++it)
        if (it.key() != "base" && it.key() != "axes" && it.key() != "realizations" &&
            it.key() != "seed")
            throw std::invalid_argument("plan: unknown key '" + it.key() + "'");
    if (!j.contains("base"))
        throw std::invalid_argument("plan: missing 'base' config");

    Plan p;
    p.base = config_from_json(j.at("base"));
    p.seed = p.base.seed;
    p.realizations = p.base.realizations;
    if (j.contains("seed"))
        p.seed = j.at("seed").get<std::uint64_t>();
    if (j.contains("realizations"))
        p.realizations = j.at("realizations").get<int>();

    if (j.contains("axes"))
    {
        const nlohmann::json &a = j.at("axes");
        for (auto it = a.begin(); it != a.end(); ++it)
            if (it.key() != "snr_db" && it.key() != "mode" && it.key() != "bits" &&
                it.key() != "m_rfe" && it.key() != "m_h" && it.key() != "b_h" &&
                it.key() != "b_l")
                throw std::invalid_argument("plan: unknown axis '" + it.key() + "'");
        if (a.contains("snr_db"))
            p.snr_db = a.at("snr_db").get<std::vector<double>>();
        if (a.contains("mode"))
            for (const auto &m : a.at("mode"))
                p.modes.push_back(bf_mode_from_string(m.get<std::string>()));
        if (a.contains("bits"))
            p.bits = a.at("bits").get<std::vector<int>>();
        if (a.contains("m_rfe"))
            p.m_rfe = a.at("m_rfe").get<std::vector<int>>();
        if (a.contains("m_h"))
            p.m_h = a.at("m_h").get<std::vector<int>>();
        if (a.contains("b_h"))
            p.b_h = a.at("b_h").get<std::vector<int>>();
        if (a.contains("b_l"))
            p.b_l = a.at("b_l").get<std::vector<int>>();
    }
    if (p.snr_db.empty())
        p.snr_db = {p.base.snr_db};
    if (p.modes.empty())
        p.modes = {p.base.mode};
    if (p.bits.empty())
        p.bits = {p.base.adc_bits.empty() ? 4 : p.base.adc_bits.front()};
    if (p.m_rfe.empty())
        p.m_rfe = {p.base.m_rfe};
    if (p.realizations < 1)
        throw std::invalid_argument("plan: realizations must be >= 1");
    return p;
}

std::vector<Point> Plan::points() const
{
    std::vector<Point> pts;

    auto push = [&](SystemConfig cfg, const std::string &rate_curve, const std::string &ee_curve,
                    double res_key) {
        cfg.validate();
        Point pt;
        pt.cfg = std::move(cfg);
        pt.rate_curve = rate_curve;
        pt.ee_curve = ee_curve;
        pt.resolution_key = res_key;
        pts.push_back(std::move(pt));
    };

    for (BfMode mode : modes)
    {
        if (mode == BfMode::dbf)
        {
            for (int b : bits)
                for (double snr : snr_db)
                {
                    SystemConfig c = base;
                    c.mode = mode;
                    c.m_c = 1;
                    c.m_rfe = c.m_r;
                    c.adc_bits = uniform_bits(c.m_rfe, b);
                    c.snr_db = snr;
                    push(std::move(c), "rate_dbf_b" + std::to_string(b),
                         "ee_dbf_snr" + fmt_short(snr), b);
                }
        }
        else if (mode == BfMode::hbf)
        {
            for (int m : m_rfe)
                for (int b : bits)
                    for (double snr : snr_db)
                    {
                        SystemConfig c = base;
                        c.mode = mode;
                        if (m < 1 || c.m_r % m != 0)
                            throw std::invalid_argument("plan: m_rfe must divide m_r");
                        c.m_rfe = m;
                        c.m_c = c.m_r / m;
                        c.adc_bits = uniform_bits(m, b);
                        c.snr_db = snr;
                        std::string tag = "hbf_mrfe" + std::to_string(m);
                        push(std::move(c), "rate_" + tag + "_b" + std::to_string(b),
                             "ee_" + tag + "_snr" + fmt_short(snr), b);
                    }
        }
        else
        {
            if (m_h.empty() || b_h.empty() || b_l.empty())
                throw std::invalid_argument("plan: dbf-mixed points need m_h, b_h and b_l axes");
            for (int mh : m_h)
                for (int bh : b_h)
                    for (int bl : b_l)
                        for (double snr : snr_db)
                        {
                            SystemConfig c = base;
                            c.mode = mode;
                            c.m_c = 1;
                            c.m_rfe = c.m_r;
                            c.adc_bits = mixed_bits(c.m_rfe, mh, bh, bl);
                            c.snr_db = snr;
                            std::string tag =
                                "dbf-mixed_mh" + std::to_string(mh) + "_bh" + std::to_string(bh);
                            push(std::move(c),
                                 "rate_" + tag + "_bl" + std::to_string(bl),
                                 "ee_" + tag + "_snr" + fmt_short(snr), bl);
                        }
        }
    }
    return pts;
}

SweepOutput run_sweep(const Plan &plan, const std::filesystem::path &out_dir, int threads,
                      const chanest::MseTable *external_table,
                      const std::filesystem::path &map_cache_dir)
{
    auto t0 = std::chrono::steady_clock::now();
    SweepOutput out;
    out.points = plan.points();
    const int n_real = plan.realizations;
    threads = resolve_threads(threads);
    std::cout << "sweep: " << out.points.size() << " points x " << n_real << " realizations, "
              << threads << " threads\n";

    std::filesystem::create_directories(out_dir);

    quant::MapCache maps(plan.base.quant_family, plan.base.grid_threshold);
    if (!map_cache_dir.empty())
        maps.load(map_cache_dir);

    // One MSE table per distinct geometry/statistics key
    std::map<std::string, chanest::MseTable> tables;
    if (external_table == nullptr)
        for (const Point &pt : out.points)
            if (pt.cfg.chanest.enabled)
            {
                std::string key = table_key(pt.cfg);
                if (!tables.count(key))
                    tables.emplace(key, chanest::build_mse_table(pt.cfg));
            }

    std::ofstream progress(out_dir / "points.csv");
    progress << "point,mode,snr_db,m_rfe,adc_bits,mean_rate,stderr,p_r_mw,ee\n";

    out.results.resize(out.points.size());
    for (std::size_t p = 0; p < out.points.size(); ++p)
    {
        const Point &pt = out.points[p];
        const chanest::MseTable *table = nullptr;
        if (pt.cfg.chanest.enabled)
            table = external_table ? external_table : &tables.at(table_key(pt.cfg));

        arma::vec rates(n_real);
        parallel_for(n_real, threads, [&](int r) {
            std::mt19937_64 rng(derive_seed(plan.seed, p, static_cast<std::uint64_t>(r)));
            channel::Realization re = channel::sample_channel(pt.cfg, rng);
            rates(r) = rate::sum_rate(pt.cfg, re, table, maps).sum_rate;
        });

        PointResult res;
        res.per_realization = rates;
        res.mean_rate = arma::mean(rates);
        res.std_err = n_real > 1 ? arma::stddev(rates) / std::sqrt(double(n_real)) : 0.0;
        res.p_r_mw = power::frontend_power(pt.cfg).total_mw();
        res.ee = power::energy_efficiency(res.mean_rate, res.p_r_mw);
        out.results[p] = res;

        // Partial results land here as each point completes
        std::string bits_tag = std::to_string(pt.cfg.adc_bits.front());
        if (pt.cfg.mode == BfMode::dbf_mixed)
            bits_tag = std::to_string(pt.cfg.adc_bits.front()) + "/" +
                       std::to_string(pt.cfg.adc_bits.back());
        progress << p << "," << to_string(pt.cfg.mode) << "," << fmt9(pt.cfg.snr_db) << ","
                 << pt.cfg.m_rfe << "," << bits_tag << "," << fmt9(res.mean_rate) << ","
                 << fmt9(res.std_err) << "," << fmt9(res.p_r_mw) << "," << fmt9(res.ee) << "\n";
        progress.flush();
    }

    // Rate-vs-SNR curves: rows ordered by SNR
    std::map<std::string, std::vector<std::size_t>> rate_groups, ee_groups;
    for (std::size_t p = 0; p < out.points.size(); ++p)
    {
        rate_groups[out.points[p].rate_curve].push_back(p);
        ee_groups[out.points[p].ee_curve].push_back(p);
    }
    std::vector<std::string> files;
    for (auto &[curve, idx] : rate_groups)
    {
        std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
            return out.points[a].cfg.snr_db < out.points[b].cfg.snr_db;
        });
        std::ofstream csv(out_dir / (curve + ".csv"));
        csv << "x,y,yerr\n";
        for (std::size_t p : idx)
            csv << fmt9(out.points[p].cfg.snr_db) << "," << fmt9(out.results[p].mean_rate) << ","
                << fmt9(out.results[p].std_err) << "\n";
        files.push_back(curve + ".csv");
    }
    // EE-vs-rate curves: rows ordered by resolution
    for (auto &[curve, idx] : ee_groups)
    {
        std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
            return out.points[a].resolution_key < out.points[b].resolution_key;
        });
        std::ofstream csv(out_dir / (curve + ".csv"));
        csv << "x,y,yerr\n";
        for (std::size_t p : idx)
        {
            double ee_err = out.results[p].std_err / (out.results[p].p_r_mw / 1000.0);
            csv << fmt9(out.results[p].mean_rate) << "," << fmt9(out.results[p].ee) << ","
                << fmt9(ee_err) << "\n";
        }
        files.push_back(curve + ".csv");
    }

    if (!map_cache_dir.empty())
        maps.save(map_cache_dir);

    double wall =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    nlohmann::json manifest;
    manifest["seed"] = plan.seed;
    manifest["realizations"] = n_real;
    manifest["config_hash"] = fnv1a64(config_to_json(plan.base).dump());
    manifest["n_points"] = out.points.size();
    manifest["threads"] = threads;
    manifest["wall_time_s"] = wall;
    manifest["files"] = files;
    nlohmann::json jpts = nlohmann::json::array();
    for (std::size_t p = 0; p < out.points.size(); ++p)
    {
        nlohmann::json jp;
        jp["index"] = p;
        jp["config"] = config_to_json(out.points[p].cfg);
        jp["rate_curve"] = out.points[p].rate_curve;
        jp["ee_curve"] = out.points[p].ee_curve;
        jp["mean_rate"] = out.results[p].mean_rate;
        jp["stderr"] = out.results[p].std_err;
        jp["p_r_mw"] = out.results[p].p_r_mw;
        jp["ee"] = out.results[p].ee;
        jpts.push_back(std::move(jp));
    }
    manifest["points"] = std::move(jpts);
    std::ofstream(out_dir / "manifest.json") << manifest.dump(2) << "\n";
    return out;
}

SystemConfig validate_config(const std::filesystem::path &path)
{
    std::ifstream in(path);
    if (!in)
        throw std::runtime_error("cannot open config file: " + path.string());
    nlohmann::json j = nlohmann::json::parse(in);
    return config_from_json(j);
}

} // namespace mmwrx::sweep
