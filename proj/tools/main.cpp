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

#include <cmath>
#include <iostream>

#include "CLI11.hpp"

#include "mmwrx/montecarlo.hpp"
#include "mmwrx/rng.hpp"
#include "mmwrx/sweep.hpp"

namespace {

int run_simulate(const std::string &config_path, const std::string &out_dir,
                 std::uint64_t seed_override, bool has_seed, int threads,
                 const std::string &mse_table_path, const std::string &map_cache_dir)
{
    std::ifstream in(config_path);
    if (!in)
    {
        std::cerr << "error: cannot open " << config_path << "\n";
        return 1;
    }
    nlohmann::json j = nlohmann::json::parse(in);
    mmwrx::sweep::Plan plan = mmwrx::sweep::Plan::from_json(j);
    if (has_seed)
        plan.seed = seed_override;

    const mmwrx::chanest::MseTable *table = nullptr;
    mmwrx::chanest::MseTable loaded;
    if (!mse_table_path.empty())
    {
        loaded = mmwrx::chanest::MseTable::load_csv(mse_table_path);
        table = &loaded;
    }
    mmwrx::sweep::run_sweep(plan, out_dir, threads, table,
                            map_cache_dir.empty() ? std::filesystem::path{}
                                                  : std::filesystem::path(map_cache_dir));
    std::cout << "results written to " << out_dir << "\n";
    return 0;
}

int run_mse_table(const std::string &config_path, const std::string &out_csv)
{
    mmwrx::SystemConfig cfg = mmwrx::sweep::validate_config(config_path);
    if (!cfg.chanest.enabled)
    {
        std::cerr << "error: chanest is disabled in this config\n";
        return 1;
    }
    mmwrx::chanest::MseTable table = mmwrx::chanest::build_mse_table(cfg);
    table.save_csv(out_csv);
    std::cout << "MSE table (" << table.snr_db.n_elem << " points) written to " << out_csv
              << "\n";
    return 0;
}

int run_validate(const std::string &config_path)
{
    mmwrx::SystemConfig cfg = mmwrx::sweep::validate_config(config_path);
    std::cout << mmwrx::config_to_json(cfg).dump(2) << "\n";
    return 0;
}

struct Check
{
    const char *name;
    bool pass;
    std::string detail;
};

// Brute-force oracle suite: analytic quantities against sampled estimates.
int run_verify(bool quick)
{
    using namespace mmwrx;
    std::vector<Check> checks;
    const std::size_t n_corr = quick ? 1000000 : 10000000;
    const std::size_t n_buss = quick ? 1000000 : 4000000;

    // Distortion factors against sampled quantization error
    for (int b = 1; b <= 6; ++b)
    {
        quant::QuantizerSpec q = quant::design_quantizer(b);
        std::mt19937_64 rng(derive_seed(7, 1, b));
        std::normal_distribution<double> gauss(0.0, 1.0);
        double acc = 0.0;
        for (std::size_t i = 0; i < n_corr; ++i)
        {
            double x = gauss(rng);
            double d = quant::quantize_sample(q, x, 1.0) - x;
            acc += d * d;
        }
        double mc = acc / double(n_corr);
        std::string name = "distortion b=" + std::to_string(b);
        checks.push_back({"distortion", std::abs(mc - q.distortion) < 1e-3,
                          name + ": analytic " + std::to_string(q.distortion) + " sampled " +
                              std::to_string(mc)});
    }

    // Output correlation maps against sampled covariance
    quant::MapCache maps;
    for (int b : {1, 3})
    {
        quant::QuantizerSpec q = quant::design_quantizer(b);
        for (double rho : {0.1, 0.5, 0.9})
        {
            std::mt19937_64 rng(derive_seed(7, 2, b * 100 + int(rho * 10)));
            mc::Estimate est = mc::mc_output_corr(q, q, rho, n_corr, rng);
            double analytic = maps.get(q, q).eval(rho);
            bool pass = std::abs(est.value - analytic) < 3.0 * est.std_err + 1e-12;
            checks.push_back({"output-corr", pass,
                              "b=" + std::to_string(b) + " rho=" + std::to_string(rho) +
                                  ": map " + std::to_string(analytic) + " sampled " +
                                  std::to_string(est.value) + " +- " +
                                  std::to_string(est.std_err)});
        }
    }

    // Bussgang gain and orthogonality
    for (int b = 1; b <= 6; ++b)
    {
        quant::QuantizerSpec q = quant::design_quantizer(b);
        std::mt19937_64 rng(derive_seed(7, 3, b));
        mc::BussgangEstimate est = mc::mc_bussgang(q, n_buss, rng);
        bool gain_ok = std::abs(est.gain - q.gain) < 3.0 * est.gain_std_err + 1e-12;
        bool orth_ok = est.orth_residual < 4.0 * est.orth_std_err + 1e-12;
        checks.push_back({"bussgang-gain", gain_ok,
                          "b=" + std::to_string(b) + ": closed form " + std::to_string(q.gain) +
                              " sampled " + std::to_string(est.gain)});
        checks.push_back({"bussgang-orth", orth_ok,
                          "b=" + std::to_string(b) + ": residual " +
                              std::to_string(est.orth_residual) + " stderr " +
                              std::to_string(est.orth_std_err)});
    }

    // Wiener MSE on a small grid
    {
        chanest::SeparableCovariance cov;
        cov.s = arma::conv_to<arma::cx_mat>::from(chanest::spatial_corr(2));
        cov.t = arma::conv_to<arma::cx_mat>::from(chanest::time_corr(0.05, 4));
        arma::vec pdp = {0.6, 0.3, 0.1};
        cov.f = chanest::freq_corr(pdp, 8);
        cov.ns = arma::cx_mat(2, 2, arma::fill::eye);
        cov.nt = arma::cx_mat(4, 4, arma::fill::eye);
        chanest::DimPilots pilots;
        pilots.s = arma::regspace<arma::uvec>(0, 1);
        pilots.t = arma::uvec{1};
        pilots.f = arma::uvec{0, 2, 4, 6};
        for (double snr : {-10.0, 0.0, 10.0})
        {
            double s2 = std::pow(10.0, -snr / 10.0);
            cov.nf = s2 * arma::cx_mat(8, 8, arma::fill::eye);
            arma::cx_mat a_s = chanest::wiener_matrix(cov.s, s2, pilots.s);
            arma::cx_mat a_t = chanest::wiener_matrix(cov.t, s2, pilots.t);
            arma::cx_mat a_f = chanest::wiener_matrix(cov.f, s2, pilots.f);
            double analytic = chanest::analytic_mse_kron(a_s, a_t, a_f, cov, pilots);
            std::mt19937_64 rng(derive_seed(7, 4, int(snr) + 50));
            double sampled =
                mc::mc_channel_est(cov, pilots, a_s, a_t, a_f, s2, quick ? 4000 : 10000, rng);
            bool pass = std::abs(sampled - analytic) / analytic < 0.03;
            checks.push_back({"chanest-mse", pass,
                              "snr=" + std::to_string(int(snr)) + ": analytic " +
                                  std::to_string(analytic) + " sampled " +
                                  std::to_string(sampled)});
        }
    }

    int failures = 0;
    for (const Check &c : checks)
    {
        std::cout << (c.pass ? "[PASS] " : "[FAIL] ") << c.detail << "\n";
        if (!c.pass)
            ++failures;
    }
    std::cout << (failures == 0 ? "verify: all checks passed\n"
                                : "verify: " + std::to_string(failures) + " check(s) failed\n");
    return failures == 0 ? 0 : 1;
}

} // namespace

int main(int argc, char **argv)
{
    CLI::App app{"mmwrx - multiuser mmWave receiver rate / energy-efficiency simulator"};
    app.require_subcommand(1);

    std::string config_path, out_path, mse_table_path, map_cache_dir;
    std::uint64_t seed = 0;
    int threads = 0;
    bool quick = false;

    CLI::App *sim = app.add_subcommand("simulate", "run a sweep plan and write CSV curves");
    sim->add_option("--config", config_path, "sweep plan JSON")->required();
    sim->add_option("--out", out_path, "output directory")->required();
    CLI::Option *seed_opt = sim->add_option("--seed", seed, "override the plan seed");
    sim->add_option("--threads", threads, "worker threads (default: MMWRX_THREADS or all cores)");
    sim->add_option("--mse-table", mse_table_path, "use a precomputed MSE table CSV");
    sim->add_option("--map-cache", map_cache_dir, "correlation-map cache directory");

    CLI::App *mse = app.add_subcommand("mse-table", "compute the channel-estimation MSE table");
    mse->add_option("--config", config_path, "system config JSON")->required();
    mse->add_option("--out", out_path, "output CSV")->required();

    CLI::App *val = app.add_subcommand("validate", "validate a config and echo it normalized");
    val->add_option("--config", config_path, "system config JSON")->required();

    CLI::App *ver = app.add_subcommand("verify", "run the Monte-Carlo oracle suite");
    ver->add_flag("--quick", quick, "smaller sample counts");

    CLI11_PARSE(app, argc, argv);

    try
    {
        if (sim->parsed())
            return run_simulate(config_path, out_path, seed, seed_opt->count() > 0, threads,
                                mse_table_path, map_cache_dir);
        if (mse->parsed())
            return run_mse_table(config_path, out_path);
        if (val->parsed())
            return run_validate(config_path);
        if (ver->parsed())
            return run_verify(quick);
    }
    catch (const std::exception &e)
    {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
