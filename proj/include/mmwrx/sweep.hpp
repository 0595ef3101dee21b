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

#ifndef MMWRX_SWEEP_HPP
#define MMWRX_SWEEP_HPP

#include <armadillo>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "mmwrx/chanest.hpp"
#include "mmwrx/config.hpp"

namespace mmwrx::sweep {

// One resolved simulation point of the Cartesian sweep.
struct Point
{
    SystemConfig cfg;
    std::string rate_curve; // file key of the rate-vs-SNR curve this point belongs to
    std::string ee_curve;   // file key of the EE-vs-rate curve
    double resolution_key = 0.0; // row order within the EE curve
};

// Sweep axes applied to a base config. For dbf/hbf points the bits axis sets a
// uniform bank; hbf additionally sweeps m_rfe; dbf-mixed sweeps the high/low
// resolution split.
struct Plan
{
    SystemConfig base;
    std::vector<double> snr_db;
    std::vector<BfMode> modes;
    std::vector<int> bits;
    std::vector<int> m_rfe;
    std::vector<int> m_h;
    std::vector<int> b_h;
    std::vector<int> b_l;
    int realizations = 0; // 0 = base.realizations
    std::uint64_t seed = 0;

    static Plan from_json(const nlohmann::json &j);
    std::vector<Point> points() const;
};

struct PointResult
{
    double mean_rate = 0.0;
    double std_err = 0.0;
    double p_r_mw = 0.0;
    double ee = 0.0;
    arma::vec per_realization;
};

struct SweepOutput
{
    std::vector<Point> points;
    std::vector<PointResult> results;
};

// Runs the plan: per point, realizations are evaluated in parallel with
// counter-derived seeds, so results are identical for any thread count.
// Writes one CSV per rate curve (x=snr_db, y=mean rate, yerr=stderr), one per
// EE curve (x=mean rate, y=EE, yerr=EE stderr, ordered by resolution), a
// progress log flushed per point, and a manifest.
SweepOutput run_sweep(const Plan &plan, const std::filesystem::path &out_dir, int threads,
                      const chanest::MseTable *external_table = nullptr,
                      const std::filesystem::path &map_cache_dir = {});

// Parses and validates a config file; throws with a diagnostic on failure.
SystemConfig validate_config(const std::filesystem::path &path);

// Thread count resolution: explicit > MMWRX_THREADS > hardware concurrency.
int resolve_threads(int requested);

} // namespace mmwrx::sweep

#endif
