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

#include "mmwrx/quantization.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iostream>
#include <mutex>
#include <sstream>
#include <stdexcept>

namespace mmwrx::quant {

namespace {

constexpr double kPi = 3.14159265358979323846;

double norm_pdf(double x) { return std::exp(-0.5 * x * x) / std::sqrt(2.0 * kPi); }

double norm_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

// Inverse standard normal CDF by bisection (init use only, accuracy 1e-12).
double norm_quantile(double p)
{
    double lo = -40.0, hi = 40.0;
    for (int i = 0; i < 200 && hi - lo > 1e-12; ++i)
    {
        double mid = 0.5 * (lo + hi);
        (norm_cdf(mid) < p ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

// Bin mass and first moment of the standard normal over (a, b)
double bin_mass(double a, double b) { return norm_cdf(b) - norm_cdf(a); }
double bin_moment(double a, double b)
{
    double pa = std::isinf(a) ? 0.0 : norm_pdf(a);
    double pb = std::isinf(b) ? 0.0 : norm_pdf(b);
    return pa - pb;
}

// E[Qx], E[Q^2] and E[(Q-x)^2] for a unit-variance Gaussian input
void quantizer_moments(const arma::vec &thr, const arma::vec &lev, double &gain,
                       double &out_pow, double &distortion)
{
    const int n = static_cast<int>(lev.n_elem);
    gain = 0.0;
    out_pow = 0.0;
    for (int k = 0; k < n; ++k)
    {
        double a = (k == 0) ? -arma::datum::inf : thr(k - 1);
        double b = (k == n - 1) ? arma::datum::inf : thr(k);
        gain += lev(k) * bin_moment(a, b);
        out_pow += lev(k) * lev(k) * bin_mass(a, b);
    }
    distortion = 1.0 - 2.0 * gain + out_pow;
}

arma::vec midpoint_thresholds(const arma::vec &lev)
{
    const int n = static_cast<int>(lev.n_elem);
    arma::vec thr(n - 1);
    for (int k = 0; k + 1 < n; ++k)
        thr(k) = 0.5 * (lev(k) + lev(k + 1));
    return thr;
}

QuantizerSpec design_lloyd_max(int bits)
{
    const int n = 1 << bits;
    arma::vec lev(n);
    for (int k = 0; k < n; ++k)
        lev(k) = norm_quantile((k + 0.5) / n);

    const int max_iter = 200000;
    double delta = arma::datum::inf;
    arma::vec thr;
    for (int it = 0; it < max_iter; ++it)
    {
        thr = midpoint_thresholds(lev);
        delta = 0.0;
        for (int k = 0; k < n; ++k)
        {
            double a = (k == 0) ? -arma::datum::inf : thr(k - 1);
            double b = (k == n - 1) ? arma::datum::inf : thr(k);
            double mass = bin_mass(a, b);
            if (mass <= 0.0)
                continue;
            double r = bin_moment(a, b) / mass;
            delta = std::max(delta, std::abs(r - lev(k)));
            lev(k) = r;
        }
        if (delta < 1e-12)
            break;
    }
    if (!(delta < 1e-12))
        throw std::runtime_error("design_quantizer: Lloyd-Max iteration did not converge");

    // Force exact symmetry about zero
    for (int k = 0; k < n / 2; ++k)
    {
        double v = 0.5 * (lev(n - 1 - k) - lev(k));
        lev(k) = -v;
        lev(n - 1 - k) = v;
    }

    QuantizerSpec spec;
    spec.bits = bits;
    spec.family = QuantFamily::lloyd_max;
    spec.levels = lev;
    spec.thresholds = midpoint_thresholds(lev);
    quantizer_moments(spec.thresholds, spec.levels, spec.gain, spec.output_power,
                      spec.distortion);
    return spec;
}

void uniform_grid(int n, double step, arma::vec &thr, arma::vec &lev)
{
    lev.set_size(n);
    thr.set_size(n - 1);
    for (int k = 0; k < n; ++k)
        lev(k) = (k - 0.5 * n + 0.5) * step;
    for (int k = 0; k + 1 < n; ++k)
        thr(k) = (k - 0.5 * n + 1.0) * step;
}

QuantizerSpec design_uniform(int bits)
{
    const int n = 1 << bits;

    auto distortion_of = [n](double step) {
        arma::vec thr, lev;
        uniform_grid(n, step, thr, lev);
        double g, op, d;
        quantizer_moments(thr, lev, g, op, d);
        return d;
    };

    // Golden-section search for the optimal step
    const double gr = (std::sqrt(5.0) - 1.0) / 2.0;
    double lo = 1e-3, hi = 4.0;
    double x1 = hi - gr * (hi - lo), x2 = lo + gr * (hi - lo);
    double f1 = distortion_of(x1), f2 = distortion_of(x2);
    for (int it = 0; it < 300 && hi - lo > 1e-13; ++it)
    {
        if (f1 < f2)
        {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - gr * (hi - lo);
            f1 = distortion_of(x1);
        }
        else
        {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + gr * (hi - lo);
            f2 = distortion_of(x2);
        }
    }

    QuantizerSpec spec;
    spec.bits = bits;
    spec.family = QuantFamily::uniform;
    uniform_grid(n, 0.5 * (lo + hi), spec.thresholds, spec.levels);
    quantizer_moments(spec.thresholds, spec.levels, spec.gain, spec.output_power,
                      spec.distortion);
    return spec;
}

} // namespace

QuantizerSpec design_quantizer(int bits, QuantFamily family)
{
    if (bits == 0)
        return QuantizerSpec{}; // bypass
    if (bits < 1 || bits > 12)
        throw std::invalid_argument("design_quantizer: bits must be in 1..12 (0 = bypass)");
    return family == QuantFamily::lloyd_max ? design_lloyd_max(bits) : design_uniform(bits);
}

std::vector<QuantizerSpec> bank_for(const SystemConfig &cfg)
{
    static std::mutex memo_mutex;
    static std::map<std::pair<int, int>, QuantizerSpec> memo;

    std::vector<QuantizerSpec> bank;
    bank.reserve(cfg.adc_bits.size());
    std::lock_guard<std::mutex> lock(memo_mutex);
    for (int b : cfg.adc_bits)
    {
        auto key = std::make_pair(b, static_cast<int>(cfg.quant_family));
        auto it = memo.find(key);
        if (it == memo.end())
            it = memo.emplace(key, design_quantizer(b, cfg.quant_family)).first;
        bank.push_back(it->second);
    }
    return bank;
}

arma::mat bussgang_gains(const std::vector<QuantizerSpec> &specs)
{
    arma::mat f(specs.size(), specs.size(), arma::fill::zeros);
    for (std::size_t i = 0; i < specs.size(); ++i)
        f(i, i) = specs[i].gain;
    return f;
}

double output_corr_at_one(const QuantizerSpec &a, const QuantizerSpec &b)
{
    if (a.identity() && b.identity())
        return 1.0;
    if (a.identity())
        return b.gain; // E[x Q(x)]
    if (b.identity())
        return a.gain;

    // Walk the merged bin partition; both outputs are constant on each cell.
    std::vector<double> bounds;
    bounds.push_back(-arma::datum::inf);
    for (double s : a.thresholds)
        bounds.push_back(s);
    for (double s : b.thresholds)
        bounds.push_back(s);
    bounds.push_back(arma::datum::inf);
    std::sort(bounds.begin(), bounds.end());

    double e = 0.0;
    for (std::size_t i = 0; i + 1 < bounds.size(); ++i)
    {
        double lo = bounds[i], hi = bounds[i + 1];
        if (!(hi > lo))
            continue;
        double x = std::isinf(lo) ? hi - 1.0 : (std::isinf(hi) ? lo + 1.0 : 0.5 * (lo + hi));
        auto idx = [x](const arma::vec &thr) {
            return std::upper_bound(thr.begin(), thr.end(), x) - thr.begin();
        };
        e += a.levels(idx(a.thresholds)) * b.levels(idx(b.thresholds)) * bin_mass(lo, hi);
    }
    return e;
}

namespace {

// d/drho E[Q_a(x) Q_b(y)] = sum over threshold pairs of jump products times the
// bivariate normal density (Price's theorem applied to the staircases).
struct CorrDerivative
{
    arma::vec sa, sb; // thresholds
    arma::vec ja, jb; // level jumps at the thresholds

    double operator()(double rho) const
    {
        double q = 1.0 - rho * rho;
        double norm = 1.0 / (2.0 * kPi * std::sqrt(q));
        double sum = 0.0;
        for (arma::uword l = 0; l < sa.n_elem; ++l)
        {
            double s = sa(l);
            for (arma::uword j = 0; j < sb.n_elem; ++j)
            {
                double t = sb(j);
                sum += ja(l) * jb(j) * std::exp(-(s * s + t * t - 2.0 * rho * s * t) / (2.0 * q));
            }
        }
        return norm * sum;
    }
};

template <typename F>
double adaptive_simpson_rec(const F &f, double a, double fa, double b, double fb, double m,
                            double fm, double whole, double tol, int depth)
{
    double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
    double flm = f(lm), frm = f(rm);
    double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    if (depth <= 0 || std::abs(left + right - whole) <= 15.0 * tol)
        return left + right + (left + right - whole) / 15.0;
    return adaptive_simpson_rec(f, a, fa, m, fm, lm, flm, left, 0.5 * tol, depth - 1) +
           adaptive_simpson_rec(f, m, fm, b, fb, rm, frm, right, 0.5 * tol, depth - 1);
}

template <typename F> double adaptive_simpson(const F &f, double a, double b, double tol)
{
    double m = 0.5 * (a + b);
    double fa = f(a), fb = f(b), fm = f(m);
    double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    return adaptive_simpson_rec(f, a, fa, b, fb, m, fm, whole, tol, 48);
}

arma::vec jumps(const arma::vec &levels)
{
    arma::vec j(levels.n_elem - 1);
    for (arma::uword k = 0; k + 1 < levels.n_elem; ++k)
        j(k) = levels(k + 1) - levels(k);
    return j;
}

} // namespace

CorrelationMap build_correlation_map(const QuantizerSpec &a, const QuantizerSpec &b,
                                     double grid_threshold)
{
    if (a.identity() || b.identity())
        throw std::invalid_argument("build_correlation_map: bypass chains need no map");
    if (!(grid_threshold > 0.0))
        throw std::invalid_argument("build_correlation_map: threshold must be > 0");

    CorrDerivative deriv{a.thresholds, b.thresholds, jumps(a.levels), jumps(b.levels)};
    const double rho_cap = 1.0 - 1e-6; // density is singular at rho = 1
    const double quad_tol = 1e-8;      // absolute, per unit integration length

    // Step so that each segment changes rho_o by roughly half the threshold,
    // then verify and bisect any segment that still exceeds it.
    std::vector<double> xs{0.0};
    std::vector<double> ys{0.0};
    double rho = 0.0, val = 0.0;
    while (rho < rho_cap)
    {
        double slope = std::max(deriv(rho), 1e-9);
        double step = std::clamp(0.5 * grid_threshold / slope, 1e-7, 0.05);
        double next = std::min(rho + step, rho_cap);
        val += adaptive_simpson(deriv, rho, next, quad_tol * (next - rho));
        rho = next;
        xs.push_back(rho);
        ys.push_back(val);
    }

    for (std::size_t i = 1; i < xs.size();)
    {
        if (ys[i] - ys[i - 1] > grid_threshold && xs[i] - xs[i - 1] > 1e-9)
        {
            double mid = 0.5 * (xs[i - 1] + xs[i]);
            double inc = adaptive_simpson(deriv, xs[i - 1], mid, quad_tol * (mid - xs[i - 1]));
            xs.insert(xs.begin() + i, mid);
            ys.insert(ys.begin() + i, ys[i - 1] + inc);
        }
        else
            ++i;
    }

    // Exact anchor at rho = 1 closes the singular tail.
    xs.push_back(1.0);
    ys.push_back(output_corr_at_one(a, b));

    CorrelationMap map;
    map.bits_a = a.bits;
    map.bits_b = b.bits;
    map.family = a.family;
    map.grid_threshold = grid_threshold;
    map.rho_in = arma::vec(xs);
    map.rho_out = arma::vec(ys);
    map.spline = NaturalCubicSpline(xs, ys);
    return map;
}

double CorrelationMap::eval(double rho) const
{
    double r = std::clamp(rho, -1.0, 1.0);
    double v = spline(std::abs(r));
    return r < 0.0 ? -v : v; // odd symmetry of symmetric quantizers
}

MapCache::MapCache(QuantFamily family, double grid_threshold)
    : family_(family), grid_threshold_(grid_threshold)
{
}

std::size_t MapCache::size() const
{
    std::shared_lock lock(mutex_);
    return maps_.size();
}

const CorrelationMap &MapCache::get(const QuantizerSpec &a, const QuantizerSpec &b)
{
    auto key = std::minmax(a.bits, b.bits);
    {
        std::shared_lock lock(mutex_);
        auto it = maps_.find(key);
        if (it != maps_.end())
            return *it->second;
    }
    std::unique_lock lock(mutex_);
    auto it = maps_.find(key);
    if (it == maps_.end())
    {
        const QuantizerSpec &lo = (a.bits <= b.bits) ? a : b;
        const QuantizerSpec &hi = (a.bits <= b.bits) ? b : a;
        it = maps_.emplace(key, std::make_unique<const CorrelationMap>(build_correlation_map(
                                    lo, hi, grid_threshold_)))
                 .first;
    }
    return *it->second;
}

namespace {
std::string family_tag(QuantFamily f)
{
    return f == QuantFamily::lloyd_max ? "lloyd-max" : "uniform";
}
} // namespace

void MapCache::save(const std::filesystem::path &dir) const
{
    std::filesystem::create_directories(dir);
    std::shared_lock lock(mutex_);
    for (const auto &[key, map] : maps_)
    {
        std::ostringstream name;
        name << "cmap_" << family_tag(family_) << "_" << key.first << "_" << key.second << ".csv";
        std::ofstream out(dir / name.str());
        out << "# mmwrx correlation map v1\n";
        out << "# family=" << family_tag(family_) << " threshold=" << grid_threshold_
            << " bits=" << key.first << "," << key.second << "\n";
        out << "rho_in,rho_out\n";
        out.precision(17);
        for (arma::uword i = 0; i < map->rho_in.n_elem; ++i)
            out << map->rho_in(i) << "," << map->rho_out(i) << "\n";
    }
}

std::size_t MapCache::load(const std::filesystem::path &dir)
{
    if (!std::filesystem::is_directory(dir))
        return 0;
    std::size_t loaded = 0;
    for (const auto &entry : std::filesystem::directory_iterator(dir))
    {
        if (entry.path().extension() != ".csv" ||
            entry.path().filename().string().rfind("cmap_", 0) != 0)
            continue;
        std::ifstream in(entry.path());
        std::string line;
        if (!std::getline(in, line) || line != "# mmwrx correlation map v1")
            continue;
        if (!std::getline(in, line))
            continue;
        std::string fam;
        double thr = 0.0;
        int ba = -1, bb = -1;
        {
            std::istringstream hdr(line);
            std::string tok;
            while (hdr >> tok)
            {
                if (tok.rfind("family=", 0) == 0)
                    fam = tok.substr(7);
                else if (tok.rfind("threshold=", 0) == 0)
                    thr = std::stod(tok.substr(10));
                else if (tok.rfind("bits=", 0) == 0)
                    std::sscanf(tok.c_str(), "bits=%d,%d", &ba, &bb);
            }
        }
        if (fam != family_tag(family_) || std::abs(thr - grid_threshold_) > 1e-15 || ba < 1 ||
            bb < ba)
            continue; // stale cache entry
        std::getline(in, line); // column header
        std::vector<double> xs, ys;
        while (std::getline(in, line))
        {
            double x, y;
            if (std::sscanf(line.c_str(), "%lf,%lf", &x, &y) == 2)
            {
                xs.push_back(x);
                ys.push_back(y);
            }
        }
        if (xs.size() < 2)
            continue;
        auto map = std::make_unique<CorrelationMap>();
        map->bits_a = ba;
        map->bits_b = bb;
        map->family = family_;
        map->grid_threshold = grid_threshold_;
        map->rho_in = arma::vec(xs);
        map->rho_out = arma::vec(ys);
        map->spline = NaturalCubicSpline(xs, ys);
        std::unique_lock lock(mutex_);
        maps_[{ba, bb}] = std::move(map);
        ++loaded;
    }
    return loaded;
}

arma::cx_mat transform_cov(const arma::cx_mat &r_yy, const std::vector<QuantizerSpec> &specs,
                           MapCache &maps)
{
    const arma::uword n = r_yy.n_rows;
    if (r_yy.n_cols != n || specs.size() != n)
        throw std::invalid_argument("transform_cov: dimension mismatch");
    if (hermitian_error(r_yy) > 1e-10)
        throw std::invalid_argument("transform_cov: input is not Hermitian");
    if (!is_psd(r_yy, 1e-8))
        throw std::invalid_argument("transform_cov: input is not positive semidefinite");

    arma::cx_mat r_rr(n, n, arma::fill::zeros);
    for (arma::uword i = 0; i < n; ++i)
        r_rr(i, i) = specs[i].output_power * std::real(r_yy(i, i));

    for (arma::uword i = 0; i < n; ++i)
    {
        double si = std::sqrt(std::real(r_yy(i, i)));
        for (arma::uword j = i + 1; j < n; ++j)
        {
            double sj = std::sqrt(std::real(r_yy(j, j)));
            double scale = si * sj;
            cxd out;
            if (scale <= 0.0)
                out = 0.0;
            else
            {
                cxd c = r_yy(i, j) / scale;
                if (std::abs(c) > 1.0)
                {
                    if (std::abs(c) > 1.0 + 1e-9)
                        std::cerr << "transform_cov: clamping |corr| = " << std::abs(c)
                                  << " to 1\n";
                    c /= std::abs(c);
                }
                if (specs[i].identity() && specs[j].identity())
                    out = scale * c;
                else if (specs[i].identity())
                    out = scale * specs[j].gain * c;
                else if (specs[j].identity())
                    out = scale * specs[i].gain * c;
                else
                {
                    // Proper Gaussian pair: the unit-variance real-component
                    // correlations are ReRe = ImIm = Re(c), ImRe = Im(c),
                    // ReIm = -Im(c); reassembly gives map(Re c) + j map(Im c).
                    const CorrelationMap &m = maps.get(specs[i], specs[j]);
                    out = scale * cxd(m.eval(c.real()), m.eval(c.imag()));
                }
            }
            r_rr(i, j) = out;
            r_rr(j, i) = std::conj(out);
        }
    }
    return r_rr;
}

arma::cx_mat quant_error_cov(const arma::cx_mat &r_rr, const arma::mat &f,
                             const arma::cx_mat &r_yy)
{
    if (r_rr.n_rows != f.n_rows || f.n_rows != r_yy.n_rows || !f.is_diagmat())
        throw std::invalid_argument("quant_error_cov: dimension mismatch");
    arma::cx_mat e = symmetrize(r_rr - arma::conv_to<arma::cx_mat>::from(f) * r_yy *
                                           arma::conv_to<arma::cx_mat>::from(f));
    double tol = 1e-8 * std::max(std::real(arma::trace(e)),
                                 1e-12 * std::abs(arma::trace(r_yy)));
    if (min_eigval(e) < -std::max(tol, 1e-300))
        throw std::runtime_error("quant_error_cov: result is indefinite beyond tolerance");
    return e;
}

double quantize_sample(const QuantizerSpec &spec, double x, double agc_std)
{
    if (!(agc_std > 0.0))
        throw std::invalid_argument("quantize: agc_std must be > 0");
    if (spec.identity())
        return x;
    const arma::vec &thr = spec.thresholds;
    auto idx = std::upper_bound(thr.begin(), thr.end(), x / agc_std) - thr.begin();
    return spec.levels(idx) * agc_std;
}

arma::vec quantize_samples(const QuantizerSpec &spec, const arma::vec &x, double agc_std)
{
    arma::vec out(x.n_elem);
    for (arma::uword i = 0; i < x.n_elem; ++i)
        out(i) = quantize_sample(spec, x(i), agc_std);
    return out;
}

cxd quantize_complex(const QuantizerSpec &spec, cxd x, double agc_std)
{
    return {quantize_sample(spec, x.real(), agc_std), quantize_sample(spec, x.imag(), agc_std)};
}

} // namespace mmwrx::quant
