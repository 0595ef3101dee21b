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

#include "mmwrx/chanest.hpp"

#include <cmath>
#include <fstream>
#include <iostream>
#include <sstream>
#include <stdexcept>

namespace mmwrx::chanest {

arma::uvec PilotPattern::grid_indices(int user) const
{
    const arma::uvec &f = sc.at(user);
    arma::uvec out(f.n_elem * sym.n_elem);
    arma::uword n = 0;
    for (arma::uword t = 0; t < sym.n_elem; ++t)
        for (arma::uword i = 0; i < f.n_elem; ++i)
            out(n++) = sym(t) * k + f(i);
    return arma::sort(out);
}

arma::uvec PilotPattern::full_indices(int user) const
{
    arma::uvec plane = grid_indices(user);
    arma::uvec out(plane.n_elem * m);
    arma::uword n = 0;
    for (int a = 0; a < m; ++a)
        for (arma::uword i = 0; i < plane.n_elem; ++i)
            out(n++) = a * static_cast<arma::uword>(k) * l_sym + plane(i);
    return out;
}

PilotPattern dmrs_pattern(int users, int k, int l_sym)
{
    if (users < 1 || users > 4)
        throw std::invalid_argument("dmrs_pattern: 1..4 users supported");
    if (k < 2 || k % 2 != 0)
        throw std::invalid_argument("dmrs_pattern: subcarrier count must be even");

    PilotPattern pat;
    pat.k = k;
    pat.l_sym = l_sym;
    pat.m = 1;

    // Front-loaded pilot symbol, repeated per 14-symbol slot
    std::vector<arma::uword> sym;
    for (int s = 2; s < l_sym; s += 14)
        sym.push_back(s);
    pat.sym = arma::uvec(sym);

    // Users 0,1 share the even comb, users 2,3 the odd comb. A user whose comb
    // partner is active keeps every 4th subcarrier after OCC despreading; a
    // lone user keeps the full comb.
    for (int u = 0; u < users; ++u)
    {
        int comb = (u < 2) ? 0 : 1;
        int partner = u ^ 1;
        bool shared = partner < users;
        int start = comb + (shared && (u % 2 == 1) ? 2 : 0);
        int step = shared ? 4 : 2;
        std::vector<arma::uword> f;
        for (int i = start; i < k; i += step)
            f.push_back(i);
        pat.sc.push_back(arma::uvec(f));
    }
    return pat;
}

arma::mat time_corr(double doppler_norm, int l_sym)
{
    arma::mat r(l_sym, l_sym);
    for (int i = 0; i < l_sym; ++i)
        for (int j = 0; j < l_sym; ++j)
            r(i, j) = std::cyl_bessel_j(0.0, 2.0 * arma::datum::pi * doppler_norm *
                                                 std::abs(i - j));
    return r;
}

arma::cx_mat freq_corr(const arma::vec &pdp, int k)
{
    if (static_cast<int>(pdp.n_elem) > k)
        throw std::invalid_argument("freq_corr: grid must cover the impulse response");
    // Toeplitz: [R_f]_{k1,k2} = sum_l pdp(l) e^{-j 2 pi (k1-k2) l / k}
    arma::cx_vec col(k);
    for (int d = 0; d < k; ++d)
    {
        cxd acc = 0.0;
        for (arma::uword l = 0; l < pdp.n_elem; ++l)
            acc += pdp(l) * std::polar(1.0, -2.0 * arma::datum::pi * d * double(l) / k);
        col(d) = acc;
    }
    arma::cx_mat r(k, k);
    for (int i = 0; i < k; ++i)
        for (int j = 0; j < k; ++j)
            r(i, j) = (i >= j) ? col(i - j) : std::conj(col(j - i));
    return r;
}

arma::mat spatial_corr(int m, bool after_analog_combining)
{
    if (m < 1)
        throw std::invalid_argument("spatial_corr: m must be >= 1");
    if (after_analog_combining)
        return arma::eye(m, m); // beams picked per chain leave the outputs uncorrelated
    arma::mat r(m, m);
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < m; ++j)
            r(i, j) = std::cyl_bessel_j(0.0, arma::datum::pi * std::abs(i - j));
    return r;
}

arma::cx_mat wiener_matrix(const arma::cx_mat &r, double noise_var, const arma::uvec &pilots)
{
    const arma::uword n = r.n_rows;
    arma::cx_mat a(n, n, arma::fill::zeros);
    if (pilots.n_elem == 0)
        return a;
    arma::cx_mat rpp = r.submat(pilots, pilots) +
                       noise_var * arma::cx_mat(pilots.n_elem, pilots.n_elem, arma::fill::eye);
    arma::cx_mat rp = r.cols(pilots);
    arma::cx_mat sol;
    if (!arma::solve(sol, rpp, rp.t(), arma::solve_opts::no_approx))
    {
        std::cerr << "wiener_matrix: singular system, adding ridge\n";
        rpp += 1e-12 * std::abs(arma::trace(rpp)) *
               arma::cx_mat(pilots.n_elem, pilots.n_elem, arma::fill::eye);
        sol = arma::solve(rpp, rp.t());
    }
    a.cols(pilots) = sol.t();
    return a;
}

namespace {

// tr(R_P G) restricted to pilot rows/cols, with G = A^H A
cxd pair_sum(const arma::cx_mat &r, const arma::cx_mat &a, const arma::uvec &pilots)
{
    arma::cx_mat g = a.cols(pilots).t() * a.cols(pilots); // |P| x |P|
    arma::cx_mat rp = r.submat(pilots, pilots);
    return arma::accu(rp % arma::strans(g));
}

cxd diag_sum(const arma::cx_mat &r, const arma::cx_mat &a, const arma::uvec &pilots)
{
    cxd acc = 0.0;
    for (arma::uword i = 0; i < pilots.n_elem; ++i)
    {
        arma::uword p = pilots(i);
        acc += arma::cdot(a.col(p), r.col(p)); // [A^H R]_{p,p}
    }
    return acc;
}

} // namespace

double analytic_mse_kron(const arma::cx_mat &a_s, const arma::cx_mat &a_t,
                         const arma::cx_mat &a_f, const SeparableCovariance &cov,
                         const DimPilots &pilots)
{
    if (a_s.n_rows != cov.s.n_rows || a_t.n_rows != cov.t.n_rows || a_f.n_rows != cov.f.n_rows)
        throw std::invalid_argument("analytic_mse_kron: dimension mismatch");

    const double klm = double(a_s.n_rows) * a_t.n_rows * a_f.n_rows;
    cxd c1 = pair_sum(cov.s, a_s, pilots.s) * pair_sum(cov.t, a_t, pilots.t) *
                 pair_sum(cov.f, a_f, pilots.f) +
             pair_sum(cov.ns, a_s, pilots.s) * pair_sum(cov.nt, a_t, pilots.t) *
                 pair_sum(cov.nf, a_f, pilots.f);
    cxd c2 = diag_sum(cov.s, a_s, pilots.s) * diag_sum(cov.t, a_t, pilots.t) *
             diag_sum(cov.f, a_f, pilots.f);
    double c3 = std::real(arma::trace(cov.s)) * std::real(arma::trace(cov.t)) *
                std::real(arma::trace(cov.f));
    return (std::real(c1) - 2.0 * std::real(c2) + c3) / klm;
}

double analytic_mse_direct(const arma::cx_mat &a_stf, const arma::cx_mat &r_hh,
                           const arma::cx_mat &r_nn, const arma::uvec &pilots_full)
{
    const arma::uword n = r_hh.n_rows;
    if (n > 4096)
        throw std::invalid_argument("analytic_mse_direct: grid too large for the oracle");
    if (a_stf.n_rows != n || r_nn.n_rows != n)
        throw std::invalid_argument("analytic_mse_direct: dimension mismatch");

    arma::cx_mat masked(n, n, arma::fill::zeros);
    masked.submat(pilots_full, pilots_full) =
        r_hh.submat(pilots_full, pilots_full) + r_nn.submat(pilots_full, pilots_full);
    double term1 = std::real(arma::trace(a_stf * masked * a_stf.t()));

    cxd term2 = 0.0;
    for (arma::uword i = 0; i < pilots_full.n_elem; ++i)
    {
        arma::uword p = pilots_full(i);
        term2 += arma::cdot(a_stf.col(p), r_hh.col(p));
    }
    double term3 = std::real(arma::trace(r_hh));
    return (term1 - 2.0 * std::real(term2) + term3) / double(n);
}

double MseTable::lookup(double snr) const
{
    if (snr_db.n_elem == 0)
        throw std::logic_error("MseTable: empty table");
    if (snr <= snr_db(0))
        return mse(0);
    if (snr >= snr_db(snr_db.n_elem - 1))
        return mse(mse.n_elem - 1);
    arma::uword i = 0;
    while (snr_db(i + 1) < snr)
        ++i;
    double w = (snr - snr_db(i)) / (snr_db(i + 1) - snr_db(i));
    return (1.0 - w) * mse(i) + w * mse(i + 1);
}

void MseTable::save_csv(const std::filesystem::path &path) const
{
    std::ofstream out(path);
    if (!out)
        throw std::runtime_error("MseTable: cannot write " + path.string());
    out << "snr_db,mse\n";
    out.precision(17);
    for (arma::uword i = 0; i < snr_db.n_elem; ++i)
        out << snr_db(i) << "," << mse(i) << "\n";
}

MseTable load_csv_impl(const std::filesystem::path &path)
{
    std::ifstream in(path);
    if (!in)
        throw std::runtime_error("MseTable: cannot read " + path.string());
    std::string line;
    std::getline(in, line); // header
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
        throw std::runtime_error("MseTable: too few rows in " + path.string());
    MseTable t;
    t.snr_db = arma::vec(xs);
    t.mse = arma::vec(ys);
    return t;
}

MseTable MseTable::load_csv(const std::filesystem::path &path) { return load_csv_impl(path); }

MseTable build_mse_table(const SystemConfig &cfg)
{
    const ChanestConfig &ce = cfg.chanest;
    const int k = ce.table_k > 0 ? ce.table_k : cfg.n_f;
    const int l_sym = ce.l_sym;
    const bool hbf = cfg.mode == BfMode::hbf;
    const int m = hbf ? cfg.m_rfe : cfg.m_r;

    // Statistical PDP: the nominal exponential profile over all delays.
    auto exp_pdp = [&](double beta) {
        arma::vec v(cfg.l);
        for (int d = 0; d < cfg.l; ++d)
            v(d) = std::exp(-beta * d);
        return arma::vec(v / arma::accu(v));
    };

    SeparableCovariance cov;
    cov.s = arma::conv_to<arma::cx_mat>::from(spatial_corr(m, hbf));
    cov.t = arma::conv_to<arma::cx_mat>::from(time_corr(ce.doppler_norm, l_sym));
    cov.f = freq_corr(exp_pdp(cfg.beta), k);
    cov.ns = arma::cx_mat(m, m, arma::fill::eye);
    cov.nt = arma::cx_mat(l_sym, l_sym, arma::fill::eye);

    // Model side for the Wiener filters: larger assumed delay spread means a
    // slower assumed decay, larger assumed Doppler a faster time decorrelation.
    arma::cx_mat r_t_model = arma::conv_to<arma::cx_mat>::from(
        time_corr(ce.doppler_norm * ce.doppler_model_mult, l_sym));
    arma::cx_mat r_f_model = freq_corr(exp_pdp(cfg.beta / ce.delay_model_mult), k);

    PilotPattern pat = dmrs_pattern(cfg.users, k, l_sym);
    DimPilots pilots;
    pilots.s = arma::regspace<arma::uvec>(0, m - 1);
    pilots.t = pat.sym;
    pilots.f = pat.sc[0];

    // The raw observation noise is absorbed by the frequency interpolator; the
    // time stage extrapolates the denoised pilot symbols ridge-free and the
    // spatial stage passes through (no observation noise left at that point).
    // A degenerate 1x1x(k) grid then collapses to the scalar Wiener MSE.
    arma::cx_mat a_s(m, m, arma::fill::eye);
    arma::cx_mat a_t = wiener_matrix(r_t_model, 0.0, pilots.t);

    const int n_pts =
        static_cast<int>(std::floor((ce.snr_max_db - ce.snr_min_db) / ce.snr_step_db)) + 1;
    MseTable table;
    table.snr_db.set_size(n_pts);
    table.mse.set_size(n_pts);
    for (int i = 0; i < n_pts; ++i)
    {
        double snr = ce.snr_min_db + i * ce.snr_step_db;
        double sigma2 = std::pow(10.0, -snr / 10.0);
        cov.nf = sigma2 * arma::cx_mat(k, k, arma::fill::eye);
        arma::cx_mat a_f = wiener_matrix(r_f_model, sigma2, pilots.f);
        table.snr_db(i) = snr;
        table.mse(i) = analytic_mse_kron(a_s, a_t, a_f, cov, pilots);
    }
    return table;
}

double snr_degradation(const MseTable &table, double snr_db)
{
    return 1.0 + std::pow(10.0, snr_db / 10.0) * table.lookup(snr_db);
}

arma::cx_mat est_error_cov(const std::vector<arma::cx_mat> &h_users, const arma::vec &sigma2)
{
    if (h_users.size() != sigma2.n_elem)
        throw std::invalid_argument("est_error_cov: users and MSE values must match");
    if (h_users.empty())
        throw std::invalid_argument("est_error_cov: no users");
    const arma::uword m = h_users.front().n_rows;
    arma::vec d(m, arma::fill::zeros);
    for (std::size_t u = 0; u < h_users.size(); ++u)
    {
        if (h_users[u].n_rows != m)
            throw std::invalid_argument("est_error_cov: dimension mismatch");
        d += sigma2(u) * arma::sum(arma::square(arma::abs(h_users[u])), 1);
    }
    return arma::diagmat(arma::conv_to<arma::cx_vec>::from(d));
}

} // namespace mmwrx::chanest
