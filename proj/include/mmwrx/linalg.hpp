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

#ifndef MMWRX_LINALG_HPP
#define MMWRX_LINALG_HPP

#include <armadillo>
#include <complex>

namespace mmwrx {

using cxd = std::complex<double>;

// Covariance containers (R_yy, R_rr, R_ee, ...) are plain cx_mat; the helpers
// below enforce the Hermitian / positive-semidefinite contract they carry.

// max |A - A^H| relative to the largest magnitude entry (0 for empty input)
inline double hermitian_error(const arma::cx_mat &a)
{
    if (a.n_elem == 0)
        return 0.0;
    double scale = std::max(1e-300, arma::abs(a).max());
    return arma::abs(a - a.t()).max() / scale;
}

inline arma::cx_mat symmetrize(const arma::cx_mat &a) { return 0.5 * (a + a.t()); }

inline double min_eigval(const arma::cx_mat &a)
{
    arma::vec ev = arma::eig_sym(symmetrize(a));
    return ev.min();
}

// PSD within tolerance: all eigenvalues >= -tol_scale * |trace|
inline bool is_psd(const arma::cx_mat &a, double tol_scale = 1e-8)
{
    double tr = std::abs(arma::trace(a));
    return min_eigval(a) >= -tol_scale * std::max(tr, 1e-300);
}

inline arma::cx_mat kron3(const arma::cx_mat &a, const arma::cx_mat &b, const arma::cx_mat &c)
{
    return arma::kron(a, arma::kron(b, c));
}

} // namespace mmwrx

#endif
