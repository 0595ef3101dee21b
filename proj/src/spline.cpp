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

#include "mmwrx/spline.hpp"

#include <algorithm>
#include <stdexcept>

namespace mmwrx {

NaturalCubicSpline::NaturalCubicSpline(std::vector<double> x, std::vector<double> y)
    : x_(std::move(x)), y_(std::move(y))
{
    const std::size_t n = x_.size();
    if (n < 2 || y_.size() != n)
        throw std::invalid_argument("spline needs at least two matching knots");
    for (std::size_t i = 1; i < n; ++i)
        if (!(x_[i] > x_[i - 1]))
            throw std::invalid_argument("spline abscissae must be strictly increasing");

    // Thomas algorithm for the natural-boundary tridiagonal system
    m_.assign(n, 0.0);
    if (n == 2)
        return;
    std::vector<double> diag(n, 0.0), rhs(n, 0.0), sub(n, 0.0);
    for (std::size_t i = 1; i + 1 < n; ++i)
    {
        double h0 = x_[i] - x_[i - 1];
        double h1 = x_[i + 1] - x_[i];
        sub[i] = h0;
        diag[i] = 2.0 * (h0 + h1);
        rhs[i] = 6.0 * ((y_[i + 1] - y_[i]) / h1 - (y_[i] - y_[i - 1]) / h0);
    }
    for (std::size_t i = 2; i + 1 < n; ++i)
    {
        double w = sub[i] / diag[i - 1];
        diag[i] -= w * (x_[i] - x_[i - 1]); // upper diagonal of row i-1 is h_{i-1}
        rhs[i] -= w * rhs[i - 1];
    }
    for (std::size_t i = n - 2; i >= 1; --i)
    {
        double upper = (i + 2 < n) ? (x_[i + 1] - x_[i]) * m_[i + 1] : 0.0;
        m_[i] = (rhs[i] - upper) / diag[i];
        if (i == 1)
            break;
    }
}

double NaturalCubicSpline::operator()(double x) const
{
    if (x_.empty())
        throw std::logic_error("evaluating an empty spline");
    x = std::clamp(x, x_.front(), x_.back());
    auto it = std::upper_bound(x_.begin(), x_.end(), x);
    std::size_t i = (it == x_.begin()) ? 0 : static_cast<std::size_t>(it - x_.begin()) - 1;
    if (i + 1 >= x_.size())
        i = x_.size() - 2;
    double h = x_[i + 1] - x_[i];
    double a = (x_[i + 1] - x) / h;
    double b = (x - x_[i]) / h;
    return a * y_[i] + b * y_[i + 1] +
           ((a * a * a - a) * m_[i] + (b * b * b - b) * m_[i + 1]) * h * h / 6.0;
}

} // namespace mmwrx
