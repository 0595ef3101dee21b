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

#ifndef MMWRX_SPLINE_HPP
#define MMWRX_SPLINE_HPP

#include <vector>

namespace mmwrx {

// Natural cubic spline through (x_i, y_i), x strictly increasing.
// Evaluation clamps the abscissa to [x.front(), x.back()].
class NaturalCubicSpline
{
  public:
    NaturalCubicSpline() = default;
    NaturalCubicSpline(std::vector<double> x, std::vector<double> y);

    double operator()(double x) const;

    bool empty() const { return x_.empty(); }

  private:
    std::vector<double> x_, y_, m_; // m_: second derivatives at the knots
};

} // namespace mmwrx

#endif
