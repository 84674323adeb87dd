// Copyright 2026 The tmq Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef TMQ_COMMON_HPP
#define TMQ_COMMON_HPP

#include <complex>
#include <numbers>

#include <Eigen/Dense>

namespace tmq {

using cplx = std::complex<double>;
using CVector = Eigen::VectorXcd;
using CMatrix = Eigen::MatrixXcd;
using RVector = Eigen::VectorXd;

inline constexpr double kPi = std::numbers::pi;
inline constexpr cplx kI{0.0, 1.0};

/// Largest entrywise deviation of `m` from the identity after forming m^dagger m.
inline double unitarity_residual(const CMatrix &m) {
    const CMatrix g = m.adjoint() * m;
    return (g - CMatrix::Identity(g.rows(), g.cols())).cwiseAbs().maxCoeff();
}

}  // namespace tmq

#endif  // TMQ_COMMON_HPP
