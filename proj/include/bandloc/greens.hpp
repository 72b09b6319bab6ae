// Copyright 2026 The bandloc Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <vector>

#include "bandloc/ensembles.hpp"
#include "bandloc/types.hpp"

namespace bandloc::greens {

using ensembles::BlockHamiltonian;

// Relative singular-value floor below which a Schur block counts as singular.
inline constexpr double kSingularFloor = 1e-14;

// A W x W matrix stored as exp(log_scale) * unit with ||unit|| kept inside
// [1/2, 2], so transfer products over as many as 1e6 blocks neither overflow
// nor underflow.
class ScaledMatrix {
 public:
  ScaledMatrix() = default;
  explicit ScaledMatrix(const Matrix& value) : unit_(value) { rescale(); }

  // Right-multiplies by a plain factor and renormalizes.
  void multiply_right(const Matrix& factor) {
    unit_ = unit_ * factor;
    rescale();
  }

  const Matrix& unit() const { return unit_; }
  double log_scale() const { return log_scale_; }

  // log of the operator norm of the represented value.
  double log_operator_norm() const { return log_scale_ + std::log(operator_norm(unit_)); }

  // Materializes exp(log_scale) * unit; only safe when the scale is moderate.
  Matrix value() const { return std::exp(log_scale_) * unit_; }

 private:
  void rescale();

  Matrix unit_;
  double log_scale_ = 0.0;
};

// Schur complement chain at energy z:
//   Gamma_1 = V_1 - z,  Gamma_j = V_j - z - T_{j-1} Gamma_{j-1}^{-1} T_{j-1}^*.
// Each Gamma_j is re-symmetrized after its update, and its smallest singular
// value is recorded for conditioning diagnostics.
struct GammaChain {
  double z = 0.0;
  std::vector<Matrix> gammas;
  std::vector<Matrix> inverses;
  std::vector<double> min_singular_values;
};

// Throws ExactlySingular if any Gamma_j has smallest singular value below
// kSingularFloor times its operator norm.
GammaChain gamma_chain(const BlockHamiltonian& h, double z);

// Corner block G(1, n; z) as the renormalized transfer product
//   Gamma_1^{-1} T_1^* Gamma_2^{-1} ... T_{n-1}^* Gamma_n^{-1}.
ScaledMatrix corner_green(const BlockHamiltonian& h, double z);
ScaledMatrix corner_green(const BlockHamiltonian& h, const GammaChain& chain);

// X_n = log ||G(1, n; z)||.
double log_norm_x(const BlockHamiltonian& h, double z);

// Dense-inverse oracle: (x, y) block of (H - z)^{-1}, 1-based block indices.
Matrix dense_green_block(const BlockHamiltonian& h, double z, int x, int y);

// Same, for the Hamiltonian truncated to blocks [1, j]. Oracle for the Schur
// identity Gamma_j = G_{[1,j]}(j, j)^{-1}.
Matrix truncated_green_block(const BlockHamiltonian& h, double z, int j);

// Shared dense factorization when several blocks of one resolvent are needed.
class DenseResolvent {
 public:
  DenseResolvent(const BlockHamiltonian& h, double z);
  Matrix block(int x, int y) const;

 private:
  int n_;
  int w_;
  Matrix inverse_;
};

}  // namespace bandloc::greens
