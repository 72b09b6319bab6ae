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

#include "bandloc/greens.hpp"

#include <cmath>

namespace bandloc::greens {

void ScaledMatrix::rescale() {
  const double norm = operator_norm(unit_);
  if (!std::isfinite(norm) || norm == 0.0)
    throw ExactlySingular("scaled matrix collapsed to zero or overflowed");
  if (norm < 0.5 || norm > 2.0) {
    unit_ /= norm;
    log_scale_ += std::log(norm);
  }
}

namespace {

// Inverse through a pivoted LU with a relative singular-value floor.
Matrix guarded_inverse(const Matrix& gamma, double* min_sv, int block_index) {
  const int w = static_cast<int>(gamma.rows());
  Eigen::JacobiSVD<Matrix> svd(gamma, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const double sv_max = svd.singularValues()(0);
  const double sv_min = svd.singularValues()(w - 1);
  if (min_sv) *min_sv = sv_min;
  if (!(sv_min > kSingularFloor * sv_max))
    throw ExactlySingular("Gamma_" + std::to_string(block_index) +
                          " below singularity floor (min sv " + std::to_string(sv_min) + ")");
  if (w == 1) return Matrix::Constant(1, 1, 1.0 / gamma(0, 0));
  return Eigen::PartialPivLU<Matrix>(gamma).inverse();
}

}  // namespace

GammaChain gamma_chain(const BlockHamiltonian& h, double z) {
  const int n = h.params.n;
  const int w = h.params.w;
  GammaChain chain;
  chain.z = z;
  chain.gammas.reserve(static_cast<std::size_t>(n));
  chain.inverses.reserve(static_cast<std::size_t>(n));
  chain.min_singular_values.reserve(static_cast<std::size_t>(n));

  const Matrix z_id = z * Matrix::Identity(w, w);
  for (int j = 0; j < n; ++j) {
    Matrix gamma;
    if (j == 0) {
      gamma = h.v[0] - z_id;
    } else {
      const Matrix& t = h.t[static_cast<std::size_t>(j - 1)];
      gamma = h.v[static_cast<std::size_t>(j)] - z_id -
              t * chain.inverses[static_cast<std::size_t>(j - 1)] * t.adjoint();
      // Re-symmetrize to stop Hermiticity drift along the recursion.
      gamma = 0.5 * (gamma + gamma.adjoint()).eval();
    }
    double min_sv = 0.0;
    Matrix inv = guarded_inverse(gamma, &min_sv, j + 1);
    chain.gammas.push_back(std::move(gamma));
    chain.inverses.push_back(std::move(inv));
    chain.min_singular_values.push_back(min_sv);
  }
  return chain;
}

ScaledMatrix corner_green(const BlockHamiltonian& h, const GammaChain& chain) {
  ScaledMatrix acc(chain.inverses[0]);
  for (std::size_t j = 1; j < chain.inverses.size(); ++j) {
    acc.multiply_right(h.t[j - 1].adjoint());
    acc.multiply_right(chain.inverses[j]);
  }
  return acc;
}

ScaledMatrix corner_green(const BlockHamiltonian& h, double z) {
  return corner_green(h, gamma_chain(h, z));
}

double log_norm_x(const BlockHamiltonian& h, double z) {
  return corner_green(h, z).log_operator_norm();
}

namespace {

Matrix dense_block_of_inverse(const Matrix& dense, double z, int w, int x, int y) {
  const Eigen::Index size = dense.rows();
  Matrix shifted = dense - z * Matrix::Identity(size, size);
  Eigen::PartialPivLU<Matrix> lu(shifted);
  if (lu.rcond() < kSingularFloor)
    throw ExactlySingular("dense resolvent: H - z numerically singular");
  Matrix rhs = Matrix::Zero(size, w);
  rhs.block(static_cast<Eigen::Index>(y - 1) * w, 0, w, w) = Matrix::Identity(w, w);
  Matrix cols = lu.solve(rhs);
  return cols.block(static_cast<Eigen::Index>(x - 1) * w, 0, w, w);
}

}  // namespace

Matrix dense_green_block(const BlockHamiltonian& h, double z, int x, int y) {
  const int n = h.params.n;
  if (x < 1 || y < 1 || x > n || y > n)
    throw DomainError("dense_green_block: block index out of range");
  return dense_block_of_inverse(ensembles::assemble_dense(h), z, h.params.w, x, y);
}

Matrix truncated_green_block(const BlockHamiltonian& h, double z, int j) {
  if (j < 1 || j > h.params.n) throw DomainError("truncated_green_block: index out of range");
  BlockHamiltonian trunc;
  trunc.params = h.params;
  trunc.params.n = j;
  trunc.v.assign(h.v.begin(), h.v.begin() + j);
  trunc.t.assign(h.t.begin(), h.t.begin() + (j - 1));
  return dense_block_of_inverse(ensembles::assemble_dense(trunc), z, h.params.w, j, j);
}

DenseResolvent::DenseResolvent(const BlockHamiltonian& h, double z)
    : n_(h.params.n), w_(h.params.w) {
  Matrix dense = ensembles::assemble_dense(h);
  const Eigen::Index size = dense.rows();
  Matrix shifted = dense - z * Matrix::Identity(size, size);
  Eigen::PartialPivLU<Matrix> lu(shifted);
  if (lu.rcond() < kSingularFloor)
    throw ExactlySingular("dense resolvent: H - z numerically singular");
  inverse_ = lu.inverse();
}

Matrix DenseResolvent::block(int x, int y) const {
  if (x < 1 || y < 1 || x > n_ || y > n_)
    throw DomainError("DenseResolvent::block: index out of range");
  return inverse_.block(static_cast<Eigen::Index>(x - 1) * w_,
                        static_cast<Eigen::Index>(y - 1) * w_, w_, w_);
}

}  // namespace bandloc::greens
