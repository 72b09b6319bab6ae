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

#include <Eigen/Dense>

#include <complex>
#include <stdexcept>
#include <string>

namespace bandloc {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;      // dense complex W x W blocks
using RealMatrix = Eigen::MatrixXd;
using RealVector = Eigen::VectorXd;

// Error taxonomy shared by all modules.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

// A Schur-complement block fell below the singularity floor; the sample
// should be dropped (and counted) or resampled.
class ExactlySingular : public Error {
 public:
  explicit ExactlySingular(const std::string& what) : Error(what) {}
};

// Shift map requested outside the small-deformation regime (delta * W too
// large for the contraction argument to apply).
class RegimeViolation : public Error {
 public:
  explicit RegimeViolation(const std::string& what) : Error(what) {}
};

class DegenerateWeights : public Error {
 public:
  explicit DegenerateWeights(const std::string& what) : Error(what) {}
};

class NonDecaying : public Error {
 public:
  explicit NonDecaying(const std::string& what) : Error(what) {}
};

class CapExceeded : public Error {
 public:
  explicit CapExceeded(const std::string& what) : Error(what) {}
};

class ConfigError : public Error {
 public:
  explicit ConfigError(const std::string& what) : Error(what) {}
};

class DomainError : public Error {
 public:
  explicit DomainError(const std::string& what) : Error(what) {}
};

inline double hs_norm_sq(const Matrix& a) { return a.squaredNorm(); }
inline double hs_norm(const Matrix& a) { return a.norm(); }

// Real part of the Hilbert-Schmidt inner product <a, b> = tr(a^* b).
inline double hs_inner_re(const Matrix& a, const Matrix& b) {
  return (a.conjugate().cwiseProduct(b)).sum().real();
}

// Largest singular value. Full SVD keeps this deterministic for the small
// block sizes used here.
double operator_norm(const Matrix& a);

// Smallest singular value.
double min_singular_value(const Matrix& a);

// Realification convention used throughout: a W x W complex matrix maps to
// the vector (real part entries row-major, then imaginary part entries
// row-major) in R^{2W^2}. The Euclidean norm of the image equals the
// Hilbert-Schmidt norm of the matrix.
RealVector realify(const Matrix& a);
Matrix unrealify(const RealVector& v, int w);

}  // namespace bandloc
