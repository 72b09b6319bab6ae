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

#include "bandloc/types.hpp"

namespace bandloc {

double operator_norm(const Matrix& a) {
  if (a.rows() == 1 && a.cols() == 1) return std::abs(a(0, 0));
  Eigen::JacobiSVD<Matrix> svd(a);
  return svd.singularValues()(0);
}

double min_singular_value(const Matrix& a) {
  if (a.rows() == 1 && a.cols() == 1) return std::abs(a(0, 0));
  Eigen::JacobiSVD<Matrix> svd(a);
  return svd.singularValues()(svd.singularValues().size() - 1);
}

RealVector realify(const Matrix& a) {
  const int w = static_cast<int>(a.rows());
  RealVector v(2 * w * w);
  int k = 0;
  for (int i = 0; i < w; ++i)
    for (int j = 0; j < w; ++j) v(k++) = a(i, j).real();
  for (int i = 0; i < w; ++i)
    for (int j = 0; j < w; ++j) v(k++) = a(i, j).imag();
  return v;
}

Matrix unrealify(const RealVector& v, int w) {
  Matrix a(w, w);
  int k = 0;
  for (int i = 0; i < w; ++i)
    for (int j = 0; j < w; ++j) a(i, j) = Complex(v(k++), 0.0);
  for (int i = 0; i < w; ++i)
    for (int j = 0; j < w; ++j) a(i, j) += Complex(0.0, v(k++));
  return a;
}

}  // namespace bandloc
