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

#include "bandloc/ensembles.hpp"

#include <cmath>

namespace bandloc::ensembles {

std::string ensemble_name(Ensemble e) {
  switch (e) {
    case Ensemble::WegnerComplex: return "wegner_complex";
    case Ensemble::WegnerReal: return "wegner_real";
    case Ensemble::TriangularRBM: return "triangular_rbm";
    case Ensemble::GaussianMixture: return "gaussian_mixture";
  }
  throw DomainError("unknown ensemble");
}

Ensemble ensemble_from_name(const std::string& name) {
  if (name == "wegner_complex") return Ensemble::WegnerComplex;
  if (name == "wegner_real") return Ensemble::WegnerReal;
  if (name == "triangular_rbm") return Ensemble::TriangularRBM;
  if (name == "gaussian_mixture") return Ensemble::GaussianMixture;
  throw DomainError("unknown ensemble name: " + name);
}

void MixtureSpec::validate() const {
  if (atoms.empty()) throw DomainError("mixture: empty atom list");
  if (!(support_bound > 0.0)) throw DomainError("mixture: support bound must be positive");
  double total = 0.0;
  for (const auto& [lambda, weight] : atoms) {
    if (!(lambda > 0.0) || lambda > support_bound)
      throw DomainError("mixture: atom outside (0, D]");
    if (!(weight >= 0.0)) throw DomainError("mixture: negative weight");
    total += weight;
  }
  if (std::abs(total - 1.0) > 1e-12) throw DomainError("mixture: weights must sum to 1");
}

std::vector<std::string> ModelParams::validate() const {
  if (n < 1 || w < 1) throw DomainError("model: n and W must be >= 1");
  if (ensemble == Ensemble::GaussianMixture) {
    if (!mixture) throw DomainError("model: gaussian_mixture needs a mixture spec");
    mixture->validate();
  }
  std::vector<std::string> warnings;
  const double cap = energy_cap_coeff * std::sqrt(static_cast<double>(w));
  if (std::abs(z) > cap) {
    warnings.push_back("energy |z| = " + std::to_string(std::abs(z)) +
                       " exceeds the cap " + std::to_string(cap) +
                       " (= coeff * sqrt(W)); decay estimates target |z| <= cap");
  }
  return warnings;
}

Matrix sample_gue(int w, RngStream& rng) {
  Matrix v(w, w);
  const double diag_sd = 1.0 / std::sqrt(2.0 * w);
  const double off_sd = 1.0 / std::sqrt(4.0 * w);  // per real component
  for (int i = 0; i < w; ++i) {
    v(i, i) = Complex(rng.normal(diag_sd), 0.0);
    for (int j = 0; j < i; ++j) {
      const Complex entry = rng.complex_normal(off_sd);
      v(i, j) = entry;
      v(j, i) = std::conj(entry);
    }
  }
  return v;
}

Matrix sample_goe(int w, RngStream& rng) {
  Matrix v(w, w);
  const double diag_sd = 1.0 / std::sqrt(2.0 * w);
  const double off_sd = 1.0 / std::sqrt(4.0 * w);
  for (int i = 0; i < w; ++i) {
    v(i, i) = Complex(rng.normal(diag_sd), 0.0);
    for (int j = 0; j < i; ++j) {
      const double entry = rng.normal(off_sd);
      v(i, j) = Complex(entry, 0.0);
      v(j, i) = Complex(entry, 0.0);
    }
  }
  return v;
}

Matrix sample_ginibre(int w, RngStream& rng) {
  Matrix t(w, w);
  const double component_sd = 1.0 / std::sqrt(2.0 * w);
  for (int i = 0; i < w; ++i)
    for (int j = 0; j < w; ++j) t(i, j) = rng.complex_normal(component_sd);
  return t;
}

Matrix sample_real_ginibre(int w, RngStream& rng) {
  Matrix t(w, w);
  const double sd = 1.0 / std::sqrt(2.0 * w);
  for (int i = 0; i < w; ++i)
    for (int j = 0; j < w; ++j) t(i, j) = Complex(rng.normal(sd), 0.0);
  return t;
}

Matrix sample_triangular(int w, RngStream& rng) {
  Matrix t = Matrix::Zero(w, w);
  const double component_sd = 1.0 / std::sqrt(2.0 * w);
  for (int i = 0; i < w; ++i)
    for (int j = 0; j <= i; ++j) t(i, j) = rng.complex_normal(component_sd);
  return t;
}

Matrix sample_mixture(int w, const MixtureSpec& spec, TargetSpace space, RngStream& rng) {
  spec.validate();
  // Categorical draw of the scale atom.
  const double u = rng.uniform();
  double acc = 0.0;
  double lambda = spec.atoms.back().first;
  for (const auto& [lam, weight] : spec.atoms) {
    acc += weight;
    if (u < acc) {
      lambda = lam;
      break;
    }
  }
  // Density exp(-lambda sqrt(m) ||v||^2) on R^m gives per-coordinate variance
  // 1/(2 lambda sqrt(m)).
  const double m = space == TargetSpace::HermitianComplex ? static_cast<double>(w) * w
                                                          : 2.0 * w * w;
  const double coord_sd = 1.0 / std::sqrt(2.0 * lambda * std::sqrt(m));
  if (space == TargetSpace::HermitianComplex) {
    // Isometric coordinates: diagonal entries, then sqrt(2) Re / sqrt(2) Im of
    // the strict lower triangle, so ||v||^2 = tr V^2.
    Matrix v(w, w);
    for (int i = 0; i < w; ++i) {
      v(i, i) = Complex(rng.normal(coord_sd), 0.0);
      for (int j = 0; j < i; ++j) {
        const Complex entry = rng.complex_normal(coord_sd / std::sqrt(2.0));
        v(i, j) = entry;
        v(j, i) = std::conj(entry);
      }
    }
    return v;
  }
  Matrix t(w, w);
  for (int i = 0; i < w; ++i)
    for (int j = 0; j < w; ++j) t(i, j) = rng.complex_normal(coord_sd);
  return t;
}

namespace {

double draw_atom(const MixtureSpec& spec, RngStream& rng) {
  const double u = rng.uniform();
  double acc = 0.0;
  for (const auto& [lambda, weight] : spec.atoms) {
    acc += weight;
    if (u < acc) return lambda;
  }
  return spec.atoms.back().first;
}

}  // namespace

BlockHamiltonian sample_hamiltonian(const ModelParams& params, RngStream& rng) {
  params.validate();
  BlockHamiltonian h;
  h.params = params;
  h.v.reserve(static_cast<std::size_t>(params.n));
  if (params.n > 1) h.t.reserve(static_cast<std::size_t>(params.n - 1));

  auto draw_v = [&]() -> Matrix {
    switch (params.ensemble) {
      case Ensemble::WegnerComplex:
      case Ensemble::TriangularRBM:
        return sample_gue(params.w, rng);
      case Ensemble::WegnerReal:
        return sample_goe(params.w, rng);
      case Ensemble::GaussianMixture: {
        // Conditioned on the atom, the block density is exp(-lambda W tr V^2),
        // i.e. a Wegner block scaled by 1/sqrt(lambda).
        const double lambda = draw_atom(*params.mixture, rng);
        return sample_gue(params.w, rng) / std::sqrt(lambda);
      }
    }
    throw DomainError("unknown ensemble");
  };
  auto draw_t = [&]() -> Matrix {
    switch (params.ensemble) {
      case Ensemble::WegnerComplex:
        return sample_ginibre(params.w, rng);
      case Ensemble::WegnerReal:
        return sample_real_ginibre(params.w, rng);
      case Ensemble::TriangularRBM:
        return sample_triangular(params.w, rng);
      case Ensemble::GaussianMixture: {
        const double lambda = draw_atom(*params.mixture, rng);
        return sample_ginibre(params.w, rng) / std::sqrt(lambda);
      }
    }
    throw DomainError("unknown ensemble");
  };

  for (int j = 0; j < params.n; ++j) {
    h.v.push_back(draw_v());
    if (j + 1 < params.n) h.t.push_back(draw_t());
  }
  return h;
}

Matrix assemble_dense(const BlockHamiltonian& h) {
  const int n = h.params.n;
  const int w = h.params.w;
  Matrix dense = Matrix::Zero(static_cast<Eigen::Index>(n) * w, static_cast<Eigen::Index>(n) * w);
  for (int j = 0; j < n; ++j) {
    dense.block(j * w, j * w, w, w) = h.v[static_cast<std::size_t>(j)];
    if (j + 1 < n) {
      const Matrix& t = h.t[static_cast<std::size_t>(j)];
      dense.block((j + 1) * w, j * w, w, w) = -t;
      dense.block(j * w, (j + 1) * w, w, w) = -t.adjoint();
    }
  }
  return dense;
}

}  // namespace bandloc::ensembles
