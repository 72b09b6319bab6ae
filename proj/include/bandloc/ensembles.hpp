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

#include <optional>
#include <string>
#include <vector>

#include "bandloc/rng.hpp"
#include "bandloc/types.hpp"

namespace bandloc::ensembles {

// Block ensemble variants.
//
// The joint density of the model is proportional to
//   exp(-W tr(sum_j |V_j|^2 + sum_j |T_j|^2)),
// so the per-entry variances below are derived from the trace form rather
// than taken from a table:
//   Hermitian complex V:  tr V^2 = sum_i V_ii^2 + 2 sum_{i<j} |V_ij|^2
//     -> diagonal real N(0, 1/(2W)), off-diagonal E|V_ij|^2 = 1/(2W).
//   General complex T:    tr |T|^2 = sum_ij |T_ij|^2
//     -> every entry E|T_ij|^2 = 1/W.
//   Real symmetric / real general: same trace forms on the real subspaces,
//     halving the off-diagonal component count.
// The moment tests lock these identities in (E tr V^2 = W/2 and
// E tr |T|^2 = W for the complex Wegner ensemble).
enum class Ensemble {
  WegnerComplex,
  WegnerReal,
  TriangularRBM,
  GaussianMixture,
};

std::string ensemble_name(Ensemble e);
Ensemble ensemble_from_name(const std::string& name);

// Finite-atom approximation of a mixing measure on (0, D]: Gaussian scale
// atoms lambda with categorical weights.
struct MixtureSpec {
  double support_bound = 0.0;                  // D
  std::vector<std::pair<double, double>> atoms;  // (lambda, weight)

  // Throws DomainError if atoms are empty, any lambda falls outside (0, D],
  // or the weights do not sum to one.
  void validate() const;
};

struct ModelParams {
  int n = 1;
  int w = 1;
  Ensemble ensemble = Ensemble::WegnerComplex;
  double z = 0.0;
  std::optional<MixtureSpec> mixture;
  // Energy cap coefficient: |z| <= energy_cap_coeff * sqrt(W) is the regime
  // the decay estimates target; exceeding it only warns.
  double energy_cap_coeff = 2.0;

  // Throws DomainError on hard violations; returns human-readable warnings
  // for soft ones (the energy cap).
  std::vector<std::string> validate() const;
};

// Sampled blocks of the block-tridiagonal Hamiltonian. Immutable after
// construction; safe to share across threads.
struct BlockHamiltonian {
  std::vector<Matrix> v;  // n Hermitian W x W diagonal blocks
  std::vector<Matrix> t;  // n-1 general W x W hopping blocks
  ModelParams params;
};

// GUE block with density exp(-W tr V^2): exactly Hermitian by construction
// (lower triangle sampled, upper mirrored).
Matrix sample_gue(int w, RngStream& rng);

// Complex Ginibre block with density exp(-W tr |T|^2).
Matrix sample_ginibre(int w, RngStream& rng);

// Real counterparts (GOE and real Ginibre) with the same trace densities on
// the real vector spaces.
Matrix sample_goe(int w, RngStream& rng);
Matrix sample_real_ginibre(int w, RngStream& rng);

// Lower-triangular hopping block: strict upper triangle is exactly zero and
// every kept complex entry has E|t|^2 = 1/W, so exp(-W tr|T|^2) restricted to
// the triangular subspace is the sampling density.
Matrix sample_triangular(int w, RngStream& rng);

enum class TargetSpace { HermitianComplex, GeneralComplex };

// One draw from the mixture-of-Gaussians density
//   f(v) = sum_k weight_k exp(-lambda_k sqrt(m) ||v||^2)
// on the realified target space of dimension m (m = W^2 for Hermitian
// complex, 2W^2 for general complex), with ||.|| the Euclidean norm that
// matches tr V^2 resp. tr |T|^2.
Matrix sample_mixture(int w, const MixtureSpec& spec, TargetSpace space, RngStream& rng);

// Draws all blocks of the model. For GaussianMixture the per-block scale
// lambda is drawn independently for every block and the block is sampled
// from exp(-lambda W tr|.|^2), i.e. a Wegner block scaled by 1/sqrt(lambda);
// the single-atom lambda = 1 mixture therefore reproduces WegnerComplex in
// law exactly.
BlockHamiltonian sample_hamiltonian(const ModelParams& params, RngStream& rng);

// Assembles the dense nW x nW matrix with diagonal blocks V_j and hopping
// blocks -T_j below / -T_j^* above the diagonal. Exactly Hermitian.
Matrix assemble_dense(const BlockHamiltonian& h);

}  // namespace bandloc::ensembles
