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

#include <cstdint>
#include <utility>
#include <vector>

#include "bandloc/ensembles.hpp"
#include "bandloc/rng.hpp"
#include "bandloc/types.hpp"

namespace bandloc::moments {

using ensembles::BlockHamiltonian;
using ensembles::ModelParams;

struct MomentEstimate {
  double s = 0.5;
  int distance = 0;
  double mean = 0.0;
  double stderr_mean = 0.0;
  std::int64_t n_samples = 0;
  std::int64_t n_excluded = 0;
};

struct MomentSeries {
  int w = 1;
  double z = 0.0;
  double s = 0.5;
  std::string ensemble;
  std::vector<MomentEstimate> estimates;  // distances strictly increasing

  void validate() const;
};

struct DecayFit {
  double xi = 0.0;         // localization length in blocks
  double mu = 0.0;         // decay rate, 1/xi
  double intercept = 0.0;
  double r_squared = 0.0;
  double xi_stderr = 0.0;
  double mu_stderr = 0.0;
};

// Monte Carlo estimate of E ||G(x, y; z)||^s over i.i.d. Hamiltonian samples.
// Uses the renormalized corner factorization when (x, y) = (1, n) and the
// dense oracle otherwise. Samples flagged ExactlySingular are dropped and
// counted in n_excluded.
MomentEstimate fractional_moment(const ModelParams& params, double s, int x, int y,
                                 std::int64_t n_samples, const RngFactory& rng,
                                 std::uint64_t salt = 0, int threads = 1);

// E ||G(1, n; z)||^s across a list of chain lengths; the a-priori bound says
// this family stays bounded uniformly in n.
std::vector<MomentEstimate> apriori_envelope(int w, double z, double s,
                                             const std::vector<int>& n_list,
                                             std::int64_t n_samples, const RngFactory& rng,
                                             std::uint64_t salt = 0, int threads = 1);

// Weighted least squares of log(mean) against distance; weights come from
// the stderr of each mean through the delta method. Throws NonDecaying when
// the fitted slope is >= 0 and DomainError for fewer than 4 distances or
// non-positive means.
DecayFit fit_localization_length(const MomentSeries& series);

// f_{r,s}(q) = (1/s) min(r, q) (s - max(r, q)) for 0 < r < s < 1, q in (0, s).
double f_weight(double r, double s, double q);

struct TiltedStats {
  double mean = 0.0;
  double variance = 0.0;
  double effective_sample_size = 0.0;
};

// Self-normalized exponentially tilted mean and variance with weights
// e^{q X_i} (stabilized by subtracting max X_i). Throws DegenerateWeights if
// the effective sample size drops below 10.
TiltedStats tilted_stats(const std::vector<double>& samples, double q);

// Finite discrete distribution of a positive scalar.
struct DiscreteDistribution {
  std::vector<double> values;
  std::vector<double> weights;

  void validate() const;  // positive weights summing to 1
  double moment(double power) const;
  // Exact tilted variance of log(Y) under weights e^{q log Y}.
  double tilted_log_variance(double q) const;
};

struct IdentityCheck {
  double lhs = 0.0;
  double rhs = 0.0;
  double gap = 0.0;
};

// Checks E[Y^r] = E[Y^s]^{r/s} exp(-int_0^s f_{r,s}(q) Var_q[log Y] dq) on a
// finite positive distribution: the left side exactly, the right side with
// adaptive Gauss-Kronrod quadrature split at the kink q = r.
IdentityCheck log_variance_identity_check(const DiscreteDistribution& dist, double r, double s,
                                          double quad_tolerance = 1e-9);

// Per-sample eigenvector correlator sum_k |psi_k(i) psi_k(j)| from full
// diagonalization; 1-based site indices in {1, ..., nW}. Throws CapExceeded
// when nW exceeds the dense diagonalization cap.
double eigen_correlator(const BlockHamiltonian& h, int i, int j,
                        int dense_cap = 4096);

}  // namespace bandloc::moments
