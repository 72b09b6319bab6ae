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

#include <doctest.h>

#include "bandloc/ensembles.hpp"
#include "bandloc/stats.hpp"

using namespace bandloc;
using namespace bandloc::ensembles;

namespace {

// Monte Carlo mean of statistic over draws; asserts agreement with the
// expected closed form within 4 standard errors.
template <typename Draw, typename Statistic>
void check_moment(Draw draw, Statistic statistic, double expected, int n_samples,
                  std::uint64_t salt) {
  RngFactory rng(20260810);
  OnlineMoments acc;
  for (int i = 0; i < n_samples; ++i) {
    RngStream stream = rng.stream(salt, static_cast<std::uint64_t>(i));
    acc.add(statistic(draw(stream)));
  }
  const double tolerance = 4.0 * acc.stderr_mean();
  INFO("mean ", acc.mean(), " expected ", expected, " tol ", tolerance);
  CHECK(std::abs(acc.mean() - expected) <= tolerance);
}

double trace_sq(const Matrix& v) { return (v * v).trace().real(); }

}  // namespace

TEST_CASE("gue block is exactly hermitian") {
  RngStream rng(1, 0, 0);
  for (int w : {1, 2, 5}) {
    const Matrix v = sample_gue(w, rng);
    CHECK((v - v.adjoint()).norm() == 0.0);
  }
}

TEST_CASE("gue moments match the trace density") {
  // W = 1: scalar with density exp(-v^2), E[V^2] = 1/2.
  check_moment([](RngStream& s) { return sample_gue(1, s); },
               [](const Matrix& v) { return std::norm(v(0, 0)); }, 0.5, 100000, 11);
  // Any W: E[tr V^2] = W/2.
  check_moment([](RngStream& s) { return sample_gue(3, s); }, trace_sq, 1.5, 100000, 12);
  check_moment([](RngStream& s) { return sample_gue(6, s); }, trace_sq, 3.0, 50000, 13);
}

TEST_CASE("ginibre moments match the trace density") {
  // E[tr |T|^2] = W.
  check_moment([](RngStream& s) { return sample_ginibre(1, s); }, hs_norm_sq, 1.0, 100000, 21);
  check_moment([](RngStream& s) { return sample_ginibre(4, s); }, hs_norm_sq, 4.0, 50000, 22);
}

TEST_CASE("real variants: no imaginary parts and calibrated traces") {
  RngStream rng(2, 0, 0);
  const Matrix goe = sample_goe(5, rng);
  CHECK(goe.imag().norm() == 0.0);
  CHECK((goe - goe.adjoint()).norm() == 0.0);
  const Matrix gin = sample_real_ginibre(5, rng);
  CHECK(gin.imag().norm() == 0.0);

  // GOE: E[tr V^2] = W/(2W) + W(W-1)/(4W) = 1/2 + (W-1)/4.
  check_moment([](RngStream& s) { return sample_goe(4, s); }, trace_sq, 0.5 + 3.0 / 4.0,
               50000, 31);
  // Real Ginibre: E[tr T^T T] = W^2 / (2W) = W/2.
  check_moment([](RngStream& s) { return sample_real_ginibre(4, s); }, hs_norm_sq, 2.0,
               50000, 32);
}

TEST_CASE("triangular hoppings: strict upper triangle vanishes") {
  RngStream rng(3, 0, 0);
  const int w = 4;
  const Matrix t = sample_triangular(w, rng);
  for (int i = 0; i < w; ++i)
    for (int j = i + 1; j < w; ++j) CHECK(t(i, j) == Complex(0.0, 0.0));
  // Kept entries all carry E|t|^2 = 1/W: E tr|T|^2 = (W+1)/2.
  check_moment([](RngStream& s) { return sample_triangular(4, s); }, hs_norm_sq, 2.5,
               50000, 33);
}

TEST_CASE("sampling is deterministic in (seed, stream)") {
  RngStream a(42, 7, 3), b(42, 7, 3);
  const Matrix va = sample_gue(4, a);
  const Matrix vb = sample_gue(4, b);
  CHECK((va - vb).norm() == 0.0);

  ModelParams params;
  params.n = 5;
  params.w = 3;
  RngStream c(9, 1, 2), d(9, 1, 2);
  const BlockHamiltonian ha = sample_hamiltonian(params, c);
  const BlockHamiltonian hb = sample_hamiltonian(params, d);
  for (int j = 0; j < params.n; ++j) CHECK((ha.v[j] - hb.v[j]).norm() == 0.0);
  for (int j = 0; j + 1 < params.n; ++j) CHECK((ha.t[j] - hb.t[j]).norm() == 0.0);
}

TEST_CASE("hamiltonian block counts and variants") {
  RngStream rng(4, 0, 0);
  ModelParams params;
  params.n = 1;
  params.w = 3;
  const BlockHamiltonian h1 = sample_hamiltonian(params, rng);
  CHECK(h1.v.size() == 1);
  CHECK(h1.t.size() == 0);

  params.n = 6;
  params.w = 4;
  params.ensemble = Ensemble::TriangularRBM;
  const BlockHamiltonian ht = sample_hamiltonian(params, rng);
  for (const Matrix& t : ht.t)
    for (int i = 0; i < params.w; ++i)
      for (int j = i + 1; j < params.w; ++j) CHECK(t(i, j) == Complex(0.0, 0.0));

  params.ensemble = Ensemble::WegnerReal;
  const BlockHamiltonian hr = sample_hamiltonian(params, rng);
  for (const Matrix& v : hr.v) CHECK(v.imag().norm() == 0.0);
  for (const Matrix& t : hr.t) CHECK(t.imag().norm() == 0.0);
}

TEST_CASE("single-atom mixture with lambda 1 reproduces the complex model") {
  MixtureSpec spec;
  spec.support_bound = 2.0;
  spec.atoms = {{1.0, 1.0}};
  ModelParams params;
  params.n = 2;
  params.w = 3;
  params.ensemble = Ensemble::GaussianMixture;
  params.mixture = spec;

  auto draw_t = [&params](RngStream& s) { return sample_hamiltonian(params, s).t[0]; };
  auto draw_v = [&params](RngStream& s) { return sample_hamiltonian(params, s).v[0]; };
  check_moment(draw_t, hs_norm_sq, 3.0, 50000, 41);  // E tr|T|^2 = W
  check_moment(draw_v, trace_sq, 1.5, 50000, 42);    // E tr V^2 = W/2
}

TEST_CASE("mixture blocks: closed-form second moments") {
  // Single atom: E||v||^2 = sqrt(m) / (2 lambda).
  MixtureSpec one;
  one.support_bound = 4.0;
  one.atoms = {{2.0, 1.0}};
  const int w = 3;
  const double m_herm = static_cast<double>(w) * w;
  check_moment(
      [&](RngStream& s) { return sample_mixture(w, one, TargetSpace::HermitianComplex, s); },
      trace_sq, std::sqrt(m_herm) / 4.0, 50000, 51);

  // Two equal atoms lambda in {1, 4}: average of the per-atom moments.
  MixtureSpec two;
  two.support_bound = 4.0;
  two.atoms = {{1.0, 0.5}, {4.0, 0.5}};
  const double m_gen = 2.0 * w * w;
  const double expected = 0.5 * (std::sqrt(m_gen) / 2.0 + std::sqrt(m_gen) / 8.0);
  check_moment(
      [&](RngStream& s) { return sample_mixture(w, two, TargetSpace::GeneralComplex, s); },
      hs_norm_sq, expected, 50000, 52);
}

TEST_CASE("mixture atom frequencies follow the weights") {
  // Atoms separated enough that the draw is identifiable from the norm.
  MixtureSpec spec;
  spec.support_bound = 1e6;
  spec.atoms = {{1.0, 0.3}, {1e6, 0.7}};
  RngFactory rng(5);
  const int n = 20000;
  int macroscopic = 0;
  for (int i = 0; i < n; ++i) {
    RngStream stream = rng.stream(53, static_cast<std::uint64_t>(i));
    const Matrix v = sample_mixture(2, spec, TargetSpace::GeneralComplex, stream);
    if (hs_norm_sq(v) > 1e-3) ++macroscopic;  // lambda = 1 draws
  }
  const double p = static_cast<double>(macroscopic) / n;
  const double sigma = std::sqrt(0.3 * 0.7 / n);
  CHECK(std::abs(p - 0.3) <= 3.0 * sigma);
}

TEST_CASE("mixture validation") {
  MixtureSpec empty;
  empty.support_bound = 1.0;
  CHECK_THROWS_AS(empty.validate(), DomainError);

  MixtureSpec bad_support;
  bad_support.support_bound = 1.0;
  bad_support.atoms = {{2.0, 1.0}};  // atom above D
  CHECK_THROWS_AS(bad_support.validate(), DomainError);

  MixtureSpec bad_weights;
  bad_weights.support_bound = 1.0;
  bad_weights.atoms = {{0.5, 0.4}, {0.7, 0.4}};
  CHECK_THROWS_AS(bad_weights.validate(), DomainError);
}

TEST_CASE("assemble_dense: boundary, hand value, exact hermiticity") {
  BlockHamiltonian h;
  h.params.n = 1;
  h.params.w = 2;
  h.v = {Matrix::Identity(2, 2)};
  CHECK((assemble_dense(h) - Matrix::Identity(2, 2)).norm() == 0.0);

  BlockHamiltonian pair;
  pair.params.n = 2;
  pair.params.w = 1;
  pair.v = {Matrix::Constant(1, 1, 2.0), Matrix::Constant(1, 1, 0.0)};
  pair.t = {Matrix::Constant(1, 1, 1.0)};
  Matrix expected(2, 2);
  expected << 2.0, -1.0, -1.0, 0.0;
  CHECK((assemble_dense(pair) - expected).norm() == 0.0);

  RngStream rng(6, 0, 0);
  ModelParams params;
  params.n = 5;
  params.w = 3;
  const Matrix dense = assemble_dense(sample_hamiltonian(params, rng));
  CHECK((dense - dense.adjoint()).norm() == 0.0);
}

TEST_CASE("model validation: energy cap warns instead of failing") {
  ModelParams params;
  params.n = 0;
  CHECK_THROWS_AS(params.validate(), DomainError);

  params.n = 2;
  params.w = 4;
  params.z = 100.0;
  const auto warnings = params.validate();
  REQUIRE(warnings.size() == 1);
  CHECK(warnings[0].find("cap") != std::string::npos);
}
