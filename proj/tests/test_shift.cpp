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

#include "bandloc/greens.hpp"
#include "bandloc/shift.hpp"

using namespace bandloc;
using namespace bandloc::ensembles;
using namespace bandloc::shift;

namespace {

// Empirical bound constant for ||A||_HS ||Q_A||_HS / W over ramp bonds
// (observed sup ~30.5 across W in {1,...,16} at K = 4).
constexpr double kQBoundConstant = 40.0;

Matrix scalar(double v) { return Matrix::Constant(1, 1, v); }

BlockHamiltonian sampled_chain(int n, int w, std::uint64_t index) {
  ModelParams params;
  params.n = n;
  params.w = w;
  RngStream rng(424242, 0, index);
  return sample_hamiltonian(params, rng);
}

}  // namespace

TEST_CASE("cutoff: plateau, dead zone, midpoint, derivative bound") {
  CutoffSpec spec{4.0};
  CHECK(cutoff(2.0, spec) == 1.0);            // t = K/2
  CHECK(cutoff(12.0, spec) == 0.0);           // t = 3K
  CHECK(cutoff(6.0, spec) == 0.5);            // t = 1.5K: S(1/2) = 1/2
  CHECK(cutoff(4.0, spec) == 1.0);
  CHECK(cutoff(8.0, spec) == 0.0);

  // sup |phi'| = 15 / (8K), attained at the ramp midpoint.
  CHECK(std::abs(cutoff_deriv(6.0, spec)) == doctest::Approx(15.0 / 32.0).epsilon(1e-14));
  double sup = 0.0;
  for (double t = 0.0; t <= 10.0; t += 0.001)
    sup = std::max(sup, std::abs(cutoff_deriv(t, spec)));
  CHECK(sup <= 15.0 / 32.0 + 1e-12);
  CHECK(sup <= 1.0);  // K >= 15/8 keeps the derivative bound

  // Derivative matches finite differences inside the ramp.
  for (double t : {4.3, 5.1, 6.7, 7.9}) {
    const double fd = (cutoff(t + 1e-6, spec) - cutoff(t - 1e-6, spec)) / 2e-6;
    CHECK(cutoff_deriv(t, spec) == doctest::Approx(fd).epsilon(1e-6));
  }

  CHECK_THROWS_AS(CutoffSpec{0.5}.validate(), DomainError);
}

TEST_CASE("f_factor: plateau, dead zone, exact half") {
  const int w = 2;
  CutoffSpec spec{4.0};
  BondQuadruple bond;
  bond.t = 0.5 * Matrix::Identity(w, w);
  bond.v = 0.5 * Matrix::Identity(w, w);
  bond.g = 0.5 * Matrix::Identity(w, w);
  bond.gtilde = 0.5 * Matrix::Identity(w, w);
  CHECK(f_factor(bond, w, spec) == 1.0);

  BondQuadruple dead = bond;
  dead.t = std::sqrt(3.0 * 4.0) * Matrix::Identity(w, w);  // ||T||^2 = 3KW
  CHECK(f_factor(dead, w, spec) == 0.0);

  BondQuadruple half = bond;
  half.t = Matrix::Zero(w, w);  // ||T||^2 = 12 exactly, so ||T||^2/W = 1.5K
  half.t(0, 0) = 2.0;
  half.t(0, 1) = 2.0;
  half.t(1, 0) = 2.0;
  CHECK(f_factor(half, w, spec) == 0.5);
}

TEST_CASE("total_f: boundary and range") {
  const BlockHamiltonian single = sampled_chain(1, 2, 1);
  const greens::GammaChain chain1 = greens::gamma_chain(single, 0.0);
  CutoffSpec spec{4.0};
  CHECK(total_f(single, chain1, spec) == 0.0);

  const BlockHamiltonian h = sampled_chain(20, 2, 2);
  const greens::GammaChain chain = greens::gamma_chain(h, 0.0);
  const double f = total_f(h, chain, spec);
  CHECK(f >= 0.0);
  CHECK(f <= h.params.n - 1.0);
}

TEST_CASE("bond quadruple reproduces the dependent potential block") {
  const BlockHamiltonian h = sampled_chain(8, 3, 3);
  const greens::GammaChain chain = greens::gamma_chain(h, 0.2);
  for (int j = 1; j < h.params.n; ++j) {
    const BondQuadruple bond = bond_quadruple(h, chain, j);
    const Matrix rebuilt =
        bond.g + 0.2 * Matrix::Identity(3, 3) + bond.t * bond.gtilde * bond.t.adjoint();
    CHECK((bond.v - rebuilt).norm() < 1e-12);
  }
}

TEST_CASE("eta: identity at delta 0, dead cutoffs, exact plateau dilation") {
  RngStream rng(31, 0, 0);
  const Matrix a = sample_ginibre(2, rng);
  const Matrix g = sample_gue(2, rng);
  const Matrix gtilde = sample_gue(2, rng);

  ShiftContext ctx;
  ctx.delta = 0.0;
  CHECK((eta(a, g, gtilde, ctx) - a).norm() == 0.0);

  ctx.delta = 0.04;
  const Matrix big_g = 100.0 * Matrix::Identity(2, 2);  // kills gamma
  CHECK((eta(a, big_g, gtilde, ctx) - a).norm() == 0.0);

  // All arguments in the plateau: exact scalar dilation by e^{+-delta}.
  const Matrix small_a = 0.3 * a / hs_norm(a);
  const Matrix small_g = 0.3 * g / hs_norm(g);
  const Matrix small_gt = 0.3 * gtilde / hs_norm(gtilde);
  ctx.sign = +1;
  CHECK((eta(small_a, small_g, small_gt, ctx) - std::exp(0.04) * small_a).norm() == 0.0);
  ctx.sign = -1;
  CHECK((eta(small_a, small_g, small_gt, ctx) - std::exp(-0.04) * small_a).norm() == 0.0);
}

TEST_CASE("eta: regime gate") {
  RngStream rng(32, 0, 0);
  const Matrix a = sample_ginibre(2, rng);
  ShiftContext ctx;
  ctx.delta = 0.05;  // delta W = 0.1, not < 0.1
  CHECK_THROWS_AS(eta(a, a + a.adjoint(), a + a.adjoint(), ctx), RegimeViolation);
}

TEST_CASE("q_vector: zero in plateau, scalar hand value, empirical sup bound") {
  CutoffSpec spec{4.0};
  RngStream rng(33, 0, 0);
  const Matrix a = 0.4 * sample_ginibre(2, rng);
  const Matrix g = 0.4 * sample_gue(2, rng);
  const Matrix gtilde = 0.4 * sample_gue(2, rng);
  CHECK(hs_norm(q_vector(a, g, gtilde, 0.0, 2, spec)) == 0.0);

  // Scalar case: A = 2.5 puts f = 6.25 in the ramp; g stays in the plateau,
  // so Q = phi'(6.25) * 2 * A with phi'(6.25) = -S'(0.5625)/4.
  const Matrix q = q_vector(scalar(2.5), scalar(0.1), scalar(0.1), 0.0, 1, spec);
  const double u = 0.5625;
  const double expected = -(30.0 * u * u * (1.0 - u) * (1.0 - u) / 4.0) * 2.0 * 2.5;
  CHECK(q(0, 0).real() == doctest::Approx(expected).epsilon(1e-13));
  CHECK(q(0, 0).imag() == 0.0);

  // Sampled sup of ||A|| ||Q_A|| stays below the frozen constant times W.
  for (int w : {2, 4, 8}) {
    RngFactory rng_factory(733);
    for (int i = 0; i < 3000; ++i) {
      RngStream stream = rng_factory.stream(static_cast<std::uint64_t>(w), i);
      double z = 0.0;
      const BondQuadruple bond = sample_ramp_bond(w, 4.0, stream, &z);
      const Matrix qa = q_vector(bond.t, bond.g, bond.gtilde, z, w, spec);
      CHECK(hs_norm(bond.t) * hs_norm(qa) <= kQBoundConstant * w);
    }
  }
}

TEST_CASE("eta_derivative: identity, pure dilation, finite differences") {
  RngStream rng(34, 0, 0);
  const Matrix a = sample_ginibre(2, rng);
  const Matrix g = sample_gue(2, rng);
  const Matrix gtilde = sample_gue(2, rng);

  ShiftContext ctx;
  ctx.delta = 0.0;
  CHECK((eta_derivative(a, g, gtilde, ctx) - RealMatrix::Identity(8, 8)).norm() == 0.0);

  // Plateau: Q_A = 0 and the derivative is exp(sigma delta) times identity.
  ctx.delta = 0.03;
  const Matrix small_a = 0.3 * a / hs_norm(a);
  const Matrix small_g = 0.3 * g / hs_norm(g);
  const Matrix small_gt = 0.3 * gtilde / hs_norm(gtilde);
  const RealMatrix deriv = eta_derivative(small_a, small_g, small_gt, ctx);
  CHECK((deriv - std::exp(0.03) * RealMatrix::Identity(8, 8)).norm() < 1e-15);

  // Ramp region: forward map linearization checked against a displacement.
  for (int w : {1, 2, 3}) {
    RngFactory rng_factory(734);
    for (int i = 0; i < 25; ++i) {
      RngStream stream = rng_factory.stream(static_cast<std::uint64_t>(w), i);
      double z = 0.0;
      const BondQuadruple bond = sample_ramp_bond(w, 4.0, stream, &z);
      const Matrix qa = q_vector(bond.t, bond.g, bond.gtilde, z, w, ctx.cutoff);
      const double m_norm = hs_norm(bond.t) * hs_norm(qa);
      ShiftContext local = ctx;
      local.z = z;
      local.delta = std::min(0.04 / w, m_norm > 0.0 ? 0.3 / m_norm : 1.0);
      const RealMatrix analytic = eta_derivative(bond.t, bond.g, bond.gtilde, local);

      const double step = 1e-6 * (1.0 + hs_norm(bond.t));
      const int dim = 2 * w * w;
      RealMatrix numeric(dim, dim);
      const RealVector base = realify(bond.t);
      for (int k = 0; k < dim; ++k) {
        RealVector fwd = base, bwd = base;
        fwd(k) += step;
        bwd(k) -= step;
        numeric.col(k) = (realify(eta(unrealify(fwd, w), bond.g, bond.gtilde, local)) -
                          realify(eta(unrealify(bwd, w), bond.g, bond.gtilde, local))) /
                         (2.0 * step);
      }
      const double err = (analytic - numeric).cwiseAbs().maxCoeff() /
                         (1.0 + analytic.cwiseAbs().maxCoeff());
      CHECK(err < 1e-6);
    }
  }
}

TEST_CASE("jacobian determinant pair") {
  RngStream rng(35, 0, 0);
  const Matrix a = sample_ginibre(2, rng);
  const Matrix g = sample_gue(2, rng);
  const Matrix gtilde = sample_gue(2, rng);

  ShiftContext ctx;
  ctx.delta = 0.0;
  JacobianPair identity_pair = jacobian_det_pair(a, g, gtilde, ctx);
  CHECK(identity_pair.j_plus == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(identity_pair.j_minus == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(identity_pair.product == doctest::Approx(1.0).epsilon(1e-12));

  // Plateau: Q_A = 0, the exponential prefactors cancel in the product.
  ctx.delta = 0.04;
  const Matrix small_a = 0.3 * a / hs_norm(a);
  const Matrix small_g = 0.3 * g / hs_norm(g);
  const Matrix small_gt = 0.3 * gtilde / hs_norm(gtilde);
  const JacobianPair plateau = jacobian_det_pair(small_a, small_g, small_gt, ctx);
  CHECK(plateau.j_plus == doctest::Approx(std::exp(2.0 * 4.0 * 0.04)).epsilon(1e-10));
  CHECK(plateau.product == doctest::Approx(1.0).epsilon(1e-10));

  // Product lower bound with the proof-safe constant 2 over ramp trials
  // (valid whenever delta ||M_A|| < 1/2).
  for (int w : {1, 2, 3}) {
    RngFactory rng_factory(735);
    for (int i = 0; i < 300; ++i) {
      RngStream stream = rng_factory.stream(static_cast<std::uint64_t>(w), i);
      double z = 0.0;
      const BondQuadruple bond = sample_ramp_bond(w, 4.0, stream, &z);
      const Matrix qa = q_vector(bond.t, bond.g, bond.gtilde, z, w, ctx.cutoff);
      const double m_norm = hs_norm(bond.t) * hs_norm(qa);
      ShiftContext local = ctx;
      local.z = z;
      local.delta = std::min(0.04 / w, m_norm > 0.0 ? 0.3 / m_norm : 1.0);
      const JacobianPair pair = jacobian_det_pair(bond.t, bond.g, bond.gtilde, local);
      const double scale =
          local.delta * local.delta * hs_norm_sq(bond.t) * hs_norm_sq(qa);
      CHECK(pair.product >= std::exp(-2.0 * scale) * (1.0 - 1e-9));
    }
  }

  // Outside the rank-one regime the pair refuses to evaluate.
  ShiftContext hot;
  hot.delta = 0.045;
  bool saw_violation = false;
  RngFactory rng_factory(736);
  for (int i = 0; i < 200 && !saw_violation; ++i) {
    RngStream stream = rng_factory.stream(2, i);
    double z = 0.0;
    const BondQuadruple bond = sample_ramp_bond(2, 4.0, stream, &z);
    const Matrix qa = q_vector(bond.t, bond.g, bond.gtilde, z, 2, hot.cutoff);
    if (hot.delta * hs_norm(bond.t) * hs_norm(qa) >= 0.5) {
      hot.z = z;
      CHECK_THROWS_AS(jacobian_det_pair(bond.t, bond.g, bond.gtilde, hot), RegimeViolation);
      saw_violation = true;
    }
  }
  CHECK(saw_violation);
}

TEST_CASE("injectivity witness: eta contracts distances by at most a half") {
  for (int w : {1, 2, 3}) {
    RngFactory rng_factory(737);
    for (int i = 0; i < 3400; ++i) {
      RngStream stream = rng_factory.stream(static_cast<std::uint64_t>(w), i);
      double z = 0.0;
      const BondQuadruple bond = sample_ramp_bond(w, 4.0, stream, &z);
      const Matrix qa = q_vector(bond.t, bond.g, bond.gtilde, z, w, CutoffSpec{4.0});
      const double m_norm = hs_norm(bond.t) * hs_norm(qa);
      ShiftContext ctx;
      ctx.z = z;
      ctx.delta = std::min(0.04 / w, m_norm > 0.0 ? 0.3 / m_norm : 1.0);
      const Matrix other =
          sample_ginibre(w, stream) * std::sqrt(w * stream.uniform(0.5, 8.0));
      const Matrix ea = eta(bond.t, bond.g, bond.gtilde, ctx);
      const Matrix eb = eta(other, bond.g, bond.gtilde, ctx);
      const double dist = (bond.t - other).norm();
      if (dist < 1e-12) continue;
      CHECK((ea - eb).norm() >= 0.5 * dist);
      // In particular equal images force equal arguments.
      if ((ea - eb).norm() == 0.0) CHECK(dist < 1e-9);
    }
  }
}

TEST_CASE("energy remainder") {
  const BlockHamiltonian h = sampled_chain(6, 2, 4);
  const greens::GammaChain chain = greens::gamma_chain(h, 0.0);

  ShiftContext ctx;
  ctx.delta = 0.0;
  CHECK(remainder(h, chain, ctx) == 0.0);

  // Dead cutoffs: every bond has gamma = 0, the shift is the identity.
  BlockHamiltonian frozen = h;
  for (Matrix& v : frozen.v) v = 40.0 * Matrix::Identity(2, 2);
  const greens::GammaChain frozen_chain = greens::gamma_chain(frozen, 0.0);
  ctx.delta = 0.04;
  CHECK(remainder(frozen, frozen_chain, ctx) == 0.0);

  // Direct-hopping term of the plus/minus average: cosh(2 delta F) - 1.
  CHECK(hopping_remainder_term(1.0, 1.0, 0.1) ==
        doctest::Approx(std::cosh(0.2) - 1.0).epsilon(1e-15));

  // Direct energy evaluation agrees with the per-bond closed form
  //   R_j = (cosh(2dF) - 1)(||T||^2 + 2 Re<V, P>)
  //       + ((e^{2dF} - 1)^2 + (e^{-2dF} - 1)^2)/2 ||P||^2,  P = T Gtilde T^*.
  ctx.delta = 0.04;
  const double direct = remainder(h, chain, ctx);
  double closed = 0.0;
  for (int j = 1; j < h.params.n; ++j) {
    const BondQuadruple bond = bond_quadruple(h, chain, j);
    const double f = f_factor(bond, 2, ctx.cutoff);
    const Matrix p = bond.t * bond.gtilde * bond.t.adjoint();
    const double e_up = std::exp(2.0 * ctx.delta * f) - 1.0;
    const double e_dn = std::exp(-2.0 * ctx.delta * f) - 1.0;
    closed += hopping_remainder_term(hs_norm_sq(bond.t), f, ctx.delta);
    closed += (std::cosh(2.0 * ctx.delta * f) - 1.0) * 2.0 * hs_inner_re(bond.v, p);
    closed += 0.5 * (e_up * e_up + e_dn * e_dn) * hs_norm_sq(p);
  }
  CHECK(direct == doctest::Approx(closed).epsilon(1e-9));
}

TEST_CASE("delta rule") {
  // alpha = sqrt(n / W^sharp) with phi = 1/12, n = 144, W = 2, sharp = 3.
  const double delta = delta_rule(-1.0, 1.0 / 12.0, 144, 2, 3);
  CHECK(delta == doctest::Approx(1.0606601717798212).epsilon(1e-12));
  // The resulting shift is far outside the small-deformation regime.
  RngStream rng(36, 0, 0);
  const Matrix a = sample_ginibre(2, rng);
  ShiftContext ctx;
  ctx.delta = delta;
  CHECK_THROWS_AS(eta(a, Matrix::Zero(2, 2), Matrix::Zero(2, 2), ctx), RegimeViolation);

  // delta * sqrt(n W^sharp) = 3 / phi exactly.
  for (int n : {64, 1024, 65536}) {
    const double d = delta_rule(-1.0, 1.0 / 12.0, n, 4, 3);
    CHECK(d * std::sqrt(n * 64.0) == doctest::Approx(36.0).epsilon(1e-12));
  }
  CHECK(delta_rule(-1.0, 1.0 / 12.0, 100000, 2, 3) <
        delta_rule(-1.0, 1.0 / 12.0, 1000, 2, 3));

  CHECK_THROWS_AS(delta_rule(-1.0, 0.2, 100, 2, 3), DomainError);
  CHECK_THROWS_AS(delta_rule(-1.0, 1.0 / 12.0, 100, 2, 2), DomainError);
}

TEST_CASE("event membership") {
  // Comfortable sample: resolvent blocks small, hoppings tiny.
  BlockHamiltonian calm;
  calm.params.n = 4;
  calm.params.w = 2;
  for (int j = 0; j < 4; ++j) calm.v.push_back(2.0 * Matrix::Identity(2, 2));
  for (int j = 0; j < 3; ++j) calm.t.push_back(0.1 * Matrix::Identity(2, 2));
  const greens::GammaChain calm_chain = greens::gamma_chain(calm, 0.0);
  CutoffSpec spec{4.0};
  const EventFlags calm_flags = event_membership(calm, calm_chain, spec, 1.0 / 12.0, 3.0);
  CHECK(calm_flags.m_phi);
  CHECK(calm_flags.m1);
  CHECK(calm_flags.m2);
  CHECK(calm_flags.m3);
  CHECK(calm_flags.m4);

  // Huge potentials kill every cutoff factor, so F = 0 < phi n.
  BlockHamiltonian hot = calm;
  for (Matrix& v : hot.v) v = 50.0 * Matrix::Identity(2, 2);
  const greens::GammaChain hot_chain = greens::gamma_chain(hot, 0.0);
  const EventFlags hot_flags = event_membership(hot, hot_chain, spec, 1.0 / 12.0, 3.0);
  CHECK(hot_flags.total_f == 0.0);
  CHECK_FALSE(hot_flags.m_phi);

  CHECK_THROWS_AS(event_membership(calm, calm_chain, spec, 1.0 / 12.0, 5.0, 16.0),
                  DomainError);  // C >= sqrt(K)
}

TEST_CASE("plateau exactness of the bond factor") {
  // Whenever every cutoff argument is at most K, F_j = 1 exactly.
  RngFactory rng_factory(738);
  CutoffSpec spec{4.0};
  int plateau_bonds = 0;
  for (int i = 0; i < 50 && plateau_bonds < 20; ++i) {
    const BlockHamiltonian h = sampled_chain(10, 2, 1000 + i);
    const greens::GammaChain chain = greens::gamma_chain(h, 0.0);
    for (int j = 1; j < h.params.n; ++j) {
      const BondQuadruple bond = bond_quadruple(h, chain, j);
      const double w2 = 4.0;
      if (hs_norm_sq(bond.t) / 2.0 <= spec.k && hs_norm_sq(bond.v) / w2 <= spec.k &&
          hs_norm_sq(bond.g) / w2 <= spec.k && hs_norm_sq(bond.gtilde) / w2 <= spec.k) {
        CHECK(f_factor(bond, 2, spec) == 1.0);
        ++plateau_bonds;
      }
    }
  }
  CHECK(plateau_bonds >= 20);
}
