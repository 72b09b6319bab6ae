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

#include "bandloc/shift.hpp"

#include <cmath>

namespace bandloc::shift {

void CutoffSpec::validate() const {
  if (!(k >= 1.0)) throw DomainError("cutoff: K must be >= 1");
}

namespace {

// Quintic smoothstep S(u) = 6u^5 - 15u^4 + 10u^3 on [0, 1].
double smoothstep(double u) { return u * u * u * (10.0 + u * (-15.0 + 6.0 * u)); }
double smoothstep_deriv(double u) {
  const double v = u * (1.0 - u);
  return 30.0 * v * v;
}

}  // namespace

double cutoff(double t, const CutoffSpec& spec) {
  if (t <= spec.k) return 1.0;
  if (t >= 2.0 * spec.k) return 0.0;
  return 1.0 - smoothstep((t - spec.k) / spec.k);
}

double cutoff_deriv(double t, const CutoffSpec& spec) {
  if (t <= spec.k || t >= 2.0 * spec.k) return 0.0;
  return -smoothstep_deriv((t - spec.k) / spec.k) / spec.k;
}

BondQuadruple bond_quadruple(const BlockHamiltonian& h, const GammaChain& chain, int j) {
  const int n = h.params.n;
  if (j < 1 || j >= n) throw DomainError("bond_quadruple: bond index out of range");
  BondQuadruple bond;
  bond.t = h.t[static_cast<std::size_t>(j - 1)];
  bond.g = chain.gammas[static_cast<std::size_t>(j)];
  bond.gtilde = chain.inverses[static_cast<std::size_t>(j - 1)];
  bond.v = h.v[static_cast<std::size_t>(j)];
  return bond;
}

double f_factor(const BondQuadruple& bond, int w, const CutoffSpec& spec) {
  const double w2 = static_cast<double>(w) * w;
  return cutoff(hs_norm_sq(bond.t) / w, spec) * cutoff(hs_norm_sq(bond.v) / w2, spec) *
         cutoff(hs_norm_sq(bond.g) / w2, spec) * cutoff(hs_norm_sq(bond.gtilde) / w2, spec);
}

double total_f(const BlockHamiltonian& h, const GammaChain& chain, const CutoffSpec& spec) {
  double sum = 0.0;
  for (int j = 1; j < h.params.n; ++j) sum += f_factor(bond_quadruple(h, chain, j), h.params.w, spec);
  return sum;
}

double gamma_factor(const Matrix& g, const Matrix& gtilde, int w, const CutoffSpec& spec) {
  const double w2 = static_cast<double>(w) * w;
  return cutoff(hs_norm_sq(g) / w2, spec) * cutoff(hs_norm_sq(gtilde) / w2, spec);
}

double phi_exponent(const Matrix& a, const Matrix& g, const Matrix& gtilde,
                    const ShiftContext& ctx) {
  const int w = static_cast<int>(a.rows());
  const double w2 = static_cast<double>(w) * w;
  const double gamma = gamma_factor(g, gtilde, w, ctx.cutoff);
  if (gamma == 0.0) return 0.0;
  const Matrix dependent_v =
      g + ctx.z * Matrix::Identity(w, w) + a * gtilde * a.adjoint();
  return gamma * cutoff(hs_norm_sq(a) / w, ctx.cutoff) *
         cutoff(hs_norm_sq(dependent_v) / w2, ctx.cutoff);
}

namespace {

void check_regime(const ShiftContext& ctx, int w) {
  if (!(ctx.delta * w < kRegimeLimit))
    throw RegimeViolation("shift: delta * W = " + std::to_string(ctx.delta * w) +
                          " outside the injectivity regime (< " +
                          std::to_string(kRegimeLimit) + ")");
  if (ctx.sign != 1 && ctx.sign != -1) throw DomainError("shift: sign must be +1 or -1");
}

}  // namespace

Matrix eta(const Matrix& a, const Matrix& g, const Matrix& gtilde, const ShiftContext& ctx) {
  check_regime(ctx, static_cast<int>(a.rows()));
  const double exponent = ctx.sign * ctx.delta * phi_exponent(a, g, gtilde, ctx);
  return std::exp(exponent) * a;
}

Matrix q_vector(const Matrix& a, const Matrix& g, const Matrix& gtilde, double z, int w,
                const CutoffSpec& spec) {
  const double w2 = static_cast<double>(w) * w;
  const double gamma = gamma_factor(g, gtilde, w, spec);
  Matrix q = Matrix::Zero(w, w);
  if (gamma == 0.0) return q;

  const Matrix g_z = g + z * Matrix::Identity(w, w);
  const Matrix a_gtilde = a * gtilde;
  const Matrix dependent_v = g_z + a_gtilde * a.adjoint();
  const double f_arg = hs_norm_sq(a) / w;
  const double g_arg = hs_norm_sq(dependent_v) / w2;

  const double d_f = cutoff_deriv(f_arg, spec);
  if (d_f != 0.0) q += gamma * d_f * cutoff(g_arg, spec) * (2.0 / w) * a;
  const double d_g = cutoff_deriv(g_arg, spec);
  if (d_g != 0.0) {
    const Matrix inner = g_z * a_gtilde + a_gtilde * (a.adjoint() * a_gtilde);
    q += gamma * cutoff(f_arg, spec) * d_g * (4.0 / w2) * inner;
  }
  return q;
}

RealMatrix eta_derivative(const Matrix& a, const Matrix& g, const Matrix& gtilde,
                          const ShiftContext& ctx) {
  const int w = static_cast<int>(a.rows());
  check_regime(ctx, w);
  const double phi = phi_exponent(a, g, gtilde, ctx);
  const Matrix q = q_vector(a, g, gtilde, ctx.z, w, ctx.cutoff);
  const RealVector a_vec = realify(a);
  const RealVector q_vec = realify(q);
  const int dim = 2 * w * w;
  RealMatrix deriv = RealMatrix::Identity(dim, dim);
  deriv.noalias() += (ctx.sign * ctx.delta) * a_vec * q_vec.transpose();
  deriv *= std::exp(ctx.sign * ctx.delta * phi);
  return deriv;
}

JacobianPair jacobian_det_pair(const Matrix& a, const Matrix& g, const Matrix& gtilde,
                               const ShiftContext& ctx) {
  const int w = static_cast<int>(a.rows());
  check_regime(ctx, w);
  const Matrix q = q_vector(a, g, gtilde, ctx.z, w, ctx.cutoff);
  const double rank_one_norm = hs_norm(a) * hs_norm(q);  // ||M_A||_op
  if (!(ctx.delta * rank_one_norm < 0.5))
    throw RegimeViolation("jacobian: delta ||M_A|| = " +
                          std::to_string(ctx.delta * rank_one_norm) + " >= 1/2");

  ShiftContext plus = ctx;
  plus.sign = +1;
  ShiftContext minus = ctx;
  minus.sign = -1;
  const RealMatrix d_plus = eta_derivative(a, g, gtilde, plus);
  const RealMatrix d_minus = eta_derivative(a, g, gtilde, minus);

  JacobianPair pair;
  pair.j_plus = std::abs(Eigen::PartialPivLU<RealMatrix>(d_plus).determinant());
  pair.j_minus = std::abs(Eigen::PartialPivLU<RealMatrix>(d_minus).determinant());
  pair.product = pair.j_plus * pair.j_minus;

  // Rank-one cross-check: the scalar prefactors cancel in the product and
  // det(Id +- delta M_A) = 1 +- delta Re<Q_A, A>_HS.
  const double p = hs_inner_re(q, a);
  const double rank_one = std::abs((1.0 + ctx.delta * p) * (1.0 - ctx.delta * p));
  if (std::abs(pair.product - rank_one) > 1e-8 * (1.0 + rank_one))
    throw Error("jacobian: determinant product disagrees with the rank-one identity");
  return pair;
}

double energy_functional(const GammaChain& chain, const std::vector<Matrix>& t, double z) {
  const std::size_t n = chain.gammas.size();
  if (t.size() + 1 != n) throw DomainError("energy_functional: block count mismatch");
  const int w = static_cast<int>(chain.gammas[0].rows());
  const Matrix z_id = z * Matrix::Identity(w, w);
  double energy = hs_norm_sq(chain.gammas[0] + z_id);
  for (std::size_t j = 1; j < n; ++j) {
    const Matrix dependent_v =
        chain.gammas[j] + z_id + t[j - 1] * chain.inverses[j - 1] * t[j - 1].adjoint();
    energy += hs_norm_sq(dependent_v);
  }
  for (const Matrix& hop : t) energy += hs_norm_sq(hop);
  return energy;
}

double hopping_remainder_term(double t_hs_sq, double f, double delta) {
  return (std::cosh(2.0 * delta * f) - 1.0) * t_hs_sq;
}

double remainder(const BlockHamiltonian& h, const GammaChain& chain, const ShiftContext& ctx) {
  check_regime(ctx, h.params.w);
  const std::size_t bonds = h.t.size();
  std::vector<Matrix> t_plus(bonds), t_minus(bonds);
  ShiftContext plus = ctx;
  plus.sign = +1;
  ShiftContext minus = ctx;
  minus.sign = -1;
  for (std::size_t j = 0; j < bonds; ++j) {
    const Matrix& g = chain.gammas[j + 1];
    const Matrix& gtilde = chain.inverses[j];
    t_plus[j] = eta(h.t[j], g, gtilde, plus);
    t_minus[j] = eta(h.t[j], g, gtilde, minus);
  }
  const double base = energy_functional(chain, h.t, ctx.z);
  const double up = energy_functional(chain, t_plus, ctx.z);
  const double down = energy_functional(chain, t_minus, ctx.z);
  return 0.5 * up + 0.5 * down - base;
}

double delta_rule(double alpha, double phi_fraction, int n, int w, int sharp) {
  if (!(phi_fraction > 0.0) || !(phi_fraction < 1.0 / 6.0))
    throw DomainError("delta_rule: phi must lie in (0, 1/6)");
  if (sharp < 3) throw DomainError("delta_rule: sharp must be >= 3");
  if (n < 1 || w < 1) throw DomainError("delta_rule: n and W must be >= 1");
  const double a =
      alpha > 0.0 ? alpha : std::sqrt(static_cast<double>(n) / std::pow(static_cast<double>(w), sharp));
  return 3.0 * a / (phi_fraction * static_cast<double>(n));
}

EventFlags event_membership(const BlockHamiltonian& h, const GammaChain& chain,
                            const CutoffSpec& cutoff_spec, double phi_fraction,
                            double c_norm, double k_event) {
  const int n = h.params.n;
  const int w = h.params.w;
  if (!(c_norm > 0.0) || !(c_norm * c_norm < k_event))
    throw DomainError("events: need 0 < C < sqrt(K)");

  EventFlags flags;
  flags.total_f = total_f(h, chain, cutoff_spec);
  flags.m_phi = flags.total_f >= phi_fraction * n;

  const double inv_threshold = k_event * w / (3.0 * c_norm * c_norm);
  const double v_threshold = k_event * w / 3.0;
  const double t_threshold = k_event * w;
  for (int j = 1; j < n; ++j) {
    // M1 uses Gamma_j = V_j - A_j with A_j the predecessor-measurable shift,
    // so the resolvent norm in the event is exactly ||Gamma_j^{-1}||_HS.
    if (hs_norm(chain.inverses[static_cast<std::size_t>(j - 1)]) <= inv_threshold)
      ++flags.counts[0];
    if (hs_norm(h.v[static_cast<std::size_t>(j)]) <= v_threshold) ++flags.counts[1];
    const Matrix& t = h.t[static_cast<std::size_t>(j - 1)];
    if (hs_norm_sq(t) <= t_threshold) ++flags.counts[2];
    if (operator_norm(t) <= c_norm) ++flags.counts[3];
  }
  const double quota = 6.0 * phi_fraction * n;
  flags.m1 = flags.counts[0] >= quota;
  flags.m2 = flags.counts[1] >= quota;
  flags.m3 = flags.counts[2] >= quota;
  flags.m4 = flags.counts[3] >= quota;
  return flags;
}

namespace {

// Scales m so that its squared HS norm equals target (no-op for zero input).
void scale_to_hs_sq(Matrix& m, double target) {
  const double current = hs_norm_sq(m);
  if (current > 0.0) m *= std::sqrt(target / current);
}

}  // namespace

namespace {

// Generic random-direction quadruple with cutoff arguments steered into the
// plateau/ramp windows.
BondQuadruple generic_ramp_bond(int w, double k, double z, RngStream& rng) {
  const double w2 = static_cast<double>(w) * w;
  BondQuadruple bond;
  bond.t = ensembles::sample_ginibre(w, rng);
  bond.g = ensembles::sample_gue(w, rng);
  bond.gtilde = ensembles::sample_gue(w, rng);

  // gamma must stay positive, so both Hermitian arguments land in [0, 2K).
  scale_to_hs_sq(bond.g, rng.uniform(0.05, 1.95) * k * w2);
  scale_to_hs_sq(bond.gtilde, rng.uniform(0.05, 1.95) * k * w2);

  // Place ||T||^2/W in the ramp, the plateau, or anywhere.
  const double mode = rng.uniform();
  double t_arg;
  if (mode < 0.4) {
    t_arg = rng.uniform(1.02, 1.95) * k;
  } else if (mode < 0.7) {
    t_arg = rng.uniform(0.2, 0.98) * k;
  } else {
    t_arg = rng.uniform(0.2, 1.95) * k;
  }
  scale_to_hs_sq(bond.t, t_arg * w);

  // Steer the dependent argument ||G + z + T Gtilde T^*||^2 / W^2 by
  // rescaling Gtilde; the argument is quadratic in that scale.
  const Matrix m0 = bond.g + z * Matrix::Identity(w, w);
  const Matrix m1 = bond.t * bond.gtilde * bond.t.adjoint();
  const double a2 = hs_norm_sq(m1);
  if (a2 > 0.0) {
    const double b = 2.0 * hs_inner_re(m0, m1);
    const double c0 = hs_norm_sq(m0);
    const double target = rng.uniform(0.3, 1.9) * k * w2;
    const double disc = b * b - 4.0 * a2 * (c0 - target);
    if (disc >= 0.0) {
      const double root = (-b + std::sqrt(disc)) / (2.0 * a2);
      if (root > 1e-8) {
        bond.gtilde *= root;
        if (hs_norm_sq(bond.gtilde) / w2 >= 2.0 * k)
          scale_to_hs_sq(bond.gtilde, rng.uniform(0.5, 1.9) * k * w2);
      }
    }
  }
  return bond;
}

// Aligned quadruple probing the supremum of ||A|| ||Q_A||. Gtilde carries two
// opposite eigenvalues and A maps their directions so that A Gtilde A^* nearly
// cancels while A Gtilde stays large; G is spectrally concentrated with the
// dependent argument in the ramp. On such inputs the derivative term scales
// like W, the extremal behaviour of the bound.
BondQuadruple aligned_ramp_bond(int w, double k, double z, RngStream& rng) {
  const double w2 = static_cast<double>(w) * w;
  // Random orthonormal frame.
  Eigen::HouseholderQR<Matrix> qr(ensembles::sample_ginibre(w, rng));
  const Matrix frame = qr.householderQ();
  const Eigen::VectorXcd w1 = frame.col(0);
  const Eigen::VectorXcd w2v = frame.col(1 % w);
  const Eigen::VectorXcd x = frame.col(2 % w);

  BondQuadruple bond;
  const double gt_scale = rng.uniform(0.5, 0.95) * std::sqrt(2.0 * k) * w / std::sqrt(2.0);
  bond.gtilde = gt_scale * (w1 * w1.adjoint() - w2v * w2v.adjoint());

  const double a_scale = std::sqrt(rng.uniform(0.4, 1.9) * k * w);
  bond.t = a_scale / std::sqrt(2.0) * x * (w1 + w2v).adjoint();
  // Small generic perturbation so the cancellation is near, not exact.
  bond.t += 0.05 * a_scale * ensembles::sample_ginibre(w, rng) / std::sqrt(static_cast<double>(w));

  // Rank-one G aligned with x, with the dependent argument in the ramp.
  const double target = rng.uniform(1.02, 1.9) * k * w2;
  const Matrix cross = bond.t * bond.gtilde * bond.t.adjoint();
  double m = std::sqrt(std::max(target - (w - 1) * z * z, 1.0)) - z;
  bond.g = m * (x * x.adjoint()).eval() - cross;
  if (hs_norm_sq(bond.g) / w2 >= 2.0 * k) {
    // Cancellation budget exceeded; fall back to dropping the cross term.
    bond.g = m * (x * x.adjoint()).eval();
  }
  return bond;
}

}  // namespace

BondQuadruple sample_ramp_bond(int w, double k, RngStream& rng, double* z_out) {
  const double z = rng.uniform(-0.3, 0.3) * std::sqrt(static_cast<double>(w));
  if (z_out) *z_out = z;
  BondQuadruple bond = (w >= 2 && rng.uniform() < 0.5) ? aligned_ramp_bond(w, k, z, rng)
                                                       : generic_ramp_bond(w, k, z, rng);
  bond.v = bond.g + z * Matrix::Identity(w, w) + bond.t * bond.gtilde * bond.t.adjoint();
  return bond;
}

}  // namespace bandloc::shift
