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

#include <array>
#include <vector>

#include "bandloc/greens.hpp"
#include "bandloc/rng.hpp"
#include "bandloc/types.hpp"

namespace bandloc::shift {

using ensembles::BlockHamiltonian;
using greens::GammaChain;

// Numerical stand-in for the "delta * W much smaller than one" regime in
// which the plus/minus maps are provably injective.
inline constexpr double kRegimeLimit = 0.1;

// Smooth plateau cutoff phi with
//   phi = 1 on [0, K],  phi = 0 on [2K, infinity),
// realized as a quintic smoothstep ramp on (K, 2K). sup|phi'| = 15/(8K), so
// K >= 15/8 keeps the derivative bound |phi'| <= 1.
struct CutoffSpec {
  double k = 4.0;

  void validate() const;  // throws DomainError if k < 1
};

double cutoff(double t, const CutoffSpec& spec);
double cutoff_deriv(double t, const CutoffSpec& spec);

struct ShiftContext {
  double delta = 0.0;
  int sign = +1;  // sigma
  CutoffSpec cutoff;
  double z = 0.0;
};

// Per-bond data for bond j: the hopping T_j together with G = Gamma_{j+1},
// Gtilde = Gamma_j^{-1}, and the dependent potential block
// V_{j+1} = G + z + T Gtilde T^*.
struct BondQuadruple {
  Matrix t;
  Matrix g;
  Matrix gtilde;
  Matrix v;
};

// Extracts bond j (1-based, j in [1, n-1]) from a sampled chain.
BondQuadruple bond_quadruple(const BlockHamiltonian& h, const GammaChain& chain, int j);

// F_j = phi(||T||_HS^2 / W) phi(||V||_HS^2 / W^2) phi(||G||_HS^2 / W^2)
//       phi(||Gtilde||_HS^2 / W^2).
double f_factor(const BondQuadruple& bond, int w, const CutoffSpec& spec);

// F = sum over bonds of F_j.
double total_f(const BlockHamiltonian& h, const GammaChain& chain, const CutoffSpec& spec);

// gamma(G, Gtilde) = phi(||G||^2/W^2) phi(||Gtilde||^2/W^2).
double gamma_factor(const Matrix& g, const Matrix& gtilde, int w, const CutoffSpec& spec);

// Exponent Phi(A) = gamma * phi(||A||^2/W) * phi(||G + z + A Gtilde A^*||^2/W^2).
double phi_exponent(const Matrix& a, const Matrix& g, const Matrix& gtilde,
                    const ShiftContext& ctx);

// eta^sigma(A) = exp(sigma delta Phi(A)) A. Throws RegimeViolation unless
// delta * W < kRegimeLimit.
Matrix eta(const Matrix& a, const Matrix& g, const Matrix& gtilde, const ShiftContext& ctx);

// Riesz representative of the real-linear derivative of Phi at A:
//   Q_A = gamma phi'(f/W) phi(g/W^2) (2/W) A
//       + gamma phi(f/W) phi'(g/W^2) (4/W^2) ((G + z) A Gtilde
//                                             + A Gtilde A^* A Gtilde),
// with f = ||A||_HS^2 and g = ||G + z + A Gtilde A^*||_HS^2, acting through
// B -> Re<Q_A, B>_HS.
Matrix q_vector(const Matrix& a, const Matrix& g, const Matrix& gtilde, double z, int w,
                const CutoffSpec& spec);

// Real 2W^2 x 2W^2 derivative of eta at A:
//   exp(sigma delta Phi(A)) (Id + sigma delta realify(A) realify(Q_A)^T).
RealMatrix eta_derivative(const Matrix& a, const Matrix& g, const Matrix& gtilde,
                          const ShiftContext& ctx);

struct JacobianPair {
  double j_plus = 1.0;
  double j_minus = 1.0;
  double product = 1.0;
};

// |det D eta^+|, |det D eta^-| and their product. The product is evaluated
// both from the assembled derivatives and through the rank-one identity
// det(Id +- delta M_A) = 1 +- delta Re<Q_A, A>_HS and cross-checked. Requires
// delta ||M_A|| < 1/2, else RegimeViolation.
JacobianPair jacobian_det_pair(const Matrix& a, const Matrix& g, const Matrix& gtilde,
                               const ShiftContext& ctx);

// Energy functional of the factorized density:
//   E(Gamma, T) = tr(|Gamma_1 + z|^2
//                    + sum_{j>=2} |Gamma_j + z + T_{j-1} Gamma_{j-1}^{-1} T_{j-1}^*|^2
//                    + sum_j |T_j|^2).
double energy_functional(const GammaChain& chain, const std::vector<Matrix>& t, double z);

// Second-order remainder R = E(Gamma, T^+)/2 + E(Gamma, T^-)/2 - E(Gamma, T)
// with T_j^{+-} = eta^{+-}(T_j) bond-wise and the Gamma chain held fixed.
double remainder(const BlockHamiltonian& h, const GammaChain& chain, const ShiftContext& ctx);

// Direct-hopping part of the plus/minus average for one bond:
//   ||e^{dF} T||^2/2 + ||e^{-dF} T||^2/2 - ||T||^2 = (cosh(2 d F) - 1) ||T||^2.
double hopping_remainder_term(double t_hs_sq, double f_factor, double delta);

// delta = 3 alpha / (phi n); pass alpha <= 0 to use alpha = sqrt(n / W^sharp),
// which gives delta = (3/phi) / sqrt(n W^sharp). Throws DomainError unless
// phi in (0, 1/6) and sharp >= 3.
double delta_rule(double alpha, double phi_fraction, int n, int w, int sharp);

// Large-deviation event membership for one sample. The event thresholds use
// their own constant K (k_event) and operator-norm constant C (c_norm); the
// cutoff K of phi is configured independently.
struct EventFlags {
  bool m_phi = false;
  bool m1 = false;
  bool m2 = false;
  bool m3 = false;
  bool m4 = false;
  double total_f = 0.0;
  std::array<int, 4> counts{0, 0, 0, 0};
};

EventFlags event_membership(const BlockHamiltonian& h, const GammaChain& chain,
                            const CutoffSpec& cutoff_spec, double phi_fraction,
                            double c_norm, double k_event = 16.0);

// Random (A, G, Gtilde, z) quadruples spanning the cutoff ramp regions, where
// the derivative terms of the shift are active. Trials cycle through
// f-ramp-only, g-ramp-only and mixed placements.
BondQuadruple sample_ramp_bond(int w, double k, RngStream& rng, double* z_out);

}  // namespace bandloc::shift
