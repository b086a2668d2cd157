// Copyright 2026 The readout-sim Authors
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

#include "readout/models.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "readout/stats.hpp"

namespace readout {

void PhysicalParams::validate() const {
  if (g_ghz < 0.0 || kappa_ghz < 0.0 || gamma_d_ghz < 0.0)
    throw std::invalid_argument("PhysicalParams: negative rate");
  for (double g : gamma_ghz)
    if (g < 0.0) throw std::invalid_argument("PhysicalParams: negative gamma");
  if (eta < 0.0 || eta > 1.0)
    throw std::invalid_argument("PhysicalParams: eta outside [0,1]");
  if (epsilon < 0.0)
    throw std::invalid_argument("PhysicalParams: negative epsilon");
}

double angular(double f_ghz) { return 2.0 * std::numbers::pi * f_ghz; }

double from_angular(double omega_rad_ns) {
  return omega_rad_ns / (2.0 * std::numbers::pi);
}

double default_epsilon(const PhysicalParams& p) {
  const double g = angular(p.g_ghz), kappa = angular(p.kappa_ghz);
  if (kappa <= 0.0) throw std::invalid_argument("default_epsilon: kappa must be > 0");
  return std::sqrt(0.01 * 2.0 * g * g / kappa);
}

double drive_amplitude(const PhysicalParams& p) {
  const double eps = (p.epsilon > 0.0) ? p.epsilon : default_epsilon(p);
  return std::sqrt(angular(p.kappa_ghz) / 2.0) * eps;
}

double cooperativity(const PhysicalParams& p) {
  if (p.kappa_ghz <= 0.0 || p.gamma_ghz.empty() || p.gamma_ghz[0] <= 0.0)
    throw std::invalid_argument("cooperativity: kappa and gamma[0] must be > 0");
  return 2.0 * p.g_ghz * p.g_ghz / (p.kappa_ghz * p.gamma_ghz[0]);
}

double calibrate_nin(const PhysicalParams& p) {
  const double eps = (p.epsilon > 0.0) ? p.epsilon : default_epsilon(p);
  return readout::calibrate_nin(eps);
}

namespace {

void check_layout(const SpaceLayout& layout, std::size_t n_levels,
                  const char* what) {
  if (layout.n_levels != n_levels)
    throw std::invalid_argument(std::string(what) + ": layout has wrong level count");
  if (layout.n_fock < 2)
    throw std::invalid_argument(std::string(what) + ": layout needs >= 2 Fock states");
}

double gamma_at(const PhysicalParams& p, std::size_t i, const char* what) {
  if (i >= p.gamma_ghz.size())
    throw std::invalid_argument(std::string(what) + ": missing gamma entry");
  return p.gamma_ghz[i];
}

Operator drive_term(const PhysicalParams& p, const Operator& a) {
  const double amp = drive_amplitude(p);
  return cplx(amp, 0.0) * (a + a.adjoint());
}

Operator coupling_term(double g_angular, const Operator& a, const Operator& lower,
                       const Operator& raise) {
  // i g (a |e><g| - a† |g><e|)
  return cplx(0.0, g_angular) * (a * raise - a.adjoint() * lower);
}

}  // namespace

LindbladSystem build_three_level(const PhysicalParams& p, const SpaceLayout& layout) {
  p.validate();
  check_layout(layout, 3, "build_three_level");

  const double g = angular(p.g_ghz);
  const double kappa = angular(p.kappa_ghz);
  const double dc = angular(p.detuning_c_ghz);
  const double da = angular(p.detuning_a_ghz);

  const Operator a = cavity_annihilation(layout);
  const Operator lower_e_g0 = transition(layout, kE, kG0);   // |g0><e|
  const Operator raise_g0_e = transition(layout, kG0, kE);   // |e><g0|
  const Operator proj_e = transition(layout, kE, kE);

  Operator h = cplx(dc, 0.0) * (a.adjoint() * a) + cplx(da, 0.0) * proj_e;
  h += coupling_term(g, a, lower_e_g0, raise_g0_e);
  h += drive_term(p, a);

  LindbladSystem sys;
  sys.dim = layout.dim();
  sys.layout = layout;
  sys.kappa = kappa;
  sys.a_cavity = a;
  sys.hamiltonian = std::move(h);
  sys.collapse_ops.push_back({kappa, a});
  sys.collapse_ops.push_back({angular(gamma_at(p, 0, "build_three_level")), lower_e_g0});
  sys.collapse_ops.push_back(
      {angular(gamma_at(p, 1, "build_three_level")), transition(layout, kE, kG1)});
  if (p.gamma_d_ghz > 0.0)
    sys.collapse_ops.push_back({2.0 * angular(p.gamma_d_ghz), proj_e});
  sys.validate();
  return sys;
}

LindbladSystem build_four_level(const PhysicalParams& p, const SpaceLayout& layout) {
  p.validate();
  check_layout(layout, 4, "build_four_level");

  const double g = angular(p.g_ghz);
  const double kappa = angular(p.kappa_ghz);
  const double dc = angular(p.detuning_c_ghz);
  const double da = angular(p.detuning_a_ghz);
  const double dz = angular(p.delta_z_ghz);
  const double dw = angular(p.delta_omega_ghz);

  const Operator a = cavity_annihilation(layout);
  const Operator proj_e0 = transition(layout, kE0, kE0);
  const Operator proj_e1 = transition(layout, kE1, kE1);

  // both excited levels shift rigidly with the diffusion offset so the
  // Zeeman splitting is preserved
  Operator h = cplx(dc, 0.0) * (a.adjoint() * a);
  h += cplx(da + dw, 0.0) * proj_e0;
  h += cplx(da + dw - dz, 0.0) * proj_e1;
  h += coupling_term(g, a, transition(layout, kE0, kG0), transition(layout, kG0, kE0));
  h += coupling_term(g, a, transition(layout, kE1, kG1), transition(layout, kG1, kE1));
  h += drive_term(p, a);

  LindbladSystem sys;
  sys.dim = layout.dim();
  sys.layout = layout;
  sys.kappa = kappa;
  sys.a_cavity = a;
  sys.hamiltonian = std::move(h);
  sys.collapse_ops.push_back({kappa, a});
  sys.collapse_ops.push_back(
      {angular(gamma_at(p, 0, "build_four_level")), transition(layout, kE0, kG0)});
  sys.collapse_ops.push_back(
      {angular(gamma_at(p, 1, "build_four_level")), transition(layout, kE0, kG1)});
  sys.collapse_ops.push_back(
      {angular(gamma_at(p, 2, "build_four_level")), transition(layout, kE1, kG0)});
  sys.collapse_ops.push_back(
      {angular(gamma_at(p, 3, "build_four_level")), transition(layout, kE1, kG1)});
  if (p.gamma_d_ghz > 0.0) {
    sys.collapse_ops.push_back({2.0 * angular(p.gamma_d_ghz), proj_e0});
    sys.collapse_ops.push_back({2.0 * angular(p.gamma_d_ghz), proj_e1});
  }
  sys.validate();
  return sys;
}

void gauss_hermite(int n, std::vector<double>& x, std::vector<double>& w) {
  if (n < 1) throw std::invalid_argument("gauss_hermite: n must be >= 1");
  x.assign(n, 0.0);
  w.assign(n, 0.0);
  const double pim4 = 0.7511255444649425;  // pi^{-1/4}
  const int maxit = 100;
  const double eps = 1e-14;
  const int m = (n + 1) / 2;
  double z = 0.0;
  for (int i = 0; i < m; ++i) {
    if (i == 0)
      z = std::sqrt(2.0 * n + 1.0) - 1.85575 * std::pow(2.0 * n + 1.0, -0.16667);
    else if (i == 1)
      z -= 1.14 * std::pow(static_cast<double>(n), 0.426) / z;
    else if (i == 2)
      z = 1.86 * z - 0.86 * x[0];
    else if (i == 3)
      z = 1.91 * z - 0.91 * x[1];
    else
      z = 2.0 * z - x[i - 2];
    double pp = 0.0;
    int its = 0;
    for (; its < maxit; ++its) {
      double p1 = pim4, p2 = 0.0;
      for (int j = 0; j < n; ++j) {
        const double p3 = p2;
        p2 = p1;
        p1 = z * std::sqrt(2.0 / (j + 1.0)) * p2 -
             std::sqrt(static_cast<double>(j) / (j + 1.0)) * p3;
      }
      pp = std::sqrt(2.0 * n) * p2;
      const double z1 = z;
      z = z1 - p1 / pp;
      if (std::fabs(z - z1) <= eps) break;
    }
    if (its >= maxit)
      throw std::runtime_error("gauss_hermite: Newton iteration did not converge");
    x[i] = z;
    x[n - 1 - i] = -z;
    w[i] = 2.0 / (pp * pp);
    w[n - 1 - i] = w[i];
  }
  // ascending nodes
  std::reverse(x.begin(), x.end());
}

std::vector<std::pair<double, double>> sample_diffusion(const DiffusionSpec& spec) {
  if (spec.gamma_I_ghz < 0.0)
    throw std::invalid_argument("sample_diffusion: negative gamma_I");
  if (spec.gamma_I_ghz == 0.0) return {{0.0, 1.0}};
  if (spec.n_nodes < 3 || spec.n_nodes % 2 == 0)
    throw std::invalid_argument("sample_diffusion: n_nodes must be odd and >= 3");

  std::vector<double> x, w;
  gauss_hermite(spec.n_nodes, x, w);

  // Gaussian with FWHM gamma_I: sigma = gamma_I / (2 sqrt(2 ln 2));
  // substitute delta = sqrt(2) sigma x so the e^{-x^2} weight matches.
  const double sigma = spec.gamma_I_ghz / (2.0 * std::sqrt(2.0 * std::log(2.0)));
  const double scale = std::sqrt(2.0) * sigma;

  std::vector<std::pair<double, double>> out(x.size());
  double wsum = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) wsum += w[i];
  for (std::size_t i = 0; i < x.size(); ++i)
    out[i] = {scale * x[i], w[i] / wsum};
  return out;
}

}  // namespace readout
