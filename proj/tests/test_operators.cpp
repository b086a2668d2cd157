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

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "readout/operators.hpp"

using namespace readout;

namespace {

Operator random_matrix(std::mt19937_64& rng, std::size_t d) {
  std::normal_distribution<double> nd;
  Operator m(d);
  for (std::size_t i = 0; i < d; ++i)
    for (std::size_t j = 0; j < d; ++j) m(i, j) = cplx(nd(rng), nd(rng));
  return m;
}

Operator random_integer_matrix(std::mt19937_64& rng, std::size_t d) {
  std::uniform_int_distribution<int> ui(-3, 3);
  Operator m(d);
  for (std::size_t i = 0; i < d; ++i)
    for (std::size_t j = 0; j < d; ++j)
      m(i, j) = cplx(static_cast<double>(ui(rng)), static_cast<double>(ui(rng)));
  return m;
}

}  // namespace

TEST_CASE("kron of identities is the identity") {
  const Operator i2 = identity(2);
  const Operator i4 = kron(i2, i2);
  CHECK(i4.max_abs_diff(identity(4)) == 0.0);
}

TEST_CASE("kron with a diagonal left factor scales blocks") {
  Operator d(2);
  d(0, 0) = 1.0;
  d(1, 1) = 2.0;
  const Operator k = kron(d, identity(2));
  Operator want(4);
  want(0, 0) = 1.0;
  want(1, 1) = 1.0;
  want(2, 2) = 2.0;
  want(3, 3) = 2.0;
  CHECK(k.max_abs_diff(want) == 0.0);
}

TEST_CASE("kron block structure: top-left block is a00 * b") {
  std::mt19937_64 rng(5);
  const Operator a = random_matrix(rng, 2);
  const Operator b = random_matrix(rng, 3);
  const Operator k = kron(a, b);
  CHECK(k.dim() == 6);
  for (std::size_t i = 0; i < 3; ++i)
    for (std::size_t j = 0; j < 3; ++j)
      CHECK(std::abs(k(i, j) - a(0, 0) * b(i, j)) == 0.0);
}

TEST_CASE("kron associativity is exact on integer matrices") {
  std::mt19937_64 rng(17);
  for (int rep = 0; rep < 10; ++rep) {
    const Operator a = random_integer_matrix(rng, 2);
    const Operator b = random_integer_matrix(rng, 3);
    const Operator c = random_integer_matrix(rng, 2);
    CHECK(kron(kron(a, b), c).max_abs_diff(kron(a, kron(b, c))) == 0.0);
  }
}

TEST_CASE("annihilation ladder entries") {
  const Operator a2 = annihilation(2);
  CHECK(a2(0, 1) == cplx(1.0, 0.0));
  CHECK(a2(0, 0) == cplx(0.0, 0.0));
  CHECK(a2(1, 0) == cplx(0.0, 0.0));
  CHECK(a2(1, 1) == cplx(0.0, 0.0));

  const Operator a3 = annihilation(3);
  CHECK(a3(1, 2).real() == doctest::Approx(std::sqrt(2.0)).epsilon(1e-15));

  CHECK_THROWS_AS(annihilation(1), std::invalid_argument);
}

TEST_CASE("a a-dagger is diag(1..n-1) below the truncation edge") {
  const std::size_t nf = 6;
  const Operator a = annihilation(nf);
  const Operator prod = a * a.adjoint();
  for (std::size_t n = 0; n + 2 < nf; ++n)
    CHECK(std::abs(prod(n, n) - cplx(n + 1.0, 0.0)) <= 1e-12);
}

TEST_CASE("commutator [a, a-dagger] is the identity away from the top state") {
  const std::size_t nf = 8;
  const Operator a = annihilation(nf);
  const Operator comm = a * a.adjoint() - a.adjoint() * a;
  for (std::size_t i = 0; i + 1 < nf; ++i)
    for (std::size_t j = 0; j + 1 < nf; ++j) {
      const cplx want = (i == j) ? cplx(1.0, 0.0) : cplx(0.0, 0.0);
      CHECK(std::abs(comm(i, j) - want) <= 1e-12);
    }
}

TEST_CASE("transition places ones at the composite positions") {
  const SpaceLayout lay{2, 2};
  const Operator t = transition(lay, 0, 1);  // |1><0| (x) I
  CHECK(t.dim() == 4);
  for (std::size_t n = 0; n < 2; ++n)
    CHECK(t(lay.index(1, n), lay.index(0, n)) == cplx(1.0, 0.0));
  cplx total(0.0, 0.0);
  for (std::size_t i = 0; i < 4; ++i)
    for (std::size_t j = 0; j < 4; ++j) total += t(i, j);
  CHECK(std::abs(total - cplx(2.0, 0.0)) == 0.0);
}

TEST_CASE("transition adjoint swaps the levels") {
  const SpaceLayout lay{3, 4};
  const Operator t01 = transition(lay, 0, 1);
  const Operator t10 = transition(lay, 1, 0);
  CHECK(t01.adjoint().max_abs_diff(t10) == 0.0);
  CHECK_THROWS_AS(transition(lay, 3, 0), std::invalid_argument);
}

TEST_CASE("trace of T_ij T_ji counts the cavity states") {
  // independent summation oracle
  const SpaceLayout lay{3, 5};
  const Operator tij = transition(lay, 1, 2);
  const Operator tji = transition(lay, 2, 1);
  const Operator prod = tij * tji;
  cplx oracle(0.0, 0.0);
  for (std::size_t a = 0; a < lay.dim(); ++a)
    for (std::size_t b = 0; b < lay.dim(); ++b) oracle += tij(a, b) * tji(b, a);
  CHECK(std::abs(prod.trace() - oracle) <= 1e-14);
  CHECK(prod.trace().real() == doctest::Approx(5.0).epsilon(1e-15));
}

TEST_CASE("transition operators are partial isometries: T T† T = T exactly") {
  const SpaceLayout lay{4, 3};
  for (std::size_t i = 0; i < 4; ++i)
    for (std::size_t j = 0; j < 4; ++j) {
      const Operator t = transition(lay, i, j);
      CHECK((t * t.adjoint() * t).max_abs_diff(t) == 0.0);
    }
}

TEST_CASE("expectation values on simple states") {
  const SpaceLayout lay{2, 3};
  const Operator rho0 = vacuum_state(lay, 0);
  CHECK(std::abs(expectation(identity(lay.dim()), rho0) - cplx(1.0, 0.0)) <= 1e-15);

  const Operator a = cavity_annihilation(lay);
  CHECK(std::abs(expectation(a, rho0)) <= 1e-15);

  // |1><1| cavity state: <a†a> = 1
  Operator rho1(lay.dim());
  rho1(lay.index(0, 1), lay.index(0, 1)) = 1.0;
  CHECK(std::abs(expectation(a.adjoint() * a, rho1) - cplx(1.0, 0.0)) <= 1e-14);

  CHECK_THROWS_AS(expectation(identity(3), rho0), std::invalid_argument);
}

TEST_CASE("hermitian eigenvalues: analytic 2x2") {
  Operator m(2);
  m(0, 0) = 1.0;
  m(1, 1) = -2.0;
  m(0, 1) = cplx(0.7, -0.4);
  m(1, 0) = cplx(0.7, 0.4);
  const auto ev = hermitian_eigenvalues(m);
  const double mid = (1.0 - 2.0) / 2.0;
  const double rad = std::sqrt(2.25 + 0.49 + 0.16);
  CHECK(ev[0] == doctest::Approx(mid - rad).epsilon(1e-12));
  CHECK(ev[1] == doctest::Approx(mid + rad).epsilon(1e-12));
}

TEST_CASE("hermitian eigenvalues: trace and Frobenius identities") {
  std::mt19937_64 rng(23);
  for (int rep = 0; rep < 8; ++rep) {
    const std::size_t d = 3 + static_cast<std::size_t>(rep) % 6;
    Operator g = random_matrix(rng, d);
    Operator h = g + g.adjoint();  // Hermitian
    const auto ev = hermitian_eigenvalues(h);
    double tr = 0.0, fr = 0.0;
    for (double e : ev) {
      tr += e;
      fr += e * e;
    }
    double fro = 0.0;
    for (std::size_t i = 0; i < d; ++i)
      for (std::size_t j = 0; j < d; ++j) fro += std::norm(h(i, j));
    CHECK(tr == doctest::Approx(h.trace().real()).epsilon(1e-10));
    CHECK(fr == doctest::Approx(fro).epsilon(1e-10));
  }
}

TEST_CASE("positive semidefinite matrices report a non-negative floor") {
  std::mt19937_64 rng(31);
  const Operator g = random_matrix(rng, 8);
  Operator rho = g * g.adjoint();
  rho *= cplx(1.0, 0.0) / rho.trace();
  CHECK(min_hermitian_eigenvalue(rho) >= -1e-12);
}
