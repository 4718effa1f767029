#include <doctest.h>

#include <cmath>
#include <numbers>

#include "epr/quantum_target.hpp"
#include "epr/reward_models.hpp"
#include "epr/scenario.hpp"
#include "epr/util.hpp"

using namespace epr;

namespace {
constexpr double kPi = std::numbers::pi;
}

TEST_SUITE("quantum_target") {

TEST_CASE("product state |00><00| is a Z eigenstate") {
  DensityMatrix rho = DensityMatrix::Zero();
  rho(0, 0) = 1.0;
  CHECK(born_joint_prob(rho, 0.0, 0.0, 1, 1) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(born_joint_prob(rho, 0.0, 0.0, 1, -1) ==
        doctest::Approx(0.0).epsilon(1e-14));
}

TEST_CASE("singlet is perfectly anticorrelated at equal angles") {
  const DensityMatrix rho = singlet_density();
  for (double theta : {0.0, 0.3, 2.0}) {
    CHECK(std::abs(born_joint_prob(rho, theta, theta, 1, 1)) < 1e-14);
    CHECK(std::abs(born_joint_prob(rho, theta, theta, -1, -1)) < 1e-14);
  }
}

TEST_CASE("singlet at a 45 degree offset: closed-form value") {
  const DensityMatrix rho = singlet_density();
  const double p = born_joint_prob(rho, kPi / 4.0, 0.0, 1, 1);
  CHECK(p == doctest::Approx((1.0 - std::cos(kPi / 4.0)) / 4.0).epsilon(1e-13));
  CHECK(p == doctest::Approx(0.07322330470336312).epsilon(1e-12));
}

TEST_CASE("singlet_closed_form pinned values") {
  CHECK(singlet_closed_form(0.0, 1, 1) == 0.0);
  CHECK(singlet_closed_form(0.0, -1, -1) == 0.0);
  CHECK(singlet_closed_form(kPi / 2.0, 1, 1) ==
        doctest::Approx(0.25).epsilon(1e-15));
  CHECK(singlet_closed_form(kPi / 2.0, -1, 1) ==
        doctest::Approx(0.25).epsilon(1e-15));
  CHECK(singlet_closed_form(kPi / 4.0, 1, -1) ==
        doctest::Approx(0.4267766952966369).epsilon(1e-14));
}

TEST_CASE("closed form agrees with the trace computation on random angles") {
  const DensityMatrix rho = singlet_density();
  double worst = 0.0;
  for (int i = 0; i < 1000; ++i) {
    const double ta = uniform01_at(21, 2 * i) * 2.0 * kPi;
    const double tb = uniform01_at(21, 2 * i + 1) * 2.0 * kPi;
    for (int x : {1, -1}) {
      for (int y : {1, -1}) {
        worst = std::max(worst, std::abs(born_joint_prob(rho, ta, tb, x, y) -
                                         singlet_closed_form(ta - tb, x, y)));
      }
    }
  }
  CHECK(worst < 1e-12);
}

TEST_CASE("default target blocks hold the two 45-degree values") {
  ScenarioConfig cfg;
  const TargetDistribution t = target_histogram(cfg.state, cfg.angles());
  const double lo = (1.0 - std::cos(kPi / 4.0)) / 16.0;  // cell = prob / 4
  const double hi = (1.0 + std::cos(kPi / 4.0)) / 16.0;
  double total = 0.0;
  for (int a = 0; a < 2; ++a) {
    for (int b = 0; b < 2; ++b) {
      double block = 0.0;
      for (int k = 0; k < 4; ++k) {
        const double c = t.cells[(a * 2 + b) * 4 + k];
        block += c;
        const bool is_lo = std::abs(c - lo) < 1e-12;
        const bool is_hi = std::abs(c - hi) < 1e-12;
        CHECK((is_lo || is_hi));
      }
      CHECK(block == doctest::Approx(0.25).epsilon(1e-12));
      total += block;
    }
  }
  CHECK(total == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("product state with all angles zero puts each block on (+,+)") {
  ScenarioConfig cfg;
  cfg.alice_angles_deg = {0.0, 0.0};
  cfg.bob_angles_deg = {0.0, 0.0};
  DensityMatrix rho = DensityMatrix::Zero();
  rho(0, 0) = 1.0;
  const TargetDistribution t = target_histogram(rho, cfg.angles());
  for (int a = 0; a < 2; ++a) {
    for (int b = 0; b < 2; ++b) {
      CHECK(t.cells[cell_index(a, b, 1, 1)] ==
            doctest::Approx(0.25).epsilon(1e-13));
      CHECK(std::abs(t.cells[cell_index(a, b, 1, -1)]) < 1e-13);
    }
  }
}

TEST_CASE("singlet marginals are fair in every block") {
  ScenarioConfig cfg;
  const TargetDistribution t = target_histogram(cfg.state, cfg.angles());
  for (int a = 0; a < 2; ++a) {
    for (int b = 0; b < 2; ++b) {
      const double px = 4.0 * (t.cells[cell_index(a, b, 1, 1)] +
                               t.cells[cell_index(a, b, 1, -1)]);
      CHECK(px == doctest::Approx(0.5).epsilon(1e-12));
    }
  }
}

TEST_CASE("singlet target is invariant under a common rotation") {
  ScenarioConfig cfg;
  const TargetDistribution base = target_histogram(cfg.state, cfg.angles());
  for (double phi : {0.1, 1.0, 2.5}) {
    MeasurementAngles rotated = cfg.angles();
    for (int i = 0; i < 2; ++i) {
      rotated.alice[i] += phi;
      rotated.bob[i] += phi;
    }
    const TargetDistribution t = target_histogram(cfg.state, rotated);
    for (int c = 0; c < 16; ++c) {
      CHECK(t.cells[c] == doctest::Approx(base.cells[c]).epsilon(1e-12));
    }
  }
}

TEST_CASE("density matrix validation catches each invariant") {
  SUBCASE("trace") {
    const DensityMatrix rho = 0.5 * singlet_density();
    const auto v = density_violations(rho);
    REQUIRE(!v.empty());
    CHECK(v.front().find("trace") != std::string::npos);
    CHECK_THROWS_AS(born_joint_prob(rho, 0, 0, 1, 1), InputError);
  }
  SUBCASE("hermiticity") {
    DensityMatrix rho = singlet_density();
    rho(0, 1) += std::complex<double>(0.0, 1e-3);
    const auto v = density_violations(rho);
    REQUIRE(!v.empty());
    CHECK(v.front().find("Hermitian") != std::string::npos);
  }
  SUBCASE("positivity") {
    DensityMatrix rho = DensityMatrix::Zero();
    rho(0, 0) = 1.5;
    rho(1, 1) = -0.5;
    const auto v = density_violations(rho);
    REQUIRE(!v.empty());
    bool found = false;
    for (const auto& s : v) {
      found = found || s.find("positive semidefinite") != std::string::npos;
    }
    CHECK(found);
  }
  SUBCASE("the singlet itself is clean") {
    CHECK(density_violations(singlet_density()).empty());
  }
}

}  // TEST_SUITE
