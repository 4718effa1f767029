#pragma once

#include <Eigen/Dense>
#include <array>
#include <string>
#include <vector>

#include "epr/types.hpp"

namespace epr {

using DensityMatrix = Eigen::Matrix4cd;

/// Invariant check: Hermitian (1e-12), unit trace (1e-12), eigenvalues
/// >= -1e-10. Returns one description per violation.
std::vector<std::string> density_violations(const DensityMatrix& rho);

/// |psi-> = (|01> - |10>)/sqrt(2) as a density matrix.
DensityMatrix singlet_density();

/// Projector onto the x eigenstate of cos(theta)*Z + sin(theta)*X:
/// Pi_x(theta) = (I + x*(cos theta Z + sin theta X))/2. With this
/// convention the singlet correlation is E = -cos(theta_a - theta_b).
Eigen::Matrix2cd spin_projector(double theta, int x);

/// tr(rho * (Pi_x(theta_a) kron Pi_y(theta_b))); the imaginary residue must
/// be below 1e-12 (it is discarded). Throws InputError on an invalid rho.
double born_joint_prob(const DensityMatrix& rho, double theta_a,
                       double theta_b, int x, int y);

/// Analytic singlet oracle: (1 - x*y*cos(delta))/4.
double singlet_closed_form(double delta, int x, int y);

/// 16-cell probability table over (a,b,x,y); settings uniformly weighted so
/// each 4-cell conditional block sums to 1/4.
struct TargetDistribution {
  std::array<double, 16> cells{};
};

TargetDistribution target_histogram(const DensityMatrix& rho,
                                    const MeasurementAngles& angles);

/// 16-row CSV (a,b,x,y,probability) with 17 significant digits.
/// `provenance` lines are emitted as leading '#' comments.
void write_target_csv(const std::string& path, const TargetDistribution& t,
                      const std::vector<std::string>& provenance);

}  // namespace epr
