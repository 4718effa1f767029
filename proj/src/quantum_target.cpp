#include "epr/quantum_target.hpp"

#include <cmath>
#include <fstream>

#include "epr/util.hpp"

namespace epr {

std::vector<std::string> density_violations(const DensityMatrix& rho) {
  std::vector<std::string> out;
  const double herm = (rho - rho.adjoint()).cwiseAbs().maxCoeff();
  if (herm > 1e-12) {
    out.push_back("not Hermitian (max |rho - rho^dagger| = " +
                  format_double(herm) + ")");
  }
  const std::complex<double> tr = rho.trace();
  if (std::abs(tr - std::complex<double>(1.0, 0.0)) > 1e-9) {
    out.push_back("trace is " + format_double(tr.real()) + (tr.imag() >= 0 ? "+" : "") +
                  format_double(tr.imag()) + "i, expected 1");
  }
  // Eigenvalues of the Hermitian part; PSD within tolerance.
  const DensityMatrix herm_part = 0.5 * (rho + rho.adjoint());
  Eigen::SelfAdjointEigenSolver<DensityMatrix> es(herm_part);
  const double min_eig = es.eigenvalues().minCoeff();
  if (min_eig < -1e-10) {
    out.push_back("not positive semidefinite (min eigenvalue = " +
                  format_double(min_eig) + ")");
  }
  return out;
}

DensityMatrix singlet_density() {
  Eigen::Vector4cd psi;
  psi << 0.0, 1.0 / std::sqrt(2.0), -1.0 / std::sqrt(2.0), 0.0;
  return psi * psi.adjoint();
}

Eigen::Matrix2cd spin_projector(double theta, int x) {
  Eigen::Matrix2cd m;
  const double c = std::cos(theta), s = std::sin(theta);
  // (I + x*(c*Z + s*X))/2
  m << 0.5 * (1.0 + x * c), 0.5 * x * s, 0.5 * x * s, 0.5 * (1.0 - x * c);
  return m;
}

double born_joint_prob(const DensityMatrix& rho, double theta_a,
                       double theta_b, int x, int y) {
  const auto violations = density_violations(rho);
  if (!violations.empty()) {
    throw InputError("born_joint_prob: invalid density matrix: " +
                     violations.front());
  }
  const Eigen::Matrix2cd pa = spin_projector(theta_a, x);
  const Eigen::Matrix2cd pb = spin_projector(theta_b, y);
  Eigen::Matrix4cd proj;
  for (int i = 0; i < 2; ++i) {
    for (int j = 0; j < 2; ++j) {
      proj.block<2, 2>(2 * i, 2 * j) = pa(i, j) * pb;
    }
  }
  const std::complex<double> tr = (rho * proj).trace();
  if (std::abs(tr.imag()) >= 1e-12) {
    throw NumericError("born_joint_prob: imaginary residue " +
                       format_double(tr.imag()));
  }
  return tr.real();
}

double singlet_closed_form(double delta, int x, int y) {
  return (1.0 - x * y * std::cos(delta)) / 4.0;
}

TargetDistribution target_histogram(const DensityMatrix& rho,
                                    const MeasurementAngles& angles) {
  TargetDistribution t;
  for (const SettingPair& pr : setting_pairs()) {
    for (int k = 0; k < 4; ++k) {
      const int x = outcome_x(k), y = outcome_y(k);
      t.cells[cell_index(pr, k)] =
          born_joint_prob(rho, angles.alice[pr.a], angles.bob[pr.b], x, y) /
          4.0;
    }
  }
  return t;
}

void write_target_csv(const std::string& path, const TargetDistribution& t,
                      const std::vector<std::string>& provenance) {
  std::ofstream f(path);
  if (!f) throw InputError("cannot open for writing: " + path);
  for (const auto& line : provenance) f << "# " << line << "\n";
  f << "a,b,x,y,probability\n";
  for (int a = 0; a < 2; ++a) {
    for (int b = 0; b < 2; ++b) {
      for (int k = 0; k < 4; ++k) {
        f << a << ',' << b << ',' << outcome_x(k) << ',' << outcome_y(k) << ','
          << format_double(t.cells[cell_index(a, b, outcome_x(k), outcome_y(k))])
          << "\n";
      }
    }
  }
  if (!f) throw InputError("failed writing: " + path);
}

}  // namespace epr
