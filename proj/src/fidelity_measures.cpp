#include "cvtele/fidelity_measures.hpp"

#include <array>
#include <numbers>

namespace cvtele {

namespace {

using cd = std::complex<double>;
constexpr double kPi = std::numbers::pi;

// 4-point Gauss-Legendre on [-1, 1].
constexpr std::array<double, 4> kGlNodes{-0.8611363115940526, -0.3399810435848563,
                                         0.3399810435848563, 0.8611363115940526};
constexpr std::array<double, 4> kGlWeights{0.3478548451374538, 0.6521451548625461,
                                           0.6521451548625461, 0.3478548451374538};

double binned_overlap_once(const std::function<double(double)>& f,
                           const std::function<double(double)>& g, double lo, double hi,
                           int bins) {
  const double width = (hi - lo) / bins;
  double total_f = 0, total_g = 0, s = 0;
  for (int b = 0; b < bins; ++b) {
    const double mid = lo + (b + 0.5) * width;
    double pf = 0, pg = 0;
    for (std::size_t q = 0; q < kGlNodes.size(); ++q) {
      const double x = mid + 0.5 * width * kGlNodes[q];
      pf += kGlWeights[q] * f(x);
      pg += kGlWeights[q] * g(x);
    }
    pf *= 0.5 * width;
    pg *= 0.5 * width;
    if (pf < -1e-12 || pg < -1e-12)
      throw Error(Errc::negative_probability, "density is negative inside a bin");
    pf = std::max(pf, 0.0);
    pg = std::max(pg, 0.0);
    total_f += pf;
    total_g += pg;
    s += std::sqrt(pf * pg);
  }
  if (std::abs(total_f - 1) > 1e-8 || std::abs(total_g - 1) > 1e-8)
    throw Error(Errc::invalid_argument, "densities do not integrate to 1 on the given range");
  return s;
}

}  // namespace

double binned_overlap(const std::function<double(double)>& density_in,
                      const std::function<double(double)>& density_out, double lo, double hi,
                      int bins) {
  if (!(hi > lo) || bins < 1) throw Error(Errc::invalid_argument, "empty binning range");
  double prev = binned_overlap_once(density_in, density_out, lo, hi, bins);
  for (int level = 0; level < 12; ++level) {
    bins *= 2;
    const double next = binned_overlap_once(density_in, density_out, lo, hi, bins);
    if (std::abs(next - prev) < 1e-6) return next;
    prev = next;
  }
  throw Error(Errc::grid_too_coarse, "binned overlap did not settle under refinement");
}

cd gaussian_pair_psi_x(const GaussianPairParams& p, int sign, double x) {
  const double s = sign >= 0 ? 1.0 : -1.0;
  return std::pow(2 * p.a / kPi, 0.25) * std::exp(cd(-p.a, s * p.b) * (x * x));
}

cd gaussian_pair_psi_k(const GaussianPairParams& p, int sign, double k) {
  const double s = sign >= 0 ? 1.0 : -1.0;
  const double r2 = p.a * p.a + p.b * p.b;
  return std::pow(p.a / (2 * kPi), 0.25) * std::sqrt(cd(p.a, s * p.b) / r2) *
         std::exp(cd(-p.a, -s * p.b) * (k * k / (4 * r2)));
}

cd gaussian_pair_overlap(const GaussianPairParams& p) {
  return std::sqrt(p.a * cd(p.a, p.b) / (p.a * p.a + p.b * p.b));
}

GaussianPairDensities gaussian_pair_densities(const GaussianPairParams& p,
                                              std::span<const double> grid) {
  if (grid.size() < 2) throw Error(Errc::invalid_argument, "grid needs at least two points");
  for (std::size_t i = 1; i < grid.size(); ++i)
    if (!(grid[i] > grid[i - 1])) throw Error(Errc::invalid_argument, "grid must strictly increase");
  const double reach = 8 * p.x_sigma();
  if (grid.front() > -reach || grid.back() < reach)
    throw Error(Errc::grid_too_coarse, "grid must cover +-8 standard deviations");

  GaussianPairDensities out;
  const std::size_t n = grid.size();
  out.x_plus.resize(n);
  out.x_minus.resize(n);
  out.k_plus.resize(n);
  out.k_minus.resize(n);
  std::vector<cd> integrand(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double x = grid[i];
    const cd plus = gaussian_pair_psi_x(p, +1, x);
    const cd minus = gaussian_pair_psi_x(p, -1, x);
    out.x_plus[i] = std::norm(plus);
    out.x_minus[i] = std::norm(minus);
    out.k_plus[i] = std::norm(gaussian_pair_psi_k(p, +1, x));
    out.k_minus[i] = std::norm(gaussian_pair_psi_k(p, -1, x));
    integrand[i] = std::conj(minus) * plus;
  }
  cd q{};
  for (std::size_t i = 1; i < n; ++i) q += 0.5 * (grid[i] - grid[i - 1]) * (integrand[i] + integrand[i - 1]);
  out.quadrature_overlap = q;
  if (std::abs(q - gaussian_pair_overlap(p)) > 1e-6)
    throw Error(Errc::grid_too_coarse, "trapezoid overlap misses the closed form by " +
                                           std::to_string(std::abs(q - gaussian_pair_overlap(p))));
  return out;
}

std::vector<double> gaussian_pair_grid(const GaussianPairParams& p, int points) {
  if (points < 2) throw Error(Errc::invalid_argument, "grid needs at least two points");
  const double reach = 8 * p.x_sigma();
  std::vector<double> g(static_cast<std::size_t>(points));
  for (int i = 0; i < points; ++i) g[static_cast<std::size_t>(i)] = -reach + 2 * reach * i / (points - 1);
  return g;
}

}  // namespace cvtele
