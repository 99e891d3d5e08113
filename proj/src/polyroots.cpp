#include <algorithm>
#include <cmath>
#include <complex>
#include <vector>

#include "lfo/prony.hpp"

namespace lfo::prony {
namespace {

using cplx = std::complex<double>;

constexpr int kMaxIterations = 200;
constexpr double kStepTolerance = 1e-12;
constexpr double kResidualTolerance = 1e-8;

struct HornerValue {
  cplx p;
  cplx dp;
};

// coeffs[0] is the leading coefficient.
HornerValue horner(const std::vector<double>& coeffs, cplx z) {
  cplx p = coeffs[0];
  cplx dp = 0.0;
  for (std::size_t i = 1; i < coeffs.size(); ++i) {
    dp = dp * z + p;
    p = p * z + coeffs[i];
  }
  return {p, dp};
}

// Replaces near-conjugate pairs by exact conjugates and near-real roots by real ones.
void symmetrize(std::vector<cplx>& roots) {
  const std::size_t n = roots.size();
  std::vector<bool> done(n, false);
  auto real_tol = [](cplx z) { return 1e-9 * std::max(1.0, std::abs(z)); };

  for (std::size_t i = 0; i < n; ++i) {
    if (done[i] || roots[i].imag() <= real_tol(roots[i])) continue;
    std::size_t best = n;
    double best_dist = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      if (j == i || done[j] || roots[j].imag() >= -real_tol(roots[j])) continue;
      const double d = std::abs(roots[j] - std::conj(roots[i]));
      if (best == n || d < best_dist) {
        best = j;
        best_dist = d;
      }
    }
    if (best == n) continue;
    const cplx merged = 0.5 * (roots[i] + std::conj(roots[best]));
    roots[i] = merged;
    roots[best] = std::conj(merged);
    done[i] = done[best] = true;
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (!done[i] && std::abs(roots[i].imag()) <= real_tol(roots[i])) roots[i] = {roots[i].real(), 0.0};
  }
}

}  // namespace

std::vector<cplx> characteristic_roots(std::span<const double> a) {
  const std::size_t n = a.size();
  if (n == 0) return {};
  std::vector<double> coeffs(n + 1);
  coeffs[0] = 1.0;
  double max_a = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    coeffs[i + 1] = -a[i];
    max_a = std::max(max_a, std::abs(a[i]));
  }
  if (n == 1) return {cplx(a[0], 0.0)};

  // Aberth-Ehrlich simultaneous iteration.
  std::vector<cplx> z(n);
  const double radius = 1.0 + max_a;
  for (std::size_t k = 0; k < n; ++k) {
    z[k] = std::polar(radius, kTwoPi * static_cast<double>(k) / static_cast<double>(n) + 0.4);
  }
  for (int it = 0; it < kMaxIterations; ++it) {
    double max_step = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
      const auto [p, dp] = horner(coeffs, z[k]);
      if (p == 0.0) continue;
      const cplx ratio = p / dp;
      cplx repulsion = 0.0;
      for (std::size_t j = 0; j < n; ++j) {
        if (j != k) repulsion += 1.0 / (z[k] - z[j]);
      }
      const cplx step = ratio / (1.0 - ratio * repulsion);
      if (!std::isfinite(step.real()) || !std::isfinite(step.imag())) continue;
      z[k] -= step;
      max_step = std::max(max_step, std::abs(step) / std::max(1.0, std::abs(z[k])));
    }
    if (max_step < kStepTolerance) break;
  }

  const double max_coeff = std::max(1.0, max_a);
  for (const auto& root : z) {
    const double scale = std::pow(std::max(1.0, std::abs(root)), static_cast<double>(n));
    const double residual = std::abs(horner(coeffs, root).p);
    if (!(residual <= kResidualTolerance * max_coeff * scale)) {
      throw Error(ErrorCode::RootSolverDiverged,
                  "characteristic polynomial root did not converge (residual " + std::to_string(residual) + ")");
    }
  }

  symmetrize(z);
  std::sort(z.begin(), z.end(), [](cplx l, cplx r) {
    const double al = std::abs(std::arg(l));
    const double ar = std::abs(std::arg(r));
    if (al != ar) return al < ar;
    if (l.imag() != r.imag()) return l.imag() > r.imag();
    return std::abs(l) > std::abs(r);
  });
  return z;
}

}  // namespace lfo::prony
