#include "lfo/prony.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

namespace lfo::prony {
namespace {

using cplx = std::complex<double>;

constexpr double kRealRootTolerance = 1e-12;

bool is_real_root(cplx z) { return std::abs(z.imag()) <= kRealRootTolerance * std::max(1.0, std::abs(z)); }

// z^m evaluated through the logarithm so long windows keep full relative accuracy.
cplx root_power(cplx log_z, std::size_t m) { return std::exp(static_cast<double>(m) * log_z); }

double mode_value(const PronyMode& mode, double t) {
  return mode.amplitude * std::exp(mode.damping * t) * std::cos(kTwoPi * mode.frequency * t + mode.phase);
}

}  // namespace

std::vector<double> fit_lpm(std::span<const double> y, int order) {
  if (order < 1) throw Error(ErrorCode::InvalidConfig, "prediction order must be positive");
  const auto n = static_cast<std::size_t>(order);
  const std::size_t m = y.size();
  if (m < 3 * n) {
    throw Error(ErrorCode::OrderTooHigh,
                "order " + std::to_string(order) + " needs at least " + std::to_string(3 * n) + " samples, got " +
                    std::to_string(m),
                m);
  }

  const auto rows = static_cast<Eigen::Index>(m - n);
  Eigen::MatrixXd design(rows, order);
  Eigen::VectorXd target(rows);
  for (Eigen::Index r = 0; r < rows; ++r) {
    const std::size_t sample = n + static_cast<std::size_t>(r);
    target(r) = y[sample];
    for (std::size_t i = 1; i <= n; ++i) design(r, static_cast<Eigen::Index>(i - 1)) = y[sample - i];
  }

  Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod;
  cod.setThreshold(kLpmRankTolerance);
  cod.compute(design);
  if (design.cwiseAbs().maxCoeff() == 0.0 || cod.rank() == 0) {
    throw Error(ErrorCode::InsufficientExcitation, "prediction system has rank zero (no excitation in the window)");
  }
  const Eigen::VectorXd a = cod.solve(target);
  return {a.data(), a.data() + a.size()};
}

std::vector<double> fit_lpm(const SampleWindow& w, int order) { return fit_lpm(std::span(w.samples), order); }

RootMapping roots_to_modes(std::span<const cplx> roots, double dt) {
  RootMapping out;
  std::vector<bool> used(roots.size(), false);
  for (std::size_t i = 0; i < roots.size(); ++i) {
    if (used[i]) continue;
    used[i] = true;
    const cplx z = roots[i];
    if (z == 0.0) {
      ++out.dropped_zero_roots;
      continue;
    }
    RootMode mode;
    if (is_real_root(z)) {
      mode.root = {z.real(), 0.0};
    } else {
      mode.conjugate_pair = true;
      mode.root = z.imag() > 0.0 ? z : std::conj(z);
      // Consume the partner if present.
      const cplx partner = std::conj(z);
      const double tol = 1e-9 * std::max(1.0, std::abs(z));
      for (std::size_t j = i + 1; j < roots.size(); ++j) {
        if (!used[j] && std::abs(roots[j] - partner) <= tol) {
          used[j] = true;
          break;
        }
      }
    }
    const cplx log_z = std::log(mode.root);
    mode.damping = log_z.real() / dt;
    mode.frequency = std::abs(log_z.imag()) / (kTwoPi * dt);
    out.modes.push_back(mode);
  }
  return out;
}

AmplitudeSolution solve_amplitudes(std::span<const double> y, const std::vector<RootMode>& modes) {
  AmplitudeSolution out;
  out.amplitudes.resize(modes.size());
  if (modes.empty()) return out;

  // Column layout: one column per real mode, two per conjugate pair.
  std::vector<cplx> logs;
  std::vector<std::size_t> first_column(modes.size());
  for (std::size_t k = 0; k < modes.size(); ++k) {
    first_column[k] = logs.size();
    const cplx lz = std::log(modes[k].root);
    logs.push_back(lz);
    if (modes[k].conjugate_pair) logs.push_back(std::conj(lz));
  }

  const auto rows = static_cast<Eigen::Index>(y.size());
  const auto cols = static_cast<Eigen::Index>(logs.size());
  Eigen::MatrixXcd vandermonde(rows, cols);
  Eigen::VectorXcd target(rows);
  for (Eigen::Index r = 0; r < rows; ++r) {
    target(r) = y[static_cast<std::size_t>(r)];
    for (Eigen::Index c = 0; c < cols; ++c) {
      vandermonde(r, c) = root_power(logs[static_cast<std::size_t>(c)], static_cast<std::size_t>(r));
    }
  }

  Eigen::JacobiSVD<Eigen::MatrixXcd, Eigen::ColPivHouseholderQRPreconditioner> svd(
      vandermonde, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const auto& sv = svd.singularValues();
  const double smallest = sv(sv.size() - 1);
  out.condition_estimate = smallest > 0.0 ? sv(0) / smallest : std::numeric_limits<double>::infinity();
  out.ill_conditioned = !(out.condition_estimate <= kIllConditionedLimit);
  const Eigen::VectorXcd b = svd.solve(target);

  for (std::size_t k = 0; k < modes.size(); ++k) {
    const cplx coeff = b(static_cast<Eigen::Index>(first_column[k]));
    if (modes[k].conjugate_pair) {
      out.amplitudes[k] = {2.0 * std::abs(coeff), wrap_angle(std::arg(coeff))};
    } else {
      out.amplitudes[k] = {std::abs(coeff.real()), coeff.real() < 0.0 ? kPi : 0.0};
    }
  }
  return out;
}

std::vector<double> reconstruct(std::span<const PronyMode> modes, std::size_t count, double dt) {
  std::vector<double> out(count, 0.0);
  for (std::size_t m = 0; m < count; ++m) {
    const double t = static_cast<double>(m) * dt;
    for (const auto& mode : modes) out[m] += mode_value(mode, t);
  }
  return out;
}

std::vector<double> reconstruct(const PronyFit& fit, std::size_t count, double dt) {
  return reconstruct(std::span(fit.modes), count, dt);
}

PronyFit analyze(const SampleWindow& w, const AnalysisConfig& cfg) {
  validate_window(w);
  PronyFit fit;
  fit.order = resolve_prony_order(cfg, w.size());
  fit.lpm_coefficients = fit_lpm(w, fit.order);
  fit.roots = characteristic_roots(fit.lpm_coefficients);

  const RootMapping mapping = roots_to_modes(fit.roots, w.dt);
  if (mapping.dropped_zero_roots > 0) {
    fit.diagnostics.push_back("dropped " + std::to_string(mapping.dropped_zero_roots) + " zero root(s)");
  }
  const AmplitudeSolution solution = solve_amplitudes(w.samples, mapping.modes);
  fit.condition_estimate = solution.condition_estimate;
  fit.ill_conditioned = solution.ill_conditioned;
  if (fit.ill_conditioned) {
    std::ostringstream msg;
    msg << "Vandermonde system ill-conditioned (condition estimate " << solution.condition_estimate << ")";
    fit.diagnostics.push_back(msg.str());
  }

  const double duration = w.duration();
  std::vector<PronyMode> candidates;
  std::size_t artifacts = 0;
  for (std::size_t k = 0; k < mapping.modes.size(); ++k) {
    const auto& rm = mapping.modes[k];
    if (std::abs(rm.damping) * duration > kMaxDampingSpan) {
      ++artifacts;
      continue;
    }
    PronyMode mode;
    mode.amplitude = solution.amplitudes[k].amplitude;
    mode.phase = solution.amplitudes[k].phase;
    mode.damping = rm.damping;
    mode.frequency = rm.frequency;
    candidates.push_back(mode);
  }
  if (artifacts > 0) {
    fit.diagnostics.push_back("discarded " + std::to_string(artifacts) + " mode(s) with implausible damping");
  }

  double max_amplitude = 0.0;
  for (const auto& mode : candidates) max_amplitude = std::max(max_amplitude, mode.amplitude);
  const double floor = cfg.min_mode_amplitude_fraction * max_amplitude;
  for (const auto& mode : candidates) {
    if (mode.amplitude > 0.0 && mode.amplitude >= floor) fit.modes.push_back(mode);
  }

  std::vector<double> energies(fit.modes.size(), 0.0);
  for (std::size_t k = 0; k < fit.modes.size(); ++k) {
    for (std::size_t m = 0; m < w.size(); ++m) {
      const double v = mode_value(fit.modes[k], static_cast<double>(m) * w.dt);
      energies[k] += v * v;
    }
  }
  const double total = std::accumulate(energies.begin(), energies.end(), 0.0);
  for (std::size_t k = 0; k < fit.modes.size(); ++k) {
    fit.modes[k].energy_fraction = total > 0.0 ? energies[k] / total : 0.0;
  }
  std::stable_sort(fit.modes.begin(), fit.modes.end(), [](const PronyMode& l, const PronyMode& r) {
    if (l.energy_fraction != r.energy_fraction) return l.energy_fraction > r.energy_fraction;
    return l.frequency < r.frequency;
  });

  const auto fitted = reconstruct(fit, w.size(), w.dt);
  double err = 0.0;
  double norm = 0.0;
  for (std::size_t m = 0; m < w.size(); ++m) {
    const double d = w.samples[m] - fitted[m];
    err += d * d;
    norm += w.samples[m] * w.samples[m];
  }
  fit.fit_quality = norm > 0.0 ? std::clamp(1.0 - std::sqrt(err / norm), 0.0, 1.0) : 0.0;
  return fit;
}

}  // namespace lfo::prony
