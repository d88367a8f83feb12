#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "mzi/error.hpp"
#include "mzi/message.hpp"
#include "mzi/network.hpp"
#include "mzi/theory.hpp"

namespace mzi {

/// The four detector counters, split by detector and by the setting that was
/// active when the photon was emitted.
struct DetectionTally {
  std::uint64_t n0_plus = 0;
  std::uint64_t n0_minus = 0;
  std::uint64_t n1_plus = 0;
  std::uint64_t n1_minus = 0;

  void add(Setting x, int detector) noexcept {
    const bool plus = x == Setting::kPlus;
    if (detector == 0) {
      ++(plus ? n0_plus : n0_minus);
    } else {
      ++(plus ? n1_plus : n1_minus);
    }
  }
  void add(const DetectionEvent& e) noexcept { add(e.x, e.detector); }

  [[nodiscard]] std::uint64_t plus() const noexcept { return n0_plus + n1_plus; }
  [[nodiscard]] std::uint64_t minus() const noexcept { return n0_minus + n1_minus; }
  [[nodiscard]] std::uint64_t total() const noexcept { return plus() + minus(); }

  DetectionTally& operator+=(const DetectionTally& o) noexcept {
    n0_plus += o.n0_plus;
    n0_minus += o.n0_minus;
    n1_plus += o.n1_plus;
    n1_minus += o.n1_minus;
    return *this;
  }
  friend bool operator==(const DetectionTally&, const DetectionTally&) = default;
};

[[nodiscard]] inline DetectionTally tally(std::span<const DetectionEvent> events) {
  DetectionTally t;
  for (const auto& e : events) t.add(e);
  return t;
}

namespace detail {
[[nodiscard]] inline double ratio(std::uint64_t num, std::uint64_t den) noexcept {
  return den == 0 ? std::numeric_limits<double>::quiet_NaN()
                  : static_cast<double>(num) / static_cast<double>(den);
}
}  // namespace detail

/// Normalized D0 frequencies at one phi0. Grouped frequencies are normalized
/// within their own group, F0(x) = N0(x) / (N0(x) + N1(x)), and are NaN for
/// an empty group.
struct FrequencyPoint {
  double phi0 = 0.0;
  double f0_plus = 0.0;
  double f0_minus = 0.0;
  double f0_ungrouped = 0.0;
  DetectionTally counts;

  [[nodiscard]] double occupancy_plus() const noexcept {
    return detail::ratio(counts.plus(), counts.total());
  }
  [[nodiscard]] double occupancy_minus() const noexcept {
    return detail::ratio(counts.minus(), counts.total());
  }
  /// Grouped frequency in the convention that keeps the occupancy prefactor,
  /// comparable to qt_grouped.
  [[nodiscard]] double i0_plus() const noexcept { return occupancy_plus() * f0_plus; }
  [[nodiscard]] double i0_minus() const noexcept { return occupancy_minus() * f0_minus; }
};

[[nodiscard]] inline FrequencyPoint make_point(double phi0, const DetectionTally& t) {
  return {phi0, detail::ratio(t.n0_plus, t.plus()), detail::ratio(t.n0_minus, t.minus()),
          detail::ratio(t.n0_plus + t.n0_minus, t.total()), t};
}

/// Binomial variance of a normalized frequency estimated from n trials.
[[nodiscard]] inline double binomial_variance(double f, std::uint64_t n) noexcept {
  if (n == 0 || std::isnan(f)) return 0.0;
  return f * (1.0 - f) / static_cast<double>(n);
}

struct FitPoint {
  double phi0 = 0.0;
  double value = 0.0;
  /// Known sampling variance of `value`; 0 means unknown.
  double variance = 0.0;
};

/// f(phi0) = C (1 - Delta cos(phi0 - psi)) = C + a cos(phi0) + b sin(phi0).
struct FitResult {
  double C = 0.0;
  double A = 0.0;
  double Delta = 0.0;
  double psi = 0.0;
  double rms_residual = 0.0;
  std::optional<double> E_hat;
  double C_se = 0.0;
  double Delta_se = 0.0;
  double psi_se = 0.0;

  [[nodiscard]] double evaluate(double phi0) const noexcept {
    return C * (1.0 - Delta * std::cos(phi0 - psi));
  }
};

namespace detail {

using Mat3 = std::array<std::array<double, 3>, 3>;

[[nodiscard]] inline std::optional<Mat3> invert(const Mat3& m) {
  const double det = m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) -
                     m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0]) +
                     m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0]);
  double scale = 0.0;
  for (const auto& row : m) {
    for (double v : row) scale = std::max(scale, std::abs(v));
  }
  if (scale == 0.0 || std::abs(det) <= 1e-12 * scale * scale * scale) return std::nullopt;
  Mat3 inv;
  inv[0][0] = (m[1][1] * m[2][2] - m[1][2] * m[2][1]) / det;
  inv[0][1] = (m[0][2] * m[2][1] - m[0][1] * m[2][2]) / det;
  inv[0][2] = (m[0][1] * m[1][2] - m[0][2] * m[1][1]) / det;
  inv[1][0] = (m[1][2] * m[2][0] - m[1][0] * m[2][2]) / det;
  inv[1][1] = (m[0][0] * m[2][2] - m[0][2] * m[2][0]) / det;
  inv[1][2] = (m[0][2] * m[1][0] - m[0][0] * m[1][2]) / det;
  inv[2][0] = (m[1][0] * m[2][1] - m[1][1] * m[2][0]) / det;
  inv[2][1] = (m[0][1] * m[2][0] - m[0][0] * m[2][1]) / det;
  inv[2][2] = (m[0][0] * m[1][1] - m[0][1] * m[1][0]) / det;
  return inv;
}

// Largest empty arc between sampled phases on the circle.
[[nodiscard]] inline double largest_gap(std::vector<double> phases) {
  std::sort(phases.begin(), phases.end());
  double gap = phases.front() + kTwoPi - phases.back();
  for (std::size_t i = 1; i < phases.size(); ++i) gap = std::max(gap, phases[i] - phases[i - 1]);
  return gap;
}

}  // namespace detail

/// Linear least-squares fit of C + a cos(phi0) + b sin(phi0) with uniform
/// weights. Standard errors come from the supplied point variances when all
/// are known, otherwise from the residual scatter.
[[nodiscard]] inline FitResult fit_sinusoid(std::span<const FitPoint> points) {
  std::vector<double> phases;
  phases.reserve(points.size());
  for (const auto& p : points) {
    if (!std::isfinite(p.phi0) || !std::isfinite(p.value)) {
      throw input_error("fit input contains a non-finite value");
    }
    phases.push_back(wrap_phase(p.phi0));
  }
  std::vector<double> distinct = phases;
  std::sort(distinct.begin(), distinct.end());
  distinct.erase(std::unique(distinct.begin(), distinct.end(),
                             [](double a, double b) { return std::abs(a - b) < 1e-12; }),
                 distinct.end());
  if (distinct.size() < 2) throw input_error("fit design is rank deficient: all phi0 equal mod 2pi");
  if (distinct.size() < 4) throw input_error("fit needs at least 4 distinct phi0 values");
  if (detail::largest_gap(distinct) > std::numbers::pi + 1e-12) {
    throw input_error("fit needs phi0 values spanning at least pi");
  }

  detail::Mat3 normal{};
  std::array<double, 3> rhs{};
  for (const auto& p : points) {
    const std::array<double, 3> row{1.0, std::cos(p.phi0), std::sin(p.phi0)};
    for (int j = 0; j < 3; ++j) {
      rhs[j] += row[j] * p.value;
      for (int k = 0; k < 3; ++k) normal[j][k] += row[j] * row[k];
    }
  }
  const auto inv = detail::invert(normal);
  if (!inv) throw input_error("fit design is rank deficient");
  std::array<double, 3> beta{};
  for (int j = 0; j < 3; ++j) {
    for (int k = 0; k < 3; ++k) beta[j] += (*inv)[j][k] * rhs[k];
  }
  const auto [C, a, b] = beta;
  if (!(C > 0.0)) throw input_error("fitted offset C <= 0: nonphysical frequency data");

  FitResult fit;
  fit.C = C;
  fit.A = std::hypot(a, b);
  fit.Delta = fit.A / C;
  fit.psi = fit.A == 0.0 ? 0.0 : std::atan2(-b, -a);
  if (fit.psi <= -std::numbers::pi) fit.psi = std::numbers::pi;

  double ssr = 0.0;
  bool variances_known = true;
  for (const auto& p : points) {
    const double r = p.value - (C + a * std::cos(p.phi0) + b * std::sin(p.phi0));
    ssr += r * r;
    variances_known = variances_known && p.variance > 0.0;
  }
  const auto n = static_cast<double>(points.size());
  fit.rms_residual = std::sqrt(ssr / n);

  // Parameter covariance: (X'X)^-1 X' S X (X'X)^-1 with S the diagonal of
  // point variances, or s^2 (X'X)^-1 from the residuals.
  detail::Mat3 cov{};
  if (variances_known) {
    detail::Mat3 meat{};
    for (const auto& p : points) {
      const std::array<double, 3> row{1.0, std::cos(p.phi0), std::sin(p.phi0)};
      for (int j = 0; j < 3; ++j) {
        for (int k = 0; k < 3; ++k) meat[j][k] += row[j] * row[k] * p.variance;
      }
    }
    for (int i = 0; i < 3; ++i) {
      for (int l = 0; l < 3; ++l) {
        for (int j = 0; j < 3; ++j) {
          for (int k = 0; k < 3; ++k) cov[i][l] += (*inv)[i][j] * meat[j][k] * (*inv)[k][l];
        }
      }
    }
  } else if (points.size() > 3) {
    const double s2 = ssr / (n - 3.0);
    for (int j = 0; j < 3; ++j) {
      for (int k = 0; k < 3; ++k) cov[j][k] = s2 * (*inv)[j][k];
    }
  }
  const auto propagate = [&cov](const std::array<double, 3>& g) {
    double v = 0.0;
    for (int j = 0; j < 3; ++j) {
      for (int k = 0; k < 3; ++k) v += g[j] * cov[j][k] * g[k];
    }
    return std::sqrt(std::max(v, 0.0));
  };
  fit.C_se = std::sqrt(std::max(cov[0][0], 0.0));
  if (fit.A > 0.0) {
    fit.Delta_se = propagate({-fit.A / (C * C), a / (fit.A * C), b / (fit.A * C)});
    fit.psi_se = propagate({0.0, -b / (fit.A * fit.A), a / (fit.A * fit.A)});
  } else {
    fit.Delta_se = propagate({0.0, 1.0 / C, 0.0});
  }
  return fit;
}

/// Fit of one grouped or ungrouped frequency column, with binomial variances.
enum class FrequencyColumn { kPlus, kMinus, kUngrouped };

[[nodiscard]] inline std::vector<FitPoint> fit_points(std::span<const FrequencyPoint> rows,
                                                      FrequencyColumn column) {
  std::vector<FitPoint> out;
  out.reserve(rows.size());
  for (const auto& r : rows) {
    double value = 0.0;
    std::uint64_t n = 0;
    switch (column) {
      case FrequencyColumn::kPlus:
        value = r.f0_plus;
        n = r.counts.plus();
        break;
      case FrequencyColumn::kMinus:
        value = r.f0_minus;
        n = r.counts.minus();
        break;
      case FrequencyColumn::kUngrouped:
        value = r.f0_ungrouped;
        n = r.counts.total();
        break;
    }
    if (std::isnan(value)) continue;
    out.push_back({r.phi0, value, binomial_variance(value, n)});
  }
  return out;
}

class inconsistent_fit_error : public input_error {
 public:
  using input_error::input_error;
};

struct EInference {
  double E = 0.0;
  /// Visibility implied by E through the closed form.
  double predicted_Delta = 1.0;
  /// Fitted visibility minus predicted_Delta.
  double discrepancy = 0.0;
};

/// Inverts psi = atan2(E sin d, 1 - E + E cos d) for E, then checks the
/// fitted visibility against the one E implies.
[[nodiscard]] inline EInference infer_E(double Delta, double psi, double delta) {
  const double sd = std::sin(delta);
  const double sp = std::sin(psi);
  const double cp = std::cos(psi);
  const double denom = sd * cp + sp * (1.0 - std::cos(delta));
  EInference out;
  if (std::abs(sp) < 1e-15) {
    out.E = 0.0;
  } else if (std::abs(denom) < 1e-15) {
    throw input_error("wrong-association rate is undetermined: sin(delta) = 0 with psi != 0");
  } else {
    out.E = sp / denom;
  }
  const double clamped = std::clamp(out.E, 0.0, 1.0);
  out.predicted_Delta = theory::visibility_shift({clamped, delta}).Delta;
  out.discrepancy = Delta - out.predicted_Delta;
  return out;
}

/// Rate of wrong associations implied by a fit of F0(x = +1). Throws
/// inconsistent_fit_error when no E in [0, 1] reproduces the fit within
/// `tolerance`.
[[nodiscard]] inline EInference estimate_E(const FitResult& fit, double delta,
                                           double tolerance = 0.02) {
  const EInference e = infer_E(fit.Delta, fit.psi, delta);
  if (e.E < -tolerance || e.E > 1.0 + tolerance || std::abs(e.discrepancy) > tolerance) {
    throw inconsistent_fit_error("fit (Delta=" + std::to_string(fit.Delta) +
                                 ", psi=" + std::to_string(fit.psi) +
                                 ") matches neither quantum nor corpuscular prediction");
  }
  return e;
}

enum class Verdict { kQuantumLike, kCorpuscularLike, kInconclusive };

[[nodiscard]] inline const char* to_string(Verdict v) noexcept {
  switch (v) {
    case Verdict::kQuantumLike:
      return "QUANTUM-LIKE";
    case Verdict::kCorpuscularLike:
      return "CORPUSCULAR-LIKE";
    case Verdict::kInconclusive:
      return "INCONCLUSIVE";
  }
  return "INCONCLUSIVE";
}

/// Fits of the three stages, indexed by role rather than by execution order.
/// The varying stage is analyzed on the x = +1 group and compared with the
/// fixed x = +1 stage.
struct StageFits {
  FitResult fixed_minus;
  FitResult fixed_plus;
  FitResult varying;
};

/// Absolute tolerances for the verdict. Unset entries default to three
/// combined fit standard errors.
struct StageTolerances {
  std::optional<double> visibility;
  std::optional<double> phase;
};

struct StageReport {
  StageFits fits;
  double visibility_drop = 0.0;
  double shift_difference = 0.0;
  double E_hat = 0.0;
  std::optional<double> E_expected;
  double visibility_tolerance = 0.0;
  double phase_tolerance = 0.0;
  Verdict verdict = Verdict::kInconclusive;
};

namespace detail {
[[nodiscard]] inline double wrap_signed(double a) noexcept {
  double r = std::remainder(a, kTwoPi);
  if (r <= -std::numbers::pi) r += kTwoPi;
  return r;
}
}  // namespace detail

[[nodiscard]] inline StageReport compare_stages(const StageFits& fits, double delta,
                                                std::optional<double> expected_E = std::nullopt,
                                                const StageTolerances& tol = {}) {
  constexpr double kFloor = 1e-6;
  const FitResult& ref = fits.fixed_plus;
  const FitResult& var = fits.varying;

  StageReport report;
  report.fits = fits;
  report.E_expected = expected_E;
  report.visibility_drop = ref.Delta - var.Delta;
  report.shift_difference = detail::wrap_signed(var.psi - ref.psi);
  report.visibility_tolerance =
      tol.visibility.value_or(std::max(3.0 * std::hypot(var.Delta_se, ref.Delta_se), kFloor));
  report.phase_tolerance =
      tol.phase.value_or(std::max(3.0 * std::hypot(var.psi_se, ref.psi_se), kFloor));

  // Best E in [0, 1] for the pair (Delta ratio, relative shift); the fixed
  // stage's visibility absorbs apparatus-level contrast loss.
  const double vis_scale = std::max(var.Delta_se, kFloor);
  const double psi_scale = std::max(var.psi_se, kFloor);
  const auto cost = [&](double E) {
    const auto vs = theory::visibility_shift({E, delta});
    const double dv = (var.Delta - ref.Delta * vs.Delta) / vis_scale;
    const double dp = detail::wrap_signed(report.shift_difference - vs.psi) / psi_scale;
    return dv * dv + dp * dp;
  };
  constexpr int kGrid = 2000;
  double best = 0.0;
  double best_cost = cost(0.0);
  for (int i = 1; i <= kGrid; ++i) {
    const double E = static_cast<double>(i) / kGrid;
    if (const double c = cost(E); c < best_cost) {
      best_cost = c;
      best = E;
    }
  }
  // Golden-section refinement around the grid minimum.
  double lo = std::max(0.0, best - 1.0 / kGrid);
  double hi = std::min(1.0, best + 1.0 / kGrid);
  const double g = (std::sqrt(5.0) - 1.0) / 2.0;
  for (int it = 0; it < 80; ++it) {
    const double m1 = hi - g * (hi - lo);
    const double m2 = lo + g * (hi - lo);
    if (cost(m1) < cost(m2)) {
      hi = m2;
    } else {
      lo = m1;
    }
  }
  report.E_hat = (lo + hi) / 2.0;
  if (cost(best) < cost(report.E_hat)) report.E_hat = best;

  const bool quantum = std::abs(report.visibility_drop) <= report.visibility_tolerance &&
                       std::abs(report.shift_difference) <= report.phase_tolerance;
  const auto vs = theory::visibility_shift({report.E_hat, delta});
  const bool corpuscular =
      std::abs(var.Delta - ref.Delta * vs.Delta) <= report.visibility_tolerance &&
      std::abs(detail::wrap_signed(report.shift_difference - vs.psi)) <= report.phase_tolerance;

  if (quantum) {
    report.verdict = Verdict::kQuantumLike;
  } else if (corpuscular) {
    report.verdict = Verdict::kCorpuscularLike;
  } else {
    report.verdict = Verdict::kInconclusive;
  }
  return report;
}

}  // namespace mzi
