#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <cstdint>
#include <numbers>
#include <optional>
#include <stdexcept>

#include "mzi/error.hpp"
#include "mzi/schedule.hpp"

// Closed-form predictions. Nothing here takes a SettingSchedule: the quantum
// predictions do not depend on the order in which x takes its values.
namespace mzi::theory {

using cplx = std::complex<double>;

/// Output-mode amplitudes of the interferometer for unit input in mode 0.
struct AmplitudePair {
  cplx b0;
  cplx b1;
};

[[nodiscard]] inline AmplitudePair mzi_amplitudes(double phi0, double phi1) {
  const double half_diff = (phi0 - phi1) / 2.0;
  const double half_sum = (phi0 + phi1) / 2.0;
  const cplx prefactor = cplx(0.0, 1.0) * std::polar(1.0, half_sum);
  // Amplitude matrix [[sin, cos], [cos, -sin]] applied to (a0, a1) = (1, 0).
  return {prefactor * std::sin(half_diff), prefactor * std::cos(half_diff)};
}

/// Probability at D0 with x fixed for the whole run.
[[nodiscard]] inline double qt_fixed(double phi0, Setting x, const PhaseSetting& s = {}) {
  return std::norm(mzi_amplitudes(phi0, phase_for(s, x)).b0);
}

/// Probability of a D0 event labelled x when both settings occur equally often.
[[nodiscard]] inline double qt_grouped(double phi0, Setting x, const PhaseSetting& s = {}) {
  return 0.5 * qt_fixed(phi0, x, s);
}

/// D1 counterpart of qt_grouped.
[[nodiscard]] inline double qt_grouped_d1(double phi0, Setting x, const PhaseSetting& s = {}) {
  return 0.5 * std::norm(mzi_amplitudes(phi0, phase_for(s, x)).b1);
}

/// D0 probability when events are not sorted by x.
[[nodiscard]] inline double qt_ungrouped(double phi0, const PhaseSetting& s = {}) {
  return qt_grouped(phi0, Setting::kPlus, s) + qt_grouped(phi0, Setting::kMinus, s);
}

using Matrix2 = std::array<std::array<cplx, 2>, 2>;

[[nodiscard]] inline Matrix2 density_matrix(const AmplitudePair& b, double weight) {
  const std::array<cplx, 2> v{b.b0, b.b1};
  Matrix2 rho{};
  for (int j = 0; j < 2; ++j) {
    for (int k = 0; k < 2; ++k) rho[j][k] = weight * std::conj(v[j]) * v[k];
  }
  return rho;
}

[[nodiscard]] inline cplx trace_product(const Matrix2& a, const Matrix2& b) {
  cplx t = 0.0;
  for (int j = 0; j < 2; ++j) {
    for (int k = 0; k < 2; ++k) t += a[j][k] * b[k][j];
  }
  return t;
}

/// D0 probability for group x from the ensemble density matrix: sum over the
/// settings y (each with weight 1/2) of Tr rho(y) P0 delta(x, y). Independent
/// route to qt_grouped.
[[nodiscard]] inline double qt_density_check(double phi0, const PhaseSetting& s, Setting x) {
  double total = 0.0;
  for (Setting y : {Setting::kPlus, Setting::kMinus}) {
    const Matrix2 rho = density_matrix(mzi_amplitudes(phi0, phase_for(s, y)), 0.5);
    Matrix2 projector{};
    if (x == y) projector[0][0] = 1.0;
    total += trace_product(rho, projector).real();
  }
  return total;
}

/// E is the fraction of detections generated from phase information that
/// belongs to the other setting.
struct CorpuscularParams {
  double E = 0.0;
  double delta = -std::numbers::pi / 2;
};

inline void check_rate(double E) {
  if (!(E >= 0.0 && E <= 1.0)) throw std::domain_error("wrong-association rate must lie in [0, 1]");
}

/// Grouped D0 frequency of the corpuscular model with phi1(+1) = 0 and
/// phi1(-1) = delta.
[[nodiscard]] inline double corpuscular_grouped(double phi0, Setting x, const CorpuscularParams& p) {
  check_rate(p.E);
  const double own = x == Setting::kPlus ? phi0 : phi0 - p.delta;
  const double other = x == Setting::kPlus ? phi0 - p.delta : phi0;
  const double s_own = std::sin(own / 2.0);
  const double s_other = std::sin(other / 2.0);
  return (1.0 - p.E) / 2.0 * s_own * s_own + p.E / 2.0 * s_other * s_other;
}

struct VisibilityShift {
  double Delta = 1.0;
  double psi = 0.0;
};

/// Visibility and fringe shift of corpuscular_grouped(x = +1), which equals
/// (1 - Delta cos(phi0 - psi)) / 4. psi uses atan2 so it stays continuous
/// when 1 - E + E cos(delta) <= 0.
[[nodiscard]] inline VisibilityShift visibility_shift(const CorpuscularParams& p) {
  check_rate(p.E);
  const double E = p.E;
  const double cd = std::cos(p.delta);
  const double sq = 2.0 * E * E - 2.0 * E + 1.0 + 2.0 * E * (1.0 - E) * cd;
  return {std::sqrt(std::max(sq, 0.0)), std::atan2(E * std::sin(p.delta), 1.0 - E + E * cd)};
}

/// Wrong-association rate of the random procedure, approximately 1/(2+2K).
[[nodiscard]] inline double e_random_approx(std::int64_t K) {
  if (K < 1) throw std::domain_error("K must be >= 1");
  return 1.0 / (2.0 + 2.0 * static_cast<double>(K));
}

/// Published fitted rates for the systematic procedure. There is no closed
/// form; only K = 1 and K = 10 are known.
[[nodiscard]] inline std::optional<double> e_systematic_reference(std::int64_t K) {
  if (K == 1) return 0.333;
  if (K == 10) return 0.100;
  return std::nullopt;
}

}  // namespace mzi::theory
