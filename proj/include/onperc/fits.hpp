#pragma once

// Least-squares fits: weighted log-log power laws and the mixed
// exponential-plus-power decay model for two-point tables.

#include <cstdint>
#include <map>
#include <span>
#include <string>

namespace onp {

enum class FitModel : uint8_t { power_law, eq7, exponential };

struct FitResult {
  FitModel model = FitModel::power_law;
  std::map<std::string, double> params;
  std::map<std::string, double> errors;
  double goodness = 0.0;  // chi^2 per dof (unit weights when no errors given)
  int dof = 0;
  bool converged = false;
  double x_min = 0.0, x_max = 0.0;
  int iterations = 0;
  std::string message;
};

// value = amplitude * x^exponent by weighted least squares in log-log;
// params: amplitude, exponent, eta (= 2 - exponent for susceptibility
// scaling); needs >= 3 points, all values positive
FitResult fit_power_law(std::span<const double> x,
                        std::span<const double> value,
                        std::span<const double> error = {});

// g(r) = a exp(-m r) / sqrt(r); params: a, m (m >= 0)
FitResult fit_exponential(std::span<const double> r, std::span<const double> g,
                          std::span<const double> error = {});

struct Eq7Fit {
  FitResult mixed;             // a e^{-m r}/sqrt(r) + b r^{-eta}
  FitResult pure_power;        // b r^{-eta}
  FitResult pure_exponential;  // a e^{-m r}/sqrt(r)
  std::string preferred;       // best converged model by goodness
};

// fits all three decay models to a two-point table (r >= 1, >= 8 points);
// mixed-model start: m from the mid-range log slope, eta from the large-r
// log-log slope, then (a, b) from a linear solve at fixed (m, eta)
Eq7Fit fit_eq7(std::span<const double> r, std::span<const double> g,
               std::span<const double> error = {});

}  // namespace onp
