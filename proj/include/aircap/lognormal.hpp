#pragma once

namespace aircap {

/// Three-parameter lognormal: delay = theta + exp(mu + sigma * Z), Z ~ N(0,1).
/// Support is (theta, inf); theta may be negative to admit early departures.
struct ShiftedLogNormal {
  double mu = 0.0;
  double sigma = 1.0;
  double theta = 0.0;

  [[nodiscard]] double mean() const;
  [[nodiscard]] double variance() const;
  [[nodiscard]] double sd() const;

  /// Throws unless sigma > 0 and the mean is finite.
  void validate() const;

  friend bool operator==(const ShiftedLogNormal&, const ShiftedLogNormal&) = default;
};

}  // namespace aircap
