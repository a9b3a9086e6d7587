#pragma once

#include <string>
#include <utility>
#include <vector>

namespace elrp {

using TechId = std::string;

// Piecewise-linear charging function for one station technology: an ordered
// list of (energy kWh, time h) breakpoints starting at (0,0) and ending at
// (Q, time_to_full). The energy->time map is convex (the charging rate in
// kWh/h never increases as the battery fills), strictly increasing in both
// coordinates. All operations are pure and reentrant.
class ChargingFunction {
  public:
    ChargingFunction() = default;
    ChargingFunction(TechId tech, std::vector<std::pair<double, double>> breakpoints);

    const TechId& tech() const { return tech_; }
    const std::vector<std::pair<double, double>>& breakpoints() const { return breakpoints_; }
    int segments() const { return static_cast<int>(breakpoints_.size()) - 1; }
    double capacity() const { return breakpoints_.back().first; }
    double time_to_full() const { return breakpoints_.back().second; }

    // Energy length / time length / charging rate of segment k (0-based).
    double segment_energy(int k) const;
    double segment_time(int k) const;
    double segment_rate(int k) const { return segment_energy(k) / segment_time(k); }

    // Cumulative charging time from empty to battery level q. Exact at
    // breakpoints, piecewise-linear interpolation in between.
    // Throws std::domain_error for q outside [0, Q].
    double time_at_soc(double q) const;

    // Inverse of time_at_soc. Throws std::domain_error for t outside
    // [0, time_to_full].
    double soc_at_time(double t) const;

    // Time spent charging from q_in up to q_out.
    // Throws std::invalid_argument when q_out < q_in.
    double charge_duration(double q_in, double q_out) const;

    // Tightest big-M for per-stop charging time: the 0 -> Q duration.
    double max_charge_duration() const { return time_to_full(); }

    // Single-segment function through (0,0) and (Q, time_to_full): the
    // constant-rate replacement with the same full-charge time.
    ChargingFunction linearize() const;

    // Per-segment fill fractions for battery level q: alpha[k] in [0,1],
    // filled in order, q == sum_k alpha[k] * segment_energy(k).
    std::vector<double> alpha_fill(double q) const;

    // Marginal-rate dominance: true when charging any SoC window on this
    // function takes no longer than on `other` (segment time-per-kWh of
    // this <= other at every energy level). Partial order.
    bool at_least_as_fast_as(const ChargingFunction& other) const;

    // Throws std::invalid_argument if breakpoints are not strictly
    // increasing, do not start at (0,0), or the rate increases between
    // consecutive segments.
    void validate() const;

  private:
    TechId tech_;
    std::vector<std::pair<double, double>> breakpoints_;
};

}  // namespace elrp
