#include "elrp/charging.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>
#include <stdexcept>

namespace elrp {

namespace {
constexpr double kEps = 1e-9;
}

ChargingFunction::ChargingFunction(TechId tech, std::vector<std::pair<double, double>> breakpoints)
    : tech_(std::move(tech)), breakpoints_(std::move(breakpoints)) {
    validate();
}

void ChargingFunction::validate() const {
    if (breakpoints_.size() < 2)
        throw std::invalid_argument("charging function needs at least one segment");
    if (std::abs(breakpoints_.front().first) > kEps || std::abs(breakpoints_.front().second) > kEps)
        throw std::invalid_argument("charging function must start at (0,0)");
    double prev_rate = 0.0;
    for (size_t k = 1; k < breakpoints_.size(); ++k) {
        const double de = breakpoints_[k].first - breakpoints_[k - 1].first;
        const double dt = breakpoints_[k].second - breakpoints_[k - 1].second;
        if (!(de > kEps) || !(dt > kEps)) {
            std::ostringstream os;
            os << "charging function '" << tech_ << "': breakpoints must be strictly increasing"
               << " (segment " << k << ")";
            throw std::invalid_argument(os.str());
        }
        const double rate = de / dt;
        if (k > 1 && rate > prev_rate * (1.0 + 1e-9) + kEps) {
            std::ostringstream os;
            os << "charging function '" << tech_ << "': rate increases at segment " << k
               << " (" << prev_rate << " -> " << rate << " kWh/h), function must be concave";
            throw std::invalid_argument(os.str());
        }
        prev_rate = rate;
    }
}

double ChargingFunction::segment_energy(int k) const {
    return breakpoints_[k + 1].first - breakpoints_[k].first;
}

double ChargingFunction::segment_time(int k) const {
    return breakpoints_[k + 1].second - breakpoints_[k].second;
}

double ChargingFunction::time_at_soc(double q) const {
    if (q < -kEps || q > capacity() + kEps)
        throw std::domain_error("time_at_soc: battery level outside [0, Q]");
    q = std::clamp(q, 0.0, capacity());
    // first breakpoint with energy >= q
    auto it = std::lower_bound(breakpoints_.begin(), breakpoints_.end(), q,
                               [](const auto& bp, double v) { return bp.first < v; });
    if (it == breakpoints_.begin()) return 0.0;
    const auto& hi = *it;
    const auto& lo = *(it - 1);
    const double f = (q - lo.first) / (hi.first - lo.first);
    return lo.second + f * (hi.second - lo.second);
}

double ChargingFunction::soc_at_time(double t) const {
    if (t < -kEps || t > time_to_full() + kEps)
        throw std::domain_error("soc_at_time: time outside [0, time_to_full]");
    t = std::clamp(t, 0.0, time_to_full());
    auto it = std::lower_bound(breakpoints_.begin(), breakpoints_.end(), t,
                               [](const auto& bp, double v) { return bp.second < v; });
    if (it == breakpoints_.begin()) return 0.0;
    const auto& hi = *it;
    const auto& lo = *(it - 1);
    const double f = (t - lo.second) / (hi.second - lo.second);
    return lo.first + f * (hi.first - lo.first);
}

double ChargingFunction::charge_duration(double q_in, double q_out) const {
    if (q_out < q_in - kEps)
        throw std::invalid_argument("charge_duration: q_out below q_in");
    if (q_out < q_in) q_out = q_in;
    return time_at_soc(q_out) - time_at_soc(q_in);
}

ChargingFunction ChargingFunction::linearize() const {
    return ChargingFunction(tech_, {{0.0, 0.0}, {capacity(), time_to_full()}});
}

std::vector<double> ChargingFunction::alpha_fill(double q) const {
    if (q < -kEps || q > capacity() + kEps)
        throw std::domain_error("alpha_fill: battery level outside [0, Q]");
    std::vector<double> alpha(segments(), 0.0);
    double rest = std::clamp(q, 0.0, capacity());
    for (int k = 0; k < segments(); ++k) {
        const double e = segment_energy(k);
        alpha[k] = std::min(1.0, rest / e);
        rest -= alpha[k] * e;
        if (rest <= kEps) break;
    }
    return alpha;
}

bool ChargingFunction::at_least_as_fast_as(const ChargingFunction& other) const {
    // Compare marginal time per kWh on the union of both breakpoint grids.
    std::set<double> grid;
    for (const auto& bp : breakpoints_) grid.insert(bp.first);
    for (const auto& bp : other.breakpoints_) grid.insert(bp.first);
    const double q_max = std::min(capacity(), other.capacity());
    double prev = 0.0;
    for (double q : grid) {
        if (q <= prev + kEps) continue;
        if (q > q_max + kEps) break;
        const double mine = time_at_soc(q) - time_at_soc(prev);
        const double theirs = other.time_at_soc(q) - other.time_at_soc(prev);
        if (mine > theirs + kEps) return false;
        prev = q;
    }
    return true;
}

}  // namespace elrp
