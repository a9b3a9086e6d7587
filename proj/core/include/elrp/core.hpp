#pragma once

#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "elrp/charging.hpp"

namespace elrp {

// Toolkit-wide tolerance for feasibility comparisons.
inline constexpr double kFeasTol = 1e-6;

using NodeId = int;

enum class NodeKind { Depot, Customer, Station };

struct Node {
    NodeId id = 0;
    NodeKind kind = NodeKind::Customer;
    double x = 0.0;             // km
    double y = 0.0;             // km
    double service_time = 0.0;  // hours, customers only
    TechId tech;                // stations only

    bool is_customer() const { return kind == NodeKind::Customer; }
    bool is_station() const { return kind == NodeKind::Station; }
    bool is_depot() const { return kind == NodeKind::Depot; }
};

struct EvParams {
    double battery_capacity = 0.0;    // Q, kWh
    double max_route_duration = 0.0;  // T, hours
    double consumption_rate = 0.0;    // kWh/km
    double speed = 0.0;               // km/h

    void validate() const;
};

// Dense square matrix, row major. Indexed by NodeId.
class Matrix {
  public:
    Matrix() = default;
    explicit Matrix(int n, double fill = 0.0) : n_(n), v_(static_cast<size_t>(n) * n, fill) {}

    int size() const { return n_; }
    double operator()(int i, int j) const { return v_[static_cast<size_t>(i) * n_ + j]; }
    double& operator()(int i, int j) { return v_[static_cast<size_t>(i) * n_ + j]; }

  private:
    int n_ = 0;
    std::vector<double> v_;
};

// A routing instance. Node 0 is always the depot; customer and station
// index sets are disjoint. Immutable after construction, safe to share
// across concurrent readers.
struct Instance {
    std::string name;
    std::vector<Node> nodes;
    EvParams ev;
    Matrix travel_time;  // hours
    Matrix energy;       // kWh
    int max_stations = 1;  // upper bound on opened stations
    int max_routes = 1;    // upper bound on EV routes
    std::map<TechId, ChargingFunction> charging_functions;

    int num_nodes() const { return static_cast<int>(nodes.size()); }
    std::vector<NodeId> customers() const;
    std::vector<NodeId> stations() const;
    const ChargingFunction& function_of(NodeId station) const;
    double battery_capacity() const { return ev.battery_capacity; }

    // Checks all structural invariants; throws std::invalid_argument on the
    // first violation found (with node/arc context in the message).
    void validate() const;
};

// Builds travel-time and energy matrices from node coordinates:
// e_ij = consumption_rate * euclidean distance, t_ij = distance / speed.
// Rejects non-finite coordinates. Duplicate coordinates are allowed.
void build_matrices(const std::vector<Node>& nodes, const EvParams& ev, Matrix& travel_time,
                    Matrix& energy);

// Convenience constructor: builds matrices and validates.
Instance make_instance(std::string name, std::vector<Node> nodes, EvParams ev, int max_stations,
                       int max_routes, std::map<TechId, ChargingFunction> functions);

// Same instance with every charging function replaced by its constant-rate
// linearization (full-charge time preserved).
Instance with_linearized_charging(const Instance& inst);

}  // namespace elrp
