#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "vaxalloc/tensor.hpp"

namespace vaxalloc::cost {

/// Cold-chain cost taxonomy: supply-chain function x resource.
inline constexpr std::array<const char*, 4> kFunctions{"procurement", "storage", "transportation",
                                                       "management"};
inline constexpr std::array<const char*, 5> kResources{"labor", "fuel", "space", "equipment",
                                                       "vehicle"};

/// Structural mask: which (function, resource) cells carry cost at all.
/// procurement has labor only; storage has labor/space/equipment/fuel;
/// transportation has labor/vehicle/fuel; management has labor plus an
/// operational component carried in the equipment column. Everything else is
/// a structural zero, identical across states and seeds.
bool cell_unmasked(std::size_t function, std::size_t resource);

struct StateMeta {
    double distance_km = 0.0;        // from the common distribution hub
    double financial_index = 0.5;    // [0,1], higher = stronger economy
    double unemployment_ratio = 0.0; // fraction
    double covid_budget = 0.0;       // currency units
};

/// Per-state simulated cost components and their weights. Masked cells have
/// weight exactly 0; unmasked weights lie in (0,1].
struct StateCosts {
    num::Matrix cost;    // 4 x 5, cost units
    num::Matrix weight;  // 4 x 5
};

struct CostMatrix {
    std::vector<std::string> states;  // sorted
    std::map<std::string, StateCosts> by_state;
};

enum class AggregateMode { product, weighted_sum };

AggregateMode aggregate_mode_from(const std::string& name);  // throws ConfigError
const char* to_string(AggregateMode mode);

std::map<std::string, StateMeta> parse_statemeta_csv(const std::string& path);

/// Seeded simulation. Per state (seed XOR sorted-state-index): transportation
/// fuel/vehicle costs scale with hub distance, labor costs everywhere scale
/// with unemployment and inverse financial strength, the rest draw around
/// fixed bases; all draws are log-normal (sigma 0.25) so costs stay positive
/// and right-skewed. Unmasked weights draw uniform in (0,1].
CostMatrix simulate_cost_matrix(const std::map<std::string, StateMeta>& meta, std::uint64_t seed);

/// Scalar supply cost of one state:
///   product mode:      sum_i ( prod_{j unmasked(i)} w_ij c_ij ) / sum(all unmasked w)
///   weighted_sum mode: sum_i   sum_{j unmasked(i)}  w_ij c_ij   / sum(all unmasked w)
/// Zero-weight (masked) cells are skipped, never annihilating a whole
/// function. Throws when every cell is masked.
double aggregate_cost(const StateCosts& costs, AggregateMode mode = AggregateMode::product);

/// Z-score standardization followed by an affine map onto [0,1], order
/// preserved. Zero spread maps everything to 0.5 with a warning.
std::vector<double> normalize_costs(const std::vector<double>& costs);

/// One row per (state, function, resource): `state,function,resource,weight,cost`.
void write_cost_matrix_csv(const std::string& path, const CostMatrix& matrix);
CostMatrix read_cost_matrix_csv(const std::string& path);

} // namespace vaxalloc::cost
