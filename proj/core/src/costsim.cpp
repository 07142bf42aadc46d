#include "vaxalloc/costsim.hpp"

#include <algorithm>
#include <cmath>

#include "vaxalloc/csv.hpp"
#include "vaxalloc/errors.hpp"
#include "vaxalloc/format.hpp"
#include "vaxalloc/log.hpp"
#include "vaxalloc/rng.hpp"

namespace vaxalloc::cost {
namespace {

// true where the taxonomy carries a cost component
constexpr bool kMask[4][5] = {
    // labor  fuel   space  equip  vehicle
    {true, false, false, false, false},  // procurement
    {true, true, true, true, false},     // storage
    {true, true, false, false, true},    // transportation
    {true, false, false, true, false},   // management (equipment = operational)
};

// base cost per cell, cost units
constexpr double kBase[4][5] = {
    {120.0, 0.0, 0.0, 0.0, 0.0},
    {80.0, 40.0, 60.0, 90.0, 0.0},
    {70.0, 65.0, 0.0, 0.0, 110.0},
    {100.0, 0.0, 0.0, 50.0, 0.0},
};

constexpr double kSigma = 0.25;

} // namespace

bool cell_unmasked(std::size_t function, std::size_t resource) {
    return kMask[function][resource];
}

AggregateMode aggregate_mode_from(const std::string& name) {
    if (name == "product") return AggregateMode::product;
    if (name == "weighted_sum") return AggregateMode::weighted_sum;
    throw ConfigError("unknown aggregate mode '" + name + "'", "costs.aggregate_mode");
}

const char* to_string(AggregateMode mode) {
    return mode == AggregateMode::product ? "product" : "weighted_sum";
}

std::map<std::string, StateMeta> parse_statemeta_csv(const std::string& path) {
    const CsvTable table = read_csv(path);
    for (const char* col :
         {"state", "distance_km", "financial_index", "unemployment_ratio", "covid_budget"})
        if (table.column(col) < 0)
            throw SchemaError(std::string("missing required column: ") + col);

    const int c_state = table.column("state");
    const int c_dist = table.column("distance_km");
    const int c_fin = table.column("financial_index");
    const int c_unemp = table.column("unemployment_ratio");
    const int c_budget = table.column("covid_budget");

    std::map<std::string, StateMeta> meta;
    long line_no = 1;
    for (const auto& row : table.rows) {
        ++line_no;
        StateMeta m;
        const auto dist = parse_double(row[c_dist]);
        const auto fin = parse_double(row[c_fin]);
        const auto unemp = parse_double(row[c_unemp]);
        const auto budget = parse_double(row[c_budget]);
        if (!dist || *dist < 0.0) throw RowError("distance_km must be >= 0", line_no);
        if (!fin || *fin < 0.0 || *fin > 1.0)
            throw RowError("financial_index must be in [0,1]", line_no);
        if (!unemp || *unemp < 0.0 || *unemp > 1.0)
            throw RowError("unemployment_ratio must be in [0,1]", line_no);
        if (!budget || *budget < 0.0) throw RowError("covid_budget must be >= 0", line_no);
        m.distance_km = *dist;
        m.financial_index = *fin;
        m.unemployment_ratio = *unemp;
        m.covid_budget = *budget;
        meta[row[c_state]] = m;
    }
    return meta;
}

CostMatrix simulate_cost_matrix(const std::map<std::string, StateMeta>& meta, std::uint64_t seed) {
    if (meta.empty()) throw std::invalid_argument("simulate_cost_matrix: no states");

    CostMatrix out;
    std::uint64_t index = 0;
    for (const auto& [state, m] : meta) {
        num::Rng rng(seed ^ index);  // per-state stream
        ++index;

        StateCosts sc;
        sc.cost = num::Matrix(4, 5, 0.0);
        sc.weight = num::Matrix(4, 5, 0.0);
        for (std::size_t i = 0; i < 4; ++i) {
            for (std::size_t j = 0; j < 5; ++j) {
                if (!kMask[i][j]) continue;
                double scale = 1.0;
                if (j == 0) {
                    // labor responds to the job market and the state's economy
                    scale = (1.0 + m.unemployment_ratio) * (2.0 - m.financial_index);
                } else if (i == 2) {
                    // transportation fuel/vehicle grow with hub distance
                    scale = 1.0 + m.distance_km / 1000.0;
                }
                sc.cost.at(i, j) = kBase[i][j] * scale * rng.lognormal(kSigma);
                sc.weight.at(i, j) = rng.uniform_pos();  // (0,1]
            }
        }
        out.states.push_back(state);
        out.by_state[state] = std::move(sc);
    }
    return out;
}

double aggregate_cost(const StateCosts& costs, AggregateMode mode) {
    double weight_sum = 0.0;
    for (std::size_t i = 0; i < 4; ++i)
        for (std::size_t j = 0; j < 5; ++j)
            if (costs.weight.at(i, j) > 0.0) weight_sum += costs.weight.at(i, j);
    if (weight_sum <= 0.0)
        throw std::invalid_argument("aggregate_cost: every component is masked");

    double total = 0.0;
    for (std::size_t i = 0; i < 4; ++i) {
        if (mode == AggregateMode::product) {
            double prod = 1.0;
            bool any = false;
            for (std::size_t j = 0; j < 5; ++j) {
                const double w = costs.weight.at(i, j);
                if (w > 0.0) {
                    prod *= w * costs.cost.at(i, j);
                    any = true;
                }
            }
            if (any) total += prod;
        } else {
            for (std::size_t j = 0; j < 5; ++j) {
                const double w = costs.weight.at(i, j);
                if (w > 0.0) total += w * costs.cost.at(i, j);
            }
        }
    }
    return total / weight_sum;
}

std::vector<double> normalize_costs(const std::vector<double>& costs) {
    if (costs.size() < 2)
        throw std::invalid_argument("normalize_costs: need at least 2 states");

    double mean = 0.0;
    for (double c : costs) mean += c;
    mean /= double(costs.size());
    double var = 0.0;
    for (double c : costs) var += (c - mean) * (c - mean);
    var /= double(costs.size());

    if (!(var > 0.0)) {
        log::warn("normalize_costs: zero spread, mapping every state to 0.5");
        return std::vector<double>(costs.size(), 0.5);
    }

    const double sd = std::sqrt(var);
    std::vector<double> z(costs.size());
    for (std::size_t i = 0; i < costs.size(); ++i) z[i] = (costs[i] - mean) / sd;
    const auto [lo, hi] = std::minmax_element(z.begin(), z.end());
    const double span = *hi - *lo;
    for (double& v : z) v = (v - *lo) / span;
    return z;
}

void write_cost_matrix_csv(const std::string& path, const CostMatrix& matrix) {
    CsvTable table;
    table.header = {"state", "function", "resource", "weight", "cost"};
    for (const auto& state : matrix.states) {
        const StateCosts& sc = matrix.by_state.at(state);
        for (std::size_t i = 0; i < 4; ++i)
            for (std::size_t j = 0; j < 5; ++j)
                table.rows.push_back({state, kFunctions[i], kResources[j],
                                      fmt_double(sc.weight.at(i, j)),
                                      fmt_double(sc.cost.at(i, j))});
    }
    write_csv(path, table);
}

CostMatrix read_cost_matrix_csv(const std::string& path) {
    const CsvTable table = read_csv(path);
    for (const char* col : {"state", "function", "resource", "weight", "cost"})
        if (table.column(col) < 0)
            throw SchemaError(std::string("missing required column: ") + col);

    const auto func_index = [](const std::string& name) -> std::size_t {
        for (std::size_t i = 0; i < kFunctions.size(); ++i)
            if (name == kFunctions[i]) return i;
        throw SchemaError("unknown function: " + name);
    };
    const auto res_index = [](const std::string& name) -> std::size_t {
        for (std::size_t j = 0; j < kResources.size(); ++j)
            if (name == kResources[j]) return j;
        throw SchemaError("unknown resource: " + name);
    };

    CostMatrix out;
    long line_no = 1;
    for (const auto& row : table.rows) {
        ++line_no;
        auto [it, inserted] = out.by_state.try_emplace(row[0]);
        if (inserted) {
            it->second.cost = num::Matrix(4, 5, 0.0);
            it->second.weight = num::Matrix(4, 5, 0.0);
            out.states.push_back(row[0]);
        }
        const auto w = parse_double(row[3]);
        const auto c = parse_double(row[4]);
        if (!w || !c) throw RowError("bad numeric cell", line_no);
        it->second.weight.at(func_index(row[1]), res_index(row[2])) = *w;
        it->second.cost.at(func_index(row[1]), res_index(row[2])) = *c;
    }
    std::sort(out.states.begin(), out.states.end());
    return out;
}

} // namespace vaxalloc::cost
