#include "vaxalloc/ingest.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>

#include <nlohmann/json.hpp>

#include "vaxalloc/csv.hpp"
#include "vaxalloc/errors.hpp"
#include "vaxalloc/format.hpp"
#include "vaxalloc/log.hpp"

namespace vaxalloc::ingest {
namespace {

constexpr const char* kRequiredColumns[] = {
    "date",
    "location",
    "total_vaccinations",
    "total_distributed",
    "people_vaccinated",
    "people_fully_vaccinated",
    "daily_vaccinations",
};

bool is_rate_column(const std::string& name) {
    return name.ends_with("_per_hundred") || name.ends_with("_per_million");
}

std::int64_t parse_iso_date(const std::string& text, long line_no) {
    int y = 0, m = 0, d = 0;
    char tail = 0;
    if (std::sscanf(text.c_str(), "%4d-%2d-%2d%c", &y, &m, &d, &tail) != 3)
        throw RowError("unparseable date '" + text + "'", line_no);
    const std::chrono::year_month_day ymd{std::chrono::year{y}, std::chrono::month{unsigned(m)},
                                          std::chrono::day{unsigned(d)}};
    if (!ymd.ok()) throw RowError("invalid calendar date '" + text + "'", line_no);
    return std::chrono::sys_days(ymd).time_since_epoch().count();
}

std::optional<double> parse_cell(const std::string& cell, const char* column, long line_no) {
    if (cell.empty()) return std::nullopt;
    auto v = parse_double(cell);
    if (!v) throw RowError(std::string("bad numeric value '") + cell + "' in " + column, line_no);
    if (*v < 0.0)
        throw RowError(std::string("negative count '") + cell + "' in " + column, line_no);
    return v;
}

// forward-fill with leading gaps back-filled from the first observed value;
// returns false when the column has no observed value at all.
bool fill_series(std::vector<std::optional<double>>& col, std::int64_t* filled) {
    std::optional<double> first;
    for (const auto& v : col)
        if (v) {
            first = v;
            break;
        }
    if (!first) return false;
    std::optional<double> last = first;
    for (auto& v : col) {
        if (v) {
            last = v;
        } else {
            v = last;
            ++*filled;
        }
    }
    return true;
}

double pearson(std::span<const double> a, std::span<const double> b) {
    const std::size_t n = a.size();
    double ma = 0, mb = 0;
    for (std::size_t i = 0; i < n; ++i) {
        ma += a[i];
        mb += b[i];
    }
    ma /= double(n);
    mb /= double(n);
    double cab = 0, caa = 0, cbb = 0;
    for (std::size_t i = 0; i < n; ++i) {
        const double da = a[i] - ma, db = b[i] - mb;
        cab += da * db;
        caa += da * da;
        cbb += db * db;
    }
    if (caa <= 0.0 || cbb <= 0.0) return std::nan("");
    return cab / std::sqrt(caa * cbb);
}

// pooled correlation over rows where both cells are present
double pearson_pairwise(const std::vector<std::optional<double>>& a,
                        const std::vector<std::optional<double>>& b) {
    num::Vec xs, ys;
    for (std::size_t i = 0; i < a.size(); ++i)
        if (a[i] && b[i]) {
            xs.push_back(*a[i]);
            ys.push_back(*b[i]);
        }
    if (xs.size() < 2) return std::nan("");
    return pearson(xs, ys);
}

} // namespace

double PopulationTable::at(const std::string& state) const {
    auto it = by_state.find(state);
    if (it == by_state.end()) throw SchemaError("no population entry for state: " + state);
    return it->second;
}

VaccinationDataset parse_vaccination_csv(const std::string& path) {
    const CsvTable table = read_csv(path);

    for (const char* col : kRequiredColumns)
        if (table.column(col) < 0)
            throw SchemaError(std::string("missing required column: ") + col);

    VaccinationDataset ds;
    std::vector<int> rate_idx;
    for (std::size_t i = 0; i < table.header.size(); ++i) {
        if (is_rate_column(table.header[i])) {
            ds.rate_columns.push_back(table.header[i]);
            rate_idx.push_back(static_cast<int>(i));
        }
    }

    const int c_date = table.column("date");
    const int c_state = table.column("location");
    const int c_total = table.column("total_vaccinations");
    const int c_dist = table.column("total_distributed");
    const int c_people = table.column("people_vaccinated");
    const int c_full = table.column("people_fully_vaccinated");
    const int c_daily = table.column("daily_vaccinations");

    std::map<std::string, std::vector<std::pair<VaccinationRecord, long>>> grouped;
    long line_no = 1;
    for (const auto& row : table.rows) {
        ++line_no;
        VaccinationRecord rec;
        rec.date = row[c_date];
        rec.day = parse_iso_date(rec.date, line_no);
        rec.state = row[c_state];
        if (rec.state.empty()) throw RowError("empty location", line_no);
        rec.total_vaccinations = parse_cell(row[c_total], "total_vaccinations", line_no);
        rec.total_distributed = parse_cell(row[c_dist], "total_distributed", line_no);
        rec.people_vaccinated = parse_cell(row[c_people], "people_vaccinated", line_no);
        rec.people_fully_vaccinated =
            parse_cell(row[c_full], "people_fully_vaccinated", line_no);
        rec.daily_vaccinations = parse_cell(row[c_daily], "daily_vaccinations", line_no);
        rec.rates.reserve(rate_idx.size());
        for (std::size_t k = 0; k < rate_idx.size(); ++k)
            rec.rates.push_back(
                parse_cell(row[rate_idx[k]], ds.rate_columns[k].c_str(), line_no));
        grouped[rec.state].emplace_back(std::move(rec), line_no);
    }

    for (auto& [state, rows] : grouped) {
        std::stable_sort(rows.begin(), rows.end(),
                         [](const auto& a, const auto& b) { return a.first.day < b.first.day; });
        for (std::size_t i = 1; i < rows.size(); ++i)
            if (rows[i].first.day == rows[i - 1].first.day)
                throw RowError("duplicate date " + rows[i].first.date + " for state " + state,
                               rows[i].second);
        auto& out = ds.by_state[state];
        out.reserve(rows.size());
        for (auto& [rec, line] : rows) out.push_back(std::move(rec));
        ds.states.push_back(state);

        // cumulative columns must be non-decreasing; real data has revisions,
        // so violations are flagged rather than rejected
        const auto flag_decreases = [&](auto member) {
            std::optional<double> prev;
            for (const auto& r : out) {
                const auto& v = r.*member;
                if (!v) continue;
                if (prev && *v < *prev) ++ds.monotonicity_violations;
                prev = v;
            }
        };
        flag_decreases(&VaccinationRecord::total_vaccinations);
        flag_decreases(&VaccinationRecord::total_distributed);
        flag_decreases(&VaccinationRecord::people_vaccinated);
        flag_decreases(&VaccinationRecord::people_fully_vaccinated);
    }
    return ds;
}

void write_vaccination_csv(const std::string& path, const VaccinationDataset& dataset) {
    CsvTable table;
    table.header = {"date",
                    "location",
                    "total_vaccinations",
                    "total_distributed",
                    "people_vaccinated",
                    "people_fully_vaccinated",
                    "daily_vaccinations"};
    for (const auto& rc : dataset.rate_columns) table.header.push_back(rc);

    const auto cell = [](const std::optional<double>& v) {
        return v ? fmt_double(*v) : std::string();
    };
    for (const auto& state : dataset.states) {
        for (const auto& rec : dataset.by_state.at(state)) {
            std::vector<std::string> row{rec.date,
                                         rec.state,
                                         cell(rec.total_vaccinations),
                                         cell(rec.total_distributed),
                                         cell(rec.people_vaccinated),
                                         cell(rec.people_fully_vaccinated),
                                         cell(rec.daily_vaccinations)};
            for (const auto& r : rec.rates) row.push_back(cell(r));
            table.rows.push_back(std::move(row));
        }
    }
    write_csv(path, table);
}

PopulationTable parse_population_csv(const std::string& path, const VaccinationDataset& cover) {
    const CsvTable table = read_csv(path);
    const int c_state = table.column("state");
    const int c_pop = table.column("population");
    if (c_state < 0) throw SchemaError("missing required column: state");
    if (c_pop < 0) throw SchemaError("missing required column: population");

    PopulationTable pops;
    long line_no = 1;
    for (const auto& row : table.rows) {
        ++line_no;
        const auto v = parse_double(row[c_pop]);
        if (!v || *v <= 0.0)
            throw RowError("population must be a positive number, got '" + row[c_pop] + "'",
                           line_no);
        pops.by_state[row[c_state]] = *v;
    }
    for (const auto& state : cover.states)
        if (!pops.by_state.count(state))
            throw SchemaError("no population entry for state: " + state);
    return pops;
}

double derive_partial_vaccinated(double total_vaccinations, double people_fully_vaccinated,
                                 std::int64_t* clamp_counter) {
    const double raw = total_vaccinations - 2.0 * people_fully_vaccinated;
    if (raw < 0.0) {
        if (clamp_counter) ++*clamp_counter;
        return 0.0;
    }
    return raw;
}

num::Matrix pearson_correlation_matrix(const std::vector<num::Vec>& series,
                                       const std::vector<std::string>& names) {
    if (series.size() < 2)
        throw std::invalid_argument("pearson_correlation_matrix: need at least 2 sequences");
    const std::size_t n = series[0].size();
    const auto name_of = [&](std::size_t i) {
        return i < names.size() ? names[i] : "series " + std::to_string(i);
    };
    for (std::size_t i = 0; i < series.size(); ++i) {
        if (series[i].size() != n)
            throw std::invalid_argument("pearson_correlation_matrix: length mismatch in " +
                                        name_of(i));
        if (series[i].size() < 2)
            throw std::invalid_argument("pearson_correlation_matrix: " + name_of(i) +
                                        " has fewer than 2 points");
    }

    const std::size_t k = series.size();
    std::vector<double> mean(k, 0.0), var(k, 0.0);
    for (std::size_t i = 0; i < k; ++i) {
        for (double v : series[i]) mean[i] += v;
        mean[i] /= double(n);
        for (double v : series[i]) var[i] += (v - mean[i]) * (v - mean[i]);
        if (var[i] <= 0.0)
            throw std::invalid_argument("pearson_correlation_matrix: zero variance in " +
                                        name_of(i));
    }

    num::Matrix corr(k, k, 0.0);
    for (std::size_t i = 0; i < k; ++i) {
        corr.at(i, i) = 1.0;
        for (std::size_t j = i + 1; j < k; ++j) {
            double cov = 0.0;
            for (std::size_t t = 0; t < n; ++t)
                cov += (series[i][t] - mean[i]) * (series[j][t] - mean[j]);
            const double r = cov / std::sqrt(var[i] * var[j]);
            corr.at(i, j) = r;
            corr.at(j, i) = r;
        }
    }
    return corr;
}

double normalize_value(double v, double lo, double hi) {
    if (!(hi > lo)) return 0.0;  // constant feature maps to 0
    return std::clamp((v - lo) / (hi - lo), 0.0, 1.0);
}

double denormalize_value(double u, double lo, double hi) {
    if (!(hi > lo)) return lo;
    return lo + u * (hi - lo);
}

IngestResult build_feature_sequences(const VaccinationDataset& dataset,
                                     const PopulationTable& populations,
                                     const SplitFractions& split) {
    const double total = split.train + split.validation + split.test;
    if (std::abs(total - 1.0) > 1e-9)
        throw std::invalid_argument("split fractions must sum to 1");

    IngestResult result;
    result.report.monotonicity_violations = dataset.monotonicity_violations;

    // screening part 1: pooled raw-attribute correlations against the target
    {
        std::vector<std::pair<std::string, const std::optional<double> VaccinationRecord::*>>
            counts = {{"total_vaccinations", &VaccinationRecord::total_vaccinations},
                      {"total_distributed", &VaccinationRecord::total_distributed},
                      {"people_vaccinated", &VaccinationRecord::people_vaccinated},
                      {"people_fully_vaccinated", &VaccinationRecord::people_fully_vaccinated}};
        std::vector<std::optional<double>> target;
        for (const auto& state : dataset.states)
            for (const auto& rec : dataset.by_state.at(state))
                target.push_back(rec.daily_vaccinations);

        for (const auto& [name, member] : counts) {
            std::vector<std::optional<double>> col;
            for (const auto& state : dataset.states)
                for (const auto& rec : dataset.by_state.at(state)) col.push_back(rec.*member);
            result.report.raw_target_correlation.emplace_back(name, pearson_pairwise(col, target));
        }
        for (std::size_t k = 0; k < dataset.rate_columns.size(); ++k) {
            std::vector<std::optional<double>> col;
            for (const auto& state : dataset.states)
                for (const auto& rec : dataset.by_state.at(state)) col.push_back(rec.rates[k]);
            result.report.raw_target_correlation.emplace_back(dataset.rate_columns[k],
                                                              pearson_pairwise(col, target));
        }
    }

    for (const auto& state : dataset.states) {
        const auto& recs = dataset.by_state.at(state);
        const double population = populations.at(state);

        std::vector<std::optional<double>> total(recs.size()), full(recs.size()),
            daily(recs.size());
        for (std::size_t i = 0; i < recs.size(); ++i) {
            total[i] = recs[i].total_vaccinations;
            full[i] = recs[i].people_fully_vaccinated;
            daily[i] = recs[i].daily_vaccinations;
        }
        std::int64_t filled = 0;
        const bool ok = fill_series(total, &filled) && fill_series(full, &filled) &&
                        fill_series(daily, &filled);
        if (!ok || recs.size() < 10) {
            log::warn("skipping state '" + state + "': " +
                      (ok ? "series shorter than 10 points" : "a required column is entirely empty"));
            result.report.skipped_states.push_back(state);
            continue;
        }
        result.report.filled_cells += filled;

        FeatureSequence seq;
        seq.state = state;
        seq.population = population;
        seq.first_day = recs.front().day;
        const std::size_t n = recs.size();
        seq.x.resize(n);
        seq.y.resize(n);
        for (std::size_t i = 0; i < n; ++i) {
            const double partial = derive_partial_vaccinated(*total[i], *full[i], &seq.clamp_count);
            seq.x[i] = {population, partial, *full[i]};
            seq.y[i] = *daily[i];
        }
        seq.train_end = static_cast<std::size_t>(std::llround(double(n) * split.train));
        seq.val_end =
            static_cast<std::size_t>(std::llround(double(n) * (split.train + split.validation)));
        seq.train_end = std::min(seq.train_end, n);
        seq.val_end = std::clamp(seq.val_end, seq.train_end, n);

        for (std::size_t f = 0; f < 3; ++f) {
            double lo = seq.x[0][f], hi = seq.x[0][f];
            for (std::size_t i = 1; i < seq.train_end; ++i) {
                lo = std::min(lo, seq.x[i][f]);
                hi = std::max(hi, seq.x[i][f]);
            }
            seq.feat_min[f] = lo;
            seq.feat_max[f] = hi;
            for (std::size_t i = 0; i < n; ++i) seq.x[i][f] = normalize_value(seq.x[i][f], lo, hi);
        }
        result.report.clamp_count += seq.clamp_count;
        result.sequences.push_back(std::move(seq));
    }

    // screening part 2: correlations among the normalized inputs, pooled over
    // states. total_population is constant within a state, hence degenerate
    // after per-state normalization; its entries are reported as 0.
    {
        num::Matrix corr(3, 3, 0.0);
        std::array<num::Vec, 3> pooled;
        for (const auto& seq : result.sequences)
            for (const auto& row : seq.x)
                for (std::size_t f = 0; f < 3; ++f) pooled[f].push_back(row[f]);
        std::array<double, 3> var{};
        for (std::size_t f = 0; f < 3; ++f) {
            if (pooled[f].size() < 2) {
                result.report.degenerate_inputs[f] = true;
                continue;
            }
            double mean = 0.0;
            for (double v : pooled[f]) mean += v;
            mean /= double(pooled[f].size());
            for (double v : pooled[f]) var[f] += (v - mean) * (v - mean);
            result.report.degenerate_inputs[f] = var[f] <= 0.0;
        }
        for (std::size_t i = 0; i < 3; ++i) {
            corr.at(i, i) = 1.0;
            for (std::size_t j = i + 1; j < 3; ++j) {
                double r = 0.0;
                if (!result.report.degenerate_inputs[i] && !result.report.degenerate_inputs[j])
                    r = pearson(pooled[i], pooled[j]);
                if (std::isnan(r)) r = 0.0;
                corr.at(i, j) = r;
                corr.at(j, i) = r;
            }
        }
        result.report.input_correlation = corr;
    }

    return result;
}

void write_feature_csv(const std::string& path, const std::vector<FeatureSequence>& seqs) {
    CsvTable table;
    table.header = {"state", "date_index", "x1", "x2", "x3", "y", "split"};
    for (const auto& seq : seqs) {
        for (std::size_t i = 0; i < seq.x.size(); ++i) {
            const char* tag = i < seq.train_end ? "train" : (i < seq.val_end ? "val" : "test");
            table.rows.push_back({seq.state, std::to_string(i), fmt_double(seq.x[i][0]),
                                  fmt_double(seq.x[i][1]), fmt_double(seq.x[i][2]),
                                  fmt_double(seq.y[i]), tag});
        }
    }
    write_csv(path, table);
}

void write_normalization_json(const std::string& path, const std::vector<FeatureSequence>& seqs) {
    nlohmann::json states = nlohmann::json::object();
    for (const auto& seq : seqs) {
        states[seq.state] = {
            {"population", seq.population},
            {"first_day", seq.first_day},
            {"min", {seq.feat_min[0], seq.feat_min[1], seq.feat_min[2]}},
            {"max", {seq.feat_max[0], seq.feat_max[1], seq.feat_max[2]}},
            {"train_end", seq.train_end},
            {"val_end", seq.val_end},
            {"clamp_count", seq.clamp_count},
        };
    }
    nlohmann::json doc = {{"format", "vaxalloc-normalization-v1"}, {"states", states}};
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw SchemaError("cannot open file for writing: " + path);
    out << doc.dump(2) << '\n';
}

std::vector<FeatureSequence> read_feature_sequences(const std::string& feature_csv,
                                                    const std::string& normalization_json) {
    std::ifstream jin(normalization_json);
    if (!jin) throw SchemaError("cannot open file: " + normalization_json);
    nlohmann::json doc;
    jin >> doc;
    if (doc.value("format", "") != std::string("vaxalloc-normalization-v1"))
        throw SchemaError("unrecognized normalization sidecar format");

    std::map<std::string, FeatureSequence> by_state;
    for (const auto& [state, meta] : doc.at("states").items()) {
        FeatureSequence seq;
        seq.state = state;
        seq.population = meta.at("population").get<double>();
        seq.first_day = meta.at("first_day").get<std::int64_t>();
        for (std::size_t f = 0; f < 3; ++f) {
            seq.feat_min[f] = meta.at("min")[f].get<double>();
            seq.feat_max[f] = meta.at("max")[f].get<double>();
        }
        seq.train_end = meta.at("train_end").get<std::size_t>();
        seq.val_end = meta.at("val_end").get<std::size_t>();
        seq.clamp_count = meta.at("clamp_count").get<std::int64_t>();
        by_state[state] = std::move(seq);
    }

    const CsvTable table = read_csv(feature_csv);
    for (const char* col : {"state", "date_index", "x1", "x2", "x3", "y", "split"})
        if (table.column(col) < 0)
            throw SchemaError(std::string("feature file missing column: ") + col);
    long line_no = 1;
    for (const auto& row : table.rows) {
        ++line_no;
        auto it = by_state.find(row[0]);
        if (it == by_state.end())
            throw RowError("state '" + row[0] + "' absent from normalization sidecar", line_no);
        const auto x1 = parse_double(row[2]), x2 = parse_double(row[3]), x3 = parse_double(row[4]),
                   y = parse_double(row[5]);
        if (!x1 || !x2 || !x3 || !y) throw RowError("bad numeric cell", line_no);
        it->second.x.push_back({*x1, *x2, *x3});
        it->second.y.push_back(*y);
    }

    std::vector<FeatureSequence> seqs;
    seqs.reserve(by_state.size());
    for (auto& [state, seq] : by_state) seqs.push_back(std::move(seq));
    return seqs;
}

} // namespace vaxalloc::ingest
