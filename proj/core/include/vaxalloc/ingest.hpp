#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "vaxalloc/tensor.hpp"

namespace vaxalloc::ingest {

/// One state-day row of the vaccination file. Missing numeric cells stay
/// absent here; fill rules apply later, when feature sequences are built.
struct VaccinationRecord {
    std::int64_t day = 0;  // days since 1970-01-01
    std::string date;      // original ISO-8601 text
    std::string state;
    std::optional<double> total_vaccinations;
    std::optional<double> total_distributed;
    std::optional<double> people_vaccinated;
    std::optional<double> people_fully_vaccinated;
    std::optional<double> daily_vaccinations;
    std::vector<std::optional<double>> rates;  // parallel to VaccinationDataset::rate_columns

    bool operator==(const VaccinationRecord&) const = default;
};

struct VaccinationDataset {
    std::vector<std::string> rate_columns;  // optional per-hundred / per-million columns present
    std::vector<std::string> states;        // sorted
    std::map<std::string, std::vector<VaccinationRecord>> by_state;  // date-sorted within state
    std::int64_t monotonicity_violations = 0;  // cumulative columns decreasing (flagged, kept)
};

struct PopulationTable {
    std::map<std::string, double> by_state;

    double at(const std::string& state) const;  // throws SchemaError on unknown state
};

/// Chronological split proportions; must sum to 1.
struct SplitFractions {
    double train = 0.8;
    double validation = 0.1;
    double test = 0.1;
};

/// Per-state model-ready sequence. Features are stored normalized to [0,1]
/// (per-feature min-max fitted on the train segment only, out-of-range values
/// clamped); targets stay in raw daily doses.
struct FeatureSequence {
    std::string state;
    double population = 0.0;
    std::int64_t first_day = 0;                 // epoch day of date index 0
    std::vector<std::array<double, 3>> x;       // (total_population, partially, fully vaccinated)
    std::vector<double> y;                      // daily_vaccinations, doses
    std::array<double, 3> feat_min{}, feat_max{};
    std::size_t train_end = 0, val_end = 0;     // split marks: [0,train_end) train, etc.
    std::int64_t clamp_count = 0;               // negative derived-partial values clamped to 0
};

/// Data-quality counters and the input-screening correlations.
struct ScreeningReport {
    // Pooled correlations of the raw attributes against daily_vaccinations,
    // over rows where both cells are present. Order: the four cumulative count
    // columns first, then any rate columns from the file.
    std::vector<std::pair<std::string, double>> raw_target_correlation;
    // 3x3 correlation matrix of the normalized inputs pooled over states.
    // A feature that is constant within every state (total_population) has no
    // variance after per-state normalization; its off-diagonal entries are
    // reported as 0 and it is listed in `degenerate_inputs`.
    num::Matrix input_correlation;
    std::array<bool, 3> degenerate_inputs{};
    std::int64_t clamp_count = 0;
    std::int64_t filled_cells = 0;
    std::int64_t monotonicity_violations = 0;
    std::vector<std::string> skipped_states;
};

struct IngestResult {
    std::vector<FeatureSequence> sequences;  // state-sorted
    ScreeningReport report;
};

/// Parses the vaccination CSV (OWID us-state-vaccinations schema). Required
/// header columns: date, location, total_vaccinations, total_distributed,
/// people_vaccinated, people_fully_vaccinated, daily_vaccinations. Any
/// *_per_hundred / *_per_million columns are captured as optional rates.
/// Rows come out grouped by state and sorted by date.
VaccinationDataset parse_vaccination_csv(const std::string& path);

/// Inverse of parse_vaccination_csv: re-parsing the written file yields
/// identical records.
void write_vaccination_csv(const std::string& path, const VaccinationDataset& dataset);

/// Parses `state,population`. Fails if any state in `cover` lacks an entry or
/// any population is not positive.
PopulationTable parse_population_csv(const std::string& path, const VaccinationDataset& cover);

/// people with exactly one dose = total doses - 2 * fully vaccinated, clamped
/// at 0 (single-dose vaccines push the raw value negative in real data).
/// Each clamp increments *clamp_counter when provided.
double derive_partial_vaccinated(double total_vaccinations, double people_fully_vaccinated,
                                 std::int64_t* clamp_counter = nullptr);

/// Pearson correlation matrix of equal-length sequences. Throws on a length
/// mismatch or a zero-variance sequence (error names the sequence).
num::Matrix pearson_correlation_matrix(const std::vector<num::Vec>& series,
                                       const std::vector<std::string>& names = {});

/// Assembles per-state feature sequences: fills missing cells (forward-fill,
/// leading gaps back-filled), derives the partially-vaccinated feature,
/// normalizes per feature on the train segment, and records the chronological
/// split. States with fewer than 10 points are skipped with a warning.
IngestResult build_feature_sequences(const VaccinationDataset& dataset,
                                     const PopulationTable& populations,
                                     const SplitFractions& split = {});

// Normalization helpers shared with later stages.
double normalize_value(double v, double lo, double hi);    // clamped to [0,1]; constant -> 0
double denormalize_value(double u, double lo, double hi);

/// Columnar feature file: `state,date_index,x1,x2,x3,y,split`.
void write_feature_csv(const std::string& path, const std::vector<FeatureSequence>& seqs);

/// Sidecar with per-state population, feature ranges, split marks and clamp
/// counts; together with the feature CSV it reconstructs the sequences.
void write_normalization_json(const std::string& path, const std::vector<FeatureSequence>& seqs);

std::vector<FeatureSequence> read_feature_sequences(const std::string& feature_csv,
                                                    const std::string& normalization_json);

} // namespace vaxalloc::ingest
