#pragma once

#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

#include "qrdv/engine.hpp"

namespace qrdv {

// User-facing configuration problem: bad file, bad flag, bad range. The CLI
// maps this to exit code 1, runtime failures to exit code 2.
struct ConfigError : std::runtime_error {
    explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

struct CampaignError : std::runtime_error {
    explicit CampaignError(const std::string& what) : std::runtime_error(what) {}
};

enum class OutputFormat { Csv, Json, Both };

// Sweep axes plus the knobs shared by every cell. Defaults reproduce the
// desk-scale default campaign.
struct CampaignSettings {
    std::string out_dir = "out";
    std::vector<SchemeVariant> schemes = {SchemeVariant::OneByOne, SchemeVariant::TwoByOne,
                                          SchemeVariant::TwoByTwo, SchemeVariant::Adaptive};
    std::vector<double> pi_grid = {0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9};
    std::vector<int> users = {26, 50};
    std::uint64_t slots = 100000;
    int seeds = 5;
    std::uint64_t base_seed = 1;
    int channels = 16;
    double sojourn_scale = 10.0;
    ContentionPolicy contention = ContentionPolicy::RandomWinner;
    PairingPolicy pairing = PairingPolicy::Persistent;
    OccupancyMode occupancy = OccupancyMode::Markov;
    double adaptive_low = 0.5;
    double adaptive_high = 1.5;
    double attempt_rate = 1.0;
    int parallelism = 0;  // 0 = hardware concurrency
    OutputFormat format = OutputFormat::Both;
};

// The expanded cell list: full cross product scheme x p_i x users x seed, in
// that nesting order; cell k runs with seed base_seed + k.
struct Campaign {
    CampaignSettings settings;
    std::vector<SimConfig> cells;
};

// Scheme token used by config files, flags and output tables.
SchemeVariant scheme_from_name(const std::string& name);

// Parses a flat key-value JSON config; unknown keys are errors.
CampaignSettings settings_from_json(const std::string& text, const std::string& source);

void validate_settings(const CampaignSettings& s);

Campaign expand_campaign(const CampaignSettings& s);

// Across-seed statistics of one metric in one (scheme, users, p_i) cell.
// count is the number of seeds where the metric was defined.
struct MetricStats {
    int count = 0;
    double mean = 0.0;
    double stddev = 0.0;
};

struct AggRow {
    SchemeVariant scheme = SchemeVariant::OneByOne;
    int users = 0;
    double p_i = 0.0;
    MetricStats rdv;
    MetricStats ttr;
    MetricStats energy;
    MetricStats blocking;
};

// Rows ordered by (scheme, users, p_i) following the settings' axis order.
std::vector<AggRow> aggregate(const std::vector<MetricsReport>& reports,
                              const CampaignSettings& s);

struct CampaignResult {
    std::vector<MetricsReport> reports;
    std::vector<AggRow> aggregated;
    std::vector<std::filesystem::path> files;
};

// Runs every cell (bounded worker pool), then writes per-cell reports,
// aggregated metric tables and figure-ready data files into
// settings.out_dir. All files are written atomically (temp + rename) in
// deterministic cell order, so reruns are byte-identical at any parallelism
// degree. Any failed cell raises CampaignError naming the cell.
CampaignResult run_campaign(const Campaign& campaign, bool progress = false);

// Figure-ready tables: one file per figure analog (and per user count when
// several are swept): column 1 is p_i, then one (mean, stddev) column pair
// per scheme. Exposed for tests; run_campaign calls it.
std::vector<std::filesystem::path> emit_plot_data(const std::vector<AggRow>& rows,
                                                  const CampaignSettings& s);

}  // namespace qrdv
