#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>

#include "qrdv/quorum.hpp"

namespace qrdv {

struct NoSamplesError : std::runtime_error {
    NoSamplesError() : std::runtime_error("avg_ttr: every attempt was censored") {}
};

struct ZeroRdvError : std::runtime_error {
    explicit ZeroRdvError(const char* what) : std::runtime_error(what) {}
};

// Identifies one sweep cell for merging purposes. Seed and slot count are
// deliberately absent: accumulators of the same cell but different seeds
// pool into one.
struct CellKey {
    SchemeVariant scheme = SchemeVariant::OneByOne;
    int n = 0;
    int num_channels = 0;
    int num_users = 0;
    double p_i = 0.0;

    bool operator==(const CellKey&) const = default;
};

// Raw counters for one run (or a pool of runs over the same cell). All
// counters are monotone while a run is in flight.
struct MetricsAccumulator {
    CellKey key;
    std::uint64_t total_slots = 0;
    std::uint64_t total_rdv = 0;
    std::uint64_t total_blocking = 0;
    std::uint64_t total_awake_slots = 0;
    std::uint64_t ttr_total = 0;
    std::uint64_t completed_attempts = 0;
    std::uint64_t censored_attempts = 0;
    std::uint64_t contention_losses = 0;

    void record_rdv(std::uint64_t ttr) {
        ++total_rdv;
        ++completed_attempts;
        ttr_total += ttr;
    }
};

// total_rdv / total_slots; throws on a zero-slot accumulator.
double avg_rdv_per_slot(const MetricsAccumulator& acc);

// Mean TTR over completed attempts; censored attempts never mix in.
// Throws NoSamplesError when nothing completed.
double avg_ttr(const MetricsAccumulator& acc);

// total_awake_slots / total_rdv, in units of one slot's energy.
// Throws ZeroRdvError when no rendezvous happened.
double energy_per_rdv(const MetricsAccumulator& acc);

// total_blocking / total_rdv. Throws ZeroRdvError when no rendezvous.
double forced_blocking(const MetricsAccumulator& acc);

// Component-wise sum; rejects accumulators from different cells.
MetricsAccumulator merge(const MetricsAccumulator& a, const MetricsAccumulator& b);

// One cell's finalized report: config echo, raw counters, derived metrics.
// Undefined ratios (zero rendezvous / all censored) stay disengaged and
// serialize as NA / null rather than 0.
struct MetricsReport {
    std::string scheme;
    int n = 0;
    int num_channels = 0;
    int num_users = 0;
    double p_i = 0.0;
    std::uint64_t seed = 0;
    std::uint64_t total_slots = 0;

    std::uint64_t total_rdv = 0;
    std::uint64_t total_blocking = 0;
    std::uint64_t total_awake_slots = 0;
    std::uint64_t completed_attempts = 0;
    std::uint64_t censored_attempts = 0;
    std::uint64_t contention_losses = 0;
    std::uint64_t ttr_total = 0;

    double avg_rdv_per_slot = 0.0;
    std::optional<double> avg_ttr;
    std::optional<double> energy_per_rdv;
    std::optional<double> forced_blocking;

    bool operator==(const MetricsReport&) const = default;
};

MetricsReport finalize(const MetricsAccumulator& acc, std::uint64_t seed);

// Shortest round-trip decimal form (to_chars); locale-independent, stable.
std::string format_number(double x);

// CSV row/header in the fixed column order:
// scheme,n,N,users,p_i,seed,slots,total_rdv,total_blocking,total_awake_slots,
// completed_attempts,censored_attempts,avg_rdv_per_slot,avg_ttr,
// energy_per_rdv,forced_blocking
// Undefined ratios appear as NA.
std::string csv_header();
std::string csv_row(const MetricsReport& r);

// JSON object per cell. Carries everything the CSV does plus ttr_total and
// contention_losses, so every derived metric is recomputable from raw
// counters. Undefined ratios serialize as null.
std::string to_json(const MetricsReport& r);
MetricsReport report_from_json(const std::string& text);

}  // namespace qrdv
