// qrdv: sweep driver for the quorum channel-hopping rendezvous simulator.
// Expands a campaign over scheme x p_i x users x seeds, runs the cells on a
// worker pool, and writes reports plus figure-ready tables.

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "qrdv/campaign.hpp"

namespace {

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw qrdv::ConfigError("--config: cannot read '" + path + "'");
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

std::vector<std::string> split_list(const std::string& text) {
    std::vector<std::string> out;
    std::string item;
    std::istringstream is(text);
    while (std::getline(is, item, ','))
        if (!item.empty()) out.push_back(item);
    return out;
}

double parse_double(const std::string& token, const std::string& flag) {
    try {
        size_t used = 0;
        const double v = std::stod(token, &used);
        if (used != token.size()) throw std::invalid_argument(token);
        return v;
    } catch (const std::exception&) {
        throw qrdv::ConfigError(flag + ": '" + token + "' is not a number");
    }
}

long long parse_int(const std::string& token, const std::string& flag) {
    try {
        size_t used = 0;
        const long long v = std::stoll(token, &used);
        if (used != token.size()) throw std::invalid_argument(token);
        return v;
    } catch (const std::exception&) {
        throw qrdv::ConfigError(flag + ": '" + token + "' is not an integer");
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{
        "qrdv - quorum-based channel-hopping rendezvous simulator.\n"
        "Runs a sweep campaign and writes CSV/JSON reports, aggregated metric\n"
        "tables and figure-ready .dat files into the output directory."};

    std::string config_path, out_dir, schemes_csv, pi_csv, users_csv;
    std::string contention, pairing, markov, format;
    std::uint64_t slots = 0, base_seed = 0;
    int seeds = 0, channels = 0, parallelism = -1;
    double sojourn_scale = 0, adaptive_low = 0, adaptive_high = 0, attempt_rate = 0;
    bool paper_scale = false;

    auto* o_config = app.add_option("--config", config_path, "JSON config file (flat key-value)");
    auto* o_out = app.add_option("--out", out_dir, "Output directory");
    auto* o_schemes = app.add_option("--schemes", schemes_csv,
                                     "Comma list of 1x1,2x1,2x2,adaptive");
    auto* o_pi = app.add_option("--pi-grid", pi_csv, "Comma list of idle probabilities in (0,1)");
    auto* o_users = app.add_option("--users", users_csv, "Comma list of user counts (>= 2)");
    auto* o_slots = app.add_option("--slots", slots, "Slots per run");
    auto* o_seeds = app.add_option("--seeds", seeds, "Seeds per cell");
    auto* o_base = app.add_option("--base-seed", base_seed, "Base seed (cell k uses base+k)");
    auto* o_channels = app.add_option("--channels", channels, "Licensed channel count N");
    auto* o_sojourn = app.add_option("--sojourn-scale", sojourn_scale,
                                     "Mean sojourn scale in slots (alpha+beta)");
    auto* o_cont = app.add_option("--contention", contention, "all-fail or random-winner");
    auto* o_pair = app.add_option("--pairing", pairing, "persistent or per-slot");
    auto* o_markov = app.add_option("--markov", markov, "on (Markov chain) or iid");
    auto* o_alow = app.add_option("--adaptive-low", adaptive_low, "Low/moderate load threshold");
    auto* o_ahigh = app.add_option("--adaptive-high", adaptive_high, "Moderate/high load threshold");
    auto* o_rate = app.add_option("--attempt-rate", attempt_rate,
                                  "Per-slot probability an idle user starts an attempt");
    auto* o_par = app.add_option("--parallelism", parallelism, "Worker count (0 = cores)");
    app.add_flag("--paper-scale", paper_scale, "Run 800000 slots per cell");
    auto* o_format = app.add_option("--format", format, "csv, json or both");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 1;
    }

    try {
        qrdv::CampaignSettings s;
        if (o_config->count()) s = qrdv::settings_from_json(slurp(config_path), config_path);

        if (o_out->count()) s.out_dir = out_dir;
        if (o_schemes->count()) {
            s.schemes.clear();
            for (const auto& tok : split_list(schemes_csv))
                s.schemes.push_back(qrdv::scheme_from_name(tok));
        }
        if (o_pi->count()) {
            s.pi_grid.clear();
            for (const auto& tok : split_list(pi_csv))
                s.pi_grid.push_back(parse_double(tok, "--pi-grid"));
        }
        if (o_users->count()) {
            s.users.clear();
            for (const auto& tok : split_list(users_csv))
                s.users.push_back(static_cast<int>(parse_int(tok, "--users")));
        }
        if (paper_scale) s.slots = 800000;
        if (o_slots->count()) s.slots = slots;  // explicit --slots wins over --paper-scale
        if (o_seeds->count()) s.seeds = seeds;
        if (o_base->count()) s.base_seed = base_seed;
        if (o_channels->count()) s.channels = channels;
        if (o_sojourn->count()) s.sojourn_scale = sojourn_scale;
        if (o_cont->count())
            s.contention = contention == "all-fail" ? qrdv::ContentionPolicy::AllFail
                           : contention == "random-winner"
                               ? qrdv::ContentionPolicy::RandomWinner
                               : throw qrdv::ConfigError(
                                     "--contention: expected all-fail or random-winner, got '" +
                                     contention + "'");
        if (o_pair->count())
            s.pairing = pairing == "persistent" ? qrdv::PairingPolicy::Persistent
                        : pairing == "per-slot"
                            ? qrdv::PairingPolicy::PerSlot
                            : throw qrdv::ConfigError(
                                  "--pairing: expected persistent or per-slot, got '" +
                                  pairing + "'");
        if (o_markov->count())
            s.occupancy = markov == "on"    ? qrdv::OccupancyMode::Markov
                          : markov == "iid" ? qrdv::OccupancyMode::Iid
                                            : throw qrdv::ConfigError(
                                                  "--markov: expected on or iid, got '" +
                                                  markov + "'");
        if (o_alow->count()) s.adaptive_low = adaptive_low;
        if (o_ahigh->count()) s.adaptive_high = adaptive_high;
        if (o_rate->count()) s.attempt_rate = attempt_rate;
        if (o_par->count()) s.parallelism = parallelism;
        if (o_format->count()) {
            if (format == "csv")
                s.format = qrdv::OutputFormat::Csv;
            else if (format == "json")
                s.format = qrdv::OutputFormat::Json;
            else if (format == "both")
                s.format = qrdv::OutputFormat::Both;
            else
                throw qrdv::ConfigError("--format: expected csv, json or both, got '" +
                                        format + "'");
        }
        if (const char* env = std::getenv("QRDV_SEED")) {
            s.base_seed =
                static_cast<std::uint64_t>(parse_int(env, "QRDV_SEED"));  // overrides all
        }

        auto campaign = qrdv::expand_campaign(s);
        std::cerr << "campaign: " << campaign.cells.size() << " cells ("
                  << s.schemes.size() << " schemes x " << s.pi_grid.size()
                  << " p_i x " << s.users.size() << " user counts x " << s.seeds
                  << " seeds), " << s.slots << " slots each\n";
        auto result = qrdv::run_campaign(campaign, /*progress=*/true);
        std::cerr << "wrote " << result.files.size() << " files to " << s.out_dir << "\n";
        return 0;
    } catch (const qrdv::ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
}
