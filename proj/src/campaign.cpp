#include "qrdv/campaign.hpp"

#include <atomic>
#include <cmath>
#include <fstream>
#include <iostream>
#include <mutex>
#include <optional>
#include <sstream>
#include <thread>

#include <json.hpp>

namespace qrdv {

namespace fs = std::filesystem;

SchemeVariant scheme_from_name(const std::string& name) {
    if (name == "1x1") return SchemeVariant::OneByOne;
    if (name == "2x1") return SchemeVariant::TwoByOne;
    if (name == "2x2") return SchemeVariant::TwoByTwo;
    if (name == "adaptive") return SchemeVariant::Adaptive;
    throw ConfigError("unknown scheme '" + name + "' (expected 1x1, 2x1, 2x2 or adaptive)");
}

namespace {

ContentionPolicy contention_from_name(const std::string& v) {
    if (v == "all-fail") return ContentionPolicy::AllFail;
    if (v == "random-winner") return ContentionPolicy::RandomWinner;
    throw ConfigError("contention must be 'all-fail' or 'random-winner', got '" + v + "'");
}

PairingPolicy pairing_from_name(const std::string& v) {
    if (v == "persistent") return PairingPolicy::Persistent;
    if (v == "per-slot") return PairingPolicy::PerSlot;
    throw ConfigError("pairing must be 'persistent' or 'per-slot', got '" + v + "'");
}

OccupancyMode markov_from_name(const std::string& v) {
    if (v == "on") return OccupancyMode::Markov;
    if (v == "iid") return OccupancyMode::Iid;
    throw ConfigError("markov must be 'on' or 'iid', got '" + v + "'");
}

OutputFormat format_from_name(const std::string& v) {
    if (v == "csv") return OutputFormat::Csv;
    if (v == "json") return OutputFormat::Json;
    if (v == "both") return OutputFormat::Both;
    throw ConfigError("format must be 'csv', 'json' or 'both', got '" + v + "'");
}

std::vector<std::string> split_csv_list(const std::string& text) {
    std::vector<std::string> out;
    std::string item;
    std::istringstream is(text);
    while (std::getline(is, item, ','))
        if (!item.empty()) out.push_back(item);
    return out;
}

}  // namespace

CampaignSettings settings_from_json(const std::string& text, const std::string& source) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(source + ": not valid JSON: " + e.what());
    }
    if (!j.is_object()) throw ConfigError(source + ": top level must be a JSON object");

    CampaignSettings s;
    for (const auto& [key, value] : j.items()) {
        try {
            if (key == "out") {
                s.out_dir = value.get<std::string>();
            } else if (key == "schemes") {
                std::vector<std::string> names;
                if (value.is_string())
                    names = split_csv_list(value.get<std::string>());
                else
                    names = value.get<std::vector<std::string>>();
                s.schemes.clear();
                for (const auto& n : names) s.schemes.push_back(scheme_from_name(n));
            } else if (key == "pi_grid") {
                s.pi_grid = value.get<std::vector<double>>();
            } else if (key == "users") {
                s.users = value.get<std::vector<int>>();
            } else if (key == "slots") {
                s.slots = value.get<std::uint64_t>();
            } else if (key == "seeds") {
                s.seeds = value.get<int>();
            } else if (key == "base_seed") {
                s.base_seed = value.get<std::uint64_t>();
            } else if (key == "channels") {
                s.channels = value.get<int>();
            } else if (key == "sojourn_scale") {
                s.sojourn_scale = value.get<double>();
            } else if (key == "contention") {
                s.contention = contention_from_name(value.get<std::string>());
            } else if (key == "pairing") {
                s.pairing = pairing_from_name(value.get<std::string>());
            } else if (key == "markov") {
                s.occupancy = markov_from_name(value.get<std::string>());
            } else if (key == "adaptive_low") {
                s.adaptive_low = value.get<double>();
            } else if (key == "adaptive_high") {
                s.adaptive_high = value.get<double>();
            } else if (key == "attempt_rate") {
                s.attempt_rate = value.get<double>();
            } else if (key == "parallelism") {
                s.parallelism = value.get<int>();
            } else if (key == "paper_scale") {
                if (value.get<bool>()) s.slots = 800000;
            } else if (key == "format") {
                s.format = format_from_name(value.get<std::string>());
            } else {
                throw ConfigError(source + ": unknown key '" + key + "'");
            }
        } catch (const ConfigError&) {
            throw;
        } catch (const nlohmann::json::exception&) {
            throw ConfigError(source + ": key '" + key + "' has the wrong type");
        }
    }
    return s;
}

void validate_settings(const CampaignSettings& s) {
    if (s.schemes.empty()) throw ConfigError("schemes: at least one scheme required");
    if (s.pi_grid.empty()) throw ConfigError("pi_grid: at least one value required");
    for (double p : s.pi_grid)
        if (!(p > 0.0 && p < 1.0))
            throw ConfigError("pi_grid: value " + format_number(p) + " outside (0,1)");
    if (s.users.empty()) throw ConfigError("users: at least one value required");
    for (int u : s.users)
        if (u < 2) throw ConfigError("users: value " + std::to_string(u) + " below 2");
    if (s.seeds < 1) throw ConfigError("seeds: must be >= 1");
    if (s.channels < 1) throw ConfigError("channels: must be >= 1");
    if (!(s.sojourn_scale > 0.0)) throw ConfigError("sojourn_scale: must be positive");
    for (double p : s.pi_grid) {
        if (p * s.sojourn_scale < 1.0 - 1e-9 || (1.0 - p) * s.sojourn_scale < 1.0 - 1e-9)
            throw ConfigError("sojourn_scale: too small to realize p_i = " +
                              format_number(p) + " (mean sojourns must be >= 1 slot)");
    }
    if (!(s.attempt_rate >= 0.0 && s.attempt_rate <= 1.0))
        throw ConfigError("attempt_rate: must lie in [0,1]");
    if (!(s.adaptive_low > 0.0) || !(s.adaptive_low < s.adaptive_high))
        throw ConfigError("adaptive thresholds: need 0 < adaptive_low < adaptive_high");
    if (s.parallelism < 0) throw ConfigError("parallelism: must be >= 0");
    const auto cycle = static_cast<std::uint64_t>(build_grid(s.channels).cycle_length());
    if (s.slots < cycle)
        throw ConfigError("slots: must cover at least one cycle (" +
                          std::to_string(cycle) + " slots for " +
                          std::to_string(s.channels) + " channels)");
}

Campaign expand_campaign(const CampaignSettings& s) {
    validate_settings(s);
    Campaign c;
    c.settings = s;
    std::uint64_t index = 0;
    for (SchemeVariant scheme : s.schemes)
        for (double p : s.pi_grid)
            for (int u : s.users)
                for (int k = 0; k < s.seeds; ++k) {
                    SimConfig cfg;
                    cfg.num_channels = s.channels;
                    cfg.num_users = u;
                    cfg.scheme = SelectionScheme{scheme, s.adaptive_low, s.adaptive_high};
                    cfg.target_pi = p;
                    cfg.sojourn_scale = s.sojourn_scale;
                    cfg.total_slots = s.slots;
                    cfg.seed = s.base_seed + index;
                    cfg.contention = s.contention;
                    cfg.pairing = s.pairing;
                    cfg.occupancy = s.occupancy;
                    cfg.attempt_rate = s.attempt_rate;
                    c.cells.push_back(std::move(cfg));
                    ++index;
                }
    return c;
}

namespace {

std::string cell_label(const SimConfig& cfg) {
    std::ostringstream os;
    os << "scheme=" << scheme_name(cfg.scheme.variant) << " users=" << cfg.num_users
       << " p_i=" << format_number(cfg.target_pi) << " seed=" << cfg.seed;
    return os.str();
}

void write_atomic(const fs::path& path, const std::string& content) {
    const fs::path tmp = path.parent_path() / (".tmp-" + path.filename().string());
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw CampaignError("cannot open " + tmp.string() + " for writing");
        out << content;
        if (!out) throw CampaignError("short write to " + tmp.string());
    }
    fs::rename(tmp, path);
}

MetricStats stats_over(const std::vector<double>& xs) {
    MetricStats st;
    st.count = static_cast<int>(xs.size());
    if (xs.empty()) return st;
    double sum = 0.0;
    for (double x : xs) sum += x;
    st.mean = sum / static_cast<double>(xs.size());
    if (xs.size() >= 2) {
        double ss = 0.0;
        for (double x : xs) ss += (x - st.mean) * (x - st.mean);
        st.stddev = std::sqrt(ss / static_cast<double>(xs.size() - 1));
    }
    return st;
}

std::string stats_field(const MetricStats& st) {
    if (st.count == 0) return "NA NA";
    return format_number(st.mean) + " " + format_number(st.stddev);
}

const MetricStats& pick_metric(const AggRow& row, int metric) {
    switch (metric) {
        case 0: return row.rdv;
        case 1: return row.ttr;
        case 2: return row.energy;
        default: return row.blocking;
    }
}

}  // namespace

std::vector<AggRow> aggregate(const std::vector<MetricsReport>& reports,
                              const CampaignSettings& s) {
    std::vector<AggRow> rows;
    for (SchemeVariant scheme : s.schemes) {
        for (int u : s.users) {
            for (double p : s.pi_grid) {
                AggRow row;
                row.scheme = scheme;
                row.users = u;
                row.p_i = p;
                std::vector<double> rdv, ttr, energy, blocking;
                for (const auto& r : reports) {
                    if (r.scheme != scheme_name(scheme) || r.num_users != u || r.p_i != p)
                        continue;
                    rdv.push_back(r.avg_rdv_per_slot);
                    if (r.avg_ttr) ttr.push_back(*r.avg_ttr);
                    if (r.energy_per_rdv) energy.push_back(*r.energy_per_rdv);
                    if (r.forced_blocking) blocking.push_back(*r.forced_blocking);
                }
                row.rdv = stats_over(rdv);
                row.ttr = stats_over(ttr);
                row.energy = stats_over(energy);
                row.blocking = stats_over(blocking);
                rows.push_back(std::move(row));
            }
        }
    }
    return rows;
}

std::vector<fs::path> emit_plot_data(const std::vector<AggRow>& rows,
                                     const CampaignSettings& s) {
    const fs::path dir(s.out_dir);
    fs::create_directories(dir);
    std::vector<fs::path> written;

    static const char* kFigName[4] = {"fig4_rdv", "fig5_ttr", "fig6_energy",
                                      "fig7_blocking"};
    static const char* kOverlayName[4] = {"fig8_rdv_adaptive", "fig9_ttr_adaptive",
                                          "fig10_energy_adaptive", nullptr};
    const bool has_adaptive =
        std::find(s.schemes.begin(), s.schemes.end(), SchemeVariant::Adaptive) !=
        s.schemes.end();

    for (int u : s.users) {
        const std::string suffix =
            s.users.size() > 1 ? "_u" + std::to_string(u) : std::string();
        for (int metric = 0; metric < 4; ++metric) {
            std::ostringstream body;
            body << "# p_i";
            for (SchemeVariant scheme : s.schemes)
                body << ' ' << scheme_name(scheme) << "_mean " << scheme_name(scheme)
                     << "_std";
            body << '\n';
            // An empty table still yields the header comment, nothing else.
            for (double p : rows.empty() ? std::vector<double>{} : s.pi_grid) {
                body << format_number(p);
                for (SchemeVariant scheme : s.schemes) {
                    const AggRow* found = nullptr;
                    for (const auto& row : rows)
                        if (row.scheme == scheme && row.users == u && row.p_i == p) {
                            found = &row;
                            break;
                        }
                    body << ' ' << (found ? stats_field(pick_metric(*found, metric))
                                          : std::string("NA NA"));
                }
                body << '\n';
            }
            const fs::path main_path =
                dir / (std::string(kFigName[metric]) + suffix + ".dat");
            write_atomic(main_path, body.str());
            written.push_back(main_path);
            if (has_adaptive && metric < 3) {
                const fs::path overlay =
                    dir / (std::string(kOverlayName[metric]) + suffix + ".dat");
                write_atomic(overlay, body.str());
                written.push_back(overlay);
            }
        }
    }
    return written;
}

CampaignResult run_campaign(const Campaign& campaign, bool progress) {
    const auto& s = campaign.settings;
    const fs::path dir(s.out_dir);
    fs::create_directories(dir);

    const size_t total = campaign.cells.size();
    std::vector<std::optional<MetricsReport>> slots(total);
    std::vector<std::string> errors(total);
    std::atomic<size_t> next{0};
    std::atomic<size_t> done{0};
    std::mutex io_mutex;

    unsigned workers = s.parallelism > 0 ? static_cast<unsigned>(s.parallelism)
                                         : std::thread::hardware_concurrency();
    if (workers == 0) workers = 1;
    workers = std::min<unsigned>(workers, total == 0 ? 1 : static_cast<unsigned>(total));

    auto worker = [&]() {
        for (;;) {
            const size_t i = next.fetch_add(1);
            if (i >= total) return;
            try {
                slots[i] = run(campaign.cells[i]).report;
            } catch (const std::exception& e) {
                errors[i] = e.what();
            }
            const size_t k = done.fetch_add(1) + 1;
            if (progress) {
                std::lock_guard<std::mutex> lock(io_mutex);
                std::cerr << "[" << k << "/" << total << "] "
                          << cell_label(campaign.cells[i]) << '\n';
            }
        }
    };

    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (unsigned w = 0; w < workers; ++w) pool.emplace_back(worker);
    for (auto& t : pool) t.join();

    for (size_t i = 0; i < total; ++i) {
        if (!slots[i])
            throw CampaignError("cell #" + std::to_string(i) + " (" +
                                cell_label(campaign.cells[i]) + ") failed: " + errors[i]);
    }

    CampaignResult result;
    result.reports.reserve(total);
    for (auto& r : slots) result.reports.push_back(std::move(*r));
    result.aggregated = aggregate(result.reports, s);

    if (s.format == OutputFormat::Csv || s.format == OutputFormat::Both) {
        std::ostringstream csv;
        csv << csv_header() << '\n';
        for (const auto& r : result.reports) csv << csv_row(r) << '\n';
        const fs::path p = dir / "reports.csv";
        write_atomic(p, csv.str());
        result.files.push_back(p);
    }
    if (s.format == OutputFormat::Json || s.format == OutputFormat::Both) {
        std::ostringstream js;
        js << "[\n";
        for (size_t i = 0; i < result.reports.size(); ++i) {
            js << to_json(result.reports[i]);
            if (i + 1 < result.reports.size()) js << ',';
            js << '\n';
        }
        js << "]\n";
        const fs::path p = dir / "reports.json";
        write_atomic(p, js.str());
        result.files.push_back(p);
    }

    static const char* kAggName[4] = {"agg_rdv.csv", "agg_ttr.csv", "agg_energy.csv",
                                      "agg_blocking.csv"};
    for (int metric = 0; metric < 4; ++metric) {
        std::ostringstream table;
        table << "scheme,users,p_i,mean,stddev,seeds\n";
        for (const auto& row : result.aggregated) {
            const auto& st = pick_metric(row, metric);
            table << scheme_name(row.scheme) << ',' << row.users << ','
                  << format_number(row.p_i) << ',';
            if (st.count == 0)
                table << "NA,NA";
            else
                table << format_number(st.mean) << ',' << format_number(st.stddev);
            table << ',' << st.count << '\n';
        }
        const fs::path p = dir / kAggName[metric];
        write_atomic(p, table.str());
        result.files.push_back(p);
    }

    auto figs = emit_plot_data(result.aggregated, s);
    result.files.insert(result.files.end(), figs.begin(), figs.end());
    return result;
}

}  // namespace qrdv
