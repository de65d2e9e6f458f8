#include "qrdv/metrics.hpp"

#include <charconv>
#include <sstream>

#include <json.hpp>

namespace qrdv {

double avg_rdv_per_slot(const MetricsAccumulator& acc) {
    if (acc.total_slots == 0)
        throw std::invalid_argument("avg_rdv_per_slot: zero-slot accumulator");
    return static_cast<double>(acc.total_rdv) / static_cast<double>(acc.total_slots);
}

double avg_ttr(const MetricsAccumulator& acc) {
    if (acc.completed_attempts == 0) throw NoSamplesError();
    return static_cast<double>(acc.ttr_total) / static_cast<double>(acc.completed_attempts);
}

double energy_per_rdv(const MetricsAccumulator& acc) {
    if (acc.total_rdv == 0) throw ZeroRdvError("energy_per_rdv: no rendezvous");
    return static_cast<double>(acc.total_awake_slots) / static_cast<double>(acc.total_rdv);
}

double forced_blocking(const MetricsAccumulator& acc) {
    if (acc.total_rdv == 0) throw ZeroRdvError("forced_blocking: no rendezvous");
    return static_cast<double>(acc.total_blocking) / static_cast<double>(acc.total_rdv);
}

MetricsAccumulator merge(const MetricsAccumulator& a, const MetricsAccumulator& b) {
    if (!(a.key == b.key))
        throw std::invalid_argument("merge: accumulators belong to different cells");
    MetricsAccumulator m = a;
    m.total_slots += b.total_slots;
    m.total_rdv += b.total_rdv;
    m.total_blocking += b.total_blocking;
    m.total_awake_slots += b.total_awake_slots;
    m.ttr_total += b.ttr_total;
    m.completed_attempts += b.completed_attempts;
    m.censored_attempts += b.censored_attempts;
    m.contention_losses += b.contention_losses;
    return m;
}

MetricsReport finalize(const MetricsAccumulator& acc, std::uint64_t seed) {
    MetricsReport r;
    r.scheme = scheme_name(acc.key.scheme);
    r.n = acc.key.n;
    r.num_channels = acc.key.num_channels;
    r.num_users = acc.key.num_users;
    r.p_i = acc.key.p_i;
    r.seed = seed;
    r.total_slots = acc.total_slots;
    r.total_rdv = acc.total_rdv;
    r.total_blocking = acc.total_blocking;
    r.total_awake_slots = acc.total_awake_slots;
    r.completed_attempts = acc.completed_attempts;
    r.censored_attempts = acc.censored_attempts;
    r.contention_losses = acc.contention_losses;
    r.ttr_total = acc.ttr_total;
    r.avg_rdv_per_slot = avg_rdv_per_slot(acc);
    if (acc.completed_attempts > 0) r.avg_ttr = avg_ttr(acc);
    if (acc.total_rdv > 0) {
        r.energy_per_rdv = energy_per_rdv(acc);
        r.forced_blocking = forced_blocking(acc);
    }
    return r;
}

std::string format_number(double x) {
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof(buf), x);
    return std::string(buf, res.ptr);
}

namespace {

std::string opt_field(const std::optional<double>& v) {
    return v ? format_number(*v) : std::string("NA");
}

}  // namespace

std::string csv_header() {
    return "scheme,n,N,users,p_i,seed,slots,total_rdv,total_blocking,"
           "total_awake_slots,completed_attempts,censored_attempts,"
           "avg_rdv_per_slot,avg_ttr,energy_per_rdv,forced_blocking";
}

std::string csv_row(const MetricsReport& r) {
    std::ostringstream os;
    os << r.scheme << ',' << r.n << ',' << r.num_channels << ',' << r.num_users << ','
       << format_number(r.p_i) << ',' << r.seed << ',' << r.total_slots << ','
       << r.total_rdv << ',' << r.total_blocking << ',' << r.total_awake_slots << ','
       << r.completed_attempts << ',' << r.censored_attempts << ','
       << format_number(r.avg_rdv_per_slot) << ',' << opt_field(r.avg_ttr) << ','
       << opt_field(r.energy_per_rdv) << ',' << opt_field(r.forced_blocking);
    return os.str();
}

namespace {

nlohmann::ordered_json json_object(const MetricsReport& r) {
    nlohmann::ordered_json j;
    j["scheme"] = r.scheme;
    j["n"] = r.n;
    j["N"] = r.num_channels;
    j["users"] = r.num_users;
    j["p_i"] = r.p_i;
    j["seed"] = r.seed;
    j["slots"] = r.total_slots;
    j["total_rdv"] = r.total_rdv;
    j["total_blocking"] = r.total_blocking;
    j["total_awake_slots"] = r.total_awake_slots;
    j["completed_attempts"] = r.completed_attempts;
    j["censored_attempts"] = r.censored_attempts;
    j["contention_losses"] = r.contention_losses;
    j["ttr_total"] = r.ttr_total;
    j["avg_rdv_per_slot"] = r.avg_rdv_per_slot;
    j["avg_ttr"] = r.avg_ttr ? nlohmann::ordered_json(*r.avg_ttr)
                             : nlohmann::ordered_json(nullptr);
    j["energy_per_rdv"] = r.energy_per_rdv ? nlohmann::ordered_json(*r.energy_per_rdv)
                                           : nlohmann::ordered_json(nullptr);
    j["forced_blocking"] = r.forced_blocking
                               ? nlohmann::ordered_json(*r.forced_blocking)
                               : nlohmann::ordered_json(nullptr);
    return j;
}

}  // namespace

std::string to_json(const MetricsReport& r) { return json_object(r).dump(); }

MetricsReport report_from_json(const std::string& text) {
    auto j = nlohmann::ordered_json::parse(text);
    MetricsReport r;
    r.scheme = j.at("scheme").get<std::string>();
    r.n = j.at("n").get<int>();
    r.num_channels = j.at("N").get<int>();
    r.num_users = j.at("users").get<int>();
    r.p_i = j.at("p_i").get<double>();
    r.seed = j.at("seed").get<std::uint64_t>();
    r.total_slots = j.at("slots").get<std::uint64_t>();
    r.total_rdv = j.at("total_rdv").get<std::uint64_t>();
    r.total_blocking = j.at("total_blocking").get<std::uint64_t>();
    r.total_awake_slots = j.at("total_awake_slots").get<std::uint64_t>();
    r.completed_attempts = j.at("completed_attempts").get<std::uint64_t>();
    r.censored_attempts = j.at("censored_attempts").get<std::uint64_t>();
    r.contention_losses = j.at("contention_losses").get<std::uint64_t>();
    r.ttr_total = j.at("ttr_total").get<std::uint64_t>();
    r.avg_rdv_per_slot = j.at("avg_rdv_per_slot").get<double>();
    if (!j.at("avg_ttr").is_null()) r.avg_ttr = j.at("avg_ttr").get<double>();
    if (!j.at("energy_per_rdv").is_null())
        r.energy_per_rdv = j.at("energy_per_rdv").get<double>();
    if (!j.at("forced_blocking").is_null())
        r.forced_blocking = j.at("forced_blocking").get<double>();
    return r;
}

}  // namespace qrdv
