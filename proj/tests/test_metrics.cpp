#include <doctest.h>

#include <sstream>

#include "qrdv/metrics.hpp"
#include "qrdv/rng.hpp"

using namespace qrdv;

namespace {

MetricsAccumulator cell_acc() {
    MetricsAccumulator a;
    a.key = CellKey{SchemeVariant::TwoByTwo, 4, 16, 50, 0.5};
    return a;
}

MetricsAccumulator random_acc(RngStream& rng) {
    auto a = cell_acc();
    a.total_slots = rng.uniform_below(10000) + 1;
    a.total_blocking = rng.uniform_below(500);
    a.total_awake_slots = rng.uniform_below(100000);
    a.censored_attempts = rng.uniform_below(20);
    a.contention_losses = rng.uniform_below(300);
    const auto n_rdv = rng.uniform_below(50);
    for (std::uint64_t i = 0; i < n_rdv; ++i) a.record_rdv(rng.uniform_below(40) + 1);
    return a;
}

bool same_counters(const MetricsAccumulator& a, const MetricsAccumulator& b) {
    return a.total_slots == b.total_slots && a.total_rdv == b.total_rdv &&
           a.total_blocking == b.total_blocking &&
           a.total_awake_slots == b.total_awake_slots && a.ttr_total == b.ttr_total &&
           a.completed_attempts == b.completed_attempts &&
           a.censored_attempts == b.censored_attempts &&
           a.contention_losses == b.contention_losses;
}

}  // namespace

TEST_CASE("average rendezvous per slot") {
    auto a = cell_acc();
    a.total_slots = 8000;
    for (int i = 0; i < 800; ++i) a.record_rdv(1);
    CHECK(avg_rdv_per_slot(a) == doctest::Approx(0.1));

    auto b = cell_acc();
    b.total_slots = 100;
    CHECK(avg_rdv_per_slot(b) == 0.0);

    MetricsAccumulator zero;
    CHECK_THROWS_AS(avg_rdv_per_slot(zero), std::invalid_argument);
}

TEST_CASE("average TTR over completed attempts only") {
    auto a = cell_acc();
    a.total_slots = 10;
    a.record_rdv(3);
    a.record_rdv(5);
    CHECK(avg_ttr(a) == doctest::Approx(4.0));

    auto b = cell_acc();
    b.total_slots = 10;
    b.censored_attempts = 2;
    CHECK_THROWS_AS(avg_ttr(b), NoSamplesError);
}

TEST_CASE("energy per rendezvous") {
    auto a = cell_acc();
    a.total_slots = 1000;
    a.total_awake_slots = 1200;
    for (int i = 0; i < 100; ++i) a.record_rdv(1);
    CHECK(energy_per_rdv(a) == doctest::Approx(12.0));

    auto b = cell_acc();
    b.total_slots = 10;
    b.total_awake_slots = 7;
    CHECK_THROWS_AS(energy_per_rdv(b), ZeroRdvError);
}

TEST_CASE("forced blocking ratio") {
    auto a = cell_acc();
    a.total_slots = 1000;
    a.total_blocking = 50;
    for (int i = 0; i < 200; ++i) a.record_rdv(2);
    CHECK(forced_blocking(a) == doctest::Approx(0.25));

    auto b = cell_acc();
    b.total_slots = 1000;
    for (int i = 0; i < 10; ++i) b.record_rdv(1);
    CHECK(forced_blocking(b) == 0.0);
}

TEST_CASE("merge is a commutative monoid over counters") {
    RngStream rng(77);
    for (int iter = 0; iter < 200; ++iter) {
        auto x = random_acc(rng);
        auto y = random_acc(rng);
        auto z = random_acc(rng);
        auto empty = cell_acc();

        CHECK(same_counters(merge(x, empty), x));
        CHECK(same_counters(merge(empty, x), x));
        CHECK(same_counters(merge(x, y), merge(y, x)));
        CHECK(same_counters(merge(merge(x, y), z), merge(x, merge(y, z))));

        // Pooled ratio equals the ratio of pooled counters by construction.
        auto m = merge(x, y);
        CHECK(avg_rdv_per_slot(m) ==
              doctest::Approx(static_cast<double>(x.total_rdv + y.total_rdv) /
                              static_cast<double>(x.total_slots + y.total_slots)));
    }
}

TEST_CASE("merge rejects mismatched cells") {
    auto a = cell_acc();
    auto b = cell_acc();
    b.key.p_i = 0.7;
    CHECK_THROWS_AS(merge(a, b), std::invalid_argument);
    auto c = cell_acc();
    c.key.num_users = 26;
    CHECK_THROWS_AS(merge(a, c), std::invalid_argument);
}

TEST_CASE("finalize carries undefined ratios as disengaged optionals") {
    auto a = cell_acc();
    a.total_slots = 500;
    a.total_awake_slots = 900;
    a.censored_attempts = 3;
    auto r = finalize(a, 42);
    CHECK(r.avg_rdv_per_slot == 0.0);
    CHECK_FALSE(r.avg_ttr.has_value());
    CHECK_FALSE(r.energy_per_rdv.has_value());
    CHECK_FALSE(r.forced_blocking.has_value());

    auto row = csv_row(r);
    CHECK(row.find("NA,NA,NA") != std::string::npos);
    auto j = to_json(r);
    CHECK(j.find("\"avg_ttr\":null") != std::string::npos);
}

TEST_CASE("csv layout matches the fixed column order") {
    CHECK(csv_header() ==
          "scheme,n,N,users,p_i,seed,slots,total_rdv,total_blocking,"
          "total_awake_slots,completed_attempts,censored_attempts,"
          "avg_rdv_per_slot,avg_ttr,energy_per_rdv,forced_blocking");

    auto a = cell_acc();
    a.total_slots = 1000;
    a.total_blocking = 5;
    a.total_awake_slots = 600;
    a.record_rdv(4);
    a.record_rdv(8);
    auto r = finalize(a, 9);
    auto row = csv_row(r);

    int commas = 0;
    for (char ch : row)
        if (ch == ',') ++commas;
    CHECK(commas == 15);
    CHECK(row.substr(0, 4) == "2x2,");
    CHECK(row.find(",0.5,") != std::string::npos);  // p_i with '.' separator
}

TEST_CASE("report round-trips through json") {
    RngStream rng(5);
    for (int iter = 0; iter < 50; ++iter) {
        auto a = random_acc(rng);
        auto r = finalize(a, iter);
        auto back = report_from_json(to_json(r));
        CHECK(back == r);
    }
}

TEST_CASE("derived fields recompute from raw counters") {
    RngStream rng(6);
    for (int iter = 0; iter < 50; ++iter) {
        auto a = random_acc(rng);
        auto r = finalize(a, iter);
        CHECK(r.avg_rdv_per_slot ==
              static_cast<double>(r.total_rdv) / static_cast<double>(r.total_slots));
        if (r.total_rdv > 0) {
            CHECK(*r.energy_per_rdv == static_cast<double>(r.total_awake_slots) /
                                           static_cast<double>(r.total_rdv));
            CHECK(*r.forced_blocking == static_cast<double>(r.total_blocking) /
                                            static_cast<double>(r.total_rdv));
            CHECK(*r.avg_ttr == static_cast<double>(r.ttr_total) /
                                    static_cast<double>(r.completed_attempts));
        }
    }
}

TEST_CASE("number formatting is shortest round-trip with dot separator") {
    CHECK(format_number(0.1) == "0.1");
    CHECK(format_number(0.5) == "0.5");
    CHECK(format_number(12.0) == "12");
    CHECK(format_number(2.0 / 3.0) == "0.6666666666666666");
}
