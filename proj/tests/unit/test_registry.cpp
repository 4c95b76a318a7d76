#include <catch2/catch_amalgamated.hpp>

#include "eot/csv.hpp"
#include "eot/format.hpp"
#include "eot/registry.hpp"

#include <sstream>

using namespace eot;
using Catch::Matchers::WithinRel;

namespace {

const DeviceRecord* find(const std::vector<DeviceRecord>& recs, const std::string& label) {
    for (const auto& r : recs)
        if (r.label == label) return &r;
    return nullptr;
}

}  // namespace

TEST_CASE("csv splitting handles quotes") {
    CHECK(csv::split_line("a,\"b, c\",d") == std::vector<std::string>{"a", "b, c", "d"});
    CHECK(csv::split_line("\"x \"\"y\"\"\",") == std::vector<std::string>{"x \"y\"", ""});
    CHECK_THROWS_AS(csv::split_line("\"open", 4), csv::ParseError);
    CHECK(csv::escape("a,b") == "\"a,b\"");
    CHECK(csv::escape("plain") == "plain");
}

TEST_CASE("shortest round-trip formatting") {
    CHECK(format_double(0.1) == "0.1");
    CHECK(format_double(-0.0) == "0");
    CHECK(format_double(1645.0) == "1645");
    CHECK(format_double(3e-7) == "3e-07");
    const double x = 0.1 + 0.2;
    CHECK(std::stod(format_double(x)) == x);
}

TEST_CASE("bundled registry throughputs") {
    const Registry reg = load_bundled_registry();
    CHECK(reg.duplicates.empty());
    const struct { const char* label; double theta; } rows[] = {
        {"Kumar 2023", 135.0}, {"Higginbotham 2018", 1645.0}, {"Sahu 2022", 1.35},
        {"Xie 2025", 0.8},     {"Meesala 2024", 3.072}};
    for (const auto& row : rows) {
        const DeviceRecord* r = find(reg.records, row.label);
        REQUIRE(r);
        CHECK_THAT(r->throughput_hz(), WithinRel(row.theta, 1e-12));
    }
    CHECK(find(reg.records, "Sahu 2022")->direction == Direction::Down);
}

TEST_CASE("registry round trip is lossless") {
    const Registry reg = load_bundled_registry();
    std::ostringstream out;
    write_registry(out, reg.records);
    std::istringstream in(out.str());
    const Registry back = read_registry(in);
    REQUIRE(back.records.size() == reg.records.size());
    for (std::size_t i = 0; i < reg.records.size(); ++i) {
        const auto& a = reg.records[i];
        const auto& b = back.records[i];
        CHECK(a.label == b.label);
        CHECK(a.direction == b.direction);
        CHECK(a.n_add == b.n_add);
        CHECK(a.eta == b.eta);
        CHECK(a.bandwidth_hz == b.bandwidth_hz);
        CHECK(a.duty == b.duty);
        CHECK(a.source == b.source);
        CHECK(a.notes == b.notes);
    }
}

TEST_CASE("malformed rows report their line") {
    const std::string head = "label,direction,n_add,eta,bandwidth_hz,duty,source,notes\n";
    auto line_of = [&](const std::string& body) -> std::size_t {
        std::istringstream in("# comment\n" + head + body);
        try {
            read_registry(in);
        } catch (const csv::ParseError& e) {
            return e.line();
        }
        return 0;
    };
    CHECK(line_of("A,up,1,0.5,10,1,s,\nB,up,x,0.5,10,1,s,\n") == 4);
    CHECK(line_of("A,sideways,1,0.5,10,1,s,\n") == 3);
    CHECK(line_of("A,up,1,1.5,10,1,s,\n") == 3);
    CHECK(line_of("A,up,-1,0.5,10,1,s,\n") == 3);
    CHECK(line_of("A,up,1,0.5,10,1,s\n") == 3);
    std::istringstream bad_header("label,direction\n");
    CHECK_THROWS_AS(read_registry(bad_header), csv::ParseError);
}

TEST_CASE("duplicates are flagged, not dropped") {
    std::istringstream in(
        "label,direction,n_add,eta,bandwidth_hz,duty,source,notes\n"
        "A,up,1,0.5,10,1,s,\nA,down,1,0.5,10,1,s,\nA,up,2,0.5,10,1,s,\n");
    const Registry reg = read_registry(in);
    CHECK(reg.records.size() == 3);
    REQUIRE(reg.duplicates.size() == 1);
    CHECK(reg.duplicates[0] == "A (up)");
}

TEST_CASE("comparison bundle filters by direction and spot-checks numbers") {
    const Registry reg = load_bundled_registry();
    const FigureBundle down = emit_comparison(reg.records, Direction::Down, {}, ContourGrid{});
    CHECK(down.contours.empty());
    for (const auto& p : down.scatter) CHECK(p.direction == Direction::Down);
    bool meesala = false, sahu = false;
    for (const auto& p : down.scatter) {
        meesala |= p.label == "Meesala 2024";
        sahu |= p.label == "Sahu 2022";
    }
    CHECK((meesala && sahu));

    const FigureBundle up = emit_comparison(reg.records, Direction::Up, {100.0}, ContourGrid{});
    const auto* hig = find(reg.records, "Higginbotham 2018");
    bool found = false;
    for (const auto& p : up.scatter)
        if (p.label == hig->label) {
            found = true;
            CHECK(p.throughput_hz == 1645.0);
            CHECK(p.n_add == 34.0);
        }
    CHECK(found);
    REQUIRE(up.contours.size() == 1);
    for (const auto& [theta, n] : up.contours[0].points)
        CHECK_THAT(cap_small_eta(n, theta), WithinRel(100.0, 1e-9));

    CHECK_THROWS_AS(emit_comparison({}, Direction::Up, {}, ContourGrid{}), std::invalid_argument);
}

TEST_CASE("live points come from the model, not the table") {
    DeviceParams p;
    p.omega_m = AngularRate::from_hz(1.27e6);
    p.kappa_e = p.kappa_e_ext = AngularRate::from_hz(4e5);
    p.kappa_o = p.kappa_o_ext = AngularRate::from_hz(1e6);
    p.eta_max = 0.4;
    NoiseEnvironment env;
    env.n_th_gamma_m = AngularRate::from_hz(4530.0);
    env.a_e = NoiseEnvironment::a_e_from_2pi_per_hz(1.3e-5);
    env.b_e = 0.7;
    ModelInputs mi{p, env, {{"live", {AngularRate::from_hz(11e3), AngularRate::from_hz(11e3), 1.0}}},
                   NoiseModelKind::IdealUp};
    const FigureBundle b = emit_comparison(load_bundled_registry().records, Direction::Up, {}, ContourGrid{}, mi);
    const ScatterPoint& live = b.scatter.back();
    CHECK(live.label == "live");
    CHECK_THAT(live.n_add, WithinRel(4530.0 / 11000.0 + 0.843, 1e-12));
    CHECK_THAT(live.throughput_hz, WithinRel(0.4 * 22000.0, 1e-12));
    mi.model = NoiseModelKind::LossyDown;
    CHECK_THROWS_AS(emit_comparison(load_bundled_registry().records, Direction::Up, {}, ContourGrid{}, mi),
                    std::invalid_argument);
}

TEST_CASE("scatter and contour csv layout") {
    FigureBundle b;
    b.scatter.push_back({1645.0, 34.0, "Higginbotham 2018", Direction::Up});
    std::ostringstream s;
    write_scatter_csv(s, b);
    CHECK(s.str() == "throughput_hz,n_add,label,direction\n1645,34,Higginbotham 2018,up\n");
    std::ostringstream c;
    write_contours_csv(c, {{10.0, {{2.5, 0.125}}}});
    CHECK(c.str() == "level,x_throughput_hz,y_n_add\n10,2.5,0.125\n");
}
