#include "crtube/report_io.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <sstream>

using namespace crtube;

namespace {

ResidualReport sample_report()
{
    return example31_report(1.0, GridSpec::parse("-0.2:0.2:5,-0.2:0.2:4"));
}

} // namespace

TEST(Csv, HeaderOrder)
{
    std::ostringstream os;
    write_csv(sample_report(), os);
    const std::string text = os.str();
    EXPECT_EQ(text.substr(0, text.find('\n')), "t1,t2,v,w,rho11,S,ma,theta21_raw,theta21_norm,monge_raw,monge_norm");
}

TEST(Csv, RoundTripIsExact)
{
    const ResidualReport r = sample_report();
    ASSERT_FALSE(r.points.empty());
    std::stringstream ss;
    write_csv(r, ss);
    const auto back = read_csv(ss);
    ASSERT_EQ(back.size(), r.points.size());
    for (std::size_t i = 0; i < back.size(); ++i) {
        EXPECT_EQ(back[i], r.points[i]) << i;
    }
}

TEST(Csv, AwkwardValuesRoundTrip)
{
    ResidualReport r;
    PointRecord p;
    p.t1 = 0.1;
    p.t2 = -1.0 / 3.0;
    p.v = std::numeric_limits<double>::denorm_min();
    p.w = std::numeric_limits<double>::max();
    p.rho11 = 1e-300;
    p.S = -0.0;
    r.points = {p};
    std::stringstream ss;
    write_csv(r, ss);
    const auto back = read_csv(ss);
    ASSERT_EQ(back.size(), 1u);
    EXPECT_EQ(back[0], p);
    EXPECT_TRUE(std::signbit(back[0].S));
}

TEST(Csv, MalformedInput)
{
    std::istringstream empty("");
    EXPECT_THROW(read_csv(empty), ConfigError);
    std::istringstream header("t2,t1\n");
    EXPECT_THROW(read_csv(header), ConfigError);
    std::istringstream short_row("t1,t2,v,w,rho11,S,ma,theta21_raw,theta21_norm,monge_raw,monge_norm\n1,2,3\n");
    EXPECT_THROW(read_csv(short_row), ConfigError);
    std::istringstream bad_cell("t1,t2,v,w,rho11,S,ma,theta21_raw,theta21_norm,monge_raw,monge_norm\n1,2,3,4,5,x,7,8,9,10,11\n");
    try {
        read_csv(bad_cell);
        FAIL();
    } catch (const ConfigError& e) {
        EXPECT_NE(std::string(e.what()).find("column S"), std::string::npos);
    }
}

TEST(Json, RecordRoundTripIsExact)
{
    const ResidualReport r = sample_report();
    const auto j = nlohmann::json::parse(to_json(r).dump(2));
    ASSERT_EQ(j.at("points").size(), r.points.size());
    for (std::size_t i = 0; i < r.points.size(); ++i) {
        EXPECT_EQ(record_from_json(j.at("points")[i]), r.points[i]);
    }
}

TEST(Json, ReportLayout)
{
    const ResidualReport r = sample_report();
    std::ostringstream os;
    write_json(r, os);
    const auto j = nlohmann::json::parse(os.str());
    for (const char* key : {"meta", "points", "errors", "summary", "verdicts", "expected", "pass"}) {
        EXPECT_TRUE(j.contains(key)) << key;
    }
    EXPECT_EQ(j.at("pass"), r.pass());
    EXPECT_EQ(j.at("meta").at("family"), "example31");
    EXPECT_EQ(j.at("meta").at("tolerances").at("tol"), 1e-8);
    EXPECT_EQ(j.at("summary").at("monge_norm").at("max_abs"), r.summary.at("monge_norm").max_abs);
    EXPECT_EQ(j.at("verdicts").at("theta21_flat"), true);
    std::size_t column = 0;
    for (const auto& [key, value] : j.at("points")[0].items()) {
        (void)value;
        EXPECT_NE(std::find(csv_columns.begin(), csv_columns.end(), key), csv_columns.end()) << key;
        ++column;
    }
    EXPECT_EQ(column, csv_columns.size());
}

TEST(Json, ErrorsAreListed)
{
    const ResidualReport r = run_report({{"family", "expr"},
                                         {"rho", "t1^2 + t2^2"},
                                         {"grid", {{"t1", {-0.1, 0.1, 2}}, {"t2", {-0.1, 0.1, 2}}}}});
    const auto j = to_json(r);
    ASSERT_EQ(j.at("errors").size(), 4u);
    EXPECT_EQ(j.at("errors")[0].at("kind"), "TwoDegeneracyViolation");
    EXPECT_EQ(j.at("pass"), false);
}
