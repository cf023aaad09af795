#include <catch2/catch_amalgamated.hpp>

#include <nlohmann/json.hpp>
#include <sstream>

#include "ontics/report.hpp"

using namespace ontics;
using namespace ontics::report;

namespace {

ReportRecord sample_record() {
    ReportRecord r;
    r.check = "born-reproduction";
    r.model = "ks";
    r.inputs = "pair=3 seed=1";
    r.estimate = 0.85355339059327373;
    r.standard_error = 0.0011;
    r.verdict = "pass";
    r.claim = "predicted outcome frequency matches the Born probability of the test";
    r.detail = "target=0.853553 diff=0.0002";
    return r;
}

}  // namespace

TEST_CASE("only the eight agreed verdicts are accepted") {
    for (const char* v : {"pass", "fail", "deficient", "not-deficient", "contextual",
                          "non-contextual", "SAT", "UNSAT"})
        REQUIRE(verdict_allowed(v));
    REQUIRE(!verdict_allowed("ok"));
    REQUIRE(!verdict_allowed("PASS"));
    REQUIRE(!verdict_allowed(""));

    std::ostringstream out;
    Writer w(out, Format::Json);
    ReportRecord bad = sample_record();
    bad.verdict = "maybe";
    REQUIRE_THROWS_AS(w.write(bad), std::logic_error);

    ReportRecord unclaimed = sample_record();
    unclaimed.claim.clear();
    REQUIRE_THROWS_AS(w.write(unclaimed), std::logic_error);
}

TEST_CASE("json records round-trip with their field order intact") {
    std::ostringstream out;
    Writer w(out, Format::Json);
    w.write(sample_record());
    std::string line = out.str();

    REQUIRE(line.back() == '\n');
    REQUIRE(std::count(line.begin(), line.end(), '\n') == 1);

    nlohmann::json j = nlohmann::json::parse(line);
    REQUIRE(j["check"] == "born-reproduction");
    REQUIRE(j["model"] == "ks");
    REQUIRE(j["inputs"] == "pair=3 seed=1");
    REQUIRE(j["estimate"].get<double>() == 0.85355339059327373);
    REQUIRE(j["standard_error"].get<double>() == 0.0011);
    REQUIRE(j["verdict"] == "pass");
    REQUIRE(j["detail"] == "target=0.853553 diff=0.0002");

    // Declared order, one record per line.
    REQUIRE(line.find("\"check\"") < line.find("\"model\""));
    REQUIRE(line.find("\"model\"") < line.find("\"inputs\""));
    REQUIRE(line.find("\"inputs\"") < line.find("\"estimate\""));
    REQUIRE(line.find("\"estimate\"") < line.find("\"standard_error\""));
    REQUIRE(line.find("\"standard_error\"") < line.find("\"verdict\""));
    REQUIRE(line.find("\"verdict\"") < line.find("\"claim\""));
    REQUIRE(line.find("\"claim\"") < line.find("\"detail\""));
}

TEST_CASE("csv output writes one header and escapes awkward fields") {
    std::ostringstream out;
    Writer w(out, Format::Csv);
    ReportRecord r = sample_record();
    r.detail = "stage \"two\", with a comma";
    w.write(r);
    w.write(sample_record());

    std::istringstream lines(out.str());
    std::string header, first, second, extra;
    REQUIRE(std::getline(lines, header));
    REQUIRE(std::getline(lines, first));
    REQUIRE(std::getline(lines, second));
    REQUIRE(!std::getline(lines, extra));

    REQUIRE(header == "check,model,inputs,estimate,standard_error,verdict,claim,detail");
    REQUIRE(first.find("\"stage \"\"two\"\", with a comma\"") != std::string::npos);
    REQUIRE(second.find("born-reproduction,ks,") == 0);
}

TEST_CASE("text output carries the verdict and the numbers") {
    std::ostringstream out;
    Writer w(out, Format::Text);
    w.write(sample_record());
    std::string line = out.str();
    REQUIRE(line.find("[pass]") == 0);
    REQUIRE(line.find("born-reproduction") != std::string::npos);
    REQUIRE(line.find("est=0.853553") != std::string::npos);
    REQUIRE(line.find("se=0.0011") != std::string::npos);
    REQUIRE(line.back() == '\n');
}

TEST_CASE("number formatting is locale-free and value-preserving") {
    for (double x : {0.1, 1.0 / 3.0, 0.85355339059327373, 1e-17, 0.0, 1.0}) {
        std::string s = format_double(x);
        REQUIRE(std::stod(s) == x);
        REQUIRE(s.find(',') == std::string::npos);
    }
    REQUIRE(format_double(0.25) == format_double(0.25));
    REQUIRE(format_double_short(0.85355339059327373) == "0.853553");
}

TEST_CASE("identical records produce byte-identical streams") {
    for (Format f : {Format::Json, Format::Csv, Format::Text}) {
        std::ostringstream a, b;
        Writer wa(a, f), wb(b, f);
        for (int i = 0; i < 3; ++i) {
            wa.write(sample_record());
            wb.write(sample_record());
        }
        REQUIRE(a.str() == b.str());
    }
    REQUIRE(parse_format("json") == Format::Json);
    REQUIRE(parse_format("csv") == Format::Csv);
    REQUIRE(parse_format("text") == Format::Text);
    REQUIRE_THROWS_AS(parse_format("yaml"), std::invalid_argument);
}
