#include <doctest.h>

#include <bit>
#include <cmath>
#include <sstream>

#include "gbnn/csv.hpp"
#include "gbnn/errors.hpp"
#include "gbnn/random.hpp"

using namespace gbnn;

namespace {

csv::Table parse(const std::string& text, bool header = true) {
    std::istringstream in(text);
    return csv::read(in, header);
}

}  // namespace

TEST_CASE("plain, quoted and padded cells") {
    const auto t = parse("a, b ,c\n1,\"x, y\",\"say \"\"hi\"\"\"\n\n 2 ,\" padded \",\"two\nlines\"\r\n");
    REQUIRE(t.header == std::vector<std::string>{"a", "b", "c"});
    REQUIRE(t.rows.size() == 2);
    CHECK(t.rows[0] == std::vector<std::string>{"1", "x, y", "say \"hi\""});
    CHECK(t.rows[1] == std::vector<std::string>{"2", " padded ", "two\nlines"});
    CHECK(t.line_numbers == std::vector<std::size_t>{2, 4});
}

TEST_CASE("ragged rows are parse errors with a location") {
    try {
        parse("a,b\n1,2\n3\n");
        FAIL("expected a parse error");
    } catch (const ParseError& e) {
        CHECK(e.row() == 3);
        CHECK(e.column() == 2);
    }
    CHECK_THROWS_AS(parse("a,b\n1,2,3\n"), ParseError);
    CHECK_THROWS_AS(parse("a,b\n\"open,2\n"), ParseError);
}

TEST_CASE("headerless tables") {
    const auto t = parse("1,2\n3,4\n", false);
    CHECK(t.header.empty());
    CHECK(t.rows.size() == 2);
}

TEST_CASE("shortest round-trip number formatting") {
    CHECK(csv::format_double(0.1) == "0.1");
    CHECK(csv::format_double(-2.0) == "-2");
    CHECK(csv::format_double(1e300) == "1e+300");
    RandomStream rng(3);
    for (int i = 0; i < 20000; ++i) {
        double v = std::bit_cast<double>(rng.next_u64());
        if (!std::isfinite(v)) continue;
        double back = 0.0;
        REQUIRE(csv::parse_double(csv::format_double(v), back));
        REQUIRE(std::bit_cast<std::uint64_t>(back) == std::bit_cast<std::uint64_t>(v));
    }
}

TEST_CASE("number parsing is strict") {
    double v = 0.0;
    CHECK(csv::parse_double("+1.5", v));
    CHECK(v == 1.5);
    CHECK(csv::parse_double("-3e2", v));
    CHECK(v == -300.0);
    CHECK_FALSE(csv::parse_double("", v));
    CHECK_FALSE(csv::parse_double("1.5x", v));
    CHECK_FALSE(csv::parse_double("x", v));
    CHECK_FALSE(csv::parse_double("1,5", v));
}

TEST_CASE("emit then parse is a fixed point") {
    const std::vector<std::vector<std::string>> rows{
        {"name", "value", "note"}, {"a,b", "1.25", "quote \" inside"}, {" lead", "trail ", "multi\nline"}, {"", "x", "y"}};
    std::ostringstream out;
    for (const auto& r : rows) csv::write_row(out, r);
    const auto t = parse(out.str());
    CHECK(t.header == rows[0]);
    for (std::size_t i = 1; i < rows.size(); ++i) CHECK(t.rows[i - 1] == rows[i]);

    std::ostringstream again;
    csv::write_row(again, t.header);
    for (const auto& r : t.rows) csv::write_row(again, r);
    CHECK(again.str() == out.str());
}
