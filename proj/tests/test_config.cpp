#include <sstream>

#include <gtest/gtest.h>

#include "geogap/config.hpp"

using namespace geogap;

namespace {

Config parse(const std::string& text) {
    std::istringstream in(text);
    return Config::parse(in, "test.toml");
}

} // namespace

TEST(Config, KeysSectionsAndComments) {
    auto c = parse("# top\n"
                   "data = \"corpus # not a comment.csv\"\n"
                   "k = 5   # trailing\n"
                   "beta=0.25\n"
                   "\n"
                   "[aliases]\n"
                   "O = Operational\n"
                   "\"Fault Tolerance\" = FT\n");
    EXPECT_EQ(*c.get("data"), "corpus # not a comment.csv");
    EXPECT_EQ(*c.get_int("k"), 5);
    EXPECT_DOUBLE_EQ(*c.get_double("beta"), 0.25);
    EXPECT_FALSE(c.get("O").has_value());
    EXPECT_EQ(*c.get("O", "aliases"), "Operational");
    EXPECT_EQ(c.section("aliases").size(), 2u);
    EXPECT_EQ(c.section("aliases").at("Fault Tolerance"), "FT");
    EXPECT_TRUE(c.section("missing").empty());
    EXPECT_FALSE(c.get_double("absent").has_value());
}

TEST(Config, MalformedInputIsAUsageError) {
    auto expect_usage = [](const std::string& text, const std::string& fragment) {
        try {
            parse(text);
            FAIL() << text;
        } catch (const Error& e) {
            EXPECT_EQ(e.exit_code(), 1);
            EXPECT_NE(std::string(e.what()).find(fragment), std::string::npos) << e.what();
        }
    };
    expect_usage("k = 1\nk = 2\n", "test.toml:2");
    expect_usage("just words\n", "key = value");
    expect_usage("[broken\n", "section");
    expect_usage(" = 3\n", "empty key");
}

TEST(Config, StrictNumbers) {
    auto c = parse("k = 5x\nbeta = 0.5.1\n");
    EXPECT_THROW(c.get_int("k"), Error);
    EXPECT_THROW(c.get_double("beta"), Error);
    EXPECT_THROW(Config::load("/nonexistent/geogap.toml"), Error);
}
