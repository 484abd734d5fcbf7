#include <cmath>
#include <limits>

#include <gtest/gtest.h>

#include "jnb/table.hpp"

using namespace jnb;

namespace {

Table sample() {
  Table t{"demo", {"name", "x", "y"}, {}};
  t.add_row({std::string("plain"), 0.1, -2.5e-300});
  t.add_row({std::string("a,b"), 1.0 / 3.0, std::numeric_limits<double>::infinity()});
  t.add_row({std::string("say \"hi\""), -0.0, -std::numeric_limits<double>::infinity()});
  t.add_row({std::string("1.5"), 5e-324, 1e300});
  t.add_row({std::string(" padded "), 123456789.0, 0.0});
  t.add_row({std::string("line\nbreak"), 2.0, 3.0});
  t.add_row({std::string(""), 4.0, 5.0});
  return t;
}

}  // namespace

TEST(Table, RowWidthIsChecked) {
  Table t{"k", {"a", "b"}, {}};
  EXPECT_THROW(t.add_row({1.0}), InternalError);
}

TEST(Csv, RoundTripIsByteIdentical) {
  const Table t = sample();
  const std::string text = to_csv(t);
  const Table back = table_from_csv(text, "demo");
  EXPECT_EQ(back, t);
  EXPECT_EQ(to_csv(back), text);
}

TEST(Csv, NumericLookingStringsAreQuoted) {
  Table t{"k", {"s"}, {}};
  t.add_row({std::string("1.5")});
  t.add_row({std::string("inf")});
  const std::string text = to_csv(t);
  EXPECT_NE(text.find("\"1.5\""), std::string::npos);
  EXPECT_NE(text.find("\"inf\""), std::string::npos);
  EXPECT_EQ(table_from_csv(text, "k"), t);
}

TEST(Csv, NanRoundTrips) {
  Table t{"k", {"v"}, {}};
  t.add_row({std::nan("")});
  const Table back = table_from_csv(to_csv(t), "k");
  ASSERT_EQ(back.rows.size(), 1u);
  EXPECT_TRUE(std::isnan(std::get<double>(back.rows[0][0])));
}

TEST(Csv, RejectsRaggedRows) {
  EXPECT_THROW(table_from_csv("a,b\n1\n", "k"), std::exception);
}

TEST(Json, RoundTripIsByteIdentical) {
  const Table t = sample();
  const std::string text = to_json_text(t);
  const Table back = table_from_json(text);
  EXPECT_EQ(back, t);
  EXPECT_EQ(to_json_text(back), text);
  EXPECT_NE(text.find("\"schema\": \"jn-bellman/1\""), std::string::npos);
  EXPECT_NE(text.find("\"inf\""), std::string::npos);
}

TEST(Pretty, OneLinePerRowPlusHeader) {
  const std::string s = to_pretty(sample());
  EXPECT_EQ(std::count(s.begin(), s.end(), '\n'), 1 + 7 + 1);  // the embedded newline counts once
}

TEST(Sweep, ListsAndRanges) {
  EXPECT_EQ(parse_values("0.1,0.2"), (std::vector<double>{0.1, 0.2}));
  const auto r = parse_values("0:0.99:0.01");
  ASSERT_EQ(r.size(), 100u);
  EXPECT_EQ(r.front(), 0.0);
  EXPECT_EQ(r.back(), 0.99);
  EXPECT_DOUBLE_EQ(r[50], 0.5);
  EXPECT_EQ(parse_values("0:1:0.3"), (std::vector<double>{0.0, 0.3, 0.6, 1.0}));
  EXPECT_EQ(parse_values("0:1:0.4"), (std::vector<double>{0.0, 0.4, 0.8, 1.0}));
  EXPECT_EQ(parse_values("0:1:0.45"), (std::vector<double>{0.0, 0.45, 1.0}));
  EXPECT_EQ(parse_values("2:2:1"), (std::vector<double>{2.0}));
  EXPECT_EQ(parse_values(" 1 , 2:3:1 "), (std::vector<double>{1.0, 2.0, 3.0}));
}

TEST(Sweep, RelativeTerms) {
  const auto v = parse_sweep("0:4e:0.25e", true);
  ASSERT_EQ(v.size(), 17u);
  EXPECT_TRUE(v.back().relative);
  EXPECT_EQ(v.back().resolve(0.3), 4.0 * 0.3);
  EXPECT_EQ(parse_sweep("e", true).front(), (SweepValue{1.0, true}));
  EXPECT_THROW(parse_sweep("2e", false), DomainError);
  EXPECT_TRUE(v.front().relative);
  EXPECT_THROW(parse_sweep("0:4e:0.25", true), DomainError);
  EXPECT_THROW(parse_sweep("1:4e:0.25e", true), DomainError);
}

TEST(Sweep, Errors) {
  for (const char* bad : {"", "abc", "1:2", "1:2:3:4", "2:1:0.1", "0:1:0", "0:1:-1", "1,,2", "nan", "inf", "0:1:1e-9"}) {
    EXPECT_THROW(parse_values(bad), DomainError) << bad;
  }
}
