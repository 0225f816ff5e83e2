#include <doctest.h>

#include <limits>
#include <sstream>

#include "jjspd/error.hpp"
#include "jjspd/table_io.hpp"

using namespace jjspd;

TEST_SUITE("table_io") {

TEST_CASE("numbers round-trip through text exactly") {
  for (double v : {0.1, 1.0 / 3.0, 6.02214076e23, -2.5e-300, 11.99e-6}) {
    CHECK(std::stod(format_number(v)) == v);
  }
}

TEST_CASE("metadata, header and rows survive write then read") {
  ColumnTable t({"I_b_A", "rate_Hz"});
  t.metadata().set("tool", "jjspd");
  t.metadata().set("seed", std::uint64_t{42});
  t.metadata().set("ramp_rate_A_per_s", 1e-6);
  const double r1[] = {10.9e-6, 3.0217453428769795};
  const double r2[] = {11.0e-6, 1.0 / 7.0};
  t.add_row(r1);
  t.add_row(r2);

  std::stringstream buf;
  t.write(buf);
  const auto back = ColumnTable::read(buf);
  CHECK(back.columns() == t.columns());
  CHECK(back.rows() == 2);
  CHECK(back.metadata().get("tool") == "jjspd");
  CHECK(back.metadata().get_number("seed") == 42.0);
  CHECK(back.metadata().get_number("ramp_rate_A_per_s") == 1e-6);
  CHECK(back.numeric_column("rate_Hz")[0] == 3.0217453428769795);
  CHECK(back.numeric_column("rate_Hz")[1] == 1.0 / 7.0);
}

TEST_CASE("merge keeps existing keys") {
  Metadata a;
  a.set("seed", "1");
  Metadata b;
  b.set("seed", "2");
  b.set("label", "dark");
  a.merge(b);
  CHECK(a.get("seed") == "1");
  CHECK(a.get("label") == "dark");
}

TEST_CASE("malformed input is a data error") {
  std::stringstream ragged("# a: 1\nx,y\n1,2\n3\n");
  CHECK_THROWS_AS(ColumnTable::read(ragged), DataError);
  std::stringstream headerless("# only: metadata\n");
  CHECK_THROWS_AS(ColumnTable::read(headerless), DataError);
  std::stringstream text("x\nabc\n");
  const auto t = ColumnTable::read(text);
  CHECK_THROWS_AS(t.numeric_column("x"), DataError);
  CHECK_THROWS_AS(t.column_index("y"), DataError);
}

}
