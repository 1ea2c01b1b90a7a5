#include <doctest.h>

#include <sstream>

#include "glmdisc/csv.hpp"

using glmdisc::csv::Row;

TEST_SUITE("csv") {
  TEST_CASE("plain and quoted fields") {
    std::istringstream in("a,b,c\n\"x,1\",\"he said \"\"hi\"\"\",\r\n");
    Row r;
    REQUIRE(glmdisc::csv::read_record(in, r));
    CHECK(r == Row{"a", "b", "c"});
    REQUIRE(glmdisc::csv::read_record(in, r));
    CHECK(r == Row{"x,1", "he said \"hi\"", ""});
    CHECK_FALSE(glmdisc::csv::read_record(in, r));
  }

  TEST_CASE("embedded newline inside quotes") {
    std::istringstream in("\"line1\nline2\",z\n");
    Row r;
    REQUIRE(glmdisc::csv::read_record(in, r));
    CHECK(r == Row{"line1\nline2", "z"});
  }

  TEST_CASE("last record without trailing newline") {
    std::istringstream in("1,2\n3,4");
    Row r;
    REQUIRE(glmdisc::csv::read_record(in, r));
    REQUIRE(glmdisc::csv::read_record(in, r));
    CHECK(r == Row{"3", "4"});
    CHECK_FALSE(glmdisc::csv::read_record(in, r));
  }

  TEST_CASE("write then read round trip") {
    const Row fields{"plain", "with,comma", "with \"quote\"", "", "multi\nline", " padded "};
    std::ostringstream out;
    glmdisc::csv::write_record(out, fields);
    std::istringstream in(out.str());
    Row back;
    REQUIRE(glmdisc::csv::read_record(in, back));
    CHECK(back == fields);
  }

  TEST_CASE("quote_if_needed leaves plain fields alone") {
    CHECK(glmdisc::csv::quote_if_needed("abc") == "abc");
    CHECK(glmdisc::csv::quote_if_needed("a,b") == "\"a,b\"");
    CHECK(glmdisc::csv::quote_if_needed("a\"b") == "\"a\"\"b\"");
  }
}
