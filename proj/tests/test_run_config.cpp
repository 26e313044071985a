#include <cstdlib>
#include <fstream>

#include "doctest.h"
#include "skipdisk/common.hpp"
#include "skipdisk/run_config.hpp"
#include "test_util.hpp"

using namespace skipdisk;
using test_util::TempDir;

namespace {

void write_text(const std::filesystem::path& p, const std::string& text) {
  std::ofstream f(p);
  f << text;
}

}  // namespace

TEST_SUITE("run_config") {

TEST_CASE("parses assignments, trims whitespace, skips comments") {
  RunConfig c = parse_run_config(
      "# header comment\n"
      "k = 10\n"
      "  dataset.path =  /data/base.fvecs  \n"
      "\n"
      "variant=est   # trailing comment\n",
      ".");
  CHECK(c.get_u32("k", 0) == 10);
  CHECK(c.get_string("dataset.path", "") == "/data/base.fvecs");
  CHECK(c.get_string("variant", "") == "est");
  CHECK_FALSE(c.has("header"));
}

TEST_CASE("later assignments win") {
  RunConfig c = parse_run_config("k=1\nk=2\nk=3\n", ".");
  CHECK(c.get_u32("k", 0) == 3);
}

TEST_CASE("typed getters parse and reject") {
  RunConfig c = parse_run_config(
      "i=-5\nu=12\nf=0.25\nb1=true\nb2=0\nbad=ten\n", ".");
  CHECK(c.get_i64("i", 0) == -5);
  CHECK(c.get_u64("u", 0) == 12);
  CHECK(c.get_u32("u", 0) == 12);
  CHECK(c.get_double("f", 0.0) == doctest::Approx(0.25));
  CHECK(c.get_float("f", 0.0f) == doctest::Approx(0.25f));
  CHECK(c.get_bool("b1", false));
  CHECK_FALSE(c.get_bool("b2", true));
  CHECK(c.get_u32("missing", 42) == 42);
  CHECK_THROWS_AS(c.get_u32("bad", 0), ConfigError);
  CHECK_THROWS_AS(c.get_bool("bad", false), ConfigError);
  CHECK_THROWS_AS(c.get_u64("i", 0), ConfigError);
}

TEST_CASE("malformed lines raise ConfigError") {
  CHECK_THROWS_AS(parse_run_config("just some words\n", "."), ConfigError);
  CHECK_THROWS_AS(parse_run_config("=value\n", "."), ConfigError);
  CHECK_THROWS_AS(parse_run_config("UPPER=1\n", "."), ConfigError);
  CHECK_THROWS_AS(parse_run_config("sp ace=1\n", "."), ConfigError);
}

TEST_CASE("includes resolve relative to the including file") {
  TempDir dir("cfg");
  std::filesystem::create_directory(dir.file("sub"));
  write_text(dir.file("sub/inner.cfg"), "a=1\nb=inner\n");
  write_text(dir.file("outer.cfg"),
             "b=outer_before\ninclude sub/inner.cfg\nc=3\n");
  RunConfig c = load_run_config(dir.file("outer.cfg").string());
  CHECK(c.get_u32("a", 0) == 1);
  CHECK(c.get_string("b", "") == "inner");
  CHECK(c.get_u32("c", 0) == 3);
}

TEST_CASE("include cycles hit the depth limit") {
  TempDir dir("cycle");
  write_text(dir.file("a.cfg"), "include b.cfg\n");
  write_text(dir.file("b.cfg"), "include a.cfg\n");
  CHECK_THROWS_AS(load_run_config(dir.file("a.cfg").string()), ConfigError);
}

TEST_CASE("missing files raise IoError") {
  CHECK_THROWS_AS(load_run_config("/nonexistent/skipdisk.cfg"), IoError);
  TempDir dir("inc");
  write_text(dir.file("a.cfg"), "include gone.cfg\n");
  CHECK_THROWS_AS(load_run_config(dir.file("a.cfg").string()), IoError);
}

TEST_CASE("environment overrides replace file values") {
  RunConfig c = parse_run_config("d_lb=256\nk=10\n", ".");
  ::setenv("SKIPDISK_D_LB", "128", 1);
  ::setenv("SKIPDISK_EXTRA", "yes", 1);
  apply_env_overrides(&c);
  ::unsetenv("SKIPDISK_D_LB");
  ::unsetenv("SKIPDISK_EXTRA");
  CHECK(c.get_u32("d_lb", 0) == 128);
  CHECK(c.get_u32("k", 0) == 10);
  CHECK(c.get_string("extra", "") == "yes");
}

TEST_CASE("entries come back sorted") {
  RunConfig c = parse_run_config("z=1\na=2\nm=3\n", ".");
  std::vector<std::string> keys;
  for (const auto& [k, v] : c.entries()) keys.push_back(k);
  CHECK(keys == std::vector<std::string>{"a", "m", "z"});
}

}  // TEST_SUITE
