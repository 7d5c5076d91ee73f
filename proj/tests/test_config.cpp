#include <doctest.h>

#include "vrrt/config.hpp"

using namespace vrrt;

TEST_CASE("scalars, strings and arrays parse") {
  const Config cfg = Config::parse(
      "# comment\n"
      "alpha = 1.5\n"
      "name = env1.toml\n"
      "bounds = [0, 0, 6, 4]\n"
      "obstacles = [[1.0, 2.0, 0.5], [3, 1, 0.25]]\n"
      "empty = []\n"
      "quoted = \"a b\"\n");
  CHECK(cfg.number("alpha") == 1.5);
  CHECK(cfg.get("name").as_string() == "env1.toml");
  CHECK(cfg.number_list("bounds") == std::vector<double>{0, 0, 6, 4});
  const auto& obs = cfg.get("obstacles");
  REQUIRE(obs.items.size() == 2);
  CHECK(obs.items[1].as_number_list() == std::vector<double>{3, 1, 0.25});
  CHECK(cfg.get("empty").items.empty());
  CHECK(cfg.get("quoted").as_string() == "a b");
}

TEST_CASE("repeated keys accumulate in order") {
  const Config cfg = Config::parse("run = [a, 1]\nrun = [b, 2]\n");
  const auto all = cfg.get_all("run");
  REQUIRE(all.size() == 2);
  CHECK(all[0]->items[0].as_string() == "a");
  CHECK(all[1]->items[1].as_number() == 2);
  CHECK(cfg.get("run").items[0].as_string() == "b");  // last wins for get()
}

TEST_CASE("multi-line arrays and inline comments") {
  const Config cfg = Config::parse(
      "obstacles = [\n"
      "  [1, 2, 0.5],  # first\n"
      "  [3, 4, 0.25]\n"
      "]\n");
  CHECK(cfg.get("obstacles").items.size() == 2);
}

TEST_CASE("malformed input reports the line") {
  CHECK_THROWS_AS(Config::parse("key 1\n"), ConfigError);
  CHECK_THROWS_AS(Config::parse("key =\n"), ConfigError);
  CHECK_THROWS_AS(Config::parse("arr = [1, 2\n"), ConfigError);
  CHECK_THROWS_WITH_AS(Config::parse("a = 1\nb = [1,]]\n"), doctest::Contains("line 2"),
                       ConfigError);
  CHECK_THROWS_AS(Config::parse("a = 1").number("missing"), ConfigError);
}

TEST_CASE("defaults and typed getters") {
  const Config cfg = Config::parse("x = 2\n");
  CHECK(cfg.number_or("x", 7) == 2);
  CHECK(cfg.number_or("y", 7) == 7);
  CHECK(cfg.string_or("z", "d") == "d");
  CHECK_THROWS_AS(cfg.get("x").as_string(), ConfigError);
}
