#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <set>

#include "hpo/core/errors.hpp"
#include "hpo/space/search_space.hpp"
#include "hpo/space/space_io.hpp"

using namespace hpo;

namespace {

SearchSpace kernel_space() {
  return SearchSpace({ParamSpec::categorical("kernel", {"lin", "rbf"}),
                      ParamSpec::real("gamma", 0.0, 1.0).when("kernel", {"rbf"})});
}

bool has_message(const std::vector<Violation>& v, const std::string& msg) {
  return std::any_of(v.begin(), v.end(), [&](const Violation& x) { return x.message == msg; });
}

}  // namespace

TEST_CASE("validate reports condition violations") {
  SearchSpace unit({ParamSpec::real("x", 0.0, 1.0)});
  CHECK(is_valid(unit, Config({{"x", 0.5}})));

  auto space = kernel_space();
  auto v = validate(space, Config({{"kernel", std::string("lin")}, {"gamma", 1.0}}));
  CHECK(has_message(v, "gamma inactive"));
  v = validate(space, Config({{"kernel", std::string("rbf")}}));
  CHECK(has_message(v, "gamma required"));
  v = validate(unit, Config({{"x", 2.0}}));
  CHECK(has_message(v, "x out of bounds"));
  v = validate(unit, Config({{"x", 0.5}, {"z", 1.0}}));
  CHECK(has_message(v, "z unknown"));
}

TEST_CASE("space construction rejects malformed specs") {
  CHECK_THROWS_AS(SearchSpace({ParamSpec::real("x", 1.0, 1.0)}), InvalidArgument);
  CHECK_THROWS_AS(SearchSpace({ParamSpec::categorical("c", {"a", "a"})}), InvalidArgument);
  CHECK_THROWS_AS(SearchSpace({ParamSpec::real("x", 0, 1), ParamSpec::real("x", 0, 1)}), InvalidArgument);
  CHECK_THROWS_AS(SearchSpace({ParamSpec::real("x", 0, 1).when("missing", {"a"})}), InvalidArgument);
  CHECK_THROWS_AS(SearchSpace({ParamSpec::real("p", 0, 1), ParamSpec::real("x", 0, 1).when("p", {"a"})}),
                  InvalidArgument);
  auto a = ParamSpec::categorical("a", {"u", "v"});
  a.when("b", {"u"});
  auto b = ParamSpec::categorical("b", {"u", "v"});
  b.when("a", {"u"});
  CHECK_THROWS_AS(SearchSpace({a, b}), InvalidArgument);
}

TEST_CASE("sample_uniform is valid and uniform") {
  SearchSpace unit({ParamSpec::real("x", 0.0, 1.0)});
  Rng rng = make_rng(7);
  double sum = 0;
  const int n = 10000;
  for (int i = 0; i < n; ++i) sum += sample_uniform(unit, rng).number("x");
  CHECK(std::abs(sum / n - 0.5) < 0.02);

  SearchSpace k({ParamSpec::real("k", std::log(1.0), std::log(50.0), Trafo::exp_floor)});
  std::set<double> seen;
  for (int i = 0; i < 5000; ++i) {
    const double t = k.transform(sample_uniform(k, rng)).number("k");
    CHECK(t >= 1.0);
    CHECK(t <= 50.0);
    CHECK(t == std::floor(t));
    seen.insert(t);
  }
  CHECK(seen.size() > 40);

  auto space = kernel_space();
  for (int i = 0; i < 100; ++i) {
    auto c = sample_uniform(space, rng);
    CHECK(c.has("gamma") == (c.level("kernel") == "rbf"));
  }
}

TEST_CASE("sample_uniform fuzz: every draw validates") {
  SearchSpace space({ParamSpec::categorical("a", {"x", "y", "z"}), ParamSpec::integer("n", -3, 7),
                     ParamSpec::real("r", -2, 2, Trafo::pow10).when("a", {"x", "y"}),
                     ParamSpec::categorical("b", {"p", "q"}).when("a", {"y"}),
                     ParamSpec::real("deep", 0, 1).when("b", {"q"})});
  Rng rng = make_rng(11);
  for (int i = 0; i < 10000; ++i) {
    auto c = sample_uniform(space, rng);
    REQUIRE(is_valid(space, c));
    if (c.has("deep")) CHECK(c.level("a") == "y");
    CHECK(c.number("n") == std::round(c.number("n")));
    const auto t = space.transform(c);
    if (c.has("r")) {
      CHECK(t.number("r") >= 0.01 - 1e-12);
      CHECK(t.number("r") <= 100.0 + 1e-9);
    }
  }
}

TEST_CASE("trafos are strictly monotone") {
  for (Trafo t : {Trafo::none, Trafo::exp, Trafo::pow2, Trafo::pow10}) {
    double prev = apply_trafo(t, -3.0);
    for (double x = -2.99; x <= 3.0; x += 0.01) {
      const double cur = apply_trafo(t, x);
      CHECK(cur > prev);
      prev = cur;
    }
  }
  // floor variant is monotone non-decreasing and hits both ends of its range
  CHECK(apply_trafo(Trafo::exp_floor, std::log(50.0)) == 50.0);
  CHECK(apply_trafo(Trafo::exp_floor, std::log(1.0)) == 1.0);
}

TEST_CASE("grid") {
  SearchSpace x({ParamSpec::real("x", 0.0, 1.0)});
  auto g = grid(x, 3);
  REQUIRE(g.size() == 3);
  CHECK(g[0].number("x") == 0.0);
  CHECK(g[1].number("x") == 0.5);
  CHECK(g[2].number("x") == 1.0);

  SearchSpace xy({ParamSpec::real("x", 0.0, 1.0), ParamSpec::categorical("y", {"a", "b"})});
  CHECK(grid(xy, 3).size() == 6);

  SearchSpace k({ParamSpec::real("k", std::log(1.0), std::log(50.0), Trafo::exp_floor)});
  std::vector<double> ks;
  for (const auto& c : grid(k, 3)) ks.push_back(k.transform(c).number("k"));
  // oracle: floor(exp(midpoint)) = floor(sqrt(50))
  CHECK(ks == std::vector<double>{1.0, std::floor(std::sqrt(50.0)), 50.0});

  CHECK_THROWS_AS(grid(x, 1), InvalidArgument);

  SearchSpace narrow({ParamSpec::integer("n", 0, 2)});
  CHECK(grid(narrow, 10).size() == 3);
}

TEST_CASE("grid on hierarchical spaces canonicalizes and stays within the cardinality bound") {
  auto space = kernel_space();
  auto g = grid(space, 4);
  CHECK(g.size() == 5);  // lin once, rbf with 4 gamma values
  for (const auto& c : g) CHECK(is_valid(space, c));

  SearchSpace mixed({ParamSpec::real("a", 0, 1), ParamSpec::integer("b", 1, 3), ParamSpec::categorical("c", {"u", "v", "w"})});
  for (std::size_t res : {2u, 3u, 5u}) {
    auto gg = grid(mixed, res);
    CHECK(gg.size() <= res * res * 3);
    std::set<Config> uniq(gg.begin(), gg.end());
    CHECK(uniq.size() == gg.size());
    for (const auto& c : gg) CHECK(is_valid(mixed, c));
  }
}

TEST_CASE("encode_numeric layout") {
  SearchSpace x({ParamSpec::real("x", 0.0, 10.0)});
  CHECK(encode_numeric(x, Config({{"x", 5.0}})) == std::vector<double>{0.5});

  SearchSpace c({ParamSpec::categorical("c", {"a", "b", "c"})});
  CHECK(encode_numeric(c, Config({{"c", std::string("b")}})) == std::vector<double>{0, 1, 0});

  auto space = kernel_space();
  auto e = encode_numeric(space, Config({{"kernel", std::string("lin")}}));
  REQUIRE(e.size() == encoded_dim(space));
  CHECK(e == std::vector<double>{1, 0, 0.5, 0});
  e = encode_numeric(space, Config({{"kernel", std::string("rbf")}, {"gamma", 0.25}}));
  CHECK(e == std::vector<double>{0, 1, 0.25, 1});

  CHECK_THROWS_AS(encode_numeric(space, Config({{"kernel", std::string("rbf")}})), InvalidArgument);
}

TEST_CASE("encode_numeric is injective on a condition-free space") {
  SearchSpace s({ParamSpec::real("a", -1, 1), ParamSpec::integer("b", 0, 4), ParamSpec::categorical("c", {"u", "v"})});
  auto g = grid(s, 5);
  std::set<std::vector<double>> codes;
  for (const auto& c : g) codes.insert(encode_numeric(s, c));
  CHECK(codes.size() == g.size());
}

TEST_CASE("repair and canonicalize") {
  auto space = kernel_space();
  Rng rng = make_rng(3);
  auto c = canonicalize(space, Config({{"kernel", std::string("lin")}, {"gamma", 0.3}}));
  CHECK_FALSE(c.has("gamma"));
  auto r = repair(space, Config({{"kernel", std::string("rbf")}}), rng);
  CHECK(is_valid(space, r));
}

TEST_CASE("space JSON round-trip and schema errors") {
  SearchSpace s({ParamSpec::categorical("kernel", {"lin", "rbf"}),
                 ParamSpec::real("gamma", -4.25, 0.1, Trafo::pow10).when("kernel", {"rbf"}),
                 ParamSpec::integer("n", 1, 7, Trafo::pow2)});
  auto doc = space_to_json(s);
  auto back = space_from_json(nlohmann::json::parse(doc.dump()));
  CHECK(back == s);

  auto bad = nlohmann::json::parse(R"({"params":[{"name":"x","type":"real","lower":0}]})");
  try {
    space_from_json(bad);
    FAIL("expected ConfigError");
  } catch (const ConfigError& e) {
    CHECK(e.field() == "/params/0/upper");
  }
  bad = nlohmann::json::parse(R"({"params":[{"name":"x","type":"real","lower":0,"upper":1,"trafo":"cube"}]})");
  CHECK_THROWS_AS(space_from_json(bad), ConfigError);
}

TEST_CASE("compatibility check") {
  SearchSpace a({ParamSpec::real("x", 0, 1)});
  SearchSpace b({ParamSpec::real("x", 0, 2)});
  CHECK_NOTHROW(check_compatible(a, a));
  CHECK_THROWS_AS(check_compatible(a, b), IncompatibleSpace);
}

TEST_CASE("prefixed spaces and slicing") {
  auto p = kernel_space().prefixed("svm.");
  CHECK(p.find("svm.gamma")->condition->parent == "svm.kernel");
  Config cfg({{"svm.kernel", std::string("rbf")}, {"svm.gamma", 0.5}, {"other", 1.0}});
  auto s = p.slice(cfg, "svm.");
  CHECK(s.size() == 2);
  CHECK(s.number("gamma") == 0.5);
}
