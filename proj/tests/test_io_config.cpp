#include <doctest.h>

#include <filesystem>
#include <random>

#include "e2m/errors.hpp"
#include "e2m/io.hpp"
#include "e2m/runner.hpp"

using namespace e2m;
using json = nlohmann::json;

namespace {

CensoredDataset sample_dataset(std::uint64_t seed, std::size_t n, double censor_frac) {
  Rng rng(seed);
  const MixtureParams truth({0.5, 0.5}, {2.0, 0.6});
  return run_life_test(sample_labeled(truth, n, rng), scheme_from_censor_frac(n, censor_frac), rng);
}

json fit_files() { return {{"data", "d.csv"}, {"labels", "l.csv"}}; }

}  // namespace

TEST_CASE("dataset CSV round trip") {
  const auto d = sample_dataset(3, 40, 0.4);
  const std::string text = io::dataset_csv(d);
  CHECK(text.rfind("item_id,y_star,status,censored_at_failure,true_label\n", 0) == 0);
  const auto back = io::parse_dataset_csv(text);
  CHECK(back.scheme.n == d.scheme.n);
  CHECK(back.scheme.removals == d.scheme.removals);
  REQUIRE(back.records.size() == d.records.size());
  for (std::size_t j = 0; j < d.records.size(); ++j) {
    CHECK(back.records[j].item_id == d.records[j].item_id);
    CHECK(back.records[j].y_star == d.records[j].y_star);
    CHECK(back.records[j].status == d.records[j].status);
    CHECK(back.records[j].failure_index == d.records[j].failure_index);
    CHECK(back.records[j].true_label == d.records[j].true_label);
  }
  CHECK(io::dataset_csv(back) == text);
}

TEST_CASE("dataset CSV errors") {
  CHECK_THROWS_AS(io::parse_dataset_csv("a,b\n"), IoError);
  CHECK_THROWS_AS(io::parse_dataset_csv("item_id,y_star,status,censored_at_failure,true_label\n"), IoError);
  CHECK_THROWS_AS(io::parse_dataset_csv("item_id,y_star,status,censored_at_failure,true_label\n0,x,observed,,1\n"),
                  IoError);
  CHECK_THROWS_AS(io::parse_dataset_csv("item_id,y_star,status,censored_at_failure,true_label\n0,1.0,lost,,1\n"),
                  IoError);
  CHECK_NOTHROW(io::parse_dataset_csv("item_id,y_star,status,censored_at_failure,true_label\n0,1.0,observed,,\n"));
}

TEST_CASE("soft label CSV round trip") {
  const auto d = sample_dataset(4, 10, 0.0);
  std::vector<ContourFunction> pl;
  for (std::size_t j = 0; j < 10; ++j) pl.emplace_back(std::vector<double>{0.1 * static_cast<double>(j), 1.0, 1.0 / 3});
  const auto text = io::soft_labels_csv(d, pl);
  const auto back = io::parse_soft_labels_csv(text);
  REQUIRE(back.size() == 10);
  for (std::size_t j = 0; j < 10; ++j) {
    for (std::size_t z = 0; z < 3; ++z) CHECK(back[j][z] == pl[j][z]);
  }
  CHECK_THROWS_AS(io::parse_soft_labels_csv("item_id,pl_1\n0,1.5\n"), IoError);
}

TEST_CASE("format_double round-trips") {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(-1e3, 1e3);
  for (int i = 0; i < 1000; ++i) {
    const double v = u(rng);
    CHECK(std::stod(io::format_double(v)) == v);
  }
}

TEST_CASE("file helpers report paths") {
  try {
    io::read_file("/nonexistent/dir/file.csv");
    FAIL("expected IoError");
  } catch (const IoError& e) {
    CHECK(std::string(e.what()).find("/nonexistent/dir/file.csv") != std::string::npos);
  }
  CHECK_THROWS_AS(io::write_file("/nonexistent/dir/out.csv", "x"), IoError);
}

TEST_CASE("parse_config defaults and overrides") {
  SUBCASE("minimal fit config") {
    const auto cfg = parse_config(fit_files(), json(), Command::Fit);
    CHECK(cfg.experiment.e2m.tol == 1e-8);
    CHECK(cfg.experiment.e2m.max_iters == 1000);
    CHECK(cfg.experiment.corruption.sd == 0.2);
    CHECK(cfg.init == InitRule::QuantileSpread);
    CHECK(cfg.resolved["tol"] == 1e-8);
  }

  SUBCASE("censor fraction expands to the default scheme") {
    auto cfg = parse_config(json::object(), {{"censor_frac", 0.4}, {"n", 500}}, Command::Generate);
    const auto s = cfg.experiment.resolved_scheme();
    CHECK(s.failures() == 300);
    CHECK(s.removals.back() == 200);
    for (std::size_t j = 0; j + 1 < s.removals.size(); ++j) CHECK(s.removals[j] == 0);
  }

  SUBCASE("overrides win over the file") {
    const auto cfg = parse_config({{"seed", 5}, {"rho", 0.3}}, {{"seed", 9}}, Command::Generate);
    CHECK(cfg.seed == 9);
    CHECK(cfg.experiment.corruption.rho == 0.3);
  }

  SUBCASE("explicit J") {
    const auto cfg = parse_config({{"n", 10}, {"J", 10}}, json(), Command::Generate);
    CHECK(cfg.experiment.resolved_scheme().failures() == 10);
    CHECK(cfg.experiment.resolved_scheme().removals.back() == 0);
  }

  SUBCASE("command from the file") {
    CHECK(parse_config({{"command", "generate"}}, json()).command == Command::Generate);
    CHECK_THROWS_AS(parse_config(json::object(), json()), ConfigError);
  }

  SUBCASE("presets") {
    const auto f1 = parse_config({{"preset", "figure1"}}, json(), Command::Sweep);
    CHECK(f1.sweep_variable == SweepVariable::Rho);
    CHECK(f1.grid == std::vector<double>{0.0, 0.1, 0.2, 0.3, 0.4, 0.5});
    const auto f2 = parse_config({{"preset", "figure2"}}, json(), Command::Sweep);
    CHECK(f2.sweep_variable == SweepVariable::SampleSize);
    CHECK(f2.grid == std::vector<double>{100, 200, 300, 400, 500, 800});
    CHECK(f2.experiment.corruption.rho == 0.1);
    CHECK(f2.sweep_spec().at(5).n == 800);
  }
}

TEST_CASE("parse_config errors") {
  SUBCASE("unknown keys are listed") {
    try {
      parse_config({{"bogus", 1}, {"n", 5}}, {{"also_bogus", 2}}, Command::Generate);
      FAIL("expected ConfigError");
    } catch (const ConfigError& e) {
      const std::string msg = e.what();
      CHECK(msg.find("bogus") != std::string::npos);
      CHECK(msg.find("also_bogus") != std::string::npos);
    }
  }

  SUBCASE("R summing wrongly is a scheme error") {
    try {
      parse_config({{"n", 10}, {"R", {1, 1, 1}}}, json(), Command::Generate);
      FAIL("expected SchemeInvalid");
    } catch (const SchemeInvalid& e) {
      CHECK(std::string(e.what()).rfind("R:", 0) == 0);
    }
  }

  SUBCASE("messages name the field") {
    auto field_of = [](const json& j, Command c) {
      try {
        parse_config(j, json(), c);
      } catch (const Error& e) {
        return std::string(e.what()).substr(0, std::string(e.what()).find(':'));
      }
      return std::string("<none>");
    };
    CHECK(field_of({{"rho", 1.5}}, Command::Generate) == "rho");
    CHECK(field_of({{"tol", -1.0}}, Command::Generate) == "tol");
    CHECK(field_of({{"n", "many"}}, Command::Generate) == "n");
    CHECK(field_of({{"lambdas", {0.5, 0.6}}, {"xis", {1.0, 2.0}}}, Command::Generate) == "lambdas/xis");
    CHECK(field_of({{"methods", {"psychic"}}}, Command::Generate) == "methods");
    CHECK(field_of(json::object(), Command::Fit) == "data");
    CHECK(field_of({{"sweep", {{"variable", "n"}, {"grid", json::array()}}}}, Command::Sweep) == "sweep");
    CHECK(field_of({{"init", "magic"}}, Command::Generate) == "init");
  }
}
