#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "cli.hpp"

#include <json.hpp>

#include <filesystem>
#include <fstream>
#include <sstream>

using nlohmann::json;

namespace {

struct Run {
  int code;
  std::string out;
  std::string err;
};

Run cli(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = ruinkit::cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

std::string first_line(const std::string& s) { return s.substr(0, s.find('\n')); }
std::string second_line(const std::string& s) {
  const auto a = s.find('\n');
  return s.substr(a + 1, s.find('\n', a + 1) - a - 1);
}

std::filesystem::path temp_file(const std::string& name, const std::string& body) {
  const auto p = std::filesystem::temp_directory_path() / name;
  std::ofstream(p) << body;
  return p;
}

}  // namespace

TEST_CASE("ruin exposure JSON carries the closed form") {
  const auto r = cli({"ruin", "--p", "1e-4", "--n", "10000", "--replicates", "1000"});
  REQUIRE(r.code == 0);
  CHECK(r.out.find("0.6321") != std::string::npos);
  const auto j = json::parse(r.out);
  CHECK(j["closed_form"].get<double>() == doctest::Approx(0.6321205588).epsilon(1e-3));
  for (const char* key : {"ruin_probability", "ci95", "replicates", "seed", "time_to_ruin", "config"}) {
    CHECK(j.contains(key));
  }
  CHECK(j["config"]["p"] == 1e-4);
}

TEST_CASE("quadrant IV") {
  const auto r = cli({"quadrant", "--tail", "fat", "--scope", "systemic"});
  REQUIRE(r.code == 0);
  const auto j = json::parse(r.out);
  CHECK(j["quadrant"] == "IV");
  CHECK(j["pp_applies"] == true);
  const auto thin = json::parse(cli({"quadrant", "--tail", "thin", "--scope", "systemic"}).out);
  CHECK(thin["quadrant"] == "II");
  CHECK(thin["pp_applies"] == false);
}

TEST_CASE("usage errors exit 2 with a one-line diagnostic naming the culprit") {
  auto r = cli({"ruin", "--frobnicate", "3"});
  CHECK(r.code == 2);
  CHECK(r.err.find("--frobnicate") != std::string::npos);
  CHECK(std::count(r.err.begin(), r.err.end(), '\n') == 1);
  r = cli({"quadrant", "--tail", "medium", "--scope", "local"});
  CHECK(r.code == 2);
  CHECK(r.err.find("tail") != std::string::npos);
  r = cli({"ruin", "--p", "abc", "--n", "3"});
  CHECK(r.code == 2);
  CHECK(r.err.find("--p") != std::string::npos);
  r = cli({"sweep", "--format", "xml"});
  CHECK(r.code == 2);
  CHECK(r.err.find("format") != std::string::npos);
  r = cli({});
  CHECK(r.code == 2);
  r = cli({"quadrant", "--scope", "local"});
  CHECK(r.code == 2);
  CHECK(r.err.find("tail") != std::string::npos);
}

TEST_CASE("runtime errors exit 1 with the module's text") {
  const auto r = cli({"fragility", "--harm", "power:3", "--dist", "student_t:alpha=2"});
  CHECK(r.code == 1);
  CHECK(r.err.find("diverges") != std::string::npos);
  const auto path = temp_file("ruinkit_short_sample.txt", "1\n2\n3\n");
  const auto t = cli({"tails", "--input", path.string()});
  CHECK(t.code == 1);
  std::filesystem::remove(path);
}

TEST_CASE("config files: strict keys, flags take precedence") {
  const auto good = temp_file("ruinkit_cfg_good.json", R"({"subcommand":"sweep","barrier":12,"sigmas":[1,2],"seed":5})");
  auto r = cli({"sweep", "--config", good.string(), "--barrier", "15", "--format", "csv"});
  REQUIRE(r.code == 0);
  const auto echo = json::parse(first_line(r.out).substr(std::string("# ruinkit config: ").size()));
  CHECK(echo["barrier"] == 15.0);
  CHECK(echo["sigmas"] == json::array({1.0, 2.0}));
  CHECK(echo["seed"] == 5);

  const auto bad = temp_file("ruinkit_cfg_bad.json", R"({"barrier":12,"sigmaz":[1]})");
  r = cli({"sweep", "--config", bad.string()});
  CHECK(r.code == 2);
  CHECK(r.err.find("sigmaz") != std::string::npos);

  const auto other = temp_file("ruinkit_cfg_other.json", R"({"subcommand":"ruin"})");
  CHECK(cli({"sweep", "--config", other.string()}).code == 2);
  const auto typed = temp_file("ruinkit_cfg_typed.json", R"({"barrier":"ten"})");
  r = cli({"sweep", "--config", typed.string()});
  CHECK(r.code == 2);
  CHECK(r.err.find("barrier") != std::string::npos);
  for (const auto& p : {good, bad, other, typed}) std::filesystem::remove(p);
}

TEST_CASE("every CSV starts with the config echo and the documented header") {
  const std::vector<std::pair<std::vector<std::string>, std::string>> cases = {
      {{"sweep"}, "family,mu,sigma,ir,k,per_period_ruin,horizon_ruin"},
      {{"cascade", "--replicates", "200"}, "size"},
      {{"tails", "--dist", "pareto:alpha=2", "--n", "20000", "--replicates", "200000", "--table", "convolution"},
       "x,ratio,stderr"},
      {{"tails", "--dist", "pareto:alpha=2", "--n", "20000", "--replicates", "200000", "--table", "sum_max"},
       "n,x,ratio_a,ratio_b"},
      {{"tails", "--dist", "pareto:alpha=2", "--n", "20000", "--replicates", "200000"}, "n,r_np"},
      {{"ruin", "--p-up", "0.5", "--start", "3", "--upper", "6", "--replicates", "500"},
       "ruin_probability,ci95_lo,ci95_hi,replicates,seed,ruined,closed_form"},
      {{"fragility"}, "metric,value"},
      {{"compare", "--procedure", "luck", "--replicates", "1000"}, "outcome,frequency,mean_gap,count"},
      {{"quadrant", "--tail", "thin", "--scope", "local"}, "quadrant,tail_class,scope,pp_applies"},
  };
  for (const auto& [args, header] : cases) {
    auto full = args;
    full.insert(full.end(), {"--format", "csv"});
    const auto r = cli(full);
    REQUIRE(r.code == 0);
    CHECK(first_line(r.out).rfind("# ruinkit config: {", 0) == 0);
    CHECK(second_line(r.out) == header);
    const auto echo = json::parse(first_line(r.out).substr(std::string("# ruinkit config: ").size()));
    CHECK(echo["subcommand"] == args.front());
  }
}

TEST_CASE("output is byte-identical across repeated runs and thread counts") {
  const std::vector<std::vector<std::string>> cases = {
      {"ruin", "--p", "1e-3", "--n", "500", "--replicates", "3000"},
      {"ruin", "--step", "student_t:alpha=3:loc=0.05", "--start", "5", "--horizon", "200", "--replicates", "2000"},
      {"cascade", "--m", "0.9", "--replicates", "3000"},
      {"cascade", "--model", "network", "--nodes", "100", "--edges", "random", "--edge-probability", "0.05",
       "--replicates", "500", "--blocks", "3"},
      {"compare", "--procedure", "two_test", "--power", "0.5", "--replicates", "4000"},
      {"tails", "--dist", "student_t:alpha=3", "--n", "20000", "--replicates", "100000"},
  };
  for (const auto& args : cases) {
    std::string reference;
    for (const char* threads : {"1", "3", "1", "4"}) {
      auto full = args;
      full.insert(full.end(), {"--threads", threads, "--seed", "77"});
      const auto r = cli(full);
      REQUIRE(r.code == 0);
      if (reference.empty()) reference = r.out;
      CHECK(r.out == reference);
    }
  }
}

TEST_CASE("--output writes the same bytes to a file") {
  const auto path = std::filesystem::temp_directory_path() / "ruinkit_out.json";
  const auto direct = cli({"sweep"});
  REQUIRE(cli({"sweep", "--output", path.string()}).code == 0);
  std::ifstream in(path);
  std::stringstream buf;
  buf << in.rdbuf();
  CHECK(buf.str() == direct.out);
  std::filesystem::remove(path);
}
