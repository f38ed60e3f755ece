#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

namespace fs = std::filesystem;

namespace {

struct Run {
  int status = -1;
  std::string out;
  std::string err;
};

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

fs::path scratch() {
  static const fs::path dir = [] {
    const fs::path d = fs::temp_directory_path() / ("xyent_cli_" + std::to_string(::getpid()));
    fs::create_directories(d);
    return d;
  }();
  return dir;
}

Run run(const std::string& args) {
  const fs::path out = scratch() / "stdout.txt", err = scratch() / "stderr.txt";
  const std::string cmd = std::string("cd '") + scratch().string() + "' && '" XYENT_CLI "' " +
                          args + " >'" + out.string() + "' 2>'" + err.string() + "'";
  const int raw = std::system(cmd.c_str());
  Run r;
  r.status = WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
  r.out = slurp(out);
  r.err = slurp(err);
  return r;
}

std::string data_section(const std::string& text) {
  std::istringstream in(text);
  std::string line, out;
  while (std::getline(in, line))
    if (line.rfind("# generated", 0) != 0) out += line + "\n";
  return out;
}

bool contains(const std::string& hay, const std::string& needle) {
  return hay.find(needle) != std::string::npos;
}

}  // namespace

TEST_CASE("invocation errors exit with status 2") {
  CHECK(run("").status == 2);
  CHECK(run("sweep --no-such-flag 1").status == 2);
  CHECK(run("frobnicate").status == 2);
  {
    std::ofstream(scratch() / "bad.cfg") << "colour = red\n";
    const auto r = run("sweep --config bad.cfg");
    CHECK(r.status == 2);
    CHECK(contains(r.err, "colour"));
  }
  CHECK(run("sweep --format xml").status == 2);
  CHECK(run("--version").status == 0);
}

TEST_CASE("validation failures exit with status 1 and leave no file") {
  const auto r = run("sweep --sizes 10 --out even.csv");
  CHECK(r.status == 1);
  CHECK(contains(r.err, "EvenN"));
  CHECK_FALSE(fs::exists(scratch() / "even.csv"));
}

TEST_CASE("single point at lambda = 0") {
  const auto r = run("sweep --sizes 11 --lambda-min 0 --grid-points 1 --r-max 3 --out -");
  REQUIRE(r.status == 0);
  CHECK(contains(r.out, "# xyent "));
  CHECK(contains(r.out, "# config sizes = 11"));
  std::istringstream in(r.out);
  std::string line, header, row;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    if (header.empty()) header = line;
    else row = line;
  }
  CHECK(header.rfind("N,gamma,lambda,mz,", 0) == 0);
  CHECK(contains(header, "C_1,C_2,C_3,dC_1,d2C_2"));
  CHECK(row.rfind("11,1,0,1,", 0) == 0);
  // C columns sit after mz and three groups of three correlators.
  std::vector<std::string> cells;
  std::istringstream cs(row);
  for (std::string c; std::getline(cs, c, ',');) cells.push_back(c);
  REQUIRE(cells.size() == 18);
  for (int i = 13; i <= 15; ++i) CHECK(cells[static_cast<std::size_t>(i)] == "0");
}

TEST_CASE("re-runs are byte-identical apart from the timestamp") {
  const std::string args = "sweep --sizes 11,inf --gamma 0.5 --grid-points 7 --threads 2";
  const auto a = run(args + " --out -");
  const auto b = run(args + " --out -");
  REQUIRE(a.status == 0);
  REQUIRE(b.status == 0);
  CHECK(data_section(a.out) == data_section(b.out));
}

TEST_CASE("json output") {
  const auto r = run("sweep --sizes 9 --grid-points 3 --format json --out -");
  REQUIRE(r.status == 0);
  const auto doc = nlohmann::json::parse(r.out);
  CHECK(doc["rows"].size() == 3);
  CHECK(doc["rows"][0][0] == 9);
  CHECK(doc["meta"]["command"] == "sweep");
}

TEST_CASE("oracle check passes and catches a flipped sign") {
  const auto ok = run("oracle-check");
  CHECK(ok.status == 0);
  CHECK(contains(ok.err, "PASS"));
  const auto bad = run("oracle-check --sabotage flip-xx");
  CHECK(bad.status == 1);
  CHECK(contains(bad.err, "FAIL gxx"));
  const auto big = run("oracle-check --sizes 15");
  CHECK(big.status == 1);
  CHECK(contains(big.err, "SizeTooLarge"));
}

TEST_CASE("fit on one size states why collapse is missing") {
  REQUIRE(run("sweep --sizes 41 --grid-points 81 --lambda-min 0.8 --lambda-max 1.2 --out one.csv")
              .status == 0);
  const auto r = run("fit one.csv --out one.json");
  REQUIRE(r.status == 0);
  const auto doc = nlohmann::json::parse(slurp(scratch() / "one.json"));
  const auto& rep = doc["report"];
  CHECK(rep.contains("collapse_note"));
  CHECK_FALSE(rep.contains("collapse_at_nu1"));
  CHECK_FALSE(rep.contains("nu_fit"));
  CHECK(rep["lambda_m"].size() == 1);
  CHECK(double(rep["lambda_m"][0]["lambda_m"]) > 1.0);

  const auto missing = run("fit one.csv --sizes 101 --out missing.json");
  CHECK(missing.status == 1);
  CHECK(contains(missing.err, "MissingSeries"));
}

TEST_CASE("range reports two-site range for the Ising chain") {
  const auto r = run("range --gamma 1 --out -");
  REQUIRE(r.status == 0);
  CHECK(contains(r.out, "\ninf,1,2,"));
}
