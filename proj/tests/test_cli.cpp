#include <doctest.h>
#include <sys/wait.h>
#include <unistd.h>

#include <filesystem>
#include <fstream>
#include <string>

#include <json.hpp>

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

const std::string kCli = CONECERT_CLI_PATH;
const std::string kData = CONECERT_DATA_DIR;

fs::path scratch() {
  static const fs::path dir = [] {
    fs::path d = fs::temp_directory_path() / ("conecert_cli_" + std::to_string(::getpid()));
    fs::create_directories(d);
    return d;
  }();
  return dir;
}

int run(const std::string& args) {
  const std::string cmd = "'" + kCli + "' " + args + " >/dev/null 2>" + (scratch() / "stderr.txt").string();
  const int raw = std::system(cmd.c_str());
  REQUIRE(WIFEXITED(raw));
  return WEXITSTATUS(raw);
}

json load(const fs::path& p) {
  std::ifstream in(p);
  REQUIRE(in);
  return json::parse(in);
}

void save(const fs::path& p, const json& j) { std::ofstream(p) << j.dump(2); }

}  // namespace

TEST_CASE("certify x^2+1 with SOS exits 0 and bounds the minimum") {
  const fs::path out = scratch() / "sq.json";
  CHECK(run("certify --method sos --poly 'x^2+1' -o " + out.string()) == 0);
  const json r = load(out);
  CHECK(r.at("status") == "CertifiedMember");
  CHECK(r.at("lower_bound").get<double>() >= 1.0 - 1e-6);
  CHECK(r.contains("certificate"));
}

TEST_CASE("certify x with SOS exits 2") {
  CHECK(run("certify --method sos --poly x") == 2);
}

TEST_CASE("malformed input exits 1") {
  CHECK(run("certify --method sos --poly 'x^^2'") == 1);
  CHECK(run("certify --method bogus --poly 'x^2'") == 1);
  CHECK(run("certify --problem /nonexistent/file.json") == 1);
  CHECK(run("verify /nonexistent/file.json") == 1);
}

TEST_CASE("a valid SOS certificate replays exactly") {
  const fs::path out = scratch() / "dw.json";
  REQUIRE(run("certify --method sos --poly-file " + kData + "/double_well.poly --decomposition --exact -o " +
              out.string()) == 0);
  CHECK(run("verify --exact " + out.string()) == 0);

  const fs::path cert = scratch() / "sq_cert.json";
  REQUIRE(run("certify --method sos --poly 'x^2+1' -o " + cert.string()) == 0);
  CHECK(run("verify --exact " + cert.string()) == 0);
  CHECK(run("verify " + cert.string()) == 0);
}

TEST_CASE("a tampered witness is refuted") {
  const fs::path cert = scratch() / "tamper.json";
  REQUIRE(run("certify --method sos --poly 'x^2+1' -o " + cert.string()) == 0);
  json j = load(cert);
  j["certificate"]["witness"][0] = j["certificate"]["witness"][0].get<double>() + 0.5;
  save(cert, j);
  CHECK(run("verify " + cert.string()) == 3);

  json k = load(scratch() / "sq_cert.json");
  k["certificate"]["y"][0] = -5.0;
  save(cert, k);
  CHECK(run("verify " + cert.string()) == 3);
}

TEST_CASE("exp-cone certificate with --exact exits 4") {
  const fs::path cert = scratch() / "exp.json";
  REQUIRE(run("certify --problem " + kData + "/expcone_member.json -o " + cert.string()) == 0);
  CHECK(run("verify " + cert.string()) == 0);
  CHECK(run("verify --exact " + cert.string()) == 4);
}

TEST_CASE("reconstruct the LP dual point into the affine family") {
  const fs::path out = scratch() / "lp.json";
  CHECK(run("reconstruct --exact " + kData + "/small_lp_dual.json -o " + out.string()) == 0);
  const json r = load(out);
  CHECK(r.at("affine_witness").at("u")[0] == "-57626369/13715262");
  CHECK(r.at("affine_witness").at("v")[0] == "5229934/6857631");  // = 10459868/13715262
  CHECK(r.at("gamma_exact") == "57626369/10459868");
  CHECK(r.at("x")[0] == "0");
  CHECK(r.at("member") == true);
}

TEST_CASE("reconstruct with gamma below the feasible range is flagged") {
  const fs::path out = scratch() / "low.json";
  CHECK(run("reconstruct " + kData + "/small_lp_dual.json --gamma 5 -o " + out.string()) == 2);
  CHECK(load(out).at("member") == false);
  CHECK(run("reconstruct " + kData + "/small_lp_dual.json --gamma 6 -o " + out.string()) == 0);
}

TEST_CASE("reconstruct a polynomial certificate into a Gram preimage") {
  const fs::path out = scratch() / "gram.json";
  CHECK(run("reconstruct --exact " + (scratch() / "sq_cert.json").string() + " -o " + out.string()) == 0);
  const json w = load(out).at("witness");
  CHECK(w.at("exact") == true);
  CHECK(w.at("exact_member") == true);
}

TEST_CASE("membership problems across cone families") {
  for (const char* f : {"orthant_member.json", "psd_member.json", "powercone_member.json", "relentropy_member.json",
                        "expcone_member.json"}) {
    CAPTURE(f);
    const fs::path out = scratch() / "m.json";
    CHECK(run("certify --problem " + kData + "/" + f + " --trace " + (scratch() / "m.trace").string() + " -o " +
              out.string()) == 0);
    CHECK(run("verify " + out.string()) == 0);
    std::ifstream trace(scratch() / "m.trace");
    std::string line;
    int lines = 0;
    while (std::getline(trace, line)) {
      json entry;
      CHECK_NOTHROW(entry = json::parse(line));
      ++lines;
    }
    CHECK(lines > 0);
  }
}

TEST_CASE("standard form LP reaches the optimum") {
  const fs::path out = scratch() / "sf.json";
  CHECK(run("certify --standard-form " + kData + "/small_lp.json -o " + out.string()) == 0);
  const json r = load(out);
  CHECK(r.at("gap").get<double>() <= 1e-6);
  const json x = r.at("primal").at("x");
  CHECK(x[1].get<double>() == doctest::Approx(1.5).epsilon(1e-4));
  CHECK(x[3].get<double>() == doctest::Approx(4.0).epsilon(1e-4));
}

TEST_CASE("lowerbound reports a negative bound") {
  const fs::path out = scratch() / "lb.json";
  CHECK(run("lowerbound --method sos --poly-file " + kData + "/quartic.poly -o " + out.string()) == 0);
  CHECK(load(out).at("lower_bound").get<double>() == doctest::Approx(-0.25).epsilon(1e-3));
}

TEST_CASE("selfcheck passes and thread cap is honoured") {
  const fs::path out = scratch() / "self.json";
  CHECK(run("selfcheck --samples 10 -o " + out.string()) == 0);
  const json r = load(out);
  CHECK(r.at("passed") == true);
  CHECK(r.at("counterexamples").size() == 2);
  CHECK(run("certify --method sonc --exact --poly-file " + kData + "/motzkin.poly") == 0);
  CHECK(std::system(("CONECERT_THREADS=1 '" + kCli + "' certify --method sonc --poly-file " + kData +
                     "/motzkin.poly --exact >/dev/null 2>&1")
                        .c_str()) == 0);
}

TEST_CASE("no partial output is left behind on failure") {
  const fs::path out = scratch() / "never.json";
  fs::remove(out);
  CHECK(run("certify --method sos --poly 'x^^2' -o " + out.string()) == 1);
  CHECK_FALSE(fs::exists(out));
  for (const auto& e : fs::directory_iterator(scratch()))
    CHECK(e.path().filename().string().find(".tmp.") == std::string::npos);
}
