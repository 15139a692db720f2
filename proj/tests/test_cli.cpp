#include <doctest.h>

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <sys/wait.h>
#include <unistd.h>

#include "zkq/io.hpp"

using namespace zkq;
namespace fs = std::filesystem;

namespace {

struct Run {
  int status;
  std::string out;
};

class Sandbox {
 public:
  Sandbox() : dir_(fs::temp_directory_path() / ("zkq_cli_test_" + std::to_string(::getpid()))) {
    fs::create_directories(dir_);
  }
  ~Sandbox() { fs::remove_all(dir_); }

  fs::path path(const std::string& name) const { return dir_ / name; }

  std::string write(const std::string& name, const std::string& text) const {
    std::ofstream(path(name)) << text;
    return path(name).string();
  }

  Run run(const std::string& args) const {
    const fs::path out = path("stdout.txt");
    const std::string cmd = std::string("\"") + ZKQ_CLI_PATH + "\" " + args + " > \"" + out.string() + "\" 2>/dev/null";
    const int raw = std::system(cmd.c_str());
    std::ifstream in(out);
    std::stringstream ss;
    ss << in.rdbuf();
    return {WIFEXITED(raw) ? WEXITSTATUS(raw) : -1, ss.str()};
  }

 private:
  fs::path dir_;
};

io::json parse(const Run& r) {
  return io::json::parse(r.out);
}

}  // namespace

TEST_SUITE("cli") {

TEST_CASE("check exit codes") {
  Sandbox box;
  const std::string scp = box.write("scp.json", io::save_message(scp_message(PureQubit::from_bloch({0.6, 0, 0.8}))));
  const std::string triv = box.write("triv.json", io::save_message(trivial_cheat_message()));
  const std::string bad = box.write("bad.json", "{\"ancilla\": ");

  Run r = box.run("check " + scp + " bloch:0.6,0,0.8 --brute");
  CHECK(r.status == 0);
  auto j = parse(r);
  CHECK(j["verdict"]["condition1"] == true);
  CHECK(j["verdict"]["condition2"] == true);
  CHECK(j["brute"]["agree"] == true);

  r = box.run("check " + triv + " bloch:1,0,0");
  CHECK(r.status == 2);
  CHECK(parse(r)["verdict"]["condition2"] == false);

  CHECK(box.run("check " + bad + " bloch:0,0,1").status == 1);
  CHECK(box.run("check " + box.path("missing.json").string() + " bloch:0,0,1").status == 1);
  CHECK(box.run("check " + scp + " bloch:0,0").status == 1);
}

TEST_CASE("attack reports") {
  Sandbox box;
  const std::string z = box.write("z.json", io::save_message(classical_direction_message({0, 0, 1})));
  Run r = box.run("attack " + z + " --reference bloch:0,0,1");
  CHECK(r.status == 0);
  auto j = parse(r);
  CHECK(j["classical"] == true);
  CHECK(j["fidelity"].get<double>() == doctest::Approx(1.0));
  CHECK(j["reconstructed"][2].get<double>() == doctest::Approx(1.0));

  const std::string scp = box.write("scp.json", io::save_message(scp_message(PureQubit::from_bloch({0, 1, 0}))));
  r = box.run("attack " + scp + " --trials 10000 --reference bloch:0,1,0");
  CHECK(r.status == 0);
  j = parse(r);
  CHECK(std::abs(j["success_frequency"].get<double>() - 0.5) <= 0.015);
  CHECK(j["success_probability"].get<double>() == doctest::Approx(0.5));
  CHECK(j["plan"]["normalization"].get<double>() == doctest::Approx(2.0));
  CHECK(j["copy_fidelity"]["min"].get<double>() >= 1.0 - 1e-8);

  const TestMessage base = scp_message(PureQubit::up());
  const std::string all = box.write(
      "all.json", io::save_message(make_message(base.instrument, base.instrument.distinct_labels(), base.ancilla)));
  CHECK(box.run("attack " + all).status == 2);
}

TEST_CASE("estimate and game") {
  Sandbox box;
  Run r = box.run("estimate --copies 1 --samples 20000 --seed 3");
  CHECK(r.status == 0);
  CHECK(std::abs(parse(r)["report"]["mean"].get<double>() - 2.0 / 3.0) < 0.01);

  r = box.run("game scp --role eve --policy remaining --samples 20000 --seed 4");
  CHECK(r.status == 0);
  auto rep = parse(r)["reports"][0];
  CHECK(std::abs(rep["mean"].get<double>() - 2.0 / 3.0) < 0.01);
  CHECK(rep["baseline"].get<double>() == 0.5);

  r = box.run("game scp --role bob --policy discard --samples 20000 --seed 5");
  CHECK(std::abs(parse(r)["reports"][0]["mean"].get<double>() - 17.0 / 24.0) < 0.01);

  r = box.run("game scp --role both --policy both --samples 2000 --format csv");
  CHECK(r.status == 0);
  CHECK(r.out.rfind("family,policy,seed,samples,mean,stderr,baseline,delta\n", 0) == 0);
  CHECK(std::count(r.out.begin(), r.out.end(), '\n') == 5);

  CHECK(box.run("estimate --copies 2 --samples 4000 --workers 1").out ==
        box.run("estimate --copies 2 --samples 4000 --workers 4").out);
}

TEST_CASE("corpus writes messages that reload") {
  Sandbox box;
  const std::string dir = box.path("corpus").string();
  Run r = box.run("corpus --count 12 --family mixed --verify --dir " + dir);
  CHECK(r.status == 0);
  const auto j = parse(r);
  CHECK(j["count"] == 12);
  for (const auto& d : j["descriptors"]) {
    const TestMessage msg = io::load_message_file(fs::path(dir) / d["file"].get<std::string>());
    CHECK(message_violations(msg).empty());
    const ScenarioDescriptor desc = io::descriptor_from_json(d);
    CHECK(io::save_message(msg) == io::save_message(instantiate(desc)));
  }

  const std::string from = box.write("desc.json", r.out);
  const Run again = box.run("corpus --from " + from + " --verify");
  CHECK(again.status == 0);
  CHECK(parse(again)["descriptors"].size() == 12);
}

TEST_CASE("usage errors exit 1, help exits 0") {
  Sandbox box;
  CHECK(box.run("").status == 1);
  CHECK(box.run("frobnicate").status == 1);
  CHECK(box.run("estimate --format xml").status == 1);
  CHECK(box.run("estimate --copies 99").status == 1);
  CHECK(box.run("game nonsense --samples 1000").status == 1);
  CHECK(box.run("--help").status == 0);
}

}  // TEST_SUITE
