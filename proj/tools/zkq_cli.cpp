// zkq: check test messages, run extraction attacks and fidelity experiments.
//
// Exit status: 0 on success or a convincing verdict, 2 for a domain-negative
// result (not convincing, nothing to extract), 1 for usage and I/O errors.

#include <chrono>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "zkq/io.hpp"

namespace {

using zkq::io::json;

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitNegative = 2;

struct GlobalOptions {
  std::uint64_t seed = 0;
  std::size_t samples = 50'000;
  std::size_t workers = 1;
  std::string format = "json";
  std::string output;
};

/// Something to print in each of the three formats.
struct Rendered {
  json doc;
  std::string csv;
  std::string pretty;
  int status = kExitOk;
};

std::string fmt(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.12g", zkq::io::round12(x));
  return buf;
}

std::string bloch_text(const zkq::Bloch& b) {
  return "(" + fmt(b[0]) + ", " + fmt(b[1]) + ", " + fmt(b[2]) + ")";
}

void emit(const GlobalOptions& g, const Rendered& r, double elapsed) {
  std::string text;
  if (g.format == "json") {
    text = r.doc.dump(2) + "\n";
  } else if (g.format == "csv") {
    text = r.csv;
  } else {
    std::ostringstream os;
    os << r.pretty << "elapsed: " << fmt(elapsed) << " s\n";
    text = os.str();
  }
  if (g.output.empty()) {
    std::cout << text << std::flush;
    return;
  }
  std::ofstream out(g.output, std::ios::binary);
  if (!out) throw zkq::Error(zkq::ErrorCode::ParseError, "cannot write " + g.output);
  out << text;
}

// ---------------------------------------------------------------------------

struct CheckArgs {
  std::string message;
  std::string phi;
  bool brute = false;
  std::size_t grid = 2000;
};

Rendered run_check(const CheckArgs& a) {
  const zkq::TestMessage msg = zkq::io::load_message_file(a.message);
  const zkq::PureQubit phi = zkq::io::parse_phi_spec(a.phi);
  const auto v = zkq::check_convincing(msg, phi);
  const bool convincing = v.condition1 && v.condition2;

  Rendered r;
  r.doc = {{"command", "check"}, {"phi", zkq::io::bloch_to_json(phi.bloch())},
           {"verdict", zkq::io::verdict_to_json(v)}};
  std::ostringstream csv, pretty;
  csv << std::boolalpha << "condition1,condition2,pass_probability,top_eigenvalue,second_eigenvalue";
  pretty << "phi             " << bloch_text(phi.bloch()) << "\n"
         << "condition 1     " << (v.condition1 ? "yes" : "no") << "  (pass probability "
         << fmt(v.pass_probability) << ")\n"
         << "condition 2     " << (v.condition2 ? "yes" : "no") << "  (eigenvalues " << fmt(v.top_eigenvalue)
         << ", " << fmt(v.second_eigenvalue) << ")\n";
  if (a.brute) {
    const auto b = zkq::brute_force_check(msg, phi, a.grid);
    const bool agree = b.condition1 == v.condition1 && b.condition2 == v.condition2;
    r.doc["brute"] = {{"grid", a.grid},
                      {"condition1", b.condition1},
                      {"condition2", b.condition2},
                      {"pass_probability", zkq::io::round12(b.pass_probability)},
                      {"agree", agree}};
    csv << ",brute_condition1,brute_condition2,agree";
    pretty << "brute force     grid " << a.grid << ": condition 1 " << (b.condition1 ? "yes" : "no")
           << ", condition 2 " << (b.condition2 ? "yes" : "no") << (agree ? "  (agrees)" : "  (DISAGREES)")
           << "\n";
    csv << "\n" << v.condition1 << ',' << v.condition2 << ',' << fmt(v.pass_probability) << ','
        << fmt(v.top_eigenvalue) << ',' << fmt(v.second_eigenvalue) << ',' << b.condition1 << ','
        << b.condition2 << ',' << agree << "\n";
  } else {
    csv << "\n" << v.condition1 << ',' << v.condition2 << ',' << fmt(v.pass_probability) << ','
        << fmt(v.top_eigenvalue) << ',' << fmt(v.second_eigenvalue) << "\n";
  }
  pretty << "verdict         " << (convincing ? "convincing" : "not convincing") << "\n";
  r.csv = csv.str();
  r.pretty = pretty.str();
  r.status = convincing ? kExitOk : kExitNegative;
  return r;
}

// ---------------------------------------------------------------------------

struct AttackArgs {
  std::string message;
  std::size_t trials = 10'000;
  std::string reference;
};

Rendered run_attack(const GlobalOptions& g, const AttackArgs& a) {
  const zkq::TestMessage msg = zkq::io::load_message_file(a.message);
  std::optional<zkq::PureQubit> reference;
  if (!a.reference.empty()) reference = zkq::io::parse_phi_spec(a.reference);

  Rendered r;
  std::ostringstream pretty;
  if (msg.is_classical()) {
    const zkq::PureQubit rec = zkq::reconstruct_from_classical(msg);
    r.doc = {{"command", "attack"}, {"classical", true}, {"reconstructed", zkq::io::bloch_to_json(rec.bloch())}};
    pretty << "classical message: X has a unique unit eigenvector\n"
           << "reconstructed   " << bloch_text(rec.bloch()) << "\n";
    r.csv = "classical,x,y,z,fidelity\ntrue";
    for (double c : rec.bloch()) r.csv += "," + fmt(c);
    if (reference) {
      const double f = zkq::fidelity(rec, *reference);
      r.doc["fidelity"] = zkq::io::round12(f);
      pretty << "fidelity        " << fmt(f) << "\n";
      r.csv += "," + fmt(f);
    } else {
      r.csv += ",";
    }
    r.csv += "\n";
    r.pretty = pretty.str();
    return r;
  }

  const zkq::ExtractionPlan plan = zkq::build_extraction_plan(msg);
  const zkq::DensityMatrix ancilla = msg.ancilla_state();
  const double p_success = zkq::extraction_success_probability(plan, ancilla);

  std::size_t successes = 0;
  double min_fidelity = 1.0, sum_fidelity = 0.0;
  const std::size_t blocks = (a.trials + zkq::kBlockSize - 1) / zkq::kBlockSize;
  for (std::size_t b = 0; b < blocks; ++b) {
    zkq::SeededRng rng(g.seed, b);
    const std::size_t end = std::min(a.trials, (b + 1) * zkq::kBlockSize);
    for (std::size_t i = b * zkq::kBlockSize; i < end; ++i) {
      const auto res = zkq::extract_copy(plan, ancilla, rng);
      if (!res.success) continue;
      ++successes;
      if (reference) {
        const double f = zkq::fidelity(*reference, res.reconstructed->matrix());
        min_fidelity = std::min(min_fidelity, f);
        sum_fidelity += f;
      }
    }
  }
  const double freq = a.trials ? static_cast<double>(successes) / static_cast<double>(a.trials) : 0.0;

  json branches = json::array();
  for (const auto& lp : zkq::extraction_branch_probabilities(plan, ancilla)) {
    branches.push_back({{"label", lp.label}, {"probability", zkq::io::round12(lp.probability)}});
  }
  r.doc = {{"command", "attack"},
           {"classical", false},
           {"plan", zkq::io::plan_to_json(plan)},
           {"branches", std::move(branches)},
           {"success_probability", zkq::io::round12(p_success)},
           {"seed", g.seed},
           {"trials", a.trials},
           {"successes", successes},
           {"success_frequency", zkq::io::round12(freq)}};
  pretty << "extraction plan N = " << plan.size() << ", normalization " << fmt(plan.normalization) << "\n"
         << "success         probability " << fmt(p_success) << ", frequency " << fmt(freq) << " over "
         << a.trials << " trials\n";
  r.csv = "classical,complement_size,normalization,success_probability,trials,successes,success_frequency,"
          "min_copy_fidelity,mean_copy_fidelity\nfalse," +
          std::to_string(plan.size()) + "," + fmt(plan.normalization) + "," + fmt(p_success) + "," +
          std::to_string(a.trials) + "," + std::to_string(successes) + "," + fmt(freq) + ",";
  if (reference && successes > 0) {
    const double mean = sum_fidelity / static_cast<double>(successes);
    r.doc["copy_fidelity"] = {{"min", zkq::io::round12(min_fidelity)}, {"mean", zkq::io::round12(mean)}};
    pretty << "copy fidelity   min " << fmt(min_fidelity) << ", mean " << fmt(mean) << "\n";
    r.csv += fmt(min_fidelity) + "," + fmt(mean);
  } else {
    r.csv += ",";
  }
  r.csv += "\n";
  r.pretty = pretty.str();
  return r;
}

// ---------------------------------------------------------------------------

std::string reports_csv(const std::vector<zkq::FidelityReport>& reports) {
  std::string out = zkq::io::report_csv_header() + "\n";
  for (const auto& rep : reports) out += zkq::io::report_to_csv(rep) + "\n";
  return out;
}

std::string reports_pretty(const std::vector<zkq::FidelityReport>& reports) {
  std::ostringstream os;
  for (const auto& rep : reports) {
    os << rep.family << " [" << rep.policy << "]  mean " << fmt(rep.mean) << " +/- " << fmt(rep.std_error)
       << "  baseline " << fmt(rep.baseline) << "  delta " << fmt(rep.delta) << " ("
       << fmt(rep.significance()) << " sigma, " << rep.samples << " samples)\n";
  }
  return os.str();
}

Rendered run_estimate(const GlobalOptions& g, std::size_t copies) {
  const auto rep = zkq::mean_estimation_fidelity(copies, g.samples, g.seed, g.workers);
  Rendered r;
  r.doc = {{"command", "estimate"}, {"copies", copies}, {"report", zkq::io::report_to_json(rep)}};
  r.csv = reports_csv({rep});
  r.pretty = reports_pretty({rep});
  return r;
}

struct GameArgs {
  std::string family = "scp";
  std::string role = "eve";
  std::string policy = "remaining";
  std::string honesty = "honest";
  std::string cheat_state = "bloch:0,0,1";
  std::size_t ancilla_dim = 2;
  bool correlated = false;
  std::string play;
  bool eavesdrop = false;
};

Rendered run_game(const GlobalOptions& g, const GameArgs& a) {
  zkq::AliceStrategy s;
  s.family = zkq::family_from_string(a.family);
  s.honesty = zkq::honesty_from_string(a.honesty);
  s.ancilla_dim = a.ancilla_dim;
  s.correlated = a.correlated;
  s.cheat_state = zkq::io::parse_phi_spec(a.cheat_state).bloch();

  std::vector<zkq::FailurePolicy> policies;
  if (a.policy == "both") {
    policies = {zkq::FailurePolicy::EstimateRemaining, zkq::FailurePolicy::DiscardOnFail};
  } else {
    policies = {zkq::policy_from_string(a.policy)};
  }

  Rendered r;
  if (!a.play.empty()) {
    zkq::SeededRng rng(g.seed);
    const auto t = zkq::simulate_game(s, zkq::io::parse_phi_spec(a.play), a.eavesdrop, rng, policies.front());
    r.doc = {{"command", "game"}, {"transcript", zkq::io::transcript_to_json(t)}};
    std::ostringstream pretty;
    pretty << "bob " << (t.bob_passed ? "passed" : "failed") << " (" << t.bob_label << "), estimate fidelity "
           << fmt(t.bob_fidelity) << "\n";
    if (t.eve) pretty << "eve estimate fidelity " << fmt(t.eve->fidelity) << "\n";
    r.pretty = pretty.str();
    r.csv = "bob_passed,bob_fidelity,eve_fidelity\n" + std::string(t.bob_passed ? "true" : "false") + "," +
            fmt(t.bob_fidelity) + "," + (t.eve ? fmt(t.eve->fidelity) : std::string()) + "\n";
    return r;
  }

  std::vector<std::string> roles;
  if (a.role == "both") {
    roles = {"eve", "bob"};
  } else if (a.role == "eve" || a.role == "bob") {
    roles = {a.role};
  } else {
    throw zkq::Error(zkq::ErrorCode::ParseError, "--role must be eve, bob or both");
  }

  std::vector<zkq::FidelityReport> reports;
  json docs = json::array();
  for (const auto& role : roles) {
    for (auto p : policies) {
      auto rep = role == "eve" ? zkq::eve_experiment(s, g.samples, p, g.seed, g.workers)
                               : zkq::bob_experiment(s, g.samples, p, g.seed, g.workers);
      rep.family = role + ":" + rep.family;
      json j = zkq::io::report_to_json(rep);
      j["role"] = role;
      docs.push_back(std::move(j));
      reports.push_back(std::move(rep));
    }
  }
  r.doc = {{"command", "game"}, {"honesty", a.honesty}, {"reports", std::move(docs)}};
  r.csv = reports_csv(reports);
  r.pretty = reports_pretty(reports);
  return r;
}

// ---------------------------------------------------------------------------

struct CorpusArgs {
  std::size_t count = 200;
  std::string family = "random-convincing";
  std::size_t min_dim = 1;
  std::size_t max_dim = 4;
  std::string phi;
  std::string from;
  std::string dir;
  bool verify = false;
};

std::vector<zkq::ScenarioDescriptor> read_descriptors(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw zkq::Error(zkq::ErrorCode::ParseError, "cannot open " + path);
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw zkq::Error(zkq::ErrorCode::ParseError, path + ": " + e.what());
  }
  const json& arr = j.is_object() && j.contains("descriptors") ? j["descriptors"] : j;
  if (!arr.is_array()) throw zkq::Error(zkq::ErrorCode::ParseError, "field 'descriptors': expected an array");
  std::vector<zkq::ScenarioDescriptor> out;
  for (std::size_t k = 0; k < arr.size(); ++k) {
    out.push_back(zkq::io::descriptor_from_json(arr[k], "descriptors[" + std::to_string(k) + "]"));
  }
  return out;
}

std::vector<zkq::ScenarioDescriptor> generate_descriptors(const GlobalOptions& g, const CorpusArgs& a) {
  if (a.min_dim < 1 || a.max_dim < a.min_dim) {
    throw zkq::Error(zkq::ErrorCode::ParseError, "need 1 <= --min-dim <= --max-dim");
  }
  const std::vector<zkq::Family> all{zkq::Family::TrivialCheat, zkq::Family::ClassicalDirection,
                                     zkq::Family::Scp, zkq::Family::RandomConvincing};
  const bool mixed = a.family == "mixed";
  const zkq::Family fixed = mixed ? zkq::Family::Scp : zkq::family_from_string(a.family);
  std::optional<zkq::Bloch> direction;
  if (!a.phi.empty()) direction = zkq::io::parse_phi_spec(a.phi).bloch();

  zkq::SeededRng rng(g.seed);
  const std::size_t span = a.max_dim - a.min_dim + 1;
  std::vector<zkq::ScenarioDescriptor> out;
  for (std::size_t k = 0; k < a.count; ++k) {
    zkq::ScenarioDescriptor d;
    d.family = mixed ? all[k % all.size()] : fixed;
    d.direction = direction ? *direction : zkq::sample_sphere_direction(rng);
    d.ancilla_dim = a.min_dim + (mixed ? k / all.size() : k) % span;
    d.seed = rng.next_u64();
    out.push_back(d);
  }
  return out;
}

Rendered run_corpus(const GlobalOptions& g, const CorpusArgs& a) {
  const auto descriptors = a.from.empty() ? generate_descriptors(g, a) : read_descriptors(a.from);
  if (!a.dir.empty()) std::filesystem::create_directories(a.dir);

  json entries = json::array();
  std::size_t convincing = 0, extractable = 0;
  std::string csv = "index,family,ancilla_dim,seed";
  if (a.verify) csv += ",condition1,condition2,success_probability";
  csv += "\n";
  for (std::size_t k = 0; k < descriptors.size(); ++k) {
    const auto& d = descriptors[k];
    json e = zkq::io::descriptor_to_json(d);
    csv += std::to_string(k) + "," + std::string(zkq::to_string(d.family)) + "," + std::to_string(d.ancilla_dim) +
           "," + std::to_string(d.seed);
    if (a.verify || !a.dir.empty()) {
      const zkq::TestMessage msg = zkq::instantiate(d);
      if (!a.dir.empty()) {
        char name[32];
        std::snprintf(name, sizeof name, "message-%04zu.json", k);
        const auto path = std::filesystem::path(a.dir) / name;
        zkq::io::save_message_file(msg, path);
        e["file"] = name;
      }
      if (a.verify) {
        const auto v = zkq::check_convincing(msg, zkq::PureQubit::from_bloch(d.direction));
        const bool ok = v.condition1 && v.condition2;
        double p = 0.0;
        if (ok && msg.is_classical()) {
          p = 1.0;
        } else if (ok) {
          p = zkq::extraction_success_probability(zkq::build_extraction_plan(msg), msg.ancilla_state());
        }
        convincing += ok;
        extractable += ok && p > 0.0;
        e["condition1"] = v.condition1;
        e["condition2"] = v.condition2;
        e["success_probability"] = zkq::io::round12(p);
        csv += std::string(",") + (v.condition1 ? "true" : "false") + "," + (v.condition2 ? "true" : "false") +
               "," + fmt(p);
      }
    }
    csv += "\n";
    entries.push_back(std::move(e));
  }

  Rendered r;
  r.doc = {{"command", "corpus"}, {"seed", g.seed}, {"count", descriptors.size()}, {"descriptors", std::move(entries)}};
  std::ostringstream pretty;
  pretty << descriptors.size() << " scenario descriptors";
  if (!a.dir.empty()) pretty << " written to " << a.dir;
  pretty << "\n";
  if (a.verify) {
    r.doc["convincing"] = convincing;
    r.doc["extractable"] = extractable;
    pretty << convincing << " convincing, " << extractable << " of them with an extractable copy\n";
  }
  r.csv = csv;
  r.pretty = pretty.str();
  return r;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Simulate quantum test messages and the attacks that extract copies from them."};
  app.fallthrough();
  app.require_subcommand(1);

  GlobalOptions g;
  app.add_option("--seed", g.seed, "random seed")->capture_default_str();
  app.add_option("--samples", g.samples, "Monte-Carlo samples for estimate and game")->capture_default_str();
  app.add_option("--workers", g.workers, "worker threads")->check(CLI::PositiveNumber)->capture_default_str();
  app.add_option("--format", g.format, "output format")
      ->check(CLI::IsMember({"json", "csv", "pretty"}))
      ->capture_default_str();
  app.add_option("--output", g.output, "write the report to this file instead of stdout");

  CheckArgs check;
  auto* check_cmd = app.add_subcommand("check", "decide whether a message is convincing for phi");
  check_cmd->add_option("message", check.message, "message JSON file")->required();
  check_cmd->add_option("phi", check.phi, "bloch:x,y,z or amp:re,im,re,im")->required();
  check_cmd->add_flag("--brute", check.brute, "also run the grid oracle and report agreement");
  check_cmd->add_option("--grid", check.grid, "grid points for --brute")->capture_default_str();

  AttackArgs attack;
  auto* attack_cmd = app.add_subcommand("attack", "reconstruct or extract phi from a message");
  attack_cmd->add_option("message", attack.message, "message JSON file")->required();
  attack_cmd->add_option("--trials", attack.trials, "sampled extraction attempts")->capture_default_str();
  attack_cmd->add_option("--reference", attack.reference, "phi spec to score extracted copies against");

  std::size_t copies = 1;
  auto* estimate_cmd = app.add_subcommand("estimate", "mean fidelity of the covariant estimator");
  estimate_cmd->add_option("--copies", copies, "copies of phi given to the estimator")
      ->check(CLI::Range(std::size_t{0}, zkq::kMaxCopies))
      ->capture_default_str();

  GameArgs game;
  auto* game_cmd = app.add_subcommand("game", "Eve and Bob fidelity experiments against Alice's protocol");
  game_cmd->add_option("family", game.family, "trivial-cheat, classical-direction, scp or random-convincing")
      ->capture_default_str();
  game_cmd->add_option("--role", game.role, "eve, bob or both")->capture_default_str();
  game_cmd->add_option("--policy", game.policy, "remaining, discard or both")->capture_default_str();
  game_cmd->add_option("--honesty", game.honesty, "honest, cheat-fixed or cheat-random")->capture_default_str();
  game_cmd->add_option("--cheat-state", game.cheat_state, "ancilla state of a cheat-fixed Alice")
      ->capture_default_str();
  game_cmd->add_option("--ancilla-dim", game.ancilla_dim, "ancilla dimension of the random family")
      ->capture_default_str();
  game_cmd->add_flag("--correlated", game.correlated, "random family with ancilla correlated to phi");
  game_cmd->add_option("--play", game.play, "simulate one game for this phi and print its transcript");
  game_cmd->add_flag("--eavesdrop", game.eavesdrop, "with --play, let Eve intercept the message");

  CorpusArgs corpus;
  auto* corpus_cmd = app.add_subcommand("corpus", "generate scenario descriptors and message files");
  corpus_cmd->add_option("--count", corpus.count, "number of descriptors")->capture_default_str();
  corpus_cmd->add_option("--family", corpus.family, "message family, or 'mixed'")->capture_default_str();
  corpus_cmd->add_option("--min-dim", corpus.min_dim, "smallest ancilla dimension")->capture_default_str();
  corpus_cmd->add_option("--max-dim", corpus.max_dim, "largest ancilla dimension")->capture_default_str();
  corpus_cmd->add_option("--phi", corpus.phi, "use this phi for every descriptor");
  corpus_cmd->add_option("--from", corpus.from, "instantiate descriptors from a JSON file");
  corpus_cmd->add_option("--dir", corpus.dir, "write one message file per descriptor here");
  corpus_cmd->add_flag("--verify", corpus.verify, "check each message against its phi");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  const auto start = std::chrono::steady_clock::now();
  Rendered result;
  try {
    if (*check_cmd) {
      result = run_check(check);
    } else if (*attack_cmd) {
      result = run_attack(g, attack);
    } else if (*estimate_cmd) {
      result = run_estimate(g, copies);
    } else if (*game_cmd) {
      result = run_game(g, game);
    } else {
      result = run_corpus(g, corpus);
    }
    const double elapsed = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    emit(g, result, elapsed);
  } catch (const zkq::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    const bool negative = *attack_cmd && (e.code() == zkq::ErrorCode::EmptyComplement ||
                                          e.code() == zkq::ErrorCode::Degenerate);
    return negative ? kExitNegative : kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  }
  return result.status;
}
