#include "zkq/io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

namespace zkq::io {

double round12(double x) {
  if (!std::isfinite(x)) return x;
  if (std::abs(x) < kRoundingFloor) return 0.0;
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, x, std::chars_format::general, 12);
  double out = 0.0;
  std::from_chars(buf, res.ptr, out);
  return out == 0.0 ? 0.0 : out;
}

namespace {

[[noreturn]] void field_error(const std::string& where, const std::string& what) {
  throw Error(ErrorCode::ParseError, "field '" + where + "': " + what);
}

const json& require(const json& j, const char* key, const std::string& where) {
  if (!j.is_object()) field_error(where, "expected an object");
  auto it = j.find(key);
  if (it == j.end()) field_error(where + "." + key, "missing field");
  return *it;
}

std::size_t require_count(const json& j, const char* key, const std::string& where) {
  const json& v = require(j, key, where);
  if (!v.is_number_unsigned() && !(v.is_number_integer() && v.get<long long>() >= 0)) {
    field_error(where + "." + key, "expected a non-negative integer");
  }
  return v.get<std::size_t>();
}

double require_number(const json& j, const std::string& where) {
  if (!j.is_number()) field_error(where, "expected a number");
  return j.get<double>();
}

}  // namespace

json matrix_to_json(const ComplexMatrix& m) {
  json data = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index j = 0; j < m.cols(); ++j) data.push_back({m(i, j).real(), m(i, j).imag()});
  return {{"rows", m.rows()}, {"cols", m.cols()}, {"data", std::move(data)}};
}

ComplexMatrix matrix_from_json(const json& j, const std::string& where) {
  const std::size_t rows = require_count(j, "rows", where);
  const std::size_t cols = require_count(j, "cols", where);
  const json& data = require(j, "data", where);
  if (!data.is_array()) field_error(where + ".data", "expected an array");
  if (data.size() != rows * cols) {
    field_error(where + ".data", "has " + std::to_string(data.size()) + " entries, expected " +
                                     std::to_string(rows * cols));
  }
  ComplexMatrix m(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
  for (std::size_t k = 0; k < data.size(); ++k) {
    const std::string at = where + ".data[" + std::to_string(k) + "]";
    const json& e = data[k];
    if (!e.is_array() || e.size() != 2) field_error(at, "expected [re, im]");
    m(static_cast<Eigen::Index>(k / cols), static_cast<Eigen::Index>(k % cols)) =
        cplx{require_number(e[0], at + "[0]"), require_number(e[1], at + "[1]")};
  }
  return m;
}

json instrument_to_json(const Instrument& inst) {
  json branches = json::array();
  for (const auto& b : inst.branches()) {
    branches.push_back({{"label", b.label}, {"matrix", matrix_to_json(b.kraus)}});
  }
  return {{"input_dim", inst.input_dim()},
          {"output_dim", inst.output_dim()},
          {"completeness", inst.completeness() == Completeness::Exact ? "exact" : "sub"},
          {"branches", std::move(branches)}};
}

Instrument instrument_from_json(const json& j, const std::string& where) {
  const std::size_t input_dim = require_count(j, "input_dim", where);
  const std::size_t output_dim = require_count(j, "output_dim", where);
  Completeness completeness = Completeness::Exact;
  if (auto it = j.find("completeness"); it != j.end()) {
    if (*it == "exact") {
      completeness = Completeness::Exact;
    } else if (*it == "sub") {
      completeness = Completeness::SubNormalized;
    } else {
      field_error(where + ".completeness", "expected \"exact\" or \"sub\"");
    }
  }
  const json& arr = require(j, "branches", where);
  if (!arr.is_array()) field_error(where + ".branches", "expected an array");
  std::vector<Branch> branches;
  for (std::size_t k = 0; k < arr.size(); ++k) {
    const std::string at = where + ".branches[" + std::to_string(k) + "]";
    const json& label = require(arr[k], "label", at);
    if (!label.is_string()) field_error(at + ".label", "expected a string");
    branches.push_back({label.get<std::string>(), matrix_from_json(require(arr[k], "matrix", at), at + ".matrix")});
  }
  return Instrument(input_dim, output_dim, std::move(branches), completeness);
}

json message_to_json(const TestMessage& msg) {
  return {{"ancilla", msg.ancilla ? matrix_to_json(msg.ancilla->matrix()) : json(nullptr)},
          {"instrument", instrument_to_json(msg.instrument)},
          {"accepted", msg.accepted},
          {"note", msg.note}};
}

TestMessage message_from_json(const json& j) {
  if (!j.is_object()) field_error("<root>", "expected an object");
  const json& anc = require(j, "ancilla", "message");
  const json& accepted = require(j, "accepted", "message");
  if (!accepted.is_array()) field_error("message.accepted", "expected an array of labels");
  std::vector<std::string> labels;
  for (std::size_t k = 0; k < accepted.size(); ++k) {
    if (!accepted[k].is_string()) {
      field_error("message.accepted[" + std::to_string(k) + "]", "expected a string");
    }
    labels.push_back(accepted[k].get<std::string>());
  }
  Instrument inst = instrument_from_json(require(j, "instrument", "message"), "message.instrument");
  std::optional<DensityMatrix> ancilla;
  if (!anc.is_null()) {
    try {
      ancilla = DensityMatrix(matrix_from_json(anc, "message.ancilla"));
    } catch (const Error& e) {
      if (e.code() == ErrorCode::ParseError) throw;
      throw Error(ErrorCode::InvalidMessage, std::string("invalid test message:\n  - ancilla: ") + e.what());
    }
  }
  std::string note;
  if (auto it = j.find("note"); it != j.end() && it->is_string()) note = it->get<std::string>();
  return make_message(std::move(inst), std::move(labels), std::move(ancilla), std::move(note));
}

std::string save_message(const TestMessage& msg) {
  return message_to_json(msg).dump(2) + "\n";
}

TestMessage load_message(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    std::size_t line = 1, col = 1;
    for (std::size_t i = 0; i + 1 < e.byte && i < text.size(); ++i) {
      if (text[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
    std::ostringstream os;
    os << "line " << line << ", column " << col << ": " << e.what();
    throw Error(ErrorCode::ParseError, os.str());
  }
  return message_from_json(j);
}

TestMessage load_message_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::ParseError, "cannot open " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return load_message(ss.str());
}

void save_message_file(const TestMessage& msg, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::ParseError, "cannot write " + path.string());
  out << save_message(msg);
}

json bloch_to_json(const Bloch& b) {
  return json::array({round12(b[0]), round12(b[1]), round12(b[2])});
}

namespace {

json rounded_matrix(const ComplexMatrix& m) {
  json data = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index j = 0; j < m.cols(); ++j)
      data.push_back({round12(m(i, j).real()), round12(m(i, j).imag())});
  return {{"rows", m.rows()}, {"cols", m.cols()}, {"data", std::move(data)}};
}

}  // namespace

json verdict_to_json(const ConvincingVerdict& v) {
  json j{{"condition1", v.condition1},
         {"condition2", v.condition2},
         {"convincing", v.condition1 && v.condition2},
         {"pass_probability", round12(v.pass_probability)},
         {"top_eigenvalue", round12(v.top_eigenvalue)},
         {"second_eigenvalue", round12(v.second_eigenvalue)},
         {"accepts_every_label", v.accepts_every_label},
         {"certified_state", v.certified_state ? bloch_to_json(v.certified_state->bloch()) : json(nullptr)}};
  if (v.response_operator.size() > 0) j["response_operator"] = rounded_matrix(v.response_operator);
  return j;
}

json plan_to_json(const ExtractionPlan& plan) {
  json ops = json::array();
  for (const auto& w : plan.operators) ops.push_back(rounded_matrix(w));
  return {{"ancilla_dim", plan.ancilla_dim},
          {"complement_size", plan.size()},
          {"normalization", round12(plan.normalization)},
          {"operators", std::move(ops)}};
}

json report_to_json(const FidelityReport& r) {
  return {{"mean", round12(r.mean)},         {"stderr", round12(r.std_error)},
          {"samples", r.samples},            {"baseline", round12(r.baseline)},
          {"delta", round12(r.delta)},       {"seed", r.seed},
          {"policy", r.policy},              {"family", r.family}};
}

json transcript_to_json(const GameTranscript& t) {
  json j{{"seed", t.seed},
         {"family", t.family},
         {"honesty", t.honesty},
         {"phi", bloch_to_json(t.phi)},
         {"alice_belief", bloch_to_json(t.alice_belief)},
         {"note", t.note},
         {"ancilla_dim", t.ancilla_dim},
         {"alice_prediction_certain", t.alice_pass_prediction_certain},
         {"bob",
          {{"passed", t.bob_passed},
           {"label", t.bob_label},
           {"branch_probability", round12(t.bob_branch_probability)},
           {"classical", t.bob_classical},
           {"extraction_success",
            t.bob_extraction_success ? json(*t.bob_extraction_success) : json(nullptr)},
           {"estimate", bloch_to_json(t.bob_estimate)},
           {"fidelity", round12(t.bob_fidelity)}}}};
  if (t.eve) {
    const auto& e = *t.eve;
    j["eve"] = {{"classical", e.classical},
                {"extraction_success", e.extraction_success},
                {"branch", e.branch},
                {"branch_probability", round12(e.branch_probability)},
                {"estimate", bloch_to_json(e.estimate)},
                {"fidelity", round12(e.fidelity)},
                {"forwarded_intact", e.forwarded_intact}};
  } else {
    j["eve"] = nullptr;
  }
  return j;
}

json descriptor_to_json(const ScenarioDescriptor& d) {
  return {{"family", to_string(d.family)},
          {"direction", {d.direction[0], d.direction[1], d.direction[2]}},
          {"ancilla_dim", d.ancilla_dim},
          {"seed", d.seed}};
}

ScenarioDescriptor descriptor_from_json(const json& j, const std::string& where) {
  if (!j.is_object()) field_error(where, "expected an object");
  ScenarioDescriptor d;
  const json& family = require(j, "family", where);
  if (!family.is_string()) field_error(where + ".family", "expected a string");
  try {
    d.family = family_from_string(family.get<std::string>());
  } catch (const Error& e) {
    field_error(where + ".family", e.what());
  }
  const json& dir = require(j, "direction", where);
  if (!dir.is_array() || dir.size() != 3) field_error(where + ".direction", "expected [x, y, z]");
  for (std::size_t k = 0; k < 3; ++k) {
    d.direction[k] = require_number(dir[k], where + ".direction[" + std::to_string(k) + "]");
  }
  d.ancilla_dim = require_count(j, "ancilla_dim", where);
  const json& seed = require(j, "seed", where);
  if (!seed.is_number_unsigned()) field_error(where + ".seed", "expected a non-negative integer");
  d.seed = seed.get<std::uint64_t>();
  return d;
}

std::string report_csv_header() {
  return "family,policy,seed,samples,mean,stderr,baseline,delta";
}

std::string report_to_csv(const FidelityReport& r) {
  auto num = [](double x) {
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof buf, round12(x), std::chars_format::general, 12);
    return std::string(buf, res.ptr);
  };
  std::ostringstream os;
  os << r.family << ',' << r.policy << ',' << r.seed << ',' << r.samples << ',' << num(r.mean)
     << ',' << num(r.std_error) << ',' << num(r.baseline) << ',' << num(r.delta);
  return os.str();
}

PureQubit parse_phi_spec(const std::string& spec) {
  auto split_numbers = [&](std::string_view body) {
    std::vector<double> out;
    std::size_t start = 0;
    while (start <= body.size()) {
      const std::size_t comma = body.find(',', start);
      const std::string_view tok =
          body.substr(start, comma == std::string_view::npos ? body.size() - start : comma - start);
      double v = 0.0;
      const auto res = std::from_chars(tok.data(), tok.data() + tok.size(), v);
      if (tok.empty() || res.ec != std::errc{} || res.ptr != tok.data() + tok.size()) {
        throw Error(ErrorCode::ParseError, "bad number '" + std::string(tok) + "' in phi spec '" + spec + "'");
      }
      out.push_back(v);
      if (comma == std::string_view::npos) break;
      start = comma + 1;
    }
    return out;
  };
  const std::string_view s(spec);
  if (s.starts_with("bloch:")) {
    const auto v = split_numbers(s.substr(6));
    if (v.size() != 3) throw Error(ErrorCode::ParseError, "bloch spec needs 3 numbers");
    return PureQubit::from_bloch({v[0], v[1], v[2]});
  }
  if (s.starts_with("amp:")) {
    const auto v = split_numbers(s.substr(4));
    if (v.size() != 4) throw Error(ErrorCode::ParseError, "amp spec needs 4 numbers");
    const double norm = v[0] * v[0] + v[1] * v[1] + v[2] * v[2] + v[3] * v[3];
    if (std::abs(norm - 1.0) > 1e-9) {
      throw Error(ErrorCode::NotUnitVector, "amplitudes have squared norm " + std::to_string(norm));
    }
    return {cplx{v[0], v[1]}, cplx{v[2], v[3]}};
  }
  throw Error(ErrorCode::ParseError, "phi spec must start with 'bloch:' or 'amp:'");
}

}  // namespace zkq::io
