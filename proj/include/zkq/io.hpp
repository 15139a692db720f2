#pragma once

// JSON and CSV formats.
//
//   matrix      {"rows": r, "cols": c, "data": [[re, im], ...]}   row-major
//   instrument  {"input_dim": n, "output_dim": m, "completeness": "exact"|"sub",
//                "branches": [{"label": s, "matrix": <matrix>}, ...]}
//   message     {"ancilla": <matrix>|null, "instrument": <instrument>,
//                "accepted": [s, ...], "note": s}
//
// Message files keep full double precision so that load -> save reproduces
// the same text. Reports round every real to 12 significant digits.

#include <filesystem>
#include <string>

#include <json.hpp>

#include "zkq/attacks.hpp"
#include "zkq/estimation.hpp"
#include "zkq/game.hpp"

namespace zkq::io {

using nlohmann::json;

/// Magnitudes below this are floating-point residue and print as 0.
inline constexpr double kRoundingFloor = 1e-14;

/// x rounded to 12 significant digits (locale independent).
double round12(double x);

json matrix_to_json(const ComplexMatrix& m);
/// `where` prefixes field paths in error messages.
ComplexMatrix matrix_from_json(const json& j, const std::string& where = "matrix");

json instrument_to_json(const Instrument& inst);
Instrument instrument_from_json(const json& j, const std::string& where = "instrument");

json message_to_json(const TestMessage& msg);
/// Throws ParseError naming the offending field, or InvalidMessage listing
/// every violated invariant.
TestMessage message_from_json(const json& j);

std::string save_message(const TestMessage& msg);
/// Parses message text; JSON syntax errors report line and column.
TestMessage load_message(const std::string& text);
TestMessage load_message_file(const std::filesystem::path& path);
void save_message_file(const TestMessage& msg, const std::filesystem::path& path);

json bloch_to_json(const Bloch& b);
json verdict_to_json(const ConvincingVerdict& v);
json plan_to_json(const ExtractionPlan& plan);
json report_to_json(const FidelityReport& r);
json transcript_to_json(const GameTranscript& t);

/// Descriptors keep full precision so that instantiate() reproduces the message.
json descriptor_to_json(const ScenarioDescriptor& d);
ScenarioDescriptor descriptor_from_json(const json& j, const std::string& where = "descriptor");

std::string report_csv_header();
std::string report_to_csv(const FidelityReport& r);

/// "bloch:x,y,z" or "amp:re,im,re,im".
PureQubit parse_phi_spec(const std::string& spec);

}  // namespace zkq::io
