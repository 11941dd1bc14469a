#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include "fairlot/adversary.hpp"

namespace fairlot {

// Raised for anything wrong with an input file: unreadable, bad JSON (with
// line/column from the parser), or a value that fails validation (with the
// JSON path to the offending field).
struct ParseError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& content);

// Instance files: {"agents": n, "items": m, "valuations": [[curve,...],...]}
// where curve is {"kind": ..., "lipschitz": C, ...kind fields}.  Kinds:
//   "piecewise-linear"  {"points": [[z, value], ...]}
//   "power"             {"exponent": p, "scale": s (default 1)}
//   "capped-linear"     {"slope": s, "cap": v}
//   "inverted-power"    {"exponent": p, "scale": s (default 1)}
// Serialization emits shortest round-trip decimals, so parsing the output
// reproduces every coordinate bit for bit.
Instance parse_instance_text(const std::string& text,
                             const std::string& origin);
Instance parse_instance(const std::string& path);
std::string serialize_instance(const Instance& instance);

// Lottery files: {"support": [{"probability": p, "allocation": [[...],...]},
// ...]}.  Artifact serializers print 12 significant digits.
Lottery parse_lottery_text(const std::string& text, const std::string& origin);
Lottery parse_lottery(const std::string& path);
std::string serialize_lottery(const Lottery& lottery);

// Positive-flow edges as a JSON list of
// {item, column, entry_row, pieces, probability}.
std::string serialize_flow(const FlowGraph& graph,
                           const std::vector<double>& flow);

std::string serialize_report(const ExAnteReport& report);
std::string serialize_report(const ExPostReport& report, ExPostCheck what);
std::string serialize_report(const ParetoReport& report);
std::string serialize_report(const AuditReport& report);

// One row per sweep direction: weights, utilities, welfare, then the file
// the point's lottery was written to (refs must match lottery_points).
std::string frontier_csv(const FrontierData& data,
                         const std::vector<std::string>& lottery_refs);
// One row per complete deterministic grid outcome: utilities and welfare.
std::string deterministic_csv(const FrontierData& data);

}  // namespace fairlot
