#include "fairlot/json_io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include "json.hpp"

namespace fairlot {

namespace {

using nlohmann::json;

std::string fmt12(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

std::string escape(const std::string& s) {
  std::string out;
  out.reserve(s.size() + 2);
  for (char c : s) {
    switch (c) {
      case '"': out += "\\\""; break;
      case '\\': out += "\\\\"; break;
      case '\n': out += "\\n"; break;
      case '\t': out += "\\t"; break;
      default:
        if (static_cast<unsigned char>(c) < 0x20) {
          char buf[8];
          std::snprintf(buf, sizeof buf, "\\u%04x", c);
          out += buf;
        } else {
          out += c;
        }
    }
  }
  return out;
}

[[noreturn]] void fail(const std::string& origin, const std::string& what) {
  throw ParseError(origin + ": " + what);
}

json parse_json(const std::string& text, const std::string& origin) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    fail(origin, e.what());
  }
}

double want_number(const json& j, const std::string& origin,
                   const std::string& where) {
  if (!j.is_number()) fail(origin, where + " must be a number");
  return j.get<double>();
}

int want_count(const json& j, const std::string& origin,
               const std::string& where) {
  if (!j.is_number_integer() || j.get<int>() < 1)
    fail(origin, where + " must be a positive integer");
  return j.get<int>();
}

Valuation parse_valuation(const json& j, const std::string& origin,
                          const std::string& where) {
  if (!j.is_object()) fail(origin, where + " must be an object");
  if (!j.contains("kind") || !j["kind"].is_string())
    fail(origin, where + " needs a \"kind\" string");
  std::string kind = j["kind"].get<std::string>();

  Valuation f;
  if (kind == "piecewise-linear") {
    if (!j.contains("points") || !j["points"].is_array())
      fail(origin, where + " needs a \"points\" array");
    std::vector<std::pair<double, double>> pts;
    for (std::size_t p = 0; p < j["points"].size(); ++p) {
      const json& pt = j["points"][p];
      std::string at = where + ".points[" + std::to_string(p) + "]";
      if (!pt.is_array() || pt.size() != 2)
        fail(origin, at + " must be a [z, value] pair");
      pts.emplace_back(want_number(pt[0], origin, at + "[0]"),
                       want_number(pt[1], origin, at + "[1]"));
    }
    try {
      f = Valuation::piecewise(std::move(pts));
    } catch (const std::exception& e) {
      fail(origin, where + ": " + e.what());
    }
  } else if (kind == "power" || kind == "inverted-power") {
    if (!j.contains("exponent"))
      fail(origin, where + " needs an \"exponent\"");
    double p = want_number(j["exponent"], origin, where + ".exponent");
    double s = j.contains("scale")
                   ? want_number(j["scale"], origin, where + ".scale")
                   : 1.0;
    try {
      f = kind == "power" ? Valuation::power(p, s)
                          : Valuation::inverted_power(p, s);
    } catch (const std::exception& e) {
      fail(origin, where + ": " + e.what());
    }
  } else if (kind == "capped-linear") {
    if (!j.contains("slope") || !j.contains("cap"))
      fail(origin, where + " needs \"slope\" and \"cap\"");
    try {
      f = Valuation::capped_linear(
          want_number(j["slope"], origin, where + ".slope"),
          want_number(j["cap"], origin, where + ".cap"));
    } catch (const std::exception& e) {
      fail(origin, where + ": " + e.what());
    }
  } else {
    fail(origin, where + ": unknown kind \"" + kind + "\"");
  }

  if (!j.contains("lipschitz"))
    fail(origin, where + " is missing the \"lipschitz\" constant");
  f.lipschitz = want_number(j["lipschitz"], origin, where + ".lipschitz");
  try {
    validate_valuation(f);
  } catch (const std::exception& e) {
    fail(origin, where + ": " + e.what());
  }
  return f;
}

const char* kind_name(Valuation::Kind kind) {
  switch (kind) {
    case Valuation::Kind::PiecewiseLinear: return "piecewise-linear";
    case Valuation::Kind::Power: return "power";
    case Valuation::Kind::CappedLinear: return "capped-linear";
    case Valuation::Kind::InvertedPower: return "inverted-power";
  }
  return "";
}

void append_lottery(std::string& out, const Lottery& lottery,
                    const std::string& indent) {
  out += "{\n" + indent + "  \"support\": [";
  for (std::size_t s = 0; s < lottery.support.size(); ++s) {
    const LotteryEntry& entry = lottery.support[s];
    out += s ? ",\n" : "\n";
    out += indent + "    {\n";
    out += indent + "      \"probability\": " + fmt12(entry.probability) +
           ",\n";
    out += indent + "      \"allocation\": [";
    for (std::size_t i = 0; i < entry.outcome.x.size(); ++i) {
      out += i ? "," : "";
      out += "\n" + indent + "        [";
      for (std::size_t q = 0; q < entry.outcome.x[i].size(); ++q) {
        if (q) out += ", ";
        out += fmt12(entry.outcome.x[i][q]);
      }
      out += "]";
    }
    out += "\n" + indent + "      ]\n";
    out += indent + "    }";
  }
  out += lottery.support.empty() ? "]\n" : "\n" + indent + "  ]\n";
  out += indent + "}";
}

}  // namespace

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError(path + ": cannot open for reading");
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error(path + ": cannot open for writing");
  out << content;
  if (!out) throw std::runtime_error(path + ": write failed");
}

Instance parse_instance_text(const std::string& text,
                             const std::string& origin) {
  json j = parse_json(text, origin);
  if (!j.is_object()) fail(origin, "top level must be an object");
  for (const char* key : {"agents", "items", "valuations"})
    if (!j.contains(key))
      fail(origin, std::string("missing \"") + key + "\"");

  Instance inst;
  inst.n = want_count(j["agents"], origin, "\"agents\"");
  inst.m = want_count(j["items"], origin, "\"items\"");
  const json& rows = j["valuations"];
  if (!rows.is_array() || static_cast<int>(rows.size()) != inst.n)
    fail(origin, "\"valuations\" must be an array of `agents` rows");
  for (int i = 0; i < inst.n; ++i) {
    const json& row = rows[i];
    if (!row.is_array() || static_cast<int>(row.size()) != inst.m)
      fail(origin, "valuations[" + std::to_string(i) +
                       "] must be an array of `items` curves");
    std::vector<Valuation> curves;
    for (int q = 0; q < inst.m; ++q)
      curves.push_back(parse_valuation(
          row[q], origin,
          "valuations[" + std::to_string(i) + "][" + std::to_string(q) + "]"));
    inst.valuations.push_back(std::move(curves));
  }
  inst.validate();
  return inst;
}

Instance parse_instance(const std::string& path) {
  return parse_instance_text(read_text_file(path), path);
}

std::string serialize_instance(const Instance& instance) {
  json rows = json::array();
  for (int i = 0; i < instance.n; ++i) {
    json row = json::array();
    for (int q = 0; q < instance.m; ++q) {
      const Valuation& f = instance.val(i, q);
      json c;
      c["kind"] = kind_name(f.kind);
      c["lipschitz"] = f.lipschitz;
      switch (f.kind) {
        case Valuation::Kind::PiecewiseLinear: {
          json pts = json::array();
          for (const auto& [z, v] : f.points) pts.push_back({z, v});
          c["points"] = std::move(pts);
          break;
        }
        case Valuation::Kind::Power:
        case Valuation::Kind::InvertedPower:
          c["exponent"] = f.exponent;
          c["scale"] = f.scale;
          break;
        case Valuation::Kind::CappedLinear:
          c["slope"] = f.slope;
          c["cap"] = f.cap;
          break;
      }
      row.push_back(std::move(c));
    }
    rows.push_back(std::move(row));
  }
  json j;
  j["agents"] = instance.n;
  j["items"] = instance.m;
  j["valuations"] = std::move(rows);
  return j.dump(2) + "\n";
}

Lottery parse_lottery_text(const std::string& text,
                           const std::string& origin) {
  json j = parse_json(text, origin);
  if (!j.is_object() || !j.contains("support") || !j["support"].is_array())
    fail(origin, "top level must be {\"support\": [...]}");

  Lottery lottery;
  for (std::size_t s = 0; s < j["support"].size(); ++s) {
    const json& je = j["support"][s];
    std::string where = "support[" + std::to_string(s) + "]";
    if (!je.is_object() || !je.contains("probability") ||
        !je.contains("allocation"))
      fail(origin, where + " needs \"probability\" and \"allocation\"");
    LotteryEntry entry;
    entry.probability =
        want_number(je["probability"], origin, where + ".probability");
    const json& alloc = je["allocation"];
    if (!alloc.is_array() || alloc.empty())
      fail(origin, where + ".allocation must be a non-empty matrix");
    for (std::size_t i = 0; i < alloc.size(); ++i) {
      const json& arow = alloc[i];
      std::string at = where + ".allocation[" + std::to_string(i) + "]";
      if (!arow.is_array() || arow.empty() ||
          (i > 0 && arow.size() != alloc[0].size()))
        fail(origin, at + " must match the first row's length");
      std::vector<double> xr;
      for (std::size_t q = 0; q < arow.size(); ++q)
        xr.push_back(
            want_number(arow[q], origin, at + "[" + std::to_string(q) + "]"));
      entry.outcome.x.push_back(std::move(xr));
    }
    if (!lottery.support.empty() &&
        (entry.outcome.x.size() != lottery.support[0].outcome.x.size() ||
         entry.outcome.x[0].size() !=
             lottery.support[0].outcome.x[0].size()))
      fail(origin, where + ".allocation shape differs from support[0]");
    lottery.support.push_back(std::move(entry));
  }
  return lottery;
}

Lottery parse_lottery(const std::string& path) {
  return parse_lottery_text(read_text_file(path), path);
}

std::string serialize_lottery(const Lottery& lottery) {
  std::string out;
  append_lottery(out, lottery, "");
  out += "\n";
  return out;
}

std::string serialize_flow(const FlowGraph& graph,
                           const std::vector<double>& flow) {
  std::string out = "[";
  bool first = true;
  for (std::size_t e = 0; e < graph.edges.size() && e < flow.size(); ++e) {
    if (flow[e] == 0.0) continue;
    const FlowEdge& edge = graph.edges[e];
    out += first ? "\n" : ",\n";
    first = false;
    out += "  {\"item\": " + std::to_string(edge.item) +
           ", \"column\": " + std::to_string(edge.column) +
           ", \"entry_row\": " + std::to_string(edge.entry_row) +
           ", \"pieces\": " + std::to_string(edge.pieces) +
           ", \"probability\": " + fmt12(flow[e]) + "}";
  }
  out += first ? "]\n" : "\n]\n";
  return out;
}

std::string serialize_report(const ExAnteReport& report) {
  std::string out = "{\n  \"check\": \"ex-ante-envy-free\",\n";
  out += std::string("  \"pass\": ") + (report.envy_free ? "true" : "false") +
         ",\n";
  out += "  \"worst_margin\": " + fmt12(report.worst_margin) + ",\n";
  out += "  \"violations\": [";
  for (std::size_t v = 0; v < report.violations.size(); ++v) {
    const EnvyWitness& w = report.violations[v];
    out += v ? ",\n" : "\n";
    out += "    {\"envious\": " + std::to_string(w.envious) +
           ", \"envied\": " + std::to_string(w.envied) +
           ", \"own\": " + fmt12(w.own) + ", \"other\": " + fmt12(w.other) +
           "}";
  }
  out += report.violations.empty() ? "]\n" : "\n  ]\n";
  out += "}\n";
  return out;
}

std::string serialize_report(const ExPostReport& report, ExPostCheck what) {
  const char* name = what == ExPostCheck::Feasible ? "ex-post-feasible"
                     : what == ExPostCheck::EnvyFree
                         ? "ex-post-envy-free"
                         : "ex-post-proportional";
  std::string out = std::string("{\n  \"check\": \"") + name + "\",\n";
  out += std::string("  \"pass\": ") + (report.pass ? "true" : "false") +
         ",\n";
  out += "  \"worst_margin\": " + fmt12(report.worst_margin) + ",\n";
  out += "  \"violations\": [";
  for (std::size_t v = 0; v < report.violations.size(); ++v) {
    const ExPostViolation& w = report.violations[v];
    out += v ? ",\n" : "\n";
    out += "    {\"support_index\": " + std::to_string(w.support_index) +
           ", \"margin\": " + fmt12(w.margin) + ", \"what\": \"" +
           escape(w.what) + "\"}";
  }
  out += report.violations.empty() ? "]\n" : "\n  ]\n";
  out += "}\n";
  return out;
}

namespace {

std::string number_list(const std::vector<double>& vals) {
  std::string out = "[";
  for (std::size_t i = 0; i < vals.size(); ++i) {
    if (i) out += ", ";
    out += fmt12(vals[i]);
  }
  return out + "]";
}

}  // namespace

std::string serialize_report(const ParetoReport& report) {
  std::string out = "{\n  \"check\": \"eps-pareto\",\n";
  out += std::string("  \"pass\": ") +
         (report.eps_pareto ? "true" : "false") + ",\n";
  out += "  \"margin\": " + fmt12(report.margin) + ",\n";
  out += "  \"base_utilities\": " + number_list(report.base_utilities) + ",\n";
  out += "  \"dominator_utilities\": " +
         number_list(report.dominator_utilities) + ",\n";
  out += "  \"dominator\": ";
  if (report.dominator.support.empty())
    out += "null";
  else
    append_lottery(out, report.dominator, "  ");
  out += ",\n  \"note\": \"" + escape(report.note) + "\"\n}\n";
  return out;
}

std::string serialize_report(const AuditReport& report) {
  std::string out = "{\n  \"check\": \"adversary-audit\",\n";
  out += "  \"x1\": " + fmt12(report.x1) + ",\n";
  out += "  \"x2\": " + fmt12(report.x1 + report.epsilon) + ",\n";
  out += "  \"epsilon\": " + fmt12(report.epsilon) + ",\n";
  out += std::string("  \"defeated\": ") +
         (report.defeated ? "true" : "false") + ",\n";
  out += "  \"defeating_instance\": ";
  out += report.defeated ? "\"" + escape(report.defeating_instance) + "\""
                         : "null";
  out += ",\n  \"dominator\": ";
  if (report.dominator.support.empty())
    out += "null";
  else
    append_lottery(out, report.dominator, "  ");
  out += ",\n  \"checks\": [";
  for (std::size_t c = 0; c < report.checks.size(); ++c) {
    const AuditCheck& chk = report.checks[c];
    out += c ? ",\n" : "\n";
    out += "    {\"name\": \"" + escape(chk.name) + "\", \"pass\": " +
           (chk.pass ? "true" : "false") + ", \"value\": " + fmt12(chk.value) +
           ", \"note\": \"" + escape(chk.note) + "\"}";
  }
  out += report.checks.empty() ? "]\n" : "\n  ]\n";
  out += "}\n";
  return out;
}

std::string frontier_csv(const FrontierData& data,
                         const std::vector<std::string>& lottery_refs) {
  if (lottery_refs.size() != data.lottery_points.size())
    throw ConfigError("one lottery file reference per frontier point");
  std::size_t n =
      data.lottery_points.empty() ? 0 : data.lottery_points[0].weights.size();
  std::string out;
  for (std::size_t i = 0; i < n; ++i)
    out += "w" + std::to_string(i + 1) + ",";
  for (std::size_t i = 0; i < n; ++i)
    out += "u" + std::to_string(i + 1) + ",";
  out += "welfare,lottery\n";
  for (std::size_t p = 0; p < data.lottery_points.size(); ++p) {
    const FrontierPoint& pt = data.lottery_points[p];
    for (double w : pt.weights) out += fmt12(w) + ",";
    for (double u : pt.utilities) out += fmt12(u) + ",";
    out += fmt12(pt.welfare) + "," + lottery_refs[p] + "\n";
  }
  return out;
}

std::string deterministic_csv(const FrontierData& data) {
  std::size_t n = data.deterministic_points.empty()
                      ? 0
                      : data.deterministic_points[0].utilities.size();
  std::string out;
  for (std::size_t i = 0; i < n; ++i) {
    if (i) out += ",";
    out += "u" + std::to_string(i + 1);
  }
  out += ",welfare\n";
  for (const FrontierPoint& pt : data.deterministic_points) {
    for (double u : pt.utilities) out += fmt12(u) + ",";
    out += fmt12(pt.welfare) + "\n";
  }
  return out;
}

}  // namespace fairlot
