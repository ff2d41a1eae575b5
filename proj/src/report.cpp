#include "prunefield/report.hpp"

#include "prunefield/checkpoint.hpp"
#include "prunefield/errors.hpp"

#include <charconv>
#include <sstream>
#include <string_view>

#include <nlohmann/json.hpp>

namespace prunefield {
namespace {

constexpr const char* kColumns[] = {"label", "strategy", "params", "size_bytes", "psnr",
                                    "mse", "sec_per_iter", "remaining_edge_pct"};
constexpr std::size_t kNumColumns = std::size(kColumns);

double parse_double(std::string_view s) {
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) {
    throw InvalidArgument("report: bad number '" + std::string(s) + "'");
  }
  return v;
}

std::size_t parse_count(std::string_view s) {
  std::size_t v = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) {
    throw InvalidArgument("report: bad count '" + std::string(s) + "'");
  }
  return v;
}

// Labels and strategies are plain identifiers, but quote anything that
// would break the row.
std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::string cur;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
        cur += '"';
        ++i;
      } else if (c == '"') {
        quoted = false;
      } else {
        cur += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      fields.push_back(std::move(cur));
      cur.clear();
    } else {
      cur += c;
    }
  }
  fields.push_back(std::move(cur));
  return fields;
}

std::string to_csv(const std::vector<ExperimentReport>& reports) {
  std::ostringstream os;
  for (std::size_t i = 0; i < kNumColumns; ++i) os << (i ? "," : "") << kColumns[i];
  os << '\n';
  for (const auto& r : reports) {
    os << csv_field(r.label) << ',' << csv_field(r.strategy) << ',' << r.params << ','
       << r.size_bytes << ',' << r.psnr.to_string() << ',' << format_double(r.mse) << ','
       << format_double(r.sec_per_iter) << ','
       << (r.remaining_edge_pct ? format_double(*r.remaining_edge_pct) : "") << '\n';
  }
  return os.str();
}

std::vector<ExperimentReport> from_csv(const std::string& text) {
  std::istringstream is(text);
  std::string line;
  if (!std::getline(is, line)) throw InvalidArgument("report: empty CSV");
  if (split_csv_line(line).size() != kNumColumns) throw InvalidArgument("report: bad CSV header");
  std::vector<ExperimentReport> out;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    const auto f = split_csv_line(line);
    if (f.size() != kNumColumns) throw InvalidArgument("report: bad CSV row '" + line + "'");
    ExperimentReport r;
    r.label = f[0];
    r.strategy = f[1];
    r.params = parse_count(f[2]);
    r.size_bytes = parse_count(f[3]);
    r.psnr = f[4] == "inf" ? Psnr::infinite() : Psnr::finite(parse_double(f[4]));
    r.mse = parse_double(f[5]);
    r.sec_per_iter = parse_double(f[6]);
    if (!f[7].empty()) r.remaining_edge_pct = parse_double(f[7]);
    out.push_back(std::move(r));
  }
  return out;
}

std::string to_json(const std::vector<ExperimentReport>& reports) {
  nlohmann::ordered_json rows = nlohmann::ordered_json::array();
  for (const auto& r : reports) {
    nlohmann::ordered_json j;
    j["label"] = r.label;
    j["strategy"] = r.strategy;
    j["params"] = r.params;
    j["size_bytes"] = r.size_bytes;
    j["psnr"] = r.psnr.is_infinite() ? nlohmann::ordered_json(nullptr)
                                     : nlohmann::ordered_json(r.psnr.db());
    j["psnr_infinite"] = r.psnr.is_infinite();
    j["mse"] = r.mse;
    j["sec_per_iter"] = r.sec_per_iter;
    j["remaining_edge_pct"] = r.remaining_edge_pct ? nlohmann::ordered_json(*r.remaining_edge_pct)
                                                   : nlohmann::ordered_json(nullptr);
    rows.push_back(std::move(j));
  }
  nlohmann::ordered_json doc;
  doc["schema"] = "prunefield-report-v1";
  doc["reports"] = std::move(rows);
  return doc.dump(2) + "\n";
}

std::vector<ExperimentReport> from_json(const std::string& text) {
  std::vector<ExperimentReport> out;
  try {
    const auto doc = nlohmann::json::parse(text);
    if (doc.at("schema") != "prunefield-report-v1") {
      throw InvalidArgument("report: unknown schema " + doc.at("schema").dump());
    }
    for (const auto& j : doc.at("reports")) {
      ExperimentReport r;
      r.label = j.at("label").get<std::string>();
      r.strategy = j.at("strategy").get<std::string>();
      r.params = j.at("params").get<std::size_t>();
      r.size_bytes = j.at("size_bytes").get<std::size_t>();
      r.psnr = j.at("psnr_infinite").get<bool>() ? Psnr::infinite()
                                                 : Psnr::finite(j.at("psnr").get<double>());
      r.mse = j.at("mse").get<double>();
      r.sec_per_iter = j.at("sec_per_iter").get<double>();
      if (!j.at("remaining_edge_pct").is_null()) {
        r.remaining_edge_pct = j.at("remaining_edge_pct").get<double>();
      }
      out.push_back(std::move(r));
    }
  } catch (const nlohmann::json::exception& e) {
    throw InvalidArgument(std::string("report: ") + e.what());
  }
  return out;
}

}  // namespace

std::string format_double(double v) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, ptr);
}

std::string format_report(const std::vector<ExperimentReport>& reports, ReportFormat format) {
  return format == ReportFormat::csv ? to_csv(reports) : to_json(reports);
}

std::vector<ExperimentReport> parse_report(const std::string& text, ReportFormat format) {
  return format == ReportFormat::csv ? from_csv(text) : from_json(text);
}

void emit_report(const std::vector<ExperimentReport>& reports, ReportFormat format,
                 const std::filesystem::path& path) {
  if (reports.empty()) throw InvalidArgument("emit_report: no reports");
  const std::string text = format_report(reports, format);
  write_file(path, std::span<const std::uint8_t>(
                       reinterpret_cast<const std::uint8_t*>(text.data()), text.size()));
}

}  // namespace prunefield
