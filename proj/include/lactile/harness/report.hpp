#pragma once

// Report rows, pass/fail checks, and their CSV / JSON / SVG renderings. No
// timing or host data reaches these files, so equal inputs give equal bytes.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "lactile/error.hpp"

namespace lactile::harness {

using Json = nlohmann::ordered_json;

inline std::string fmt_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

struct ReportRow {
  std::string experiment;
  std::string id;
  std::uint64_t seed = 0;
  int m = 0;
  double l1 = 0.0;      // ||f||_1, equal to |F| for indicators
  double linf = 0.0;    // ||f||_inf
  double lambda = 0.0;
  double weak = 0.0;    // weak L^1 norm W of the measured maximal function
  std::vector<std::pair<std::string, double>> values;
  double runtime = 0.0;  // seconds; printed, never serialized

  double value(const std::string& key) const {
    for (const auto& [k, v] : values) {
      if (k == key) return v;
    }
    throw Error("ReportRow: no column " + key);
  }
  void set(const std::string& key, double v) { values.emplace_back(key, v); }
};

struct Check {
  std::string name;
  double value = 0.0;
  double limit = 0.0;
  std::string relation;  // "<=", ">=", "=="
  bool pass = false;
};

inline Check check_le(std::string name, double value, double limit) {
  return {std::move(name), value, limit, "<=", value <= limit};
}
inline Check check_ge(std::string name, double value, double limit) {
  return {std::move(name), value, limit, ">=", value >= limit};
}
inline Check check_true(std::string name, bool ok) { return {std::move(name), ok ? 1.0 : 0.0, 1.0, "==", ok}; }

struct Series {
  std::string name;
  std::vector<std::pair<double, double>> points;
};

struct Plot {
  std::string title;
  std::string x_label;
  std::string y_label;
  std::vector<Series> series;
};

struct RunResult {
  std::string command;
  Json config;
  std::vector<ReportRow> rows;
  std::vector<Check> checks;
  Json summary = Json::object();
  Plot plot;

  bool passed() const {
    return std::all_of(checks.begin(), checks.end(), [](const Check& c) { return c.pass; });
  }
};

/// Columns are the fixed fields followed by every value key in order of first appearance; missing cells stay empty.
inline std::string to_csv(const std::vector<ReportRow>& rows) {
  std::vector<std::string> keys;
  for (const auto& r : rows) {
    for (const auto& [k, v] : r.values) {
      if (std::find(keys.begin(), keys.end(), k) == keys.end()) keys.push_back(k);
    }
  }
  std::ostringstream os;
  os << "experiment,id,seed,m,l1,linf,lambda,weak";
  for (const auto& k : keys) os << ',' << k;
  os << '\n';
  for (const auto& r : rows) {
    os << r.experiment << ',' << r.id << ',' << r.seed << ',' << r.m << ',' << fmt_number(r.l1) << ','
       << fmt_number(r.linf) << ',' << fmt_number(r.lambda) << ',' << fmt_number(r.weak);
    for (const auto& k : keys) {
      os << ',';
      for (const auto& [rk, v] : r.values) {
        if (rk == k) {
          os << fmt_number(v);
          break;
        }
      }
    }
    os << '\n';
  }
  return os.str();
}

inline std::string checks_csv(const std::vector<Check>& checks) {
  std::ostringstream os;
  os << "check,value,relation,limit,pass\n";
  for (const auto& c : checks) {
    os << c.name << ',' << fmt_number(c.value) << ',' << c.relation << ',' << fmt_number(c.limit) << ','
       << (c.pass ? "pass" : "fail") << '\n';
  }
  return os.str();
}

inline Json number_json(double v) {
  if (std::isfinite(v)) return v;
  return fmt_number(v);
}

inline Json to_json(const RunResult& r) {
  Json j;
  j["schema"] = 1;
  j["command"] = r.command;
  j["config"] = r.config;
  j["passed"] = r.passed();
  Json checks = Json::array();
  for (const auto& c : r.checks) {
    checks.push_back({{"name", c.name}, {"value", number_json(c.value)}, {"relation", c.relation},
                      {"limit", number_json(c.limit)}, {"pass", c.pass}});
  }
  j["checks"] = checks;
  j["summary"] = r.summary;
  Json rows = Json::array();
  for (const auto& row : r.rows) {
    Json o;
    o["experiment"] = row.experiment;
    o["id"] = row.id;
    o["seed"] = row.seed;
    o["m"] = row.m;
    o["l1"] = number_json(row.l1);
    o["linf"] = number_json(row.linf);
    o["lambda"] = number_json(row.lambda);
    o["weak"] = number_json(row.weak);
    Json vals = Json::object();
    for (const auto& [k, v] : row.values) vals[k] = number_json(v);
    o["values"] = vals;
    rows.push_back(o);
  }
  j["rows"] = rows;
  return j;
}

/// Line plot with linear axes, one polyline and marker set per series.
inline std::string to_svg(const Plot& plot) {
  const double w = 640.0, h = 420.0, left = 70.0, right = 20.0, top = 40.0, bottom = 50.0;
  double x0 = std::numeric_limits<double>::infinity(), x1 = -x0, y0 = 0.0, y1 = -x0;
  for (const auto& s : plot.series) {
    for (const auto& [x, y] : s.points) {
      if (!std::isfinite(x) || !std::isfinite(y)) continue;
      x0 = std::min(x0, x);
      x1 = std::max(x1, x);
      y0 = std::min(y0, y);
      y1 = std::max(y1, y);
    }
  }
  if (!(x0 < x1)) {
    x0 = std::isfinite(x0) ? x0 - 1.0 : 0.0;
    x1 = x0 + 2.0;
  }
  if (!(y0 < y1)) y1 = y0 + 1.0;
  auto px = [&](double x) { return left + (x - x0) / (x1 - x0) * (w - left - right); };
  auto py = [&](double y) { return h - bottom - (y - y0) / (y1 - y0) * (h - top - bottom); };
  static const char* colors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"};

  std::ostringstream os;
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << w << "\" height=\"" << h << "\" viewBox=\"0 0 " << w
     << ' ' << h << "\">\n";
  os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  os << "<text x=\"" << w / 2 << "\" y=\"22\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"15\">"
     << plot.title << "</text>\n";
  os << "<line x1=\"" << left << "\" y1=\"" << h - bottom << "\" x2=\"" << w - right << "\" y2=\"" << h - bottom
     << "\" stroke=\"black\"/>\n";
  os << "<line x1=\"" << left << "\" y1=\"" << top << "\" x2=\"" << left << "\" y2=\"" << h - bottom
     << "\" stroke=\"black\"/>\n";
  for (int t = 0; t <= 4; ++t) {
    const double xv = x0 + (x1 - x0) * t / 4.0;
    const double yv = y0 + (y1 - y0) * t / 4.0;
    os << "<text x=\"" << px(xv) << "\" y=\"" << h - bottom + 18
       << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"11\">" << fmt_number(xv) << "</text>\n";
    os << "<text x=\"" << left - 6 << "\" y=\"" << py(yv) + 4
       << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"11\">" << fmt_number(yv) << "</text>\n";
  }
  os << "<text x=\"" << (left + w - right) / 2 << "\" y=\"" << h - 10
     << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\">" << plot.x_label << "</text>\n";
  os << "<text x=\"16\" y=\"" << (top + h - bottom) / 2 << "\" transform=\"rotate(-90 16 " << (top + h - bottom) / 2
     << ")\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\">" << plot.y_label << "</text>\n";
  for (std::size_t s = 0; s < plot.series.size(); ++s) {
    const char* color = colors[s % 6];
    auto pts = plot.series[s].points;
    std::sort(pts.begin(), pts.end());
    os << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\" points=\"";
    for (const auto& [x, y] : pts) {
      if (std::isfinite(x) && std::isfinite(y)) os << fmt_number(px(x)) << ',' << fmt_number(py(y)) << ' ';
    }
    os << "\"/>\n";
    for (const auto& [x, y] : pts) {
      if (!std::isfinite(x) || !std::isfinite(y)) continue;
      os << "<circle cx=\"" << fmt_number(px(x)) << "\" cy=\"" << fmt_number(py(y)) << "\" r=\"3\" fill=\"" << color
         << "\"/>\n";
    }
    os << "<text x=\"" << w - right - 4 << "\" y=\"" << top + 14 * static_cast<double>(s + 1)
       << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"11\" fill=\"" << color << "\">"
       << plot.series[s].name << "</text>\n";
  }
  os << "</svg>\n";
  return os.str();
}

inline void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot write " + path.string());
  out << text;
  if (!out) throw ConfigError("write failed for " + path.string());
}

/// Writes <dir>/<command>.csv, <command>_checks.csv, <command>.json and, on request, <command>.svg.
inline void write_outputs(const RunResult& r, const std::filesystem::path& dir, bool svg) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw ConfigError("cannot create output directory " + dir.string());
  write_text(dir / (r.command + ".csv"), to_csv(r.rows));
  write_text(dir / (r.command + "_checks.csv"), checks_csv(r.checks));
  write_text(dir / (r.command + ".json"), to_json(r).dump(2) + "\n");
  if (svg && !r.plot.series.empty()) write_text(dir / (r.command + ".svg"), to_svg(r.plot));
}

}  // namespace lactile::harness
