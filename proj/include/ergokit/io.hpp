#pragma once

// Artifact serialization: deterministic CSV/JSON formatting and direct SVG
// emission (no plotting dependency). Every double is rendered with %.17g so
// fixed-seed reruns are byte-identical.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "ergokit/entropy.hpp"
#include "ergokit/measures.hpp"
#include "ergokit/recurrence.hpp"

namespace ergokit {

using json = nlohmann::ordered_json;

inline std::string fmt_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  void add_row(std::vector<std::string> row) { rows.push_back(std::move(row)); }

  std::string to_string() const {
    std::string out;
    for (std::size_t i = 0; i < header.size(); ++i) {
      out += header[i];
      out += (i + 1 < header.size()) ? ',' : '\n';
    }
    for (const auto& row : rows)
      for (std::size_t i = 0; i < row.size(); ++i) {
        out += row[i];
        out += (i + 1 < row.size()) ? ',' : '\n';
      }
    return out;
  }

  void write(const std::filesystem::path& path) const {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw Error("cannot write " + path.string());
    f << to_string();
  }
};

inline void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw Error("cannot write " + path.string());
  f << text;
}

// --------------------------------------------------------------------------
// JSON forms

inline json point_to_json(const Point& p) {
  if (p.is_circle()) return json{{"num", p.circle().num}, {"den", p.circle().den}};
  const auto& s = p.symbolic();
  json j;
  j["word"] = *s.word;
  j["periodic"] = s.periodic;
  j["time"] = s.time;
  if (!s.periodic) j["window_lo"] = s.window_lo;
  return j;
}

inline json measure_to_json(const AtomicMeasure& mu) {
  json atoms = json::array(), weights = json::array();
  for (const auto& a : mu.atoms) atoms.push_back(point_to_json(a));
  for (double w : mu.weights) weights.push_back(w);
  return json{{"atoms", atoms}, {"weights", weights}};
}

inline json measure_to_json(const AnalyticMeasure& mu) {
  if (mu.kind == AnalyticMeasure::Kind::Bernoulli) return json{{"bernoulli", mu.p}};
  return json{{"markov", json{{"P", mu.P}, {"pi", mu.pi}}}};
}

inline json report_to_json(const EstimateReport& rep) {
  json rows = json::array();
  for (const auto& r : rep.per_scale)
    rows.push_back(json{{"epsilon", r.epsilon}, {"n", r.n}, {"raw", r.raw}});
  return json{{"value", rep.value},
              {"converged", rep.converged},
              {"method", rep.method},
              {"per_scale", rows}};
}

inline json profile_to_json(const RecurrenceProfile& prof) {
  json j;
  j["lower_rate"] = prof.lower_rate;
  j["upper_rate"] = prof.upper_rate;
  j["unreliable"] = prof.unreliable;
  j["not_found"] = prof.not_found;
  j["horizon"] = prof.horizon;
  return j;
}

inline CsvTable profile_to_csv(const RecurrenceProfile& prof) {
  CsvTable t;
  t.header = {"r", "tau", "found"};
  for (std::size_t i = 0; i < prof.radii.size(); ++i) {
    const bool found = prof.times[i] != kNotFound;
    t.add_row({fmt_double(prof.radii[i]), found ? std::to_string(prof.times[i]) : "",
               found ? "1" : "0"});
  }
  return t;
}

// --------------------------------------------------------------------------
// SVG scatter / line plots

struct PlotSeries {
  std::string label;
  std::vector<std::pair<double, double>> points;
  bool line = false;
};

// Minimal scatter plot with linear axes and automatic bounds.
inline std::string svg_plot(const std::vector<PlotSeries>& series, const std::string& x_label,
                            const std::string& y_label) {
  const int W = 640, H = 440, ML = 60, MB = 40, MT = 20, MR = 20;
  double x0 = 1e300, x1 = -1e300, y0 = 1e300, y1 = -1e300;
  for (const auto& s : series)
    for (auto [x, y] : s.points) {
      x0 = std::min(x0, x);
      x1 = std::max(x1, x);
      y0 = std::min(y0, y);
      y1 = std::max(y1, y);
    }
  if (x0 > x1) {
    x0 = 0;
    x1 = 1;
    y0 = 0;
    y1 = 1;
  }
  if (x1 - x0 < 1e-12) x1 = x0 + 1;
  if (y1 - y0 < 1e-12) y1 = y0 + 1;
  auto px = [&](double x) { return ML + (x - x0) / (x1 - x0) * (W - ML - MR); };
  auto py = [&](double y) { return H - MB - (y - y0) / (y1 - y0) * (H - MB - MT); };
  const char* colors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"};
  std::string svg = "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + std::to_string(W) +
                    "\" height=\"" + std::to_string(H) + "\">\n";
  svg += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  svg += "<line x1=\"" + fmt_double(ML) + "\" y1=\"" + fmt_double(H - MB) + "\" x2=\"" +
         fmt_double(W - MR) + "\" y2=\"" + fmt_double(H - MB) + "\" stroke=\"black\"/>\n";
  svg += "<line x1=\"" + fmt_double(ML) + "\" y1=\"" + fmt_double(MT) + "\" x2=\"" +
         fmt_double(ML) + "\" y2=\"" + fmt_double(H - MB) + "\" stroke=\"black\"/>\n";
  svg += "<text x=\"" + fmt_double(W / 2.0) + "\" y=\"" + fmt_double(H - 8.0) +
         "\" font-size=\"12\" text-anchor=\"middle\">" + x_label + "</text>\n";
  svg += "<text x=\"14\" y=\"" + fmt_double(H / 2.0) +
         "\" font-size=\"12\" text-anchor=\"middle\" transform=\"rotate(-90 14 " +
         fmt_double(H / 2.0) + ")\">" + y_label + "</text>\n";
  // axis extremes
  svg += "<text x=\"" + fmt_double(ML) + "\" y=\"" + fmt_double(H - MB + 14.0) +
         "\" font-size=\"10\">" + fmt_double(x0) + "</text>\n";
  svg += "<text x=\"" + fmt_double(W - MR) + "\" y=\"" + fmt_double(H - MB + 14.0) +
         "\" font-size=\"10\" text-anchor=\"end\">" + fmt_double(x1) + "</text>\n";
  svg += "<text x=\"" + fmt_double(ML - 4.0) + "\" y=\"" + fmt_double(H - MB) +
         "\" font-size=\"10\" text-anchor=\"end\">" + fmt_double(y0) + "</text>\n";
  svg += "<text x=\"" + fmt_double(ML - 4.0) + "\" y=\"" + fmt_double(MT + 4.0) +
         "\" font-size=\"10\" text-anchor=\"end\">" + fmt_double(y1) + "</text>\n";
  int ci = 0;
  for (const auto& s : series) {
    const std::string color = colors[ci % 6];
    if (s.line && s.points.size() > 1) {
      std::string pts;
      for (auto [x, y] : s.points) pts += fmt_double(px(x)) + "," + fmt_double(py(y)) + " ";
      svg += "<polyline fill=\"none\" stroke=\"" + color + "\" points=\"" + pts + "\"/>\n";
    }
    for (auto [x, y] : s.points)
      svg += "<circle cx=\"" + fmt_double(px(x)) + "\" cy=\"" + fmt_double(py(y)) +
             "\" r=\"2.5\" fill=\"" + color + "\"/>\n";
    svg += "<text x=\"" + fmt_double(W - MR - 4.0) + "\" y=\"" +
           fmt_double(MT + 14.0 * (ci + 1)) + "\" font-size=\"11\" text-anchor=\"end\" fill=\"" +
           color + "\">" + s.label + "</text>\n";
    ++ci;
  }
  svg += "</svg>\n";
  return svg;
}

}  // namespace ergokit
