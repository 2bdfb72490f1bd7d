#pragma once

// Result tables and their serializers. Bytes are canonical: numbers print as
// %.17g (round-trippable), row order is part of the table, and the metadata
// header carries no wall-clock fields, so identical config + seed yields
// identical files regardless of worker count or machine.

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

#include "cdu/common.hpp"
#include "cdu/version.hpp"

namespace cdu {

struct RunMeta {
  std::string config_hash;
  std::uint64_t seed = 0;
  std::string version = kVersion;
};

enum class ColType { Number, Text };

struct Column {
  std::string name;
  std::string unit;  // "1" for dimensionless
  ColType type = ColType::Number;
};

using Cell = std::variant<double, std::string>;

// Canonical float rendering: shortest-exact via %.17g, infinities as inf/-inf.
inline std::string format_number(double v) {
  if (std::isnan(v)) throw contract_error("format_number: NaN has no canonical form");
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

struct ResultTable {
  std::string schema_id;  // e.g. "cdu.tradeoff.v1"
  std::vector<Column> columns;
  std::vector<std::vector<Cell>> rows;
  RunMeta meta;

  void add_row(std::vector<Cell> row) {
    require(row.size() == columns.size(), "ResultTable: row width mismatch");
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (columns[i].type == ColType::Number) {
        require(std::holds_alternative<double>(row[i]), "ResultTable: expected number cell");
        require(!std::isnan(std::get<double>(row[i])), "ResultTable: NaN cell rejected");
      } else {
        require(std::holds_alternative<std::string>(row[i]), "ResultTable: expected text cell");
      }
    }
    rows.push_back(std::move(row));
  }
};

namespace detail {

inline std::string csv_escape(const std::string& s) {
  bool needs_quote = false;
  for (char c : s) {
    if (c == ',' || c == '"' || c == '\n' || c == '\r') {
      needs_quote = true;
      break;
    }
  }
  if (!needs_quote) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += "\"\"";
    else out += c;
  }
  out += "\"";
  return out;
}

inline std::string json_escape(const std::string& s) {
  std::string out;
  out.reserve(s.size() + 2);
  for (char c : s) {
    switch (c) {
      case '"': out += "\\\""; break;
      case '\\': out += "\\\\"; break;
      case '\n': out += "\\n"; break;
      case '\r': out += "\\r"; break;
      case '\t': out += "\\t"; break;
      default:
        if (static_cast<unsigned char>(c) < 0x20) {
          char buf[8];
          std::snprintf(buf, sizeof(buf), "\\u%04x", c);
          out += buf;
        } else {
          out += c;
        }
    }
  }
  return out;
}

inline std::string cell_csv(const Cell& cell) {
  if (std::holds_alternative<double>(cell)) return format_number(std::get<double>(cell));
  return csv_escape(std::get<std::string>(cell));
}

// JSON has no literal for infinities; they serialize as the strings
// "inf"/"-inf", mirroring the CSV tokens.
inline std::string cell_json(const Cell& cell) {
  if (std::holds_alternative<double>(cell)) {
    const double v = std::get<double>(cell);
    if (std::isinf(v)) return v > 0 ? "\"inf\"" : "\"-inf\"";
    return format_number(v);
  }
  return "\"" + json_escape(std::get<std::string>(cell)) + "\"";
}

}  // namespace detail

inline std::string to_csv(const ResultTable& t) {
  std::ostringstream out;
  out << "# schema: " << t.schema_id << '\n';
  out << "# config: " << t.meta.config_hash << '\n';
  out << "# seed: " << t.meta.seed << '\n';
  out << "# version: " << t.meta.version << '\n';
  for (std::size_t i = 0; i < t.columns.size(); ++i) {
    if (i) out << ',';
    out << detail::csv_escape(t.columns[i].name);
  }
  out << '\n';
  out << "# units:";
  for (std::size_t i = 0; i < t.columns.size(); ++i) {
    out << (i ? ',' : ' ') << t.columns[i].unit;
  }
  out << '\n';
  for (const auto& row : t.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (i) out << ',';
      out << detail::cell_csv(row[i]);
    }
    out << '\n';
  }
  return out.str();
}

inline std::string to_json(const ResultTable& t) {
  std::ostringstream out;
  out << "{\n";
  out << "  \"schema\": \"" << detail::json_escape(t.schema_id) << "\",\n";
  out << "  \"metadata\": {\n";
  out << "    \"config\": \"" << detail::json_escape(t.meta.config_hash) << "\",\n";
  out << "    \"seed\": " << t.meta.seed << ",\n";
  out << "    \"version\": \"" << detail::json_escape(t.meta.version) << "\"\n";
  out << "  },\n";
  out << "  \"columns\": [";
  for (std::size_t i = 0; i < t.columns.size(); ++i) {
    if (i) out << ", ";
    out << "{\"name\": \"" << detail::json_escape(t.columns[i].name) << "\", \"unit\": \""
        << detail::json_escape(t.columns[i].unit) << "\"}";
  }
  out << "],\n";
  out << "  \"rows\": [\n";
  for (std::size_t r = 0; r < t.rows.size(); ++r) {
    out << "    [";
    for (std::size_t i = 0; i < t.rows[r].size(); ++i) {
      if (i) out << ", ";
      out << detail::cell_json(t.rows[r][i]);
    }
    out << (r + 1 < t.rows.size() ? "],\n" : "]\n");
  }
  out << "  ]\n";
  out << "}\n";
  return out.str();
}

// ---------------------------------------------------------------------------
// SVG convenience rendering: a line/scatter chart over numeric series.
// Non-finite values break the polyline rather than plotting.

struct SvgSeries {
  std::string label;
  std::vector<double> xs;
  std::vector<double> ys;
  bool scatter = false;
};

struct SvgChart {
  std::string title;
  std::string x_label;
  std::string y_label;
  std::vector<SvgSeries> series;
  int width = 720;
  int height = 480;
};

namespace detail {

inline std::string svg_coord(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.2f", v);
  return buf;
}

inline std::string svg_tick_label(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.6g", v);
  return buf;
}

}  // namespace detail

inline std::string render_svg(const SvgChart& chart) {
  static const char* palette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd",
                                  "#ff7f0e", "#8c564b", "#17becf", "#7f7f7f"};
  const double ml = 72, mr = 24, mt = 40, mb = 56;
  const double pw = chart.width - ml - mr;
  const double ph = chart.height - mt - mb;

  double xmin = kInf, xmax = -kInf, ymin = kInf, ymax = -kInf;
  for (const auto& s : chart.series) {
    require(s.xs.size() == s.ys.size(), "render_svg: series length mismatch");
    for (std::size_t i = 0; i < s.xs.size(); ++i) {
      if (!std::isfinite(s.xs[i]) || !std::isfinite(s.ys[i])) continue;
      xmin = std::min(xmin, s.xs[i]);
      xmax = std::max(xmax, s.xs[i]);
      ymin = std::min(ymin, s.ys[i]);
      ymax = std::max(ymax, s.ys[i]);
    }
  }
  if (!(xmin <= xmax)) { xmin = 0; xmax = 1; }
  if (!(ymin <= ymax)) { ymin = 0; ymax = 1; }
  if (xmin == xmax) { xmin -= 0.5; xmax += 0.5; }
  if (ymin == ymax) { ymin -= 0.5; ymax += 0.5; }
  const double ypad = 0.05 * (ymax - ymin);
  ymin -= ypad;
  ymax += ypad;

  auto px = [&](double x) { return ml + (x - xmin) / (xmax - xmin) * pw; };
  auto py = [&](double y) { return mt + ph - (y - ymin) / (ymax - ymin) * ph; };

  std::ostringstream out;
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << chart.width << "\" height=\""
      << chart.height << "\" viewBox=\"0 0 " << chart.width << " " << chart.height << "\">\n";
  out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  out << "<text x=\"" << detail::svg_coord(ml + pw / 2) << "\" y=\"24\" text-anchor=\"middle\" "
      << "font-family=\"sans-serif\" font-size=\"15\">" << detail::json_escape(chart.title)
      << "</text>\n";

  const int nticks = 5;
  out << "<g font-family=\"sans-serif\" font-size=\"11\" fill=\"#333\">\n";
  for (int i = 0; i <= nticks; ++i) {
    const double tx = xmin + (xmax - xmin) * i / nticks;
    const double gx = px(tx);
    out << "<line x1=\"" << detail::svg_coord(gx) << "\" y1=\"" << detail::svg_coord(mt)
        << "\" x2=\"" << detail::svg_coord(gx) << "\" y2=\"" << detail::svg_coord(mt + ph)
        << "\" stroke=\"#ddd\"/>\n";
    out << "<text x=\"" << detail::svg_coord(gx) << "\" y=\"" << detail::svg_coord(mt + ph + 16)
        << "\" text-anchor=\"middle\">" << detail::svg_tick_label(tx) << "</text>\n";
    const double ty = ymin + (ymax - ymin) * i / nticks;
    const double gy = py(ty);
    out << "<line x1=\"" << detail::svg_coord(ml) << "\" y1=\"" << detail::svg_coord(gy)
        << "\" x2=\"" << detail::svg_coord(ml + pw) << "\" y2=\"" << detail::svg_coord(gy)
        << "\" stroke=\"#ddd\"/>\n";
    out << "<text x=\"" << detail::svg_coord(ml - 6) << "\" y=\"" << detail::svg_coord(gy + 4)
        << "\" text-anchor=\"end\">" << detail::svg_tick_label(ty) << "</text>\n";
  }
  out << "</g>\n";
  out << "<rect x=\"" << detail::svg_coord(ml) << "\" y=\"" << detail::svg_coord(mt)
      << "\" width=\"" << detail::svg_coord(pw) << "\" height=\"" << detail::svg_coord(ph)
      << "\" fill=\"none\" stroke=\"#333\"/>\n";
  out << "<text x=\"" << detail::svg_coord(ml + pw / 2) << "\" y=\""
      << detail::svg_coord(chart.height - 12.0)
      << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\">"
      << detail::json_escape(chart.x_label) << "</text>\n";
  out << "<text x=\"16\" y=\"" << detail::svg_coord(mt + ph / 2)
      << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\" "
      << "transform=\"rotate(-90 16 " << detail::svg_coord(mt + ph / 2) << ")\">"
      << detail::json_escape(chart.y_label) << "</text>\n";

  for (std::size_t si = 0; si < chart.series.size(); ++si) {
    const auto& s = chart.series[si];
    const char* color = palette[si % (sizeof(palette) / sizeof(palette[0]))];
    if (s.scatter) {
      for (std::size_t i = 0; i < s.xs.size(); ++i) {
        if (!std::isfinite(s.xs[i]) || !std::isfinite(s.ys[i])) continue;
        out << "<circle cx=\"" << detail::svg_coord(px(s.xs[i])) << "\" cy=\""
            << detail::svg_coord(py(s.ys[i])) << "\" r=\"2\" fill=\"" << color
            << "\" fill-opacity=\"0.45\"/>\n";
      }
    } else {
      std::string path;
      bool pen_down = false;
      for (std::size_t i = 0; i < s.xs.size(); ++i) {
        if (!std::isfinite(s.xs[i]) || !std::isfinite(s.ys[i])) {
          pen_down = false;
          continue;
        }
        path += pen_down ? " L " : (path.empty() ? "M " : " M ");
        path += detail::svg_coord(px(s.xs[i])) + " " + detail::svg_coord(py(s.ys[i]));
        pen_down = true;
      }
      if (!path.empty()) {
        out << "<path d=\"" << path << "\" fill=\"none\" stroke=\"" << color
            << "\" stroke-width=\"1.8\"/>\n";
      }
      for (std::size_t i = 0; i < s.xs.size(); ++i) {
        if (!std::isfinite(s.xs[i]) || !std::isfinite(s.ys[i])) continue;
        out << "<circle cx=\"" << detail::svg_coord(px(s.xs[i])) << "\" cy=\""
            << detail::svg_coord(py(s.ys[i])) << "\" r=\"3\" fill=\"" << color << "\"/>\n";
      }
    }
    const double lx = ml + pw - 150, ly = mt + 16 + 18.0 * static_cast<double>(si);
    out << "<rect x=\"" << detail::svg_coord(lx) << "\" y=\"" << detail::svg_coord(ly - 9)
        << "\" width=\"12\" height=\"12\" fill=\"" << color << "\"/>\n";
    out << "<text x=\"" << detail::svg_coord(lx + 18) << "\" y=\"" << detail::svg_coord(ly + 1)
        << "\" font-family=\"sans-serif\" font-size=\"11\">" << detail::json_escape(s.label)
        << "</text>\n";
  }
  out << "</svg>\n";
  return out.str();
}

inline void write_text_file(const std::filesystem::path& path, const std::string& bytes) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw config_error("cannot open output file '" + path.string() + "'");
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw config_error("failed writing output file '" + path.string() + "'");
}

}  // namespace cdu
