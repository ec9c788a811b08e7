#include "report.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <vector>

namespace ratetol::cli {

namespace {

std::string scalar_text(const Report& v) {
  if (v.is_number()) return format_number(v.get<double>());
  if (v.is_string()) return v.get<std::string>();
  if (v.is_boolean()) return v.get<bool>() ? "true" : "false";
  if (v.is_null()) return "-";
  return v.dump();
}

bool is_scalar(const Report& v) { return !v.is_object() && !v.is_array(); }

bool is_table(const Report& v) {
  if (!v.is_array() || v.empty()) return false;
  return std::all_of(v.begin(), v.end(), [](const Report& row) {
    if (!row.is_object()) return false;
    return std::all_of(row.begin(), row.end(), [](const Report& c) { return is_scalar(c); });
  });
}

void text_table(const Report& rows, const std::string& indent, std::string& out) {
  std::vector<std::string> keys;
  for (const auto& row : rows) {
    for (auto it = row.begin(); it != row.end(); ++it) {
      if (std::find(keys.begin(), keys.end(), it.key()) == keys.end()) keys.push_back(it.key());
    }
  }
  std::vector<std::vector<std::string>> cells;
  cells.push_back(keys);
  for (const auto& row : rows) {
    std::vector<std::string> line;
    for (const auto& k : keys) line.push_back(row.contains(k) ? scalar_text(row[k]) : "");
    cells.push_back(std::move(line));
  }
  std::vector<std::size_t> width(keys.size(), 0);
  for (const auto& line : cells) {
    for (std::size_t c = 0; c < line.size(); ++c) width[c] = std::max(width[c], line[c].size());
  }
  for (const auto& line : cells) {
    std::string text = indent;
    for (std::size_t c = 0; c < line.size(); ++c) {
      text += line[c];
      if (c + 1 < line.size()) text += std::string(width[c] - line[c].size() + 2, ' ');
    }
    out += text + "\n";
  }
}

void text_node(const Report& node, const std::string& indent, std::string& out) {
  for (auto it = node.begin(); it != node.end(); ++it) {
    const Report& v = it.value();
    if (is_scalar(v)) {
      out += indent + it.key() + ": " + scalar_text(v) + "\n";
    } else if (v.is_array() && std::all_of(v.begin(), v.end(), is_scalar)) {
      std::string line = indent + it.key() + ":";
      for (const auto& x : v) line += " " + scalar_text(x);
      out += line + "\n";
    } else if (is_table(v)) {
      out += indent + it.key() + ":\n";
      text_table(v, indent + "  ", out);
    } else if (v.is_object()) {
      out += indent + it.key() + ":\n";
      text_node(v, indent + "  ", out);
    } else {
      out += indent + it.key() + ":\n";
      for (std::size_t k = 0; k < v.size(); ++k) {
        Report wrapped;
        wrapped[std::to_string(k)] = v[k];
        text_node(wrapped, indent + "  ", out);
      }
    }
  }
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string q = "\"";
  for (char c : s) {
    if (c == '"') q += '"';
    q += c;
  }
  return q + "\"";
}

void csv_node(const Report& v, const std::string& path, std::string& out) {
  if (v.is_object()) {
    for (auto it = v.begin(); it != v.end(); ++it) {
      csv_node(it.value(), path.empty() ? it.key() : path + "." + it.key(), out);
    }
  } else if (v.is_array()) {
    for (std::size_t k = 0; k < v.size(); ++k) {
      csv_node(v[k], path + "[" + std::to_string(k) + "]", out);
    }
  } else {
    out += csv_field(path) + "," + csv_field(scalar_text(v)) + "\n";
  }
}

}  // namespace

std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v < 0 ? "-inf" : "inf";
  if (v == 0.0) return "0";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 12);
  return std::string(buf, res.ptr);
}

Report number(double v) {
  if (std::isfinite(v)) return v;
  return format_number(v);
}

Report bits(const ExtendedBits& v) {
  if (v.is_negative_infinity()) return "-inf";
  return v.value();
}

std::string render_text(const Report& r) {
  std::string out;
  text_node(r, "", out);
  return out;
}

std::string render_csv(const Report& r) {
  std::string out = "field,value\n";
  csv_node(r, "", out);
  return out;
}

std::string render_json(const Report& r) { return r.dump(2) + "\n"; }

std::string render(const Report& r, Format f) {
  switch (f) {
    case Format::kText:
      return render_text(r);
    case Format::kCsv:
      return render_csv(r);
    case Format::kJson:
      return render_json(r);
  }
  return {};
}

}  // namespace ratetol::cli
