#include "csv_io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <system_error>
#include <unistd.h>

#include "mcvmd/errors.hpp"

namespace mcvmd::io {

using Eigen::VectorXd;

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

std::vector<std::string_view> split_fields(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  for (;;) {
    const auto comma = line.find(',', start);
    out.push_back(trim(line.substr(start, comma - start)));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

[[noreturn]] void fail(const std::string& source, std::size_t row, std::size_t col, const std::string& what) {
  std::ostringstream os;
  os << source << ": row " << row;
  if (col > 0) os << ", column " << col;
  os << ": " << what;
  throw InputError(os.str());
}

double parse_number(std::string_view field, const std::string& source, std::size_t row, std::size_t col) {
  if (field == "nan" || field == "NaN") return std::numeric_limits<double>::quiet_NaN();
  double v = 0;
  const auto* first = field.data();
  const auto* last = field.data() + field.size();
  if (!field.empty() && *first == '+') ++first;
  const auto [ptr, ec] = std::from_chars(first, last, v);
  if (field.empty() || ec != std::errc() || ptr != last) {
    fail(source, row, col, "cannot parse '" + std::string(field) + "' as a number");
  }
  return v;
}

}  // namespace

std::optional<std::size_t> CsvTable::find(std::string_view name) const {
  for (std::size_t c = 0; c < header.size(); ++c) {
    if (header[c] == name) return c;
  }
  return std::nullopt;
}

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

CsvTable parse_csv(std::string_view text, const std::string& source) {
  CsvTable t;
  std::size_t row = 0, pos = 0;
  bool have_header = false;
  while (pos <= text.size()) {
    const auto nl = text.find('\n', pos);
    const auto line = text.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
    pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
    ++row;
    if (trim(line).empty()) continue;
    const auto fields = split_fields(line);
    if (!have_header) {
      std::string_view first = fields.front();
      if (row == 1 && first.starts_with("\xEF\xBB\xBF")) first.remove_prefix(3);
      for (std::size_t c = 0; c < fields.size(); ++c) {
        std::string name(c == 0 ? first : fields[c]);
        if (name.empty()) fail(source, row, c + 1, "empty column name");
        if (t.find(name)) fail(source, row, c + 1, "duplicate column '" + name + "'");
        t.header.push_back(std::move(name));
      }
      t.columns.resize(t.header.size());
      have_header = true;
      continue;
    }
    if (fields.size() != t.header.size()) {
      fail(source, row, 0,
           "expected " + std::to_string(t.header.size()) + " fields, found " + std::to_string(fields.size()));
    }
    for (std::size_t c = 0; c < fields.size(); ++c) t.columns[c].push_back(parse_number(fields[c], source, row, c + 1));
  }
  if (!have_header) throw InputError(source + ": no header row");
  if (t.rows() == 0) throw InputError(source + ": no data rows");
  return t;
}

CsvTable read_csv(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open '" + path.string() + "' for reading");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_csv(ss.str(), path.string());
}

SectionColumns parse_section_map(std::string_view spec) {
  SectionColumns out;
  spec = trim(spec);
  if (spec.empty()) return out;
  for (auto item : split_fields(spec)) {
    const auto colon = item.find(':');
    if (colon == std::string_view::npos || colon == 0 || colon + 1 == item.size()) {
      throw InputError("section mapping '" + std::string(item) + "' must look like xcol:ycol");
    }
    out.emplace_back(std::string(trim(item.substr(0, colon))), std::string(trim(item.substr(colon + 1))));
  }
  return out;
}

MultiSectionRecordd record_from_table(const CsvTable& table, std::optional<double> sample_rate,
                                      const SectionColumns& mapping) {
  SectionColumns cols = mapping;
  if (cols.empty()) {
    for (int i = 1;; ++i) {
      const std::string x = "x" + std::to_string(i), y = "y" + std::to_string(i);
      const bool hx = table.find(x).has_value(), hy = table.find(y).has_value();
      if (!hx && !hy) break;
      if (hx != hy) throw InputError("column '" + (hx ? y : x) + "' is missing (sections need x<i> and y<i>)");
      cols.emplace_back(x, y);
    }
    if (cols.empty()) throw InputError("no section columns found (expected x1, y1, x2, y2, ...)");
  }

  const Index n = static_cast<Index>(table.rows());
  double fs = 0;
  if (sample_rate) {
    fs = *sample_rate;
  } else {
    const auto tc = table.find("t");
    if (!tc) throw InputError("no 't' column; pass the sample rate explicitly");
    const auto& t = table.columns[*tc];
    if (n < 2) throw InputError("need at least two rows to infer the sample rate");
    const double dt = (t.back() - t.front()) / double(n - 1);
    if (!(dt > 0) || !std::isfinite(dt)) throw InputError("column 't' must increase");
    for (Index k = 1; k < n; ++k) {
      if (std::abs((t[k] - t[k - 1]) - dt) > 1e-6 * dt) {
        throw InputError("row " + std::to_string(k + 2) + ": column 't' is not uniformly spaced");
      }
    }
    fs = 1.0 / dt;
    if (std::abs(fs - std::round(fs)) < 1e-6 * fs) fs = std::round(fs);
  }

  std::vector<SectionProbes<double>> sections;
  std::vector<std::string> labels;
  for (std::size_t i = 0; i < cols.size(); ++i) {
    const auto xi = table.find(cols[i].first), yi = table.find(cols[i].second);
    if (!xi) throw InputError("column '" + cols[i].first + "' not found");
    if (!yi) throw InputError("column '" + cols[i].second + "' not found");
    const auto& xs = table.columns[*xi];
    const auto& ys = table.columns[*yi];
    for (Index k = 0; k < n; ++k) {
      if (!std::isfinite(xs[k])) {
        throw InputError("row " + std::to_string(k + 2) + ", column " + std::to_string(*xi + 1) + ": non-finite value");
      }
      if (!std::isfinite(ys[k])) {
        throw InputError("row " + std::to_string(k + 2) + ", column " + std::to_string(*yi + 1) + ": non-finite value");
      }
    }
    sections.push_back({RealSeriesd(Eigen::Map<const VectorXd>(xs.data(), n), fs),
                        RealSeriesd(Eigen::Map<const VectorXd>(ys.data(), n), fs)});
    labels.push_back("section" + std::to_string(i + 1));
  }
  return MultiSectionRecordd(std::move(sections), std::move(labels));
}

std::string table_to_csv(const std::vector<std::string>& header, const std::vector<const Vector<double>*>& columns) {
  std::string out;
  for (std::size_t c = 0; c < header.size(); ++c) out += (c ? "," : "") + header[c];
  out += '\n';
  const Index n = columns.empty() ? 0 : columns.front()->size();
  for (Index k = 0; k < n; ++k) {
    for (std::size_t c = 0; c < columns.size(); ++c) {
      if (c) out += ',';
      out += format_double((*columns[c])[k]);
    }
    out += '\n';
  }
  return out;
}

std::string record_to_csv(const MultiSectionRecordd& record) {
  const Index n = record.length();
  VectorXd t(n);
  for (Index k = 0; k < n; ++k) t[k] = double(k) / record.sample_rate();
  std::vector<std::string> header{"t"};
  std::vector<const Vector<double>*> cols{&t};
  for (std::size_t i = 0; i < record.section_count(); ++i) {
    header.push_back("x" + std::to_string(i + 1));
    header.push_back("y" + std::to_string(i + 1));
    cols.push_back(&record.section(i).x.samples());
    cols.push_back(&record.section(i).y.samples());
  }
  return table_to_csv(header, cols);
}

void write_file_atomic(const std::filesystem::path& path, std::string_view content) {
  namespace fs = std::filesystem;
  std::error_code ec;
  if (path.has_parent_path()) fs::create_directories(path.parent_path(), ec);
  auto tmp = path;
  tmp += ".tmp-" + std::to_string(::getpid());
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw InputError("cannot write '" + path.string() + "'");
    out.write(content.data(), std::streamsize(content.size()));
    if (!out) throw InputError("write to '" + path.string() + "' failed");
  }
  fs::rename(tmp, path, ec);
  if (ec) {
    fs::remove(tmp);
    throw InputError("cannot write '" + path.string() + "': " + ec.message());
  }
}

}  // namespace mcvmd::io
