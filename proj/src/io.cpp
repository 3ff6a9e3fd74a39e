#include "grassdict/io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>
#include <system_error>

#include "grassdict/errors.hpp"

namespace grassdict::io {

namespace {

struct Line {
  std::string_view text;
  std::size_t number;
};

std::vector<Line> split_lines(std::string_view text) {
  std::vector<Line> lines;
  std::size_t start = 0;
  std::size_t number = 1;
  while (start < text.size()) {
    std::size_t end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(start, end - start);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    lines.push_back({line, number++});
    start = end + 1;
  }
  return lines;
}

std::vector<std::string_view> split(std::string_view line, char sep) {
  std::vector<std::string_view> out;
  if (sep == ' ') {
    std::size_t i = 0;
    while (i < line.size()) {
      while (i < line.size() && (line[i] == ' ' || line[i] == '\t')) ++i;
      if (i >= line.size()) break;
      std::size_t j = i;
      while (j < line.size() && line[j] != ' ' && line[j] != '\t') ++j;
      out.push_back(line.substr(i, j - i));
      i = j;
    }
    return out;
  }
  std::size_t start = 0;
  while (true) {
    const std::size_t end = line.find(sep, start);
    out.push_back(line.substr(start, end == std::string_view::npos ? std::string_view::npos : end - start));
    if (end == std::string_view::npos) break;
    start = end + 1;
  }
  return out;
}

bool blank(std::string_view s) { return s.find_first_not_of(" \t") == std::string_view::npos; }

long long parse_integer(std::string_view text, std::size_t line) {
  long long v = 0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc() || ptr != text.data() + text.size()) {
    throw ParseError("expected an integer, got '" + std::string(text) + "'", line);
  }
  return v;
}

std::size_t parse_count(std::string_view text, std::size_t line) {
  const long long v = parse_integer(text, line);
  if (v < 0) throw ParseError("expected a nonnegative count", line);
  return static_cast<std::size_t>(v);
}

std::string format_blocks(const char* tag, const std::vector<Mat>& blocks, Eigen::Index rows, Eigen::Index cols) {
  std::string out = std::string(tag) + " " + std::to_string(blocks.size()) + " " + std::to_string(rows) + " " +
                    std::to_string(cols) + "\n";
  for (std::size_t b = 0; b < blocks.size(); ++b) {
    if (b > 0) out += "\n";
    for (Eigen::Index i = 0; i < rows; ++i) {
      for (Eigen::Index j = 0; j < cols; ++j) {
        if (j > 0) out += ' ';
        out += format_real(blocks[b](i, j));
      }
      out += '\n';
    }
  }
  return out;
}

struct Blocks {
  std::vector<Mat> mats;
  std::vector<std::size_t> first_lines;
};

Blocks parse_blocks(std::string_view text, std::string_view tag) {
  const std::vector<Line> lines = split_lines(text);
  if (lines.empty()) throw ParseError("empty input", 1);
  const auto header = split(lines[0].text, ' ');
  if (header.size() != 4 || header[0] != tag) {
    throw ParseError("header must read '" + std::string(tag) + " <count> <rows> <cols>'", 1);
  }
  const std::size_t count = parse_count(header[1], 1);
  const std::size_t rows = parse_count(header[2], 1);
  const std::size_t cols = parse_count(header[3], 1);
  if (rows == 0 || cols == 0) throw ParseError("rows and columns must be positive", 1);

  Blocks out;
  std::size_t at = 1;
  for (std::size_t b = 0; b < count; ++b) {
    if (b > 0) {
      if (at >= lines.size() || !blank(lines[at].text)) {
        throw ParseError("expected a blank line between blocks", at < lines.size() ? lines[at].number : lines.back().number + 1);
      }
      ++at;
    }
    Mat m(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
    out.first_lines.push_back(at < lines.size() ? lines[at].number : lines.back().number + 1);
    for (std::size_t i = 0; i < rows; ++i, ++at) {
      if (at >= lines.size()) throw ParseError("unexpected end of input", lines.back().number + 1);
      const auto fields = split(lines[at].text, ' ');
      if (fields.size() != cols) {
        throw ParseError("expected " + std::to_string(cols) + " values, got " + std::to_string(fields.size()),
                         lines[at].number);
      }
      for (std::size_t j = 0; j < cols; ++j) {
        const double v = parse_real(fields[j], lines[at].number);
        if (!std::isfinite(v)) throw ParseError("non-finite value", lines[at].number);
        m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = v;
      }
    }
    out.mats.push_back(std::move(m));
  }
  for (; at < lines.size(); ++at) {
    if (!blank(lines[at].text)) throw ParseError("trailing content after the last block", lines[at].number);
  }
  return out;
}

std::string fixed6(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6f", x);
  return buf;
}

std::string fixed2(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.2f", x);
  return buf;
}

std::vector<Line> content_lines(std::string_view text) {
  std::vector<Line> lines = split_lines(text);
  while (!lines.empty() && blank(lines.back().text)) lines.pop_back();
  return lines;
}

}  // namespace

std::string format_real(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

double parse_real(std::string_view text, std::size_t line) {
  double v = 0.0;
  const char* first = text.data();
  const char* last = text.data() + text.size();
  if (first != last && *first == '+') ++first;
  const auto [ptr, ec] = std::from_chars(first, last, v);
  if (ec != std::errc() || ptr != last || first == last) {
    throw ParseError("expected a real number, got '" + std::string(text) + "'", line);
  }
  return v;
}

void write_atomic(const std::filesystem::path& path, const std::string& content) {
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot open " + tmp.string() + " for writing");
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    out.flush();
    if (!out) throw Error("failed writing " + tmp.string());
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::filesystem::remove(tmp);
    throw Error("cannot move " + tmp.string() + " to " + path.string() + ": " + ec.message());
  }
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string format_dictionary(const Dictionary& dict) {
  return format_blocks("mdl-v1", dict.atoms(), dict.signal_length(), dict.channels());
}

Dictionary parse_dictionary(std::string_view text) {
  Blocks blocks = parse_blocks(text, "mdl-v1");
  if (blocks.mats.empty()) throw ParseError("a dictionary needs at least one atom", 1);
  for (std::size_t b = 0; b < blocks.mats.size(); ++b) {
    if (std::abs(blocks.mats[b].norm() - 1.0) > 1e-10) {
      throw ParseError("atom " + std::to_string(b) + " does not have unit Frobenius norm", blocks.first_lines[b]);
    }
  }
  return Dictionary(std::move(blocks.mats));
}

std::string format_dataset(const std::vector<Mat>& signals) {
  if (signals.empty()) return "mds-v1 0 1 1\n";
  return format_blocks("mds-v1", signals, signals.front().rows(), signals.front().cols());
}

std::vector<Mat> parse_dataset(std::string_view text) { return parse_blocks(text, "mds-v1").mats; }

std::string format_codes(const std::vector<SparseCode>& codes) {
  std::string out = "signal,atom,coeff\n";
  for (std::size_t q = 0; q < codes.size(); ++q) {
    for (const CodeEntry& e : codes[q]) {
      out += std::to_string(q) + "," + std::to_string(e.index) + "," + format_real(e.coeff) + "\n";
    }
  }
  return out;
}

std::string_view trace_column_name(std::size_t column) {
  static constexpr std::string_view names[kTraceColumns] = {"t99",       "t97",          "wass_chordal",
                                                            "wass_frob", "haus_chordal", "haus_frob"};
  if (column >= kTraceColumns) throw ContractError("trace column index out of range");
  return names[column];
}

double trace_value(const TraceRow& row, std::size_t column) {
  switch (column) {
    case 0: return row.t99;
    case 1: return row.t97;
    case 2: return row.wass_chordal;
    case 3: return row.wass_frob;
    case 4: return row.haus_chordal;
    case 5: return row.haus_frob;
    default: throw ContractError("trace column index out of range");
  }
}

std::string format_trace(const std::vector<TraceRow>& rows) {
  std::string out = std::string(kTraceHeader) + "\n";
  for (const TraceRow& r : rows) {
    out += std::to_string(r.iteration);
    for (std::size_t c = 0; c < kTraceColumns; ++c) out += "," + fixed6(trace_value(r, c));
    out += "\n";
  }
  return out;
}

std::vector<TraceRow> parse_trace(std::string_view text) {
  const std::vector<Line> lines = content_lines(text);
  if (lines.empty() || lines[0].text != kTraceHeader) {
    throw ParseError(std::string("trace header must read '") + kTraceHeader + "'", 1);
  }
  std::vector<TraceRow> rows;
  for (std::size_t i = 1; i < lines.size(); ++i) {
    const auto f = split(lines[i].text, ',');
    if (f.size() != kTraceColumns + 1) throw ParseError("expected 7 fields", lines[i].number);
    TraceRow r;
    r.iteration = parse_count(f[0], lines[i].number);
    double* slots[kTraceColumns] = {&r.t99, &r.t97, &r.wass_chordal, &r.wass_frob, &r.haus_chordal, &r.haus_frob};
    for (std::size_t c = 0; c < kTraceColumns; ++c) *slots[c] = parse_real(f[c + 1], lines[i].number);
    rows.push_back(r);
  }
  return rows;
}

std::string format_sweep(const std::vector<SweepRow>& rows) {
  std::string out = "snr_db,algo,dataset,t99,t97,wass_chordal,wass_frob,haus_chordal,haus_frob\n";
  for (const SweepRow& r : rows) {
    out += format_real(r.snr_db) + "," + std::string(algorithm_name(r.algo)) + "," +
           (r.rotated ? "rotation" : "straight");
    for (std::size_t c = 0; c < kTraceColumns; ++c) out += "," + fixed6(trace_value(r.mean, c));
    out += "\n";
  }
  return out;
}

std::string format_matrix(const LabeledMatrix& m) {
  if (m.values.rows() != m.values.cols() || static_cast<std::size_t>(m.values.rows()) != m.labels.size()) {
    throw ShapeError("format_matrix: labels and matrix sizes differ");
  }
  std::string out = "label";
  for (const std::string& l : m.labels) out += "," + l;
  out += "\n";
  for (Eigen::Index i = 0; i < m.values.rows(); ++i) {
    out += m.labels[static_cast<std::size_t>(i)];
    for (Eigen::Index j = 0; j < m.values.cols(); ++j) out += "," + format_real(m.values(i, j));
    out += "\n";
  }
  return out;
}

LabeledMatrix parse_matrix(std::string_view text) {
  const std::vector<Line> lines = content_lines(text);
  if (lines.empty()) throw ParseError("empty matrix file", 1);
  const auto header = split(lines[0].text, ',');
  if (header.size() < 2 || header[0] != "label") throw ParseError("matrix header must start with 'label'", 1);
  LabeledMatrix m;
  for (std::size_t j = 1; j < header.size(); ++j) m.labels.emplace_back(header[j]);
  const std::size_t n = m.labels.size();
  if (lines.size() != n + 1) {
    throw ParseError("expected " + std::to_string(n) + " matrix rows", lines.back().number);
  }
  m.values.resize(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  for (std::size_t i = 0; i < n; ++i) {
    const Line& line = lines[i + 1];
    const auto f = split(line.text, ',');
    if (f.size() != n + 1) throw ParseError("expected " + std::to_string(n + 1) + " fields", line.number);
    if (f[0] != m.labels[i]) throw ParseError("row label does not match the header", line.number);
    for (std::size_t j = 0; j < n; ++j) {
      m.values(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = parse_real(f[j + 1], line.number);
    }
  }
  return m;
}

std::string format_partition(const Partition& p) {
  std::string out = "index,label,exemplar\n";
  for (std::size_t i = 0; i < p.labels.size(); ++i) {
    const auto label = static_cast<std::size_t>(p.labels[i]);
    const long long exemplar = label < p.exemplars.size() ? static_cast<long long>(p.exemplars[label]) : -1;
    out += std::to_string(i) + "," + std::to_string(p.labels[i]) + "," + std::to_string(exemplar) + "\n";
  }
  return out;
}

Partition parse_partition(std::string_view text) {
  const std::vector<Line> lines = content_lines(text);
  if (lines.empty() || lines[0].text != "index,label,exemplar") {
    throw ParseError("partition header must read 'index,label,exemplar'", 1);
  }
  Partition p;
  std::map<int, long long> exemplars;
  for (std::size_t i = 1; i < lines.size(); ++i) {
    const auto f = split(lines[i].text, ',');
    if (f.size() != 3) throw ParseError("expected 3 fields", lines[i].number);
    if (parse_count(f[0], lines[i].number) != i - 1) throw ParseError("indices must be 0, 1, 2, ...", lines[i].number);
    const long long label = parse_integer(f[1], lines[i].number);
    if (label < 0) throw ParseError("negative label", lines[i].number);
    p.labels.push_back(static_cast<int>(label));
    const long long ex = parse_integer(f[2], lines[i].number);
    if (ex >= 0) exemplars[static_cast<int>(label)] = ex;
  }
  if (p.labels.empty()) throw ParseError("partition has no rows", 1);
  const int k = p.num_clusters();
  std::vector<char> seen(static_cast<std::size_t>(k), 0);
  for (const int l : p.labels) seen[static_cast<std::size_t>(l)] = 1;
  for (const char s : seen) {
    if (!s) throw ParseError("cluster labels must be 0..k-1 with every cluster nonempty", 1);
  }
  if (static_cast<int>(exemplars.size()) == k) {
    for (const auto& [label, ex] : exemplars) p.exemplars.push_back(static_cast<std::size_t>(ex));
  }
  return p;
}

std::string format_merges(const Dendrogram& tree) {
  std::string out = "step,a,b,height\n";
  for (std::size_t s = 0; s < tree.size(); ++s) {
    out += std::to_string(s) + "," + std::to_string(tree[s].a) + "," + std::to_string(tree[s].b) + "," +
           format_real(tree[s].height) + "\n";
  }
  return out;
}

std::string format_embedding(const Embedding& e) {
  std::string out = "index,x,y\n";
  for (Eigen::Index i = 0; i < e.coordinates.rows(); ++i) {
    const double x = e.coordinates.cols() > 0 ? e.coordinates(i, 0) : 0.0;
    const double y = e.coordinates.cols() > 1 ? e.coordinates(i, 1) : 0.0;
    out += std::to_string(i) + "," + format_real(x + 0.0) + "," + format_real(y + 0.0) + "\n";
  }
  return out;
}

std::string render_trace_svg(const std::vector<TraceRow>& rows, const std::vector<std::size_t>& columns) {
  if (rows.empty()) throw ContractError("render_trace_svg: empty trace");
  if (columns.empty()) throw ContractError("render_trace_svg: no columns selected");
  static constexpr const char* colors[kTraceColumns] = {"#1f77b4", "#ff7f0e", "#2ca02c",
                                                        "#d62728", "#9467bd", "#8c564b"};
  constexpr double width = 640.0;
  constexpr double height = 400.0;
  constexpr double left = 60.0;
  constexpr double right = 170.0;
  constexpr double top = 20.0;
  constexpr double bottom = 50.0;
  const double plot_w = width - left - right;
  const double plot_h = height - top - bottom;
  const std::size_t last = std::max<std::size_t>(rows.size(), 1);
  auto x_of = [&](std::size_t i) {
    return rows.size() == 1 ? left + plot_w / 2.0
                            : left + plot_w * static_cast<double>(i) / static_cast<double>(rows.size() - 1);
  };
  auto y_of = [&](double v) { return top + plot_h * (1.0 - std::clamp(v, 0.0, 100.0) / 100.0); };

  std::string out = "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"640\" height=\"400\" viewBox=\"0 0 640 400\">\n";
  out += "<rect x=\"0\" y=\"0\" width=\"640\" height=\"400\" fill=\"white\"/>\n";
  out += "<line x1=\"" + fixed2(left) + "\" y1=\"" + fixed2(top + plot_h) + "\" x2=\"" + fixed2(left + plot_w) +
         "\" y2=\"" + fixed2(top + plot_h) + "\" stroke=\"black\"/>\n";
  out += "<line x1=\"" + fixed2(left) + "\" y1=\"" + fixed2(top) + "\" x2=\"" + fixed2(left) + "\" y2=\"" +
         fixed2(top + plot_h) + "\" stroke=\"black\"/>\n";
  for (int tick = 0; tick <= 100; tick += 25) {
    const double y = y_of(tick);
    out += "<text x=\"" + fixed2(left - 8) + "\" y=\"" + fixed2(y + 4) + "\" font-size=\"11\" text-anchor=\"end\">" +
           std::to_string(tick) + "</text>\n";
  }
  out += "<text x=\"" + fixed2(left) + "\" y=\"" + fixed2(top + plot_h + 18) +
         "\" font-size=\"11\" text-anchor=\"middle\">1</text>\n";
  out += "<text x=\"" + fixed2(left + plot_w) + "\" y=\"" + fixed2(top + plot_h + 18) +
         "\" font-size=\"11\" text-anchor=\"middle\">" + std::to_string(last) + "</text>\n";
  out += "<text x=\"" + fixed2(left + plot_w / 2) + "\" y=\"" + fixed2(height - 12) +
         "\" font-size=\"12\" text-anchor=\"middle\">iteration</text>\n";

  for (std::size_t k = 0; k < columns.size(); ++k) {
    const std::size_t c = columns[k];
    const std::string_view name = trace_column_name(c);
    out += "<polyline fill=\"none\" stroke=\"" + std::string(colors[c]) + "\" stroke-width=\"1.5\" points=\"";
    for (std::size_t i = 0; i < rows.size(); ++i) {
      if (i > 0) out += ' ';
      out += fixed2(x_of(i)) + "," + fixed2(y_of(trace_value(rows[i], c)));
    }
    out += "\"/>\n";
    const double ly = top + 16.0 * static_cast<double>(k) + 8.0;
    out += "<line x1=\"" + fixed2(width - right + 15) + "\" y1=\"" + fixed2(ly) + "\" x2=\"" +
           fixed2(width - right + 35) + "\" y2=\"" + fixed2(ly) + "\" stroke=\"" + colors[c] +
           "\" stroke-width=\"2\"/>\n";
    out += "<text x=\"" + fixed2(width - right + 40) + "\" y=\"" + fixed2(ly + 4) + "\" font-size=\"11\">" +
           std::string(name) + "</text>\n";
  }
  out += "</svg>\n";
  return out;
}

}  // namespace grassdict::io
