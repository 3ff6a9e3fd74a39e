#pragma once

// Text formats: mdl-v1 dictionaries, mds-v1 datasets, CSV tables for traces,
// sweeps, distance matrices, partitions, merge lists and embeddings, SVG
// trace plots, and atomic file output.

#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "grassdict/cluster.hpp"
#include "grassdict/dictionary.hpp"
#include "grassdict/synthetic.hpp"

namespace grassdict::io {

/// Shortest form that round-trips: 17 significant digits.
[[nodiscard]] std::string format_real(double x);

/// Parses a decimal real, including inf/-inf/nan; throws ParseError.
[[nodiscard]] double parse_real(std::string_view text, std::size_t line);

/// Writes content to a sibling temporary file, then renames it over path.
void write_atomic(const std::filesystem::path& path, const std::string& content);

[[nodiscard]] std::string read_file(const std::filesystem::path& path);

// Header line `<tag> <count> <rows> <cols>`, then `count` blocks of `rows`
// lines with `cols` values each, blocks separated by one blank line.
[[nodiscard]] std::string format_dictionary(const Dictionary& dict);
[[nodiscard]] Dictionary parse_dictionary(std::string_view text);
[[nodiscard]] std::string format_dataset(const std::vector<Mat>& signals);
[[nodiscard]] std::vector<Mat> parse_dataset(std::string_view text);

/// `signal,atom,coeff`, one row per planted atom occurrence.
[[nodiscard]] std::string format_codes(const std::vector<SparseCode>& codes);

inline constexpr const char* kTraceHeader = "iter,t99,t97,wass_chordal,wass_frob,haus_chordal,haus_frob";
inline constexpr std::size_t kTraceColumns = 6;

[[nodiscard]] std::string format_trace(const std::vector<TraceRow>& rows);
[[nodiscard]] std::vector<TraceRow> parse_trace(std::string_view text);
[[nodiscard]] std::string format_sweep(const std::vector<SweepRow>& rows);

/// Labeled symmetric matrix: header `label,<l1>,...`, then `<li>,<values>`.
struct LabeledMatrix {
  std::vector<std::string> labels;
  Mat values;
};

[[nodiscard]] std::string format_matrix(const LabeledMatrix& m);
[[nodiscard]] LabeledMatrix parse_matrix(std::string_view text);

/// `index,label,exemplar`; exemplar is -1 when the method has none.
[[nodiscard]] std::string format_partition(const Partition& p);
[[nodiscard]] Partition parse_partition(std::string_view text);

/// `step,a,b,height`.
[[nodiscard]] std::string format_merges(const Dendrogram& tree);

/// `index,x,y` from the first two coordinates.
[[nodiscard]] std::string format_embedding(const Embedding& e);

/// One polyline per selected trace column (indices into the six metric
/// columns), legend, y axis 0-100, x axis 1-iterations.
[[nodiscard]] std::string render_trace_svg(const std::vector<TraceRow>& rows, const std::vector<std::size_t>& columns);

[[nodiscard]] std::string_view trace_column_name(std::size_t column);
[[nodiscard]] double trace_value(const TraceRow& row, std::size_t column);

}  // namespace grassdict::io
