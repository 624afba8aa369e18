#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>

#include "dgnn/types.hpp"

namespace dgnn {

/// Column mapping for a delimited temporal edge file. A weight column of -1
/// means every edge gets weight 1.
struct CsvFormat {
    int src_col = 0;
    int dst_col = 1;
    int weight_col = 2;
    int time_col = 3;
    char delimiter = ',';
    bool whitespace = false;  // split on runs of spaces/tabs instead of `delimiter`
    bool header = false;      // skip the first non-comment line
};

/// Named presets or an explicit mapping:
///   bitcoin      src,dst,rating,time (comma separated, no header)
///   uci          KONECT layout: "src dst weight time", '%' comments
///   collegemsg   SNAP layout: "src dst time"
///   csv:S,D,W,T[:DELIM[:header]]   DELIM is comma|tab|space|semicolon|ws
std::optional<CsvFormat> parse_csv_format(std::string_view text);

/// Synthetic workload: `snapshots` windows, each touching exactly `nodes`
/// distinct nodes drawn from a universe of `universe` ids (a random cycle over
/// them plus extra random edges up to `edges` per window).
struct SyntheticSpec {
    std::size_t snapshots = 50;
    std::size_t nodes = 256;
    std::size_t edges = 1024;
    std::size_t universe = 0;     // 0 -> 2 * nodes
    std::int64_t window_seconds = 86400;
    std::uint64_t seed = 1;
};

/// Parses "synthetic[:snapshots=S,nodes=N,edges=E,universe=U]".
std::optional<SyntheticSpec> parse_synthetic(std::string_view text);

struct DatasetSpec {
    std::string path;
    CsvFormat format;
    std::string format_name = "bitcoin";
    std::optional<SyntheticSpec> synthetic;
};

/// One edge per data row, in file order. Lines starting with '%' or '#' and
/// blank lines are skipped. Errors carry the 1-based line number.
TemporalEdgeList parse_temporal_csv(std::istream& in, const CsvFormat& fmt);
TemporalEdgeList load_temporal_csv(const DatasetSpec& spec);

TemporalEdgeList make_synthetic(const SyntheticSpec& spec);

/// Loads from file or generates, depending on the spec.
TemporalEdgeList load_dataset(const DatasetSpec& spec);

} // namespace dgnn
