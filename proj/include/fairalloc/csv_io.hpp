#pragma once

#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "fairalloc/harness.hpp"
#include "fairalloc/regret_ledger.hpp"

namespace fairalloc {

/// Shortest decimal text that reads back to the same double.
std::string format_double(double value);

/// Long-format mean curves:
/// epoch,algorithm,mean_cum_regret,stderr,n_seeds
std::string curves_csv(std::span<const Curve> curves);

/// Stability counters of one curve (empty string if it has none):
/// epoch,delta_rate,typeI_cum,typeII_cum,infeasible_cum
std::string counters_csv(const Curve& curve);

/// Per-epoch ledger with `# key=value` header lines for the algorithm, the
/// number of initialization epochs and the final pull counts.
std::string ledger_csv(const RegretLedger& ledger);
/// Inverse of ledger_csv; throws InputError on malformed text.
RegretLedger parse_ledger_csv(std::string_view text);

struct CsvRow {
  std::vector<std::string> fields;
};
/// Header and rows of a plain comma-separated table (no quoting).
struct CsvTable {
  std::vector<std::string> header;
  std::vector<CsvRow> rows;
};
CsvTable parse_csv(std::string_view text);

/// Writes text to path, creating parent directories. Throws InputError if
/// the file exists and `overwrite` is false.
void write_text_file(const std::filesystem::path& path, std::string_view text, bool overwrite);
std::string read_text_file(const std::filesystem::path& path);

}  // namespace fairalloc
