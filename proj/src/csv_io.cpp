#include "fairalloc/csv_io.hpp"

#include <charconv>
#include <optional>
#include <fstream>
#include <sstream>
#include <system_error>

namespace fairalloc {

std::string format_double(double value) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), value);
  if (ec != std::errc{}) throw InputError("cannot format number");
  return std::string(buf, ptr);
}

namespace {

template <class T>
T parse_number(std::string_view text, const char* what) {
  T value{};
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc{} || ptr != text.data() + text.size()) {
    throw InputError(std::string("bad ") + what + ": '" + std::string(text) + "'");
  }
  return value;
}

std::vector<std::string_view> split(std::string_view line, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t pos = line.find(sep, start);
    if (pos == std::string_view::npos) {
      out.push_back(line.substr(start));
      return out;
    }
    out.push_back(line.substr(start, pos - start));
    start = pos + 1;
  }
}

std::vector<std::string_view> lines_of(std::string_view text) {
  std::vector<std::string_view> out;
  for (auto line : split(text, '\n')) {
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (!line.empty()) out.push_back(line);
  }
  return out;
}

constexpr std::string_view kLedgerHeader = "epoch,instantaneous,cumulative,delta,type_one,type_two,infeasible";

}  // namespace

std::string curves_csv(std::span<const Curve> curves) {
  std::string out = "epoch,algorithm,mean_cum_regret,stderr,n_seeds\n";
  for (const auto& c : curves) {
    const std::string tail = "," + std::to_string(c.n_seeds) + "\n";
    for (std::size_t e = 0; e < c.mean.size(); ++e) {
      out += std::to_string(e + 1);
      out += ',';
      out += c.label;
      out += ',';
      out += format_double(c.mean[e]);
      out += ',';
      out += format_double(c.stderr_[e]);
      out += tail;
    }
  }
  return out;
}

std::string counters_csv(const Curve& curve) {
  if (curve.delta_rate.empty()) return {};
  std::string out = "epoch,delta_rate,typeI_cum,typeII_cum,infeasible_cum\n";
  for (std::size_t e = 0; e < curve.delta_rate.size(); ++e) {
    out += std::to_string(e + 1);
    for (double v : {curve.delta_rate[e], curve.type_one[e], curve.type_two[e], curve.infeasible[e]}) {
      out += ',';
      out += format_double(v);
    }
    out += '\n';
  }
  return out;
}

std::string ledger_csv(const RegretLedger& ledger) {
  std::string out = "# algorithm=" + ledger.algorithm + "\n";
  out += "# init_epochs=" + std::to_string(ledger.init_epochs) + "\n";
  out += "# pulls=";
  for (std::size_t i = 0; i < ledger.pulls.size(); ++i) {
    if (i) out += ' ';
    out += std::to_string(ledger.pulls[i]);
  }
  out += '\n';
  out += kLedgerHeader;
  out += '\n';
  const bool counters = ledger.has_counters();
  for (std::size_t e = 0; e < ledger.horizon(); ++e) {
    out += std::to_string(e + 1);
    out += ',';
    out += format_double(ledger.instantaneous[e]);
    out += ',';
    out += format_double(ledger.cumulative[e]);
    if (counters) {
      out += ',' + std::to_string(ledger.delta[e]) + ',' + std::to_string(ledger.type_one[e]) + ',' +
             std::to_string(ledger.type_two[e]) + ',' + std::to_string(ledger.infeasible[e]);
    } else {
      out += ",,,,";
    }
    out += '\n';
  }
  return out;
}

RegretLedger parse_ledger_csv(std::string_view text) {
  RegretLedger ledger;
  bool header_seen = false;
  std::optional<bool> counters;
  for (auto line : lines_of(text)) {
    if (line.starts_with("#")) {
      line.remove_prefix(1);
      while (!line.empty() && line.front() == ' ') line.remove_prefix(1);
      const auto eq = line.find('=');
      if (eq == std::string_view::npos) throw InputError("bad ledger metadata line");
      const auto key = line.substr(0, eq);
      const auto value = line.substr(eq + 1);
      if (key == "algorithm") {
        ledger.algorithm = std::string(value);
      } else if (key == "init_epochs") {
        ledger.init_epochs = parse_number<std::uint64_t>(value, "init_epochs");
      } else if (key == "pulls") {
        if (!value.empty()) {
          for (auto tok : split(value, ' ')) ledger.pulls.push_back(parse_number<std::uint64_t>(tok, "pull count"));
        }
      }
      continue;
    }
    if (!header_seen) {
      if (line != kLedgerHeader) throw InputError("unexpected ledger header");
      header_seen = true;
      continue;
    }
    const auto f = split(line, ',');
    if (f.size() != 7) throw InputError("ledger row needs 7 fields");
    if (parse_number<std::uint64_t>(f[0], "epoch") != ledger.horizon() + 1) {
      throw InputError("ledger epochs must be consecutive from 1");
    }
    const bool has = !f[3].empty();
    if (!counters) counters = has;
    if (*counters != has) throw InputError("ledger rows mix counter and plain rows");
    ledger.instantaneous.push_back(parse_number<double>(f[1], "regret"));
    ledger.cumulative.push_back(parse_number<double>(f[2], "cumulative regret"));
    if (has) {
      ledger.delta.push_back(static_cast<std::uint8_t>(parse_number<unsigned>(f[3], "delta")));
      ledger.type_one.push_back(parse_number<std::uint64_t>(f[4], "type_one"));
      ledger.type_two.push_back(parse_number<std::uint64_t>(f[5], "type_two"));
      ledger.infeasible.push_back(parse_number<std::uint64_t>(f[6], "infeasible"));
    }
  }
  if (!header_seen) throw InputError("ledger header missing");
  return ledger;
}

CsvTable parse_csv(std::string_view text) {
  CsvTable table;
  bool first = true;
  for (auto line : lines_of(text)) {
    if (line.starts_with("#")) continue;
    std::vector<std::string> fields;
    for (auto f : split(line, ',')) fields.emplace_back(f);
    if (first) {
      table.header = std::move(fields);
      first = false;
    } else {
      if (fields.size() != table.header.size()) throw InputError("csv row width differs from header");
      table.rows.push_back({std::move(fields)});
    }
  }
  return table;
}

void write_text_file(const std::filesystem::path& path, std::string_view text, bool overwrite) {
  if (!overwrite && std::filesystem::exists(path)) {
    throw InputError("refusing to overwrite " + path.string() + " (use --force)");
  }
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw InputError("cannot open " + path.string() + " for writing");
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  if (!out) throw InputError("write failed for " + path.string());
}

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

}  // namespace fairalloc
