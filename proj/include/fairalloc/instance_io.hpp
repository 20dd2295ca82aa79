#pragma once

#include <filesystem>
#include <string>
#include <string_view>

#include "fairalloc/problem_instance.hpp"

namespace fairalloc {

/// Instance files are JSON objects:
///
///   name          string (optional)
///   n_goods       N
///   n_agents      K
///   qualities     N-vector (shared) or K x N matrix (agent-specific)
///   sigma         noise scale
///   noise         "gaussian" | "uniform" | "zero"            (default gaussian)
///   quality_box   bound on |mu|                                (default max |mu|)
///   reward        {"kind": "linear" | "power" | "clipped-square" | "expected",
///                  "p": int, "link": string, "sigma": real}   (default linear)
///   rewards       list of reward objects, one per agent (instead of reward)
///   bundles       "singletons" | {"all_subsets_up_to": m} |
///                 {"explicit": [[[goods...], ...] per agent]}  (default singletons)
///   allow_overlap bool                                         (default false)
///   market        {"kind": "marriage", "size": n, "eta": real, "epsilon": real,
///                  "matchings": [[woman of man 0, ...], ...]}  (default: all)
///   gaps          {"delta_min": ..., "delta_max": ..., ...}
///   envy_nonempty bool                                         (default false)
///
/// Goods are 0-based. Serialization round-trips: parsing the emitted text
/// yields an equal instance.
ProblemInstance parse_instance(std::string_view json_text);
std::string emit_instance(const ProblemInstance& instance);

ProblemInstance load_instance(const std::filesystem::path& path);
void save_instance(const std::filesystem::path& path, const ProblemInstance& instance);

}  // namespace fairalloc
