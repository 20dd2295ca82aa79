#pragma once

#include <json.hpp>

#include "fairalloc/problem_instance.hpp"

namespace fairalloc::detail {

ProblemInstance instance_from_json(const nlohmann::json& j);
nlohmann::json instance_to_json(const ProblemInstance& instance);

}  // namespace fairalloc::detail
