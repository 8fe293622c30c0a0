#pragma once

#include <cstddef>

#include <nlohmann/json.hpp>

#include "literalis/corpus.hpp"

namespace literalis::detail {

FeatureRecord record_from_json(const nlohmann::json& obj, std::size_t line);
nlohmann::ordered_json record_to_json(const FeatureRecord& r);

}  // namespace literalis::detail
