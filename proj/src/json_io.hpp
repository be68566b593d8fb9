#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "credal/definitions.hpp"

// Internal JSON emission helpers shared by the scenario and fuzz
// translation units. Not installed; the public API deals in strings.
namespace credal::detail {

/// Deterministic pretty-printer: fixed layout, floats at 17 significant
/// digits, trailing newline.
std::string dump_document(const nlohmann::ordered_json& j);

nlohmann::ordered_json point_json(const numvec& p);
nlohmann::ordered_json vertex_list_json(const std::vector<numvec>& vs);

} // namespace credal::detail
