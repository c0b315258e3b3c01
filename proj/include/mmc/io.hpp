#pragma once

#include <filesystem>
#include <string>

#include <json.hpp>

#include "mmc/clone_structure.hpp"

namespace mmc::io {

using nlohmann::json;

/// Parses JSON text; syntax errors become ValidationError with line/column.
json parse_json(const std::string& text, const std::string& source_name);
json read_json_file(const std::filesystem::path& path);

/// number | {"num": int, "den": int} | "p/q". Integral JSON numbers are exact.
Scalar parse_scalar(const json& j, const std::string& where);
json scalar_to_json(const Scalar& s);

/// Shared structure-definition schema. Schema violations throw
/// ValidationError naming the JSON pointer of the offending field.
StructureDefinition parse_structure(const json& j);
json structure_to_json(const CloneStructure& s);

StructureDefinition read_structure_definition(const std::filesystem::path& path);
CloneStructure read_structure(const std::filesystem::path& path);

/// [i1, ..., ik] (root inferred; empty means model 1) or
/// {"model": j, "word": [...]}.
CloneAddress parse_address(const CloneStructure& s, const json& j);
json address_to_json(const CloneAddress& a);

}  // namespace mmc::io
