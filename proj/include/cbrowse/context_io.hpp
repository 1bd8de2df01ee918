#pragma once

#include <filesystem>
#include <string>
#include <string_view>

#include "cbrowse/relation.hpp"

namespace cbrowse {

// Context file: {"objects": [...], "attributes": [...], "incidence": [[o, a], ...]}
// with 0-based indices. Malformed JSON raises ParseError, schema problems InvalidArgument.
FormalContext parse_context(std::string_view json_text);
FormalContext load_context(const std::filesystem::path& path);
std::string dump_context(const FormalContext& context);

// "{O1,O2}" style rendering used by the CLI and diagnostics.
std::string format_objects(const FormalContext& context, const IndexSet& objects);
std::string format_attributes(const FormalContext& context, const IndexSet& attributes);
std::string format_rectangle(const FormalContext& context, const Rectangle& rectangle);

}  // namespace cbrowse
