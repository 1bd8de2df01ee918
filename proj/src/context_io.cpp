#include "cbrowse/context_io.hpp"

#include <fstream>
#include <sstream>

#include "json.hpp"

#include "cbrowse/error.hpp"

namespace cbrowse {

using nlohmann::json;

FormalContext parse_context(std::string_view json_text) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ParseError(ParseError::from_json_byte(e.byte), "malformed context JSON");
  }
  try {
    auto objects = doc.at("objects").get<std::vector<std::string>>();
    auto attributes = doc.at("attributes").get<std::vector<std::string>>();
    std::vector<Element> pairs;
    for (const auto& p : doc.at("incidence")) {
      if (!p.is_array() || p.size() != 2) throw InvalidArgument("incidence entries must be [object, attribute]");
      pairs.push_back({p[0].get<std::size_t>(), p[1].get<std::size_t>()});
    }
    return FormalContext(std::move(objects), std::move(attributes), pairs);
  } catch (const json::exception& e) {
    throw InvalidArgument(std::string("invalid context document: ") + e.what());
  }
}

FormalContext load_context(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot read context file " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_context(buf.str());
}

std::string dump_context(const FormalContext& context) {
  nlohmann::ordered_json doc;
  doc["objects"] = context.objects();
  doc["attributes"] = context.attributes();
  doc["incidence"] = json::array();
  for (const auto& e : context.incidence()) doc["incidence"].push_back({e.object, e.attribute});
  return doc.dump();
}

namespace {

std::string format_names(const std::vector<std::string>& names, const IndexSet& indices) {
  std::string out = "{";
  for (std::size_t i = 0; i < indices.size(); ++i) {
    if (i) out += ',';
    out += names.at(indices[i]);
  }
  return out + "}";
}

}  // namespace

std::string format_objects(const FormalContext& context, const IndexSet& objects) {
  return format_names(context.objects(), objects);
}

std::string format_attributes(const FormalContext& context, const IndexSet& attributes) {
  return format_names(context.attributes(), attributes);
}

std::string format_rectangle(const FormalContext& context, const Rectangle& rectangle) {
  return "(" + format_objects(context, rectangle.extent) + "," + format_attributes(context, rectangle.intent) + ")";
}

}  // namespace cbrowse
