#pragma once

// JSON documents are built with nlohmann::ordered_json and written by
// dump_json, which prints floats with 17 significant digits ("%.17g") so
// every double round-trips exactly. Non-finite floats are written as null.

#include <string>

#include <json.hpp>

namespace nnstat::io {

using Json = nlohmann::ordered_json;

inline constexpr int kFormatVersion = 1;

std::string dump_json(const Json& doc, int indent = 2);

// "%.17g"; "nan"/"inf" spelled as printf does.
std::string format_g17(double v);

// Parses text, throwing InputError with `what` in the message on failure.
Json parse_json(const std::string& text, const std::string& what);

// Throws InputError unless doc["format_version"] == 1.
void check_format_version(const Json& doc, const std::string& what);

}  // namespace nnstat::io
