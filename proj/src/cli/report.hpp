#pragma once

// Command results are built as ordered JSON trees and rendered in one of
// three formats. Non-finite numbers are stored as the strings "-inf"/"inf".

#include <string>

#include "json.hpp"
#include "ratetol/info_core.hpp"

namespace ratetol::cli {

using Report = nlohmann::ordered_json;

enum class Format { kText, kCsv, kJson };

// %.12g, with -0 printed as 0 and non-finite values spelled out.
std::string format_number(double v);

Report number(double v);
Report bits(const ExtendedBits& v);

// Text: "key: value" lines, nested objects indented, arrays of flat
// objects as aligned tables.
std::string render_text(const Report& r);
// Two columns, field path and value.
std::string render_csv(const Report& r);
std::string render_json(const Report& r);
std::string render(const Report& r, Format f);

}  // namespace ratetol::cli
