#pragma once

#include <string_view>

// Files under templates/ and data/ compiled into the library.
namespace labelforge::resources {

/// Returns the bytes of an embedded resource, e.g. "templates/single_label.txt".
/// Throws std::out_of_range for unknown names.
std::string_view get(std::string_view name);

}  // namespace labelforge::resources
