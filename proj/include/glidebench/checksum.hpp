#pragma once

#include <string>
#include <string_view>

namespace glidebench {

// Lowercase hex SHA-256 of the exact bytes.
std::string sha256_hex(std::string_view bytes);

}  // namespace glidebench
