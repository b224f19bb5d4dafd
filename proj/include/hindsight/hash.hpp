#pragma once

#include <string>

namespace hindsight {

/// Lower-case hex SHA-256 digest.
std::string sha256_hex(const std::string& data);

}  // namespace hindsight
