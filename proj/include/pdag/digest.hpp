#pragma once

#include <string>

namespace pdag {

/// Lower-case hex SHA-256 of `data`.
std::string sha256_hex(const std::string& data);

} // namespace pdag
