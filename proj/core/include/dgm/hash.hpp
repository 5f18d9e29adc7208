#pragma once

#include <string>
#include <string_view>

namespace dgm {

/// SHA-256 of the bytes, rendered as lowercase hex.
std::string sha256_hex(std::string_view bytes);

}  // namespace dgm
