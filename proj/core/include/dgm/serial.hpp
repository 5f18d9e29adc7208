#pragma once

#include <nlohmann/json.hpp>

#include <filesystem>
#include <string>

namespace dgm {

// Canonical serialization: JSON with lexicographically sorted object keys,
// two-space indent, UTF-8, trailing newline. All content hashes are taken
// over this form, so it must stay byte-stable across platforms.
using Json = nlohmann::json;

// Insertion-ordered variant used for line records (trace files) where the
// documented field order matters.
using OrderedJson = nlohmann::ordered_json;

std::string canonical_dump(const Json& j);

/// Content hash of a value: SHA-256 hex of its canonical dump.
std::string content_hash(const Json& j);

Json load_json_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, const std::string& text);
std::string read_text_file(const std::filesystem::path& path);

}  // namespace dgm
