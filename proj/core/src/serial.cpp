#include "dgm/serial.hpp"

#include "dgm/error.hpp"
#include "dgm/hash.hpp"

#include <fstream>
#include <sstream>

namespace dgm {

std::string canonical_dump(const Json& j) {
  // nlohmann::json keeps object keys sorted, so dump() is already canonical.
  return j.dump(2) + "\n";
}

std::string content_hash(const Json& j) { return sha256_hex(canonical_dump(j)); }

Json load_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) raise(Errc::missing_artifact, "cannot open " + path.string());
  Json j;
  try {
    in >> j;
  } catch (const std::exception& e) {
    raise(Errc::bad_input, "malformed file " + path.string() + ": " + e.what());
  }
  return j;
}

void write_text_file(const std::filesystem::path& path, const std::string& text) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) raise(Errc::missing_artifact, "cannot write " + path.string());
  out << text;
}

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) raise(Errc::missing_artifact, "cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace dgm
