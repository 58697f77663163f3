#include "lightray/raw_io.hpp"

#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <sstream>

#include "lightray/error.hpp"

namespace lightray {

namespace {

constexpr std::string_view kMagic = "lightray-raw 1";

std::uint64_t to_little_endian(std::uint64_t bits) {
  if constexpr (std::endian::native == std::endian::big) return __builtin_bswap64(bits);
  return bits;
}

}  // namespace

void write_raw_volume(const std::filesystem::path& path, const std::map<std::string, std::string>& header,
                      std::span<const double> data) {
  std::ofstream out(path, std::ios::binary);
  require(static_cast<bool>(out), ErrorCode::Io, "cannot open " + path.string() + " for writing");
  out << kMagic << '\n';
  for (const auto& [key, value] : header) {
    require(key != "count" && key.find_first_of(" \n") == std::string::npos &&
                value.find('\n') == std::string::npos,
            ErrorCode::InvalidArgument, "invalid raw header entry '" + key + "'");
    out << key << ' ' << value << '\n';
  }
  out << "count " << data.size() << "\nend_header\n";
  for (double v : data) {
    const auto bits = to_little_endian(std::bit_cast<std::uint64_t>(v));
    out.write(reinterpret_cast<const char*>(&bits), sizeof bits);
  }
  require(static_cast<bool>(out), ErrorCode::Io, "failed while writing " + path.string());
}

RawVolume read_raw_volume(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  require(static_cast<bool>(in), ErrorCode::Io, "cannot open " + path.string());
  std::string line;
  std::getline(in, line);
  require(line == kMagic, ErrorCode::Io, path.string() + " is not a lightray raw volume");

  RawVolume vol;
  std::size_t count = 0;
  bool have_count = false;
  while (std::getline(in, line) && line != "end_header") {
    const auto space = line.find(' ');
    require(space != std::string::npos, ErrorCode::Io, "malformed raw header line: " + line);
    const std::string key = line.substr(0, space);
    const std::string value = line.substr(space + 1);
    if (key == "count") {
      count = std::stoull(value);
      have_count = true;
    } else {
      vol.header[key] = value;
    }
  }
  require(have_count && line == "end_header", ErrorCode::Io, "raw header in " + path.string() + " is incomplete");

  vol.data.resize(count);
  for (auto& v : vol.data) {
    std::uint64_t bits = 0;
    in.read(reinterpret_cast<char*>(&bits), sizeof bits);
    require(static_cast<bool>(in), ErrorCode::Io, "truncated raw payload in " + path.string());
    v = std::bit_cast<double>(to_little_endian(bits));
  }
  return vol;
}

}  // namespace lightray
