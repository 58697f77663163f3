#pragma once

#include <filesystem>
#include <map>
#include <span>
#include <string>
#include <vector>

namespace lightray {

/// Flat float64 array preceded by a short text header:
///
///     lightray-raw 1
///     <key> <value>        (any number of lines)
///     count <N>
///     end_header
///     <N little-endian IEEE-754 doubles>
struct RawVolume {
  std::map<std::string, std::string> header;
  std::vector<double> data;
};

void write_raw_volume(const std::filesystem::path& path, const std::map<std::string, std::string>& header,
                      std::span<const double> data);
RawVolume read_raw_volume(const std::filesystem::path& path);

}  // namespace lightray
