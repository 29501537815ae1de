#pragma once

#include <string>
#include <vector>

namespace svcfo {

std::string read_file(const std::string& path);

/// Writes via a temp file in the same directory, fsyncs, then renames.
void write_file_atomic(const std::string& path, const std::string& data);

/// Percent-encoding for persisted string values: space, '%' and newline.
std::string percent_encode(const std::string& raw);
std::string percent_decode(const std::string& encoded);

std::vector<std::string> split_lines(const std::string& text);

} // namespace svcfo
