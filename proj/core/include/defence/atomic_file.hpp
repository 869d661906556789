#pragma once

#include <filesystem>
#include <functional>
#include <ostream>
#include <string>

namespace defence {

/// Writes through a sibling temporary file and renames it over `path` only
/// after `writer` succeeded, so readers never observe a partial file.
void write_atomically(const std::filesystem::path& path,
                      const std::function<void(const std::filesystem::path& tmp)>& writer);

/// Text convenience on top of `write_atomically`.
void write_text_atomically(const std::filesystem::path& path,
                           const std::function<void(std::ostream&)>& writer);

}  // namespace defence
