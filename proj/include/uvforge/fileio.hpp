#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace uvforge {

/// Throws FileNotFound when the path does not name a readable regular file.
std::vector<std::uint8_t> read_file(const std::filesystem::path& path);
std::string read_text_file(const std::filesystem::path& path);

/// Called at named points of an atomic write; tests use it to simulate a
/// crash by throwing. Stages: "temp_partial", "temp_written", "renamed".
using WriteFaultHook = std::function<void(std::string_view stage)>;

/// Writes to a sibling temp file, fsyncs, then renames over `path`. A reader
/// sees either the previous contents or the new contents. Throws
/// Error{StoreIoError} on IO failure.
void write_file_atomic(const std::filesystem::path& path, std::span<const std::uint8_t> data,
                       const WriteFaultHook& hook = {});
void write_file_atomic(const std::filesystem::path& path, std::string_view data,
                       const WriteFaultHook& hook = {});

}  // namespace uvforge
