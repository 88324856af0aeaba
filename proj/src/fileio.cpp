#include "uvforge/fileio.hpp"

#include <fcntl.h>
#include <unistd.h>

#include <atomic>
#include <cerrno>
#include <cstring>
#include <fstream>
#include <iterator>

#include "uvforge/error.hpp"

namespace fs = std::filesystem;

namespace uvforge {

std::vector<std::uint8_t> read_file(const fs::path& path) {
    std::error_code ec;
    if (!fs::is_regular_file(path, ec)) {
        throw Error(ErrorCode::FileNotFound, "no such file: " + path.string());
    }
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw Error(ErrorCode::FileNotFound, "cannot open: " + path.string());
    }
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

std::string read_text_file(const fs::path& path) {
    const auto bytes = read_file(path);
    return {bytes.begin(), bytes.end()};
}

namespace {

[[noreturn]] void io_fail(const std::string& what, const fs::path& path) {
    throw Error(ErrorCode::StoreIoError, what + " " + path.string() + ": " + std::strerror(errno));
}

void write_all(int fd, const std::uint8_t* data, std::size_t size, const fs::path& path) {
    while (size > 0) {
        const ssize_t n = ::write(fd, data, size);
        if (n < 0) {
            if (errno == EINTR) continue;
            io_fail("write", path);
        }
        data += n;
        size -= static_cast<std::size_t>(n);
    }
}

std::string temp_suffix() {
    static std::atomic<unsigned> counter{0};
    return ".tmp." + std::to_string(::getpid()) + "." + std::to_string(counter++);
}

}  // namespace

void write_file_atomic(const fs::path& path, std::span<const std::uint8_t> data,
                       const WriteFaultHook& hook) {
    const fs::path temp = path.string() + temp_suffix();
    const int fd = ::open(temp.c_str(), O_WRONLY | O_CREAT | O_TRUNC | O_CLOEXEC, 0644);
    if (fd < 0) io_fail("open", temp);
    try {
        const std::size_t half = data.size() / 2;
        write_all(fd, data.data(), half, temp);
        if (hook) hook("temp_partial");
        write_all(fd, data.data() + half, data.size() - half, temp);
        if (::fsync(fd) != 0) io_fail("fsync", temp);
    } catch (...) {
        ::close(fd);
        std::error_code ec;
        fs::remove(temp, ec);
        throw;
    }
    if (::close(fd) != 0) io_fail("close", temp);
    if (hook) {
        try {
            hook("temp_written");
        } catch (...) {
            std::error_code ec;
            fs::remove(temp, ec);
            throw;
        }
    }
    if (::rename(temp.c_str(), path.c_str()) != 0) {
        std::error_code ec;
        fs::remove(temp, ec);
        io_fail("rename", path);
    }
    if (hook) hook("renamed");
}

void write_file_atomic(const fs::path& path, std::string_view data, const WriteFaultHook& hook) {
    write_file_atomic(
        path, std::span(reinterpret_cast<const std::uint8_t*>(data.data()), data.size()), hook);
}

}  // namespace uvforge
