#include "defence/atomic_file.hpp"

#include "defence/error.hpp"

#include <atomic>
#include <fstream>
#include <system_error>

#include <unistd.h>

namespace defence {

namespace fs = std::filesystem;

void write_atomically(const fs::path& path, const std::function<void(const fs::path&)>& writer) {
    static std::atomic<unsigned> counter{0};
    fs::path tmp = path;
    tmp += ".tmp." + std::to_string(::getpid()) + "." + std::to_string(counter++);
    try {
        writer(tmp);
    } catch (...) {
        std::error_code ec;
        fs::remove(tmp, ec);
        throw;
    }
    std::error_code ec;
    fs::rename(tmp, path, ec);
    if (ec) {
        fs::remove(tmp, ec);
        throw IoError("cannot move temporary file into place at " + path.string());
    }
}

void write_text_atomically(const fs::path& path, const std::function<void(std::ostream&)>& writer) {
    write_atomically(path, [&](const fs::path& tmp) {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw IoError("cannot open " + path.string() + " for writing");
        writer(out);
        out.flush();
        if (!out) throw IoError("write failed for " + path.string());
    });
}

}  // namespace defence
