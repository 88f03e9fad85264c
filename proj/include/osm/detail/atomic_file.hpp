#pragma once

#include <filesystem>
#include <fstream>
#include <string>
#include <system_error>

#include "osm/error.hpp"

namespace osm::detail {

// Writes through a sibling temporary file and renames it over `path`, so
// readers never observe a half-written file.
template <class Writer>
void write_atomically(const std::filesystem::path& path, Writer&& writer, bool binary = false) {
    namespace fs = std::filesystem;
    const fs::path tmp = path.string() + ".tmp";
    {
        std::ofstream out(tmp, binary ? std::ios::binary | std::ios::trunc : std::ios::trunc);
        if (!out) throw IoError("cannot open " + tmp.string() + " for writing");
        try {
            writer(out);
        } catch (...) {
            out.close();
            std::error_code ec;
            fs::remove(tmp, ec);
            throw;
        }
        out.flush();
        if (!out) {
            std::error_code ec;
            fs::remove(tmp, ec);
            throw IoError("write failed for " + tmp.string());
        }
    }
    std::error_code ec;
    fs::rename(tmp, path, ec);
    if (ec) {
        fs::remove(tmp, ec);
        throw IoError("cannot rename " + tmp.string() + " to " + path.string());
    }
}

}  // namespace osm::detail
