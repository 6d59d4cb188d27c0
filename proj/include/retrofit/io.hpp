// SPDX-FileCopyrightText: 2026 retrofit-option contributors
// SPDX-License-Identifier: MIT
#pragma once

#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

#include "retrofit/common.hpp"

// Run manifests and deterministic CSV output.
//
// Every output file starts with a manifest comment line binding it to the
// resolved configuration (FNV-1a hash), the seed, and the library version.
// Numbers are written with %.17g so repeated runs are byte-identical.

namespace retrofit::io {

inline std::uint64_t fnv1a64(const std::string& s) {
    std::uint64_t h = 1469598103934665603ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    return h;
}

inline std::string hex64(std::uint64_t v) {
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
    return buf;
}

struct RunManifest {
    std::string command;
    std::uint64_t config_hash = 0;
    std::uint64_t seed = 0;
    std::string version;
    std::vector<std::string> outputs;
};

inline std::string format_double(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

// One CSV cell: text or number.
using Cell = std::variant<std::string, double, std::int64_t>;

inline std::string cell_text(const Cell& c) {
    if (std::holds_alternative<double>(c)) return format_double(std::get<double>(c));
    if (std::holds_alternative<std::int64_t>(c)) return std::to_string(std::get<std::int64_t>(c));
    return std::get<std::string>(c);
}

class CsvWriter {
  public:
    CsvWriter(const std::filesystem::path& path, const RunManifest& manifest,
              const std::vector<std::string>& header)
        : out_(path, std::ios::binary) {
        if (!out_) throw ConfigError("cannot open output file: " + path.string());
        out_ << "# manifest " << hex64(manifest.config_hash) << " seed " << manifest.seed
             << " version " << manifest.version << "\n";
        for (std::size_t i = 0; i < header.size(); ++i) out_ << (i ? "," : "") << header[i];
        out_ << "\n";
    }

    void row(const std::vector<Cell>& cells) {
        for (std::size_t i = 0; i < cells.size(); ++i)
            out_ << (i ? "," : "") << cell_text(cells[i]);
        out_ << "\n";
    }

  private:
    std::ofstream out_;
};

// Write out/manifest.json for the run.
inline void write_manifest(const std::filesystem::path& dir, const RunManifest& m) {
    nlohmann::json j;
    j["command"] = m.command;
    j["config_hash"] = hex64(m.config_hash);
    j["seed"] = m.seed;
    j["version"] = m.version;
    j["outputs"] = m.outputs;
    std::ofstream out(dir / "manifest.json", std::ios::binary);
    if (!out) throw ConfigError("cannot open output file: " + (dir / "manifest.json").string());
    out << j.dump(2) << "\n";
}

} // namespace retrofit::io
