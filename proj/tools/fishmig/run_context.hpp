#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "fishmig/eca.hpp"
#include "fishmig/kv_config.hpp"

namespace fishmig::cli {

/// Flags shared by every subcommand.
struct GlobalOptions {
    std::string config_path;
    std::optional<std::uint64_t> seed;
    std::string out_dir = ".";
};

/// One invocation: merged settings, output directory, and the inputs it read.
class Run {
public:
    /// Layers `defaults`, then the --config file, then `overrides`, and
    /// rejects any key the command does not define.
    Run(std::string command, const KvConfig& defaults, const GlobalOptions& globals,
        const std::map<std::string, std::string>& overrides);

    const std::string& command() const { return command_; }
    const KvConfig& config() const { return config_; }
    std::uint64_t seed() const { return seed_; }

    std::string get(const std::string& key) const;
    /// Like get(), but throws InputError naming the flag when empty.
    std::string require(const std::string& key) const;
    double get_double(const std::string& key) const { return config_.get_double(key, 0.0); }
    long long get_int(const std::string& key) const { return config_.get_int(key, 0); }
    bool get_bool(const std::string& key) const { return config_.get_bool(key, false); }

    std::string output(const std::string& name) const;
    /// Records a file (or every file under a directory) for the manifest digest list.
    void add_input(const std::string& path);
    void write_manifest() const;

private:
    std::string command_;
    KvConfig config_;
    std::filesystem::path out_;
    std::uint64_t seed_ = 1;
    std::vector<std::string> inputs_;
};

std::string sha256_file(const std::string& path);

/// "10,20,30" or "1-50" (inclusive range), or a mix of both.
std::vector<int> parse_int_list(const std::string& text);
std::vector<std::string> parse_list(const std::string& text);
eca::Coord parse_coord(const std::string& text);

}  // namespace fishmig::cli
