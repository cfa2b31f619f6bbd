#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>

namespace fishmig {

/// Ordered `key=value` settings, as read from config and params files.
///
/// Lines are `key=value`; blank lines and lines starting with `#` are
/// skipped. Later assignments override earlier ones, which is how command
/// line overrides are layered over a file.
class KvConfig {
public:
    static KvConfig parse_file(const std::string& path);
    static KvConfig parse_text(const std::string& text, const std::string& source = "<text>");

    void set(const std::string& key, std::string value) { values_[key] = std::move(value); }
    void merge(const KvConfig& overrides);

    bool contains(const std::string& key) const { return values_.contains(key); }
    std::optional<std::string> get(const std::string& key) const;

    std::string get_string(const std::string& key, const std::string& fallback) const;
    double get_double(const std::string& key, double fallback) const;
    long long get_int(const std::string& key, long long fallback) const;
    bool get_bool(const std::string& key, bool fallback) const;

    /// Throws InputError naming the first key that is not in `allowed`.
    void reject_unknown(const std::set<std::string>& allowed) const;

    const std::map<std::string, std::string>& values() const { return values_; }

private:
    std::map<std::string, std::string> values_;
};

}  // namespace fishmig
