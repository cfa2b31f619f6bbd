#include "fishmig/kv_config.hpp"

#include <sstream>

#include "fishmig/error.hpp"
#include "fishmig/text.hpp"

namespace fishmig {

KvConfig KvConfig::parse_text(const std::string& body, const std::string& source) {
    KvConfig cfg;
    std::istringstream in(body);
    std::string raw;
    std::size_t line_no = 0;
    while (std::getline(in, raw)) {
        ++line_no;
        const auto line = text::trim(raw);
        if (line.empty() || line.front() == '#') continue;
        const auto eq = line.find('=');
        if (eq == std::string_view::npos)
            throw ParseError(source, line_no, "expected key=value, got '" + std::string(line) + "'");
        const auto key = text::trim(line.substr(0, eq));
        if (key.empty()) throw ParseError(source, line_no, "empty key");
        cfg.values_[std::string(key)] = std::string(text::trim(line.substr(eq + 1)));
    }
    return cfg;
}

KvConfig KvConfig::parse_file(const std::string& path) {
    std::string body;
    for (const auto& l : text::read_lines(path)) {
        body += l;
        body += '\n';
    }
    return parse_text(body, path);
}

void KvConfig::merge(const KvConfig& overrides) {
    for (const auto& [k, v] : overrides.values_) values_[k] = v;
}

std::optional<std::string> KvConfig::get(const std::string& key) const {
    const auto it = values_.find(key);
    if (it == values_.end()) return std::nullopt;
    return it->second;
}

std::string KvConfig::get_string(const std::string& key, const std::string& fallback) const {
    return get(key).value_or(fallback);
}

double KvConfig::get_double(const std::string& key, double fallback) const {
    const auto v = get(key);
    if (!v) return fallback;
    const auto d = text::parse_double(*v);
    if (!d) throw InputError("setting '" + key + "' is not a number: '" + *v + "'");
    return *d;
}

long long KvConfig::get_int(const std::string& key, long long fallback) const {
    const auto v = get(key);
    if (!v) return fallback;
    const auto i = text::parse_int(*v);
    if (!i) throw InputError("setting '" + key + "' is not an integer: '" + *v + "'");
    return *i;
}

bool KvConfig::get_bool(const std::string& key, bool fallback) const {
    const auto v = get(key);
    if (!v) return fallback;
    if (*v == "1" || *v == "true" || *v == "yes" || *v == "on") return true;
    if (*v == "0" || *v == "false" || *v == "no" || *v == "off") return false;
    throw InputError("setting '" + key + "' is not a boolean: '" + *v + "'");
}

void KvConfig::reject_unknown(const std::set<std::string>& allowed) const {
    for (const auto& [k, v] : values_)
        if (!allowed.contains(k)) throw InputError("unknown setting '" + k + "'");
}

}  // namespace fishmig
