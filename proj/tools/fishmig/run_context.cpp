#include "run_context.hpp"

#include <openssl/evp.h>

#include <array>
#include <chrono>
#include <ctime>
#include <fstream>
#include <json.hpp>
#include <memory>

#include "fishmig/error.hpp"
#include "fishmig/text.hpp"

namespace fishmig::cli {

namespace fs = std::filesystem;

Run::Run(std::string command, const KvConfig& defaults, const GlobalOptions& globals,
         const std::map<std::string, std::string>& overrides)
    : command_(std::move(command)), config_(defaults), out_(globals.out_dir) {
    std::set<std::string> allowed;
    for (const auto& [k, v] : defaults.values()) allowed.insert(k);
    if (!globals.config_path.empty()) {
        const auto file = KvConfig::parse_file(globals.config_path);
        file.reject_unknown(allowed);
        config_.merge(file);
        add_input(globals.config_path);
    }
    KvConfig cli;
    for (const auto& [k, v] : overrides) cli.set(k, v);
    if (globals.seed) cli.set("seed", std::to_string(*globals.seed));
    cli.reject_unknown(allowed);
    config_.merge(cli);

    const auto s = text::parse_int(config_.get_string("seed", "1"));
    if (!s || *s < 0) throw InputError("seed must be a non-negative integer");
    seed_ = static_cast<std::uint64_t>(*s);
    fs::create_directories(out_);
}

std::string Run::get(const std::string& key) const { return config_.get_string(key, ""); }

std::string Run::require(const std::string& key) const {
    auto v = get(key);
    if (v.empty()) throw InputError(command_ + ": missing required --" + key + " (see `fishmig " + command_ + " --help`)");
    return v;
}

std::string Run::output(const std::string& name) const { return (out_ / name).string(); }

void Run::add_input(const std::string& path) {
    if (fs::is_directory(path)) {
        std::vector<std::string> files;
        for (const auto& e : fs::recursive_directory_iterator(path))
            if (e.is_regular_file()) files.push_back(e.path().string());
        std::sort(files.begin(), files.end());
        inputs_.insert(inputs_.end(), files.begin(), files.end());
    } else {
        inputs_.push_back(path);
    }
}

namespace {

std::string utc_timestamp() {
    const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&now, &tm);
    std::array<char, 32> buf{};
    std::strftime(buf.data(), buf.size(), "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf.data();
}

}  // namespace

void Run::write_manifest() const {
    nlohmann::ordered_json j;
    j["command"] = command_;
    j["version"] = FISHMIG_VERSION;
    j["seed"] = seed_;
    nlohmann::ordered_json cfg = nlohmann::ordered_json::object();
    for (const auto& [k, v] : config_.values()) cfg[k] = v;
    j["config"] = cfg;
    nlohmann::ordered_json inputs = nlohmann::ordered_json::object();
    for (const auto& p : inputs_)
        if (fs::is_regular_file(p)) inputs[p] = sha256_file(p);
    j["inputs"] = inputs;
    j["timestamp"] = utc_timestamp();
    const auto path = output("manifest_" + command_ + ".json");
    std::ofstream out(path);
    if (!out) throw InputError("cannot write '" + path + "'");
    out << j.dump(2) << '\n';
}

std::string sha256_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InputError("cannot open '" + path + "'");
    std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx(EVP_MD_CTX_new(), EVP_MD_CTX_free);
    EVP_DigestInit_ex(ctx.get(), EVP_sha256(), nullptr);
    std::array<char, 1 << 15> buf{};
    while (in.read(buf.data(), buf.size()) || in.gcount() > 0)
        EVP_DigestUpdate(ctx.get(), buf.data(), static_cast<std::size_t>(in.gcount()));
    std::array<unsigned char, EVP_MAX_MD_SIZE> md{};
    unsigned int len = 0;
    EVP_DigestFinal_ex(ctx.get(), md.data(), &len);
    static constexpr char hex[] = "0123456789abcdef";
    std::string s;
    for (unsigned int k = 0; k < len; ++k) {
        s += hex[md[k] >> 4];
        s += hex[md[k] & 0xf];
    }
    return s;
}

std::vector<std::string> parse_list(const std::string& text) {
    std::vector<std::string> out;
    for (auto part : text::split(text, ',')) {
        const auto t = text::trim(part);
        if (!t.empty()) out.emplace_back(t);
    }
    return out;
}

std::vector<int> parse_int_list(const std::string& text) {
    std::vector<int> out;
    for (const auto& item : parse_list(text)) {
        const auto dash = item.find('-', 1);
        if (dash != std::string::npos) {
            const auto a = text::parse_int(item.substr(0, dash));
            const auto b = text::parse_int(item.substr(dash + 1));
            if (!a || !b || *b < *a) throw InputError("bad range '" + item + "'");
            for (long long v = *a; v <= *b; ++v) out.push_back(static_cast<int>(v));
        } else {
            const auto v = text::parse_int(item);
            if (!v) throw InputError("'" + item + "' is not an integer");
            out.push_back(static_cast<int>(*v));
        }
    }
    return out;
}

eca::Coord parse_coord(const std::string& text) {
    const auto parts = parse_list(text);
    if (parts.size() != 2) throw InputError("expected a grid coordinate 'i,j', got '" + text + "'");
    const auto i = text::parse_int(parts[0]);
    const auto j = text::parse_int(parts[1]);
    if (!i || !j) throw InputError("expected a grid coordinate 'i,j', got '" + text + "'");
    return {static_cast<int>(*i), static_cast<int>(*j)};
}

}  // namespace fishmig::cli
