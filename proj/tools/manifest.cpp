#include "manifest.hpp"

#include <openssl/evp.h>

#include <array>
#include <fstream>
#include <memory>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace d2drelay::cli {

std::string sha256_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot read " + path.string());
    std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx(EVP_MD_CTX_new(), EVP_MD_CTX_free);
    if (!ctx || EVP_DigestInit_ex(ctx.get(), EVP_sha256(), nullptr) != 1) {
        throw std::runtime_error("sha256 unavailable");
    }
    std::array<char, 1 << 16> buf{};
    while (in) {
        in.read(buf.data(), buf.size());
        if (in.gcount() > 0) EVP_DigestUpdate(ctx.get(), buf.data(), static_cast<std::size_t>(in.gcount()));
    }
    std::array<unsigned char, EVP_MAX_MD_SIZE> md{};
    unsigned int len = 0;
    EVP_DigestFinal_ex(ctx.get(), md.data(), &len);
    static constexpr char hex[] = "0123456789abcdef";
    std::string out;
    for (unsigned i = 0; i < len; ++i) {
        out += hex[md[i] >> 4];
        out += hex[md[i] & 15];
    }
    return out;
}

namespace {

// Section -> key -> value text, straight from the resolved ini.
nlohmann::ordered_json ini_to_json(const std::string& text) {
    nlohmann::ordered_json out = nlohmann::ordered_json::object();
    std::istringstream in(text);
    std::string line, section;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        if (line.front() == '[' && line.back() == ']') {
            section = line.substr(1, line.size() - 2);
            out[section] = nlohmann::ordered_json::object();
            continue;
        }
        auto eq = line.find(" = ");
        if (eq == std::string::npos) continue;
        out[section][line.substr(0, eq)] = line.substr(eq + 3);
    }
    return out;
}

}  // namespace

void write_manifest(const std::filesystem::path& dir, const RunManifest& manifest) {
    {
        std::ofstream ini(dir / "resolved.ini", std::ios::binary);
        ini << manifest.resolved_config;
        if (!ini) throw std::runtime_error("cannot write resolved.ini");
    }
    nlohmann::ordered_json j;
    j["command"] = manifest.command;
    j["seed"] = manifest.seed;
    j["version"] = manifest.version;
    j["duration_s"] = manifest.duration_s;
    j["parameters"] = ini_to_json(manifest.resolved_config);
    j["config_file"] = "resolved.ini";
    nlohmann::ordered_json opts = nlohmann::ordered_json::object();
    for (const auto& [k, v] : manifest.options) opts[k] = v;
    j["options"] = opts;
    nlohmann::ordered_json digests = nlohmann::ordered_json::object();
    for (const auto& rel : manifest.outputs) digests[rel.generic_string()] = sha256_file(dir / rel);
    digests["resolved.ini"] = sha256_file(dir / "resolved.ini");
    j["outputs"] = digests;
    std::ofstream out(dir / "manifest.json", std::ios::binary);
    out << j.dump(2) << '\n';
    if (!out) throw std::runtime_error("cannot write manifest.json");
}

}  // namespace d2drelay::cli
