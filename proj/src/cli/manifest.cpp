#include <vdt/cli/manifest.hpp>
#include <vdt/common/errors.hpp>

#include <openssl/evp.h>

#include <algorithm>
#include <array>
#include <fstream>
#include <memory>

namespace vdt::cli {

namespace fs = std::filesystem;

namespace {

class Sha256 {
public:
    Sha256() : ctx_(EVP_MD_CTX_new(), &EVP_MD_CTX_free) {
        if (!ctx_ || EVP_DigestInit_ex(ctx_.get(), EVP_sha256(), nullptr) != 1) {
            throw Error("SHA-256 initialisation failed");
        }
    }

    void update(const char* data, std::size_t n) { EVP_DigestUpdate(ctx_.get(), data, n); }

    std::string hex() {
        std::array<unsigned char, EVP_MAX_MD_SIZE> md{};
        unsigned int len = 0;
        EVP_DigestFinal_ex(ctx_.get(), md.data(), &len);
        static constexpr char kDigits[] = "0123456789abcdef";
        std::string out;
        out.reserve(2 * len);
        for (unsigned int i = 0; i < len; ++i) {
            out.push_back(kDigits[md[i] >> 4]);
            out.push_back(kDigits[md[i] & 0xF]);
        }
        return out;
    }

private:
    std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx_;
};

} // namespace

std::string sha256_hex(const std::string& data) {
    Sha256 h;
    h.update(data.data(), data.size());
    return h.hex();
}

std::string sha256_file(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw LoadError(path.string() + ": cannot open for hashing");
    }
    Sha256 h;
    std::array<char, 1 << 16> buf{};
    while (in) {
        in.read(buf.data(), static_cast<std::streamsize>(buf.size()));
        h.update(buf.data(), static_cast<std::size_t>(in.gcount()));
    }
    return h.hex();
}

void RunManifest::collect_artifacts() {
    artifacts.clear();
    const fs::path root(output_dir);
    if (!fs::is_directory(root)) {
        return;
    }
    for (const auto& entry : fs::recursive_directory_iterator(root)) {
        if (!entry.is_regular_file()) {
            continue;
        }
        const fs::path rel = fs::relative(entry.path(), root);
        if (rel == "manifest.json") {
            continue;
        }
        artifacts.push_back({rel.generic_string(), sha256_file(entry.path()), entry.file_size()});
    }
    std::sort(artifacts.begin(), artifacts.end(), [](const Artifact& a, const Artifact& b) { return a.path < b.path; });
}

nlohmann::json RunManifest::to_json() const {
    nlohmann::json arts = nlohmann::json::array();
    for (const auto& a : artifacts) {
        arts.push_back({{"path", a.path}, {"sha256", a.sha256}, {"bytes", a.bytes}});
    }
    return {{"command", command},  {"arguments", arguments}, {"config_paths", config_paths},
            {"seed", seed},        {"output_dir", output_dir}, {"artifacts", arts}};
}

fs::path RunManifest::write() const {
    const fs::path p = fs::path(output_dir) / "manifest.json";
    std::ofstream out(p);
    if (!out) {
        throw Error("cannot write " + p.string());
    }
    out << to_json().dump(2) << '\n';
    return p;
}

} // namespace vdt::cli
