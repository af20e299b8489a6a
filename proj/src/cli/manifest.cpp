#include <fstream>
#include <iomanip>
#include <sstream>

#include <openssl/evp.h>

#include "srs/cli.hpp"
#include "srs/error.hpp"

namespace srs::cli {

std::string sha256_hex(const std::string& bytes) {
    unsigned char digest[EVP_MAX_MD_SIZE];
    unsigned int length = 0;
    if (EVP_Digest(bytes.data(), bytes.size(), digest, &length, EVP_sha256(), nullptr) != 1) {
        throw std::runtime_error("SHA-256 failed");
    }
    std::ostringstream hex;
    for (unsigned int i = 0; i < length; ++i) {
        hex << std::hex << std::setw(2) << std::setfill('0') << static_cast<int>(digest[i]);
    }
    return hex.str();
}

void write_outputs(const std::filesystem::path& dir, const std::map<std::string, std::string>& files,
                   const nlohmann::json& manifest_base) {
    std::filesystem::create_directories(dir);
    nlohmann::json manifest = manifest_base;
    nlohmann::json digests = nlohmann::json::object();
    for (const auto& [name, content] : files) {
        std::ofstream f(dir / name, std::ios::binary);
        if (!f) throw InvalidArgument("cannot write " + (dir / name).string());
        f << content;
        digests[name] = sha256_hex(content);
    }
    manifest["outputs"] = digests;
    std::ofstream m(dir / "manifest.json", std::ios::binary);
    if (!m) throw InvalidArgument("cannot write " + (dir / "manifest.json").string());
    m << manifest.dump(2) << '\n';
}

}  // namespace srs::cli
