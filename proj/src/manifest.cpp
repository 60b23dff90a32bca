#include <sparsepsi/manifest.hpp>

#include <openssl/evp.h>

#include <array>
#include <fstream>
#include <iomanip>
#include <memory>
#include <sstream>
#include <stdexcept>

#ifndef SPARSEPSI_VERSION
#define SPARSEPSI_VERSION "0.0.0"
#endif

namespace sparsepsi {

std::string tool_version()
{
    return SPARSEPSI_VERSION;
}

std::string sha256_file(const std::filesystem::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw std::runtime_error("cannot read '" + path.string() + "' for hashing");

    std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx(EVP_MD_CTX_new(), EVP_MD_CTX_free);
    if (!ctx || EVP_DigestInit_ex(ctx.get(), EVP_sha256(), nullptr) != 1)
        throw std::runtime_error("sha256: digest initialization failed");

    std::array<char, 1 << 16> buf{};
    while (in) {
        in.read(buf.data(), buf.size());
        if (in.gcount() > 0)
            EVP_DigestUpdate(ctx.get(), buf.data(), static_cast<std::size_t>(in.gcount()));
    }
    std::array<unsigned char, EVP_MAX_MD_SIZE> md{};
    unsigned int len = 0;
    EVP_DigestFinal_ex(ctx.get(), md.data(), &len);

    std::ostringstream os;
    for (unsigned int k = 0; k < len; ++k)
        os << std::hex << std::setw(2) << std::setfill('0') << static_cast<int>(md[k]);
    return os.str();
}

nlohmann::json RunManifest::to_json() const
{
    nlohmann::json j;
    j["tool"] = "sparsepsi";
    j["version"] = tool_version();
    j["subcommand"] = subcommand;
    j["command_line"] = command_line;
    j["parameters"] = parameters;
    j["seeds"] = seeds;
    auto& in = j["inputs"] = nlohmann::json::array();
    for (const auto& p : inputs)
        in.push_back({{"path", p.string()}, {"sha256", sha256_file(p)}});
    j["outputs"] = outputs;
    j["wall_time_seconds"] = wall_time;
    j["exit_code"] = exit_code;
    return j;
}

void RunManifest::write(const std::filesystem::path& dir) const
{
    std::ofstream out(dir / "manifest.json");
    if (!out)
        throw std::runtime_error("cannot write manifest in '" + dir.string() + "'");
    out << to_json().dump(2) << '\n';
}

} // namespace sparsepsi
