#pragma once

#include "json.hpp"

#include <filesystem>
#include <string>
#include <vector>

namespace sparsepsi {

/// Hex SHA-256 of a file's bytes.
std::string sha256_file(const std::filesystem::path& path);

/// Self-describing record written next to every command's outputs.
struct RunManifest
{
    std::string subcommand;
    std::vector<std::string> command_line;
    nlohmann::json parameters = nlohmann::json::object();
    nlohmann::json seeds = nlohmann::json::object();
    std::vector<std::filesystem::path> inputs;
    std::vector<std::string> outputs;
    double wall_time = 0.0;
    int exit_code = 0;

    nlohmann::json to_json() const;
    void write(const std::filesystem::path& dir) const;
};

std::string tool_version();

} // namespace sparsepsi
