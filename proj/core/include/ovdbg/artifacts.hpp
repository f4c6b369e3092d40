#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

namespace ovdbg {

// FNV-1a 64-bit, hex encoded. Stable across runs and platforms; used for
// artifact staleness detection, not security.
std::string fnv1a_hex(std::string_view bytes);
std::string file_hash(const std::filesystem::path &path);

struct ArtifactMeta
{
    std::string producer;                      // subcommand + flags
    std::map<std::string, std::string> inputs; // input file name -> content hash
};

// Artifacts are JSON documents with a "meta" key recording the producing
// command and the hash of every input they were derived from. Keys are
// written sorted, so identical payloads give identical bytes.
void save_artifact(const std::filesystem::path &path, nlohmann::json payload,
                   const ArtifactMeta &meta);
nlohmann::json load_artifact(const std::filesystem::path &path,
                             ArtifactMeta *meta = nullptr);

// Names of recorded inputs whose current file hash no longer matches.
std::vector<std::string> stale_inputs(const std::filesystem::path &dir, const ArtifactMeta &meta);

// Strips measurement fields (wall-clock times) so that deterministic content
// can be compared byte-for-byte across runs.
nlohmann::json strip_volatile(nlohmann::json j);
bool artifacts_equal_normalized(const std::filesystem::path &a, const std::filesystem::path &b);

} // namespace ovdbg
