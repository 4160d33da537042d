#pragma once

#include <filesystem>
#include <string>

#include "ladder/policy.hpp"

namespace ladder {

// Flat parameter vector plus the producing run's config hash, as JSON.
// Doubles round-trip bit-exactly through the serializer.
void save_checkpoint(const std::filesystem::path& path, const PolicyParams& params,
                     const std::string& config_hash);

// Rejects a checkpoint whose config hash differs from expected_hash unless
// force is set, in which case a warning goes to stderr.
PolicyParams load_checkpoint(const std::filesystem::path& path,
                             const std::string& expected_hash, bool force = false);

}  // namespace ladder
