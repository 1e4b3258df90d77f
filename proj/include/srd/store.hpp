#pragma once

#include <filesystem>
#include <vector>

#include <json.hpp>

#include "srd/corpus.hpp"

namespace srd {

/// Ingested corpus. On disk: one directory per table, one file per field
/// ("<field>.col", one JSON value per line), plus manifest.json.
struct CorpusStore {
  std::vector<Post> posts;
  std::vector<UserAccount> accounts;
  nlohmann::json manifest = nlohmann::json::object();
};

/// Builds the store next to `dir` and renames it into place.
void write_store(const std::filesystem::path& dir, const CorpusStore& store);

/// Throws DataError when the store is missing or its columns disagree.
CorpusStore read_store(const std::filesystem::path& dir);

} // namespace srd
