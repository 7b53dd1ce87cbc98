#pragma once

#include <cstdint>
#include <string>

#include "speared/dsl.hpp"

namespace speared {

struct CodeStoreEntry {
  Program program;
  std::uint64_t revision = 0;
  std::string last_writer;
};

struct StoreResult {
  bool accepted = false;
  std::uint64_t revision = 0;  ///< new revision, or the current one on conflict
};

/// Shared program with optimistic concurrency: a store is accepted only when
/// the writer saw the current revision.
class CodeStore {
 public:
  const CodeStoreEntry& load() const { return entry_; }

  StoreResult store(Program program, std::uint64_t expected_revision, std::string client) {
    if (expected_revision != entry_.revision) return {false, entry_.revision};
    entry_.program = std::move(program);
    entry_.last_writer = std::move(client);
    ++entry_.revision;
    return {true, entry_.revision};
  }

 private:
  CodeStoreEntry entry_;
};

}  // namespace speared
