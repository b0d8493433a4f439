#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "qnr/learn.hpp"
#include "qnr/serialize.hpp"

namespace qnr::cli {

// Strict CSV ingestion: UTF-8, header row, every referenced column numeric.
Dataset ingest_csv(const std::string& path,
                   const std::map<std::string, std::vector<std::string>>& input_cols,
                   const std::vector<std::string>& target_cols);

// Execute one experiment config; writes result.json (always), trace.jsonl and
// model.json (train), dist.json (qfa-dist) into the output directory.
// Exit codes: 0 success, 2 config/validation error, 3 numerical failure.
int run(const std::string& config_path, const std::optional<std::string>& out_dir,
        const std::optional<std::uint64_t>& seed_override);

}  // namespace qnr::cli
