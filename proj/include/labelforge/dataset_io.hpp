#pragma once

#include <iosfwd>
#include <string>

#include "labelforge/dataset.hpp"

namespace labelforge {

inline constexpr int kDatasetSchemaVersion = 1;
inline constexpr const char* kDatasetSchemaName = "labelforge.dataset";

/// Line-delimited JSON: a header record, then one record per post with its
/// truth and annotations embedded. See docs/dataset-schema.md.
void write_dataset(const Dataset& dataset, std::ostream& out);
/// Writes to a temporary file next to `path` and renames it into place.
void save_dataset(const Dataset& dataset, const std::string& path);

/// Throws IoError with the line and byte offset on malformed input, and on a
/// schema version other than kDatasetSchemaVersion (naming both versions).
Dataset read_dataset(std::istream& in, const std::string& origin = "<stream>");
Dataset load_dataset(const std::string& path);

nlohmann::json annotation_to_json(const Annotation& annotation);
Annotation annotation_from_json(const nlohmann::json& record);
nlohmann::json outcome_to_json(const ParseOutcome& outcome);
ParseOutcome outcome_from_json(const nlohmann::json& record);

/// Writes `contents` to `path` through a temporary file and rename.
void write_file_atomic(const std::string& path, const std::string& contents);
std::string read_file(const std::string& path);

}  // namespace labelforge
