#pragma once

// Result files. Series are CSV with a metadata comment line, structured objects
// are JSON; both carry schema_version. Files are written to a temporary name in
// the target directory and renamed into place.

#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "coarse/decomposition.hpp"
#include "coarse/folner.hpp"
#include "json.hpp"

namespace coarse {

using nlohmann::json;

inline constexpr int kSchemaVersion = 1;

/// Writes `content` to path.tmp-<pid> and renames it over `path`. The temporary
/// is removed on failure (ResourceError).
void write_atomic(const std::filesystem::path& path, std::string_view content);
std::string read_file(const std::filesystem::path& path);

/// Shortest decimal that reads back to the same double.
std::string format_double(double x);

/// A CSV table:
///   # coarse-lab schema_version=1 kind=walk group=z1 ...
///   n,value,stderr,method,seed
///   ...
/// Metadata values and cells must not contain spaces, commas or newlines.
struct Table {
  std::map<std::string, std::string> meta;  // schema_version and kind are always present
  std::vector<std::string> columns;
  std::vector<std::vector<std::string>> rows;

  Table(std::string kind, std::vector<std::string> columns);
  Table() = default;
  void add_row(std::vector<std::string> cells);
  std::string render() const;
  /// DomainError on malformed input or a schema_version other than kSchemaVersion.
  static Table parse(std::string_view text);
  /// Index of a column; DomainError when absent.
  std::size_t column(std::string_view name) const;
  std::string_view kind() const { return meta.at("kind"); }
};

/// A result file as JSON: JSON files as they are, CSV tables as
/// {schema_version, kind, meta..., rows: [{column: cell}]} with cells kept as strings.
json load_document(const std::filesystem::path& path);
/// DomainError unless j.schema_version == kSchemaVersion.
void check_schema(const json& j, std::string_view what);

json to_json(const Partition& p, const DecompositionReport& report);
/// Rebuilds the ambient ball and maps element keys back to indices.
Partition partition_from_json(const json& j, std::size_t cap = default_element_cap());

json to_json(const FolnerCouple& c);
/// Needs ambient_radius and group from the enclosing document.
FolnerCouple couple_from_json(const json& j, std::size_t cap = default_element_cap());

json subset_keys(const FiniteSubset& s);

}  // namespace coarse
