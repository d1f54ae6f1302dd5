#pragma once

#include <cstddef>
#include <istream>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace labelforge {

/// Header-addressed rows of a comma- or tab-separated file. Quoted fields
/// follow RFC 4180: doubled quotes escape, and quoted fields may span lines.
class DelimitedTable {
 public:
  /// Delimiter 0 means detect from the header line (tab when it contains
  /// one, comma otherwise).
  static DelimitedTable read(std::istream& in, char delimiter = 0);
  static DelimitedTable read_file(const std::string& path, char delimiter = 0);

  const std::vector<std::string>& header() const { return header_; }
  std::optional<std::size_t> column(std::string_view name) const;
  /// Throws UserError naming the column and the file when absent.
  std::size_t require_column(std::string_view name) const;

  struct Row {
    std::size_t index = 0;  ///< 0-based data row number
    std::size_t line = 0;   ///< 1-based line where the row starts
    std::vector<std::string> fields;
  };
  const std::vector<Row>& rows() const { return rows_; }

  const std::string& source() const { return source_; }

 private:
  std::string source_;
  std::vector<std::string> header_;
  std::vector<Row> rows_;
};

}  // namespace labelforge
