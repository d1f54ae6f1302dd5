#include "labelforge/csv.hpp"

#include <fstream>
#include <sstream>

#include "labelforge/error.hpp"
#include "text_util.hpp"

namespace labelforge {
namespace {

class RecordReader {
 public:
  RecordReader(std::string_view data, char delimiter) : data_(data), delimiter_(delimiter) {}

  bool done() const { return pos_ >= data_.size(); }
  std::size_t line() const { return line_; }

  // Reads one record; returns false at end of input.
  bool next(std::vector<std::string>& fields) {
    fields.clear();
    if (done()) return false;
    std::string field;
    bool quoted = false;
    bool field_was_quoted = false;
    while (pos_ < data_.size()) {
      char c = data_[pos_++];
      if (quoted) {
        if (c == '"') {
          if (pos_ < data_.size() && data_[pos_] == '"') {
            field.push_back('"');
            ++pos_;
          } else {
            quoted = false;
          }
        } else {
          if (c == '\n') ++line_;
          field.push_back(c);
        }
        continue;
      }
      if (c == '"' && field.empty() && !field_was_quoted) {
        quoted = true;
        field_was_quoted = true;
      } else if (c == delimiter_) {
        fields.push_back(std::move(field));
        field.clear();
        field_was_quoted = false;
      } else if (c == '\n') {
        ++line_;
        break;
      } else if (c == '\r' && pos_ < data_.size() && data_[pos_] == '\n') {
        // CRLF: swallow the CR, the LF ends the record next iteration.
      } else {
        field.push_back(c);
      }
    }
    if (quoted) throw UserError("unterminated quoted field starting before line " + std::to_string(line_));
    fields.push_back(std::move(field));
    return true;
  }

 private:
  std::string_view data_;
  char delimiter_;
  std::size_t pos_ = 0;
  std::size_t line_ = 1;
};

bool blank_record(const std::vector<std::string>& fields) {
  return fields.size() == 1 && text::trim(fields[0]).empty();
}

}  // namespace

DelimitedTable DelimitedTable::read(std::istream& in, char delimiter) {
  std::ostringstream buffer;
  buffer << in.rdbuf();
  std::string data = buffer.str();
  if (data.starts_with("\xEF\xBB\xBF")) data.erase(0, 3);

  if (delimiter == 0) {
    auto header_end = data.find('\n');
    auto header = std::string_view(data).substr(0, header_end);
    delimiter = header.find('\t') != std::string_view::npos ? '\t' : ',';
  }

  DelimitedTable table;
  table.source_ = "<stream>";
  RecordReader reader(data, delimiter);
  std::vector<std::string> fields;
  if (!reader.next(fields)) throw UserError("delimited table is empty");
  for (auto& name : fields) table.header_.emplace_back(text::trim(name));

  std::size_t index = 0;
  while (true) {
    const auto start_line = reader.line();
    if (!reader.next(fields)) break;
    if (blank_record(fields)) continue;
    table.rows_.push_back(Row{index++, start_line, fields});
  }
  return table;
}

DelimitedTable DelimitedTable::read_file(const std::string& path, char delimiter) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open input file " + path);
  auto table = read(in, delimiter);
  table.source_ = path;
  return table;
}

std::optional<std::size_t> DelimitedTable::column(std::string_view name) const {
  for (std::size_t i = 0; i < header_.size(); ++i) {
    if (header_[i] == name) return i;
  }
  return std::nullopt;
}

std::size_t DelimitedTable::require_column(std::string_view name) const {
  if (auto index = column(name)) return *index;
  throw UserError("missing column '" + std::string(name) + "' in " + source_);
}

}  // namespace labelforge
