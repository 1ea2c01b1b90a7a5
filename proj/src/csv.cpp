#include "glmdisc/csv.hpp"

#include <istream>
#include <ostream>

namespace glmdisc::csv {

bool read_record(std::istream& in, Row& out) {
  out.clear();
  if (in.peek() == std::char_traits<char>::eof()) return false;

  std::string field;
  bool quoted = false;
  bool any = false;
  char c;
  while (in.get(c)) {
    any = true;
    if (quoted) {
      if (c == '"') {
        if (in.peek() == '"') {
          in.get(c);
          field.push_back('"');
        } else {
          quoted = false;
        }
      } else {
        field.push_back(c);
      }
      continue;
    }
    if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      out.push_back(std::move(field));
      field.clear();
    } else if (c == '\n') {
      break;
    } else if (c == '\r') {
      if (in.peek() == '\n') in.get(c);
      break;
    } else {
      field.push_back(c);
    }
  }
  if (!any) return false;
  out.push_back(std::move(field));
  return true;
}

std::string quote_if_needed(const std::string& field) {
  if (field.find_first_of(",\"\r\n") == std::string::npos) return field;
  std::string q = "\"";
  for (char c : field) {
    if (c == '"') q.push_back('"');
    q.push_back(c);
  }
  q.push_back('"');
  return q;
}

void write_record(std::ostream& out, const Row& fields) {
  for (std::size_t i = 0; i < fields.size(); ++i) {
    if (i) out << ',';
    out << quote_if_needed(fields[i]);
  }
  out << '\n';
}

}  // namespace glmdisc::csv
