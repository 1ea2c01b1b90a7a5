#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace glmdisc::csv {

using Row = std::vector<std::string>;

/// Reads one RFC 4180 record (comma separated, double-quote escaping).
/// Returns false at end of input.
bool read_record(std::istream& in, Row& out);

void write_record(std::ostream& out, const Row& fields);

std::string quote_if_needed(const std::string& field);

}  // namespace glmdisc::csv
