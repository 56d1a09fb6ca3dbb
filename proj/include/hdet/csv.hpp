#pragma once

#include <iosfwd>
#include <span>
#include <string>
#include <vector>

namespace hdet {

// RFC 4180 reader: quoted fields may contain commas, doubled quotes and
// embedded newlines; CRLF and LF both accepted. Returns one vector of fields
// per record.
std::vector<std::vector<std::string>> csv_read(std::istream& in);

// Writes one record, quoting fields that contain commas, quotes or newlines.
void csv_write_row(std::ostream& out, std::span<const std::string> fields);

}  // namespace hdet
