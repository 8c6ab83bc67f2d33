#pragma once

#include <string>

#include "galaxy/galaxy_code.hpp"

namespace galaxy {

inline constexpr int kCodeFormatVersion = 1;

// Thrown for files that are not valid JSON or do not match the schema.
class FormatError : public Error {
 public:
  using Error::Error;
};

// Lossless text form of a double: C99 hex-float ("0x1.8p+1"), with "inf",
// "-inf" and "nan" for the non-finite values.
std::string hexfloat(double x);
double parse_hexfloat(const std::string& s);

// JSON text with a trailing newline. Byte-identical for identical codes.
std::string serialize_code(const GalaxyCode& code);

// Inverse of serialize_code; codewords are rebuilt from the stored trees, so
// parse(serialize(c)) reproduces c exactly.
GalaxyCode parse_code(const std::string& text);

void write_code_file(const std::string& path, const GalaxyCode& code);
GalaxyCode read_code_file(const std::string& path);

}  // namespace galaxy
