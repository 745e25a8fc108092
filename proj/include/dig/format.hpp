#ifndef DIG_FORMAT_HPP
#define DIG_FORMAT_HPP

#include <cstdint>
#include <string>
#include <string_view>

namespace dig {

// Shortest general-format rendering with 9 significant digits. Locale
// independent.
std::string format_number(double value);

// FNV-1a 64-bit hash rendered as 16 lowercase hex digits.
std::string fnv1a_hex(std::string_view text);

std::string read_text_file(const std::string &path);
void write_text_file(const std::string &path, std::string_view text);

} // namespace dig

#endif // DIG_FORMAT_HPP
