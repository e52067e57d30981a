#ifndef SLOTPERTURB_TEXT_H_
#define SLOTPERTURB_TEXT_H_

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace slotperturb {

// ASCII lowercase; bytes >= 0x80 pass through untouched.
std::string to_lower(std::string_view s);

bool has_whitespace(std::string_view s);

// Splits on runs of ASCII whitespace, dropping empty pieces.
std::vector<std::string> split_whitespace(std::string_view s);

// Splits on a single delimiter, keeping empty pieces.
std::vector<std::string> split(std::string_view s, char delim);

std::string_view trim(std::string_view s);

// True when every character is a letter. ASCII letters and any non-ASCII
// UTF-8 sequence count as letters; digits and punctuation do not.
bool is_all_letters(std::string_view s);

// True when the string contains at least one letter in the sense above.
bool has_letter(std::string_view s);

// Byte offsets where each UTF-8 code point starts.
std::vector<std::size_t> utf8_boundaries(std::string_view s);

// Splits a document into lines on LF, stripping a trailing CR on each line.
// A trailing newline does not produce an extra empty line.
std::vector<std::string_view> split_lines(std::string_view text);

std::string join(const std::vector<std::string> &parts, std::string_view sep);

std::string read_file(const std::filesystem::path &path);
void write_file(const std::filesystem::path &path, std::string_view contents);

// FNV-1a 64-bit hash; stable across platforms.
std::uint64_t fnv1a64(std::string_view data);

}  // namespace slotperturb

#endif  // SLOTPERTURB_TEXT_H_
