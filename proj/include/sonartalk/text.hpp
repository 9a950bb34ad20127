#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace sonartalk::text {

// Strict UTF-8 decode; throws InputError on malformed input.
std::u32string decode_utf8(std::string_view s);
std::string encode_utf8(std::u32string_view s);

bool is_space(char32_t c);

// Number of code points; throws on malformed UTF-8.
std::size_t char_count(std::string_view s);

std::string_view trim(std::string_view s);
std::u32string_view trim(std::u32string_view s);

// Splits on ASCII/Unicode whitespace, dropping empty tokens.
std::vector<std::string> split_ws(std::string_view s);

std::string join(const std::vector<std::string>& parts, std::string_view sep);

// Collapses whitespace runs to one space and trims the ends.
std::string normalize_ws(std::string_view s);

}  // namespace sonartalk::text
