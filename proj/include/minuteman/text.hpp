#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace minuteman::text {

bool is_space(char c);
std::string_view trim(std::string_view s);
std::vector<std::string_view> split_whitespace(std::string_view s);
std::vector<std::string_view> split_lines(std::string_view s);
std::string to_lower_ascii(std::string_view s);
std::string join(const std::vector<std::string>& parts, std::string_view sep);

/// Lossless UTF-8 decoding: bytes that are not valid UTF-8 map to the
/// surrogate-escape range U+DC80..U+DCFF and are restored by utf8_encode().
std::u32string utf8_decode(std::string_view s);
std::string utf8_encode(std::u32string_view s);
/// Length in code points, as counted by utf8_decode().
std::size_t utf8_length(std::string_view s);

}  // namespace minuteman::text
