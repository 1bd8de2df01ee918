#pragma once

#include <string>
#include <string_view>

namespace cbrowse {

// Porter (1980) suffix-stripping stemmer, following the author's reference C
// implementation (including its "bli" -> "ble" and "logi" -> "log" rules).
// Expects a lowercase ASCII word; words of length <= 2 are returned unchanged.
std::string porter_stem(std::string_view word);

}  // namespace cbrowse
