#pragma once

#include <string>

#include "semground/types.hpp"

namespace semground {

/// 8-bit grayscale PNG of an image sample (values scaled by 255 and rounded).
std::string encode_png_grayscale(const InputSample& image);

}  // namespace semground
