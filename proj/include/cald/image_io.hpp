#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "cald/tensor.hpp"

namespace cald {

// Reads an 8-bit PNG or binary PPM (P6) into [1,3,H,W], values in [0,1].
// Gray and RGBA PNGs are expanded/stripped to RGB.
Tensor read_image(const std::string& path);

// Writes [1,3,H,W] (clamped to [0,1]) as PNG or PPM by file extension.
void write_image(const std::string& path, const Tensor& image);

// 8-bit binary PGM (P5).
void write_pgm(const std::string& path, const std::vector<uint8_t>& gray, int64_t h, int64_t w);

// Byte-level helpers with atomic replace (write to tmp, then rename).
void write_file_atomic(const std::string& path, const std::vector<uint8_t>& bytes);
std::vector<uint8_t> read_file(const std::string& path);

}  // namespace cald
