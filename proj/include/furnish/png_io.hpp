#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include <png.h>

#include <furnish/error.hpp>
#include <furnish/image.hpp>

namespace furnish {

/// Reads an 8-bit RGB PNG without alpha; any other pixel format is rejected.
inline RgbImage read_png(const std::filesystem::path& path)
{
    png_image image{};
    image.version = PNG_IMAGE_VERSION;
    if (!png_image_begin_read_from_file(&image, path.string().c_str()))
        throw ValidationError("cannot read PNG " + path.string() + ": " + image.message);
    if (image.format != PNG_FORMAT_RGB) {
        png_image_free(&image);
        throw ValidationError("RGB8 required: " + path.string() + " is not an 8-bit RGB PNG without alpha");
    }
    std::vector<std::uint8_t> buffer(PNG_IMAGE_SIZE(image));
    if (!png_image_finish_read(&image, nullptr, buffer.data(), 0, nullptr)) {
        png_image_free(&image);
        throw ValidationError("cannot decode PNG " + path.string() + ": " + image.message);
    }
    RgbImage out(int(image.width), int(image.height));
    for (std::size_t i = 0; i < out.size(); ++i)
        out.pixels[i] = {buffer[3 * i], buffer[3 * i + 1], buffer[3 * i + 2]};
    return out;
}

inline void write_png(const std::filesystem::path& path, const RgbImage& img)
{
    std::vector<std::uint8_t> buffer;
    buffer.reserve(img.size() * 3);
    for (const auto& p : img.pixels) {
        buffer.push_back(p.r);
        buffer.push_back(p.g);
        buffer.push_back(p.b);
    }
    png_image image{};
    image.version = PNG_IMAGE_VERSION;
    image.width = png_uint_32(img.width);
    image.height = png_uint_32(img.height);
    image.format = PNG_FORMAT_RGB;
    if (!png_image_write_to_file(&image, path.string().c_str(), 0, buffer.data(), 0, nullptr))
        throw RuntimeFailure("cannot write PNG " + path.string() + ": " + image.message);
}

} // namespace furnish
