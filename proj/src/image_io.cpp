#include "tamperkit/image_io.hpp"

#include "tamperkit/errors.hpp"

#include <jpeglib.h>
#include <png.h>

#include <cerrno>
#include <csetjmp>
#include <cstdio>
#include <cstring>
#include <fstream>

namespace tamperkit {

namespace {

std::vector<uint8_t> read_file_bytes(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path.string() + ": " + std::strerror(errno));
    std::vector<uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                               std::istreambuf_iterator<char>());
    if (in.bad()) throw IoError("read failed for " + path.string());
    return bytes;
}

void write_file_bytes(const std::filesystem::path& path, const std::vector<uint8_t>& bytes) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open " + path.string() + " for writing");
    out.write(reinterpret_cast<const char*>(bytes.data()),
              static_cast<std::streamsize>(bytes.size()));
    if (!out) throw IoError("write failed for " + path.string());
}

// ---- PNG ----

struct PngReadCursor {
    const uint8_t* data;
    size_t size;
    size_t offset;
};

void png_mem_read(png_structp png, png_bytep out, png_size_t len) {
    auto* cur = static_cast<PngReadCursor*>(png_get_io_ptr(png));
    if (cur->offset + len > cur->size) {
        png_error(png, "png read past end of buffer");
    }
    std::memcpy(out, cur->data + cur->offset, len);
    cur->offset += len;
}

void png_mem_write(png_structp png, png_bytep data, png_size_t len) {
    auto* out = static_cast<std::vector<uint8_t>*>(png_get_io_ptr(png));
    out->insert(out->end(), data, data + len);
}

void png_mem_flush(png_structp) {}

[[noreturn]] void png_raise(png_structp, png_const_charp msg) {
    throw CodecError(std::string("png: ") + (msg ? msg : "unknown error"));
}

void png_quiet_warn(png_structp, png_const_charp) {}

// Decodes a PNG to `channels` (3 = force RGB, 1 = force gray) 8-bit samples.
std::vector<uint8_t> decode_png_channels(const std::vector<uint8_t>& bytes, int channels,
                                         int& width, int& height) {
    png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, png_raise,
                                             png_quiet_warn);
    if (!png) throw CodecError("png: cannot create read struct");
    png_infop info = png_create_info_struct(png);
    if (!info) {
        png_destroy_read_struct(&png, nullptr, nullptr);
        throw CodecError("png: cannot create info struct");
    }

    std::vector<uint8_t> out;
    try {
        PngReadCursor cur{bytes.data(), bytes.size(), 0};
        png_set_read_fn(png, &cur, png_mem_read);
        png_read_info(png, info);

        png_set_expand(png);
        png_set_strip_16(png);
        png_set_strip_alpha(png);
        if (channels == 3) {
            png_set_gray_to_rgb(png);
        } else {
            const png_byte color = png_get_color_type(png, info);
            if (color & PNG_COLOR_MASK_COLOR) {
                png_set_rgb_to_gray_fixed(png, 1, -1, -1);
            }
        }
        png_read_update_info(png, info);

        width = static_cast<int>(png_get_image_width(png, info));
        height = static_cast<int>(png_get_image_height(png, info));
        if (static_cast<int>(png_get_channels(png, info)) != channels) {
            throw CodecError("png: unexpected channel count after transforms");
        }

        out.resize(static_cast<size_t>(width) * height * channels);
        std::vector<png_bytep> rows(height);
        for (int y = 0; y < height; ++y) {
            rows[y] = out.data() + static_cast<size_t>(y) * width * channels;
        }
        png_read_image(png, rows.data());
        png_read_end(png, nullptr);
    } catch (...) {
        png_destroy_read_struct(&png, &info, nullptr);
        throw;
    }
    png_destroy_read_struct(&png, &info, nullptr);
    return out;
}

std::vector<uint8_t> encode_png_channels(const uint8_t* data, int width, int height,
                                         int channels) {
    png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, png_raise,
                                              png_quiet_warn);
    if (!png) throw CodecError("png: cannot create write struct");
    png_infop info = png_create_info_struct(png);
    if (!info) {
        png_destroy_write_struct(&png, nullptr);
        throw CodecError("png: cannot create info struct");
    }

    std::vector<uint8_t> bytes;
    try {
        png_set_write_fn(png, &bytes, png_mem_write, png_mem_flush);
        png_set_IHDR(png, info, width, height, 8,
                     channels == 3 ? PNG_COLOR_TYPE_RGB : PNG_COLOR_TYPE_GRAY,
                     PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT,
                     PNG_FILTER_TYPE_DEFAULT);
        png_write_info(png, info);
        std::vector<png_bytep> rows(height);
        for (int y = 0; y < height; ++y) {
            rows[y] = const_cast<png_bytep>(data + static_cast<size_t>(y) * width * channels);
        }
        png_write_image(png, rows.data());
        png_write_end(png, nullptr);
    } catch (...) {
        png_destroy_write_struct(&png, &info);
        throw;
    }
    png_destroy_write_struct(&png, &info);
    return bytes;
}

// ---- JPEG ----

struct JpegErrorTrap {
    jpeg_error_mgr mgr;
    jmp_buf jump;
    char message[JMSG_LENGTH_MAX];
};

void jpeg_trap_exit(j_common_ptr cinfo) {
    auto* trap = reinterpret_cast<JpegErrorTrap*>(cinfo->err);
    (*cinfo->err->format_message)(cinfo, trap->message);
    longjmp(trap->jump, 1);
}

void jpeg_quiet_output(j_common_ptr) {}

bool looks_like_png(const std::vector<uint8_t>& bytes) {
    static const uint8_t sig[8] = {0x89, 'P', 'N', 'G', '\r', '\n', 0x1a, '\n'};
    return bytes.size() >= 8 && std::memcmp(bytes.data(), sig, 8) == 0;
}

bool looks_like_jpeg(const std::vector<uint8_t>& bytes) {
    return bytes.size() >= 2 && bytes[0] == 0xFF && bytes[1] == 0xD8;
}

} // namespace

ImageBuf decode_png(const std::vector<uint8_t>& bytes) {
    int w = 0;
    int h = 0;
    std::vector<uint8_t> rgb = decode_png_channels(bytes, 3, w, h);
    ImageBuf img(w, h);
    img.data = std::move(rgb);
    return img;
}

std::vector<uint8_t> encode_png(const ImageBuf& image) {
    return encode_png_channels(image.data.data(), image.width, image.height, 3);
}

ImageBuf decode_jpeg(const std::vector<uint8_t>& bytes) {
    jpeg_decompress_struct cinfo;
    JpegErrorTrap trap;
    cinfo.err = jpeg_std_error(&trap.mgr);
    trap.mgr.error_exit = jpeg_trap_exit;
    trap.mgr.output_message = jpeg_quiet_output;
    if (setjmp(trap.jump)) {
        jpeg_destroy_decompress(&cinfo);
        throw CodecError(std::string("jpeg decode: ") + trap.message);
    }

    jpeg_create_decompress(&cinfo);
    jpeg_mem_src(&cinfo, bytes.data(), static_cast<unsigned long>(bytes.size()));
    jpeg_read_header(&cinfo, TRUE);
    cinfo.out_color_space = JCS_RGB;
    jpeg_start_decompress(&cinfo);

    ImageBuf img(static_cast<int>(cinfo.output_width), static_cast<int>(cinfo.output_height));
    while (cinfo.output_scanline < cinfo.output_height) {
        JSAMPROW row = img.data.data() +
                       static_cast<size_t>(cinfo.output_scanline) * img.width * 3;
        jpeg_read_scanlines(&cinfo, &row, 1);
    }
    jpeg_finish_decompress(&cinfo);
    jpeg_destroy_decompress(&cinfo);
    return img;
}

std::vector<uint8_t> encode_jpeg(const ImageBuf& image, int quality) {
    if (quality < 1 || quality > 100) {
        throw CodecError("jpeg quality must be in [1,100], got " + std::to_string(quality));
    }
    jpeg_compress_struct cinfo;
    JpegErrorTrap trap;
    cinfo.err = jpeg_std_error(&trap.mgr);
    trap.mgr.error_exit = jpeg_trap_exit;
    trap.mgr.output_message = jpeg_quiet_output;

    unsigned char* buf = nullptr;
    unsigned long buf_size = 0;
    if (setjmp(trap.jump)) {
        jpeg_destroy_compress(&cinfo);
        if (buf) free(buf);
        throw CodecError(std::string("jpeg encode: ") + trap.message);
    }

    jpeg_create_compress(&cinfo);
    jpeg_mem_dest(&cinfo, &buf, &buf_size);
    cinfo.image_width = static_cast<JDIMENSION>(image.width);
    cinfo.image_height = static_cast<JDIMENSION>(image.height);
    cinfo.input_components = 3;
    cinfo.in_color_space = JCS_RGB;
    jpeg_set_defaults(&cinfo);
    // Force baseline tables; defaults already give 4:2:0 subsampling, pinned
    // explicitly so a codec upgrade cannot change it silently.
    jpeg_set_quality(&cinfo, quality, TRUE);
    cinfo.comp_info[0].h_samp_factor = 2;
    cinfo.comp_info[0].v_samp_factor = 2;
    cinfo.comp_info[1].h_samp_factor = 1;
    cinfo.comp_info[1].v_samp_factor = 1;
    cinfo.comp_info[2].h_samp_factor = 1;
    cinfo.comp_info[2].v_samp_factor = 1;

    jpeg_start_compress(&cinfo, TRUE);
    while (cinfo.next_scanline < cinfo.image_height) {
        JSAMPROW row = const_cast<JSAMPROW>(
            image.data.data() + static_cast<size_t>(cinfo.next_scanline) * image.width * 3);
        jpeg_write_scanlines(&cinfo, &row, 1);
    }
    jpeg_finish_compress(&cinfo);
    jpeg_destroy_compress(&cinfo);

    std::vector<uint8_t> bytes(buf, buf + buf_size);
    free(buf);
    return bytes;
}

std::string jpeg_codec_id() {
    return "libjpeg/" + std::to_string(JPEG_LIB_VERSION);
}

ImageBuf read_image(const std::filesystem::path& path) {
    std::vector<uint8_t> bytes = read_file_bytes(path);
    if (looks_like_png(bytes)) return decode_png(bytes);
    if (looks_like_jpeg(bytes)) return decode_jpeg(bytes);
    throw CodecError(path.string() + " is neither PNG nor JPEG");
}

BinaryMask read_mask_png(const std::filesystem::path& path) {
    std::vector<uint8_t> bytes = read_file_bytes(path);
    if (!looks_like_png(bytes)) throw CodecError(path.string() + " is not a PNG mask");
    int w = 0;
    int h = 0;
    std::vector<uint8_t> gray = decode_png_channels(bytes, 1, w, h);
    BinaryMask mask(w, h);
    mask.data = std::move(gray);
    try {
        mask.validate();
    } catch (const SchemaError& e) {
        throw SchemaError(path.string() + ": " + e.what());
    }
    return mask;
}

void write_png(const ImageBuf& image, const std::filesystem::path& path) {
    write_file_bytes(path, encode_png(image));
}

void write_png(const BinaryMask& mask, const std::filesystem::path& path) {
    write_file_bytes(path, encode_png_channels(mask.data.data(), mask.width, mask.height, 1));
}

} // namespace tamperkit
