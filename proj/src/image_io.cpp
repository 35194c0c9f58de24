#include "fmreg/image_io.hpp"

#include <png.h>

#include <algorithm>
#include <cctype>
#include <cmath>
#include <csetjmp>
#include <cstdio>
#include <fstream>
#include <iterator>
#include <memory>
#include <string>
#include <system_error>
#include <vector>

#include "fmreg/errors.hpp"

namespace fmreg::io {
namespace fs = std::filesystem;

namespace {

[[noreturn]] void fail(const fs::path& path, const std::string& reason) {
    throw IoError(path.string() + ": " + reason);
}

std::vector<unsigned char> read_all(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) fail(path, "cannot open for reading");
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

class PgmReader {
public:
    PgmReader(const fs::path& path, const std::vector<unsigned char>& bytes)
        : path_(path), bytes_(bytes) {}

    Image read() {
        const bool ascii = bytes_[1] == '2';
        pos_ = 2;
        const long width = next_int();
        const long height = next_int();
        const long maxval = next_int();
        if (width <= 0 || height <= 0) fail(path_, "invalid PGM dimensions");
        if (maxval <= 0 || maxval > 65535) fail(path_, "PGM maxval out of range");
        const auto w = static_cast<std::size_t>(width), h = static_cast<std::size_t>(height);
        Image img(h, w);
        const double scale = 1.0 / static_cast<double>(maxval);
        if (ascii) {
            for (auto& v : img.values()) {
                const long s = next_int();
                if (s > maxval) fail(path_, "PGM sample exceeds maxval");
                v = static_cast<double>(s) * scale;
            }
            return img;
        }
        // Exactly one whitespace byte separates the header from the raster.
        ++pos_;
        const std::size_t bpp = maxval > 255 ? 2 : 1;
        if (bytes_.size() < pos_ + w * h * bpp) fail(path_, "truncated PGM raster");
        for (std::size_t i = 0; i < w * h; ++i) {
            unsigned value = bytes_[pos_ + i * bpp];
            if (bpp == 2) value = (value << 8) | bytes_[pos_ + i * bpp + 1];
            img.values()[i] = static_cast<double>(std::min<unsigned>(value, static_cast<unsigned>(maxval))) * scale;
        }
        return img;
    }

private:
    void skip_space() {
        while (pos_ < bytes_.size()) {
            if (bytes_[pos_] == '#') {
                while (pos_ < bytes_.size() && bytes_[pos_] != '\n') ++pos_;
            } else if (std::isspace(bytes_[pos_])) {
                ++pos_;
            } else {
                return;
            }
        }
    }

    long next_int() {
        skip_space();
        if (pos_ >= bytes_.size() || !std::isdigit(bytes_[pos_])) fail(path_, "malformed PGM header or data");
        long v = 0;
        while (pos_ < bytes_.size() && std::isdigit(bytes_[pos_])) {
            v = v * 10 + (bytes_[pos_++] - '0');
            if (v > 1'000'000'000) fail(path_, "PGM value too large");
        }
        return v;
    }

    const fs::path& path_;
    const std::vector<unsigned char>& bytes_;
    std::size_t pos_ = 0;
};

struct PngReadState {
    const std::vector<unsigned char>* bytes;
    std::size_t pos;
};

void png_read_from_memory(png_structp png, png_bytep out, png_size_t count) {
    auto* st = static_cast<PngReadState*>(png_get_io_ptr(png));
    if (st->pos + count > st->bytes->size()) png_error(png, "truncated PNG stream");
    std::copy_n(st->bytes->data() + st->pos, count, out);
    st->pos += count;
}

void png_error_handler(png_structp png, png_const_charp msg) {
    auto* reason = static_cast<std::string*>(png_get_error_ptr(png));
    *reason = msg;
    std::longjmp(png_jmpbuf(png), 1);
}

void png_warning_handler(png_structp, png_const_charp) {}

Image read_png(const fs::path& path, const std::vector<unsigned char>& bytes) {
    std::string reason = "PNG decode error";
    png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, &reason, png_error_handler,
                                             png_warning_handler);
    if (!png) fail(path, "libpng initialization failed");
    png_infop info = png_create_info_struct(png);
    PngReadState state{&bytes, 0};
    if (setjmp(png_jmpbuf(png))) {
        png_destroy_read_struct(&png, &info, nullptr);
        fail(path, reason);
    }
    png_set_read_fn(png, &state, png_read_from_memory);
    png_read_png(png, info, PNG_TRANSFORM_EXPAND | PNG_TRANSFORM_STRIP_ALPHA,
                 nullptr);
    const auto width = png_get_image_width(png, info);
    const auto height = png_get_image_height(png, info);
    const int depth = png_get_bit_depth(png, info);
    const int channels = png_get_channels(png, info);
    png_bytepp rows = png_get_rows(png, info);

    Image img(height, width);
    const double maxval = depth == 16 ? 65535.0 : 255.0;
    const std::size_t bpc = depth == 16 ? 2 : 1;
    auto sample = [&](png_bytep row, std::size_t index) {
        const png_bytep p = row + index * bpc;
        return bpc == 2 ? static_cast<double>((p[0] << 8) | p[1]) : static_cast<double>(p[0]);
    };
    for (std::size_t r = 0; r < height; ++r) {
        for (std::size_t c = 0; c < width; ++c) {
            double v;
            if (channels >= 3) {
                const std::size_t base = c * static_cast<std::size_t>(channels);
                v = 0.2126 * sample(rows[r], base) + 0.7152 * sample(rows[r], base + 1) +
                    0.0722 * sample(rows[r], base + 2);
            } else {
                v = sample(rows[r], c * static_cast<std::size_t>(channels));
            }
            img(r, c) = v / maxval;
        }
    }
    png_destroy_read_struct(&png, &info, nullptr);
    return img;
}

double clip01(double v) { return std::clamp(std::isfinite(v) ? v : 0.0, 0.0, 1.0); }

/// Writes through a sibling temporary and renames it into place.
template <typename Writer>
void write_atomically(const fs::path& path, Writer&& writer) {
    fs::path tmp = path;
    tmp += ".partial";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) fail(path, "cannot open for writing");
        try {
            writer(out);
        } catch (...) {
            out.close();
            std::error_code ec;
            fs::remove(tmp, ec);
            throw;
        }
        out.flush();
        if (!out) {
            out.close();
            std::error_code ec;
            fs::remove(tmp, ec);
            fail(path, "write failed");
        }
    }
    std::error_code ec;
    fs::rename(tmp, path, ec);
    if (ec) {
        fs::remove(tmp, ec);
        fail(path, "cannot move output into place");
    }
}

void png_write_to_stream(png_structp png, png_bytep data, png_size_t length) {
    auto* out = static_cast<std::ostream*>(png_get_io_ptr(png));
    out->write(reinterpret_cast<const char*>(data), static_cast<std::streamsize>(length));
}

void png_flush_stream(png_structp png) { static_cast<std::ostream*>(png_get_io_ptr(png))->flush(); }

}  // namespace

Image load_image(const fs::path& path) {
    const auto bytes = read_all(path);
    if (bytes.size() >= 2 && bytes[0] == 'P' && (bytes[1] == '2' || bytes[1] == '5')) {
        return PgmReader(path, bytes).read();
    }
    if (bytes.size() >= 8 && png_sig_cmp(bytes.data(), 0, 8) == 0) return read_png(path, bytes);
    fail(path, "unsupported format (expected PGM P2/P5 or PNG)");
}

void save_pgm(const fs::path& path, const Image& img, int bits) {
    if (bits != 8 && bits != 16) throw InvalidArgument("save_pgm: bits must be 8 or 16");
    const unsigned maxval = bits == 16 ? 65535u : 255u;
    write_atomically(path, [&](std::ostream& out) {
        out << "P5\n" << img.cols() << ' ' << img.rows() << '\n' << maxval << '\n';
        std::vector<unsigned char> raster;
        raster.reserve(img.size() * (bits / 8));
        for (double v : img.values()) {
            const auto q = static_cast<unsigned>(std::lround(clip01(v) * maxval));
            if (bits == 16) raster.push_back(static_cast<unsigned char>(q >> 8));
            raster.push_back(static_cast<unsigned char>(q & 0xff));
        }
        out.write(reinterpret_cast<const char*>(raster.data()), static_cast<std::streamsize>(raster.size()));
    });
}

void save_png(const fs::path& path, const Image& img) {
    std::vector<unsigned char> raster(img.size());
    for (std::size_t i = 0; i < img.size(); ++i) {
        raster[i] = static_cast<unsigned char>(std::lround(clip01(img.values()[i]) * 255.0));
    }
    write_atomically(path, [&](std::ostream& out) {
        std::string reason = "PNG encode error";
        png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, &reason, png_error_handler,
                                                  png_warning_handler);
        if (!png) fail(path, "libpng initialization failed");
        png_infop info = png_create_info_struct(png);
        std::vector<png_bytep> rows(img.rows());
        for (std::size_t r = 0; r < img.rows(); ++r) rows[r] = raster.data() + r * img.cols();
        if (setjmp(png_jmpbuf(png))) {
            png_destroy_write_struct(&png, &info);
            out.setstate(std::ios::failbit);
            return;
        }
        png_set_write_fn(png, &out, png_write_to_stream, png_flush_stream);
        png_set_IHDR(png, info, static_cast<png_uint_32>(img.cols()), static_cast<png_uint_32>(img.rows()), 8,
                     PNG_COLOR_TYPE_GRAY, PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT,
                     PNG_FILTER_TYPE_DEFAULT);
        png_set_rows(png, info, rows.data());
        png_write_png(png, info, PNG_TRANSFORM_IDENTITY, nullptr);
        png_destroy_write_struct(&png, &info);
    });
}

void save_image(const fs::path& path, const Image& img) {
    std::string ext = path.extension().string();
    std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char c) { return std::tolower(c); });
    if (ext == ".png") {
        save_png(path, img);
    } else {
        save_pgm(path, img, 16);
    }
}

void save_text(const fs::path& path, std::string_view text) {
    write_atomically(path, [&](std::ostream& out) { out.write(text.data(), static_cast<std::streamsize>(text.size())); });
}

}  // namespace fmreg::io
