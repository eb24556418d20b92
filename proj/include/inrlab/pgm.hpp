#ifndef INRLAB_PGM_HPP
#define INRLAB_PGM_HPP

#include <cmath>
#include <cstdint>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "inrlab/dataset.hpp"
#include "inrlab/errors.hpp"
#include "inrlab/matrix.hpp"

namespace inrlab {

namespace detail {

struct PgmCursor {
    const std::string& buf;
    std::size_t pos = 0;

    [[noreturn]] void fail(const std::string& what) const {
        throw ParseError("pgm: " + what + " at byte " + std::to_string(pos));
    }

    void skip_space_and_comments() {
        while (pos < buf.size()) {
            char c = buf[pos];
            if (c == '#') {
                while (pos < buf.size() && buf[pos] != '\n') ++pos;
            } else if (c == ' ' || c == '\t' || c == '\r' || c == '\n') {
                ++pos;
            } else {
                break;
            }
        }
    }

    long read_int() {
        skip_space_and_comments();
        if (pos >= buf.size() || buf[pos] < '0' || buf[pos] > '9') fail("expected an integer");
        long v = 0;
        while (pos < buf.size() && buf[pos] >= '0' && buf[pos] <= '9') {
            v = v * 10 + (buf[pos] - '0');
            if (v > 1000000000L) fail("integer out of range");
            ++pos;
        }
        return v;
    }
};

} // namespace detail

// Reads a P2/P5 portable graymap into [0,1] values (row-major grid).
inline Matrix load_pgm_matrix(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("load_pgm: cannot open " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    const std::string buf = ss.str();

    detail::PgmCursor cur{buf};
    if (buf.size() < 2 || buf[0] != 'P' || (buf[1] != '2' && buf[1] != '5'))
        cur.fail("not a P2/P5 graymap");
    const bool binary = buf[1] == '5';
    cur.pos = 2;

    long cols = cur.read_int();
    long rows = cur.read_int();
    long maxval = cur.read_int();
    if (cols <= 0 || rows <= 0) cur.fail("invalid dimensions");
    if (maxval <= 0 || maxval > 65535) cur.fail("maxval must lie in [1, 65535]");

    Matrix img{static_cast<std::size_t>(rows), static_cast<std::size_t>(cols)};
    const std::size_t n = img.data.size();
    if (binary) {
        if (cur.pos >= buf.size() ||
            !(buf[cur.pos] == '\n' || buf[cur.pos] == ' ' || buf[cur.pos] == '\t' ||
              buf[cur.pos] == '\r'))
            cur.fail("missing whitespace after maxval");
        ++cur.pos;
        const std::size_t bytes_per = maxval > 255 ? 2 : 1;
        if (buf.size() - cur.pos < n * bytes_per) cur.fail("truncated pixel data");
        for (std::size_t i = 0; i < n; ++i) {
            unsigned v;
            if (bytes_per == 1) {
                v = static_cast<unsigned char>(buf[cur.pos++]);
            } else { // big-endian 16-bit
                unsigned hi = static_cast<unsigned char>(buf[cur.pos++]);
                unsigned lo = static_cast<unsigned char>(buf[cur.pos++]);
                v = (hi << 8) | lo;
            }
            if (long(v) > maxval) cur.fail("pixel exceeds maxval");
            img.data[i] = double(v) / double(maxval);
        }
    } else {
        for (std::size_t i = 0; i < n; ++i) {
            long v = cur.read_int();
            if (v > maxval) cur.fail("pixel exceeds maxval");
            img.data[i] = double(v) / double(maxval);
        }
    }
    return img;
}

// Dataset view of a graymap: coordinates on [-1,1)^2, every pixel a
// training point until the caller re-masks.
inline Dataset load_pgm(const std::string& path) {
    Matrix img = load_pgm_matrix(path);
    Dataset d;
    d.dim = 2;
    d.grid_rows = img.rows;
    d.grid_cols = img.cols;
    d.coords = image_grid_coords(img.rows, img.cols);
    d.targets = std::move(img.data);
    d.train_mask.assign(d.targets.size(), 1);
    d.metadata = "pgm:" + path;
    return d;
}

// Writes [0,1] grid values as a binary (P5) graymap, maxval 255; loading a
// maxval-255 file and saving it again reproduces the bytes exactly.
inline void save_pgm(const Matrix& values, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("save_pgm: cannot open " + path);
    out << "P5\n" << values.cols << " " << values.rows << "\n255\n";
    for (double v : values.data) {
        double c = std::clamp(v, 0.0, 1.0);
        out.put(static_cast<char>(std::lround(c * 255.0)));
    }
    if (!out) throw IoError("save_pgm: write failed for " + path);
}

} // namespace inrlab

#endif
