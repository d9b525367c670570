#include "sdc/io.hpp"

#include <zlib.h>

#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <sstream>

namespace sdc {

namespace {

std::vector<uint8_t> read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("cannot open file: " + path);
  std::vector<uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                             std::istreambuf_iterator<char>());
  return bytes;
}

void write_file(const std::string& path, const std::vector<uint8_t>& bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw FormatError("cannot open file for writing: " + path);
  out.write(reinterpret_cast<const char*>(bytes.data()),
            static_cast<std::streamsize>(bytes.size()));
  if (!out) throw FormatError("write failed: " + path);
}

struct ByteReader {
  const std::vector<uint8_t>& bytes;
  size_t pos = 0;

  bool eof() const { return pos >= bytes.size(); }
  uint8_t u8() {
    if (eof()) throw FormatError("unexpected end of file");
    return bytes[pos++];
  }
  void skip_netpbm_space() {
    // Whitespace and '#' comments up to end of line.
    while (!eof()) {
      const uint8_t c = bytes[pos];
      if (c == '#') {
        while (!eof() && bytes[pos] != '\n') ++pos;
      } else if (std::isspace(c)) {
        ++pos;
      } else {
        break;
      }
    }
  }
  std::string token() {
    skip_netpbm_space();
    std::string t;
    while (!eof() && !std::isspace(bytes[pos])) t.push_back(static_cast<char>(bytes[pos++]));
    if (t.empty()) throw FormatError("missing header token");
    return t;
  }
};

long parse_dimension(const std::string& t) {
  try {
    size_t used = 0;
    const long v = std::stol(t, &used);
    if (used != t.size() || v <= 0 || v > (1 << 20))
      throw FormatError("bad dimension: " + t);
    return v;
  } catch (const FormatError&) {
    throw;
  } catch (const std::exception&) {
    throw FormatError("bad dimension: " + t);
  }
}

double parse_double(const std::string& t) {
  try {
    size_t used = 0;
    const double v = std::stod(t, &used);
    if (used != t.size()) throw FormatError("bad number: " + t);
    return v;
  } catch (const FormatError&) {
    throw;
  } catch (const std::exception&) {
    throw FormatError("bad number: " + t);
  }
}

void append_u32_be(std::vector<uint8_t>& out, uint32_t v) {
  out.push_back(static_cast<uint8_t>(v >> 24));
  out.push_back(static_cast<uint8_t>(v >> 16));
  out.push_back(static_cast<uint8_t>(v >> 8));
  out.push_back(static_cast<uint8_t>(v));
}

uint32_t read_u32_be(const uint8_t* p) {
  return (static_cast<uint32_t>(p[0]) << 24) | (static_cast<uint32_t>(p[1]) << 16) |
         (static_cast<uint32_t>(p[2]) << 8) | static_cast<uint32_t>(p[3]);
}

}  // namespace

// ---------------------------------------------------------------------------
// PFM

void pfm_write(const std::string& path, const Grid<float>& grid) {
  for (long i = 0; i < grid.size(); ++i)
    if (!std::isfinite(grid.at_index(i)))
      throw FormatError("PFM cannot store non-finite values");

  std::ostringstream header;
  header << "Pf\n" << grid.width() << " " << grid.height() << "\n-1.0\n";
  const std::string h = header.str();
  std::vector<uint8_t> bytes(h.begin(), h.end());
  bytes.reserve(bytes.size() + static_cast<size_t>(grid.size()) * 4);
  // Rows are stored bottom-up; scale -1.0 declares little endian.
  for (int y = grid.height() - 1; y >= 0; --y) {
    for (int x = 0; x < grid.width(); ++x) {
      const uint32_t bits = std::bit_cast<uint32_t>(grid(x, y));
      bytes.push_back(static_cast<uint8_t>(bits));
      bytes.push_back(static_cast<uint8_t>(bits >> 8));
      bytes.push_back(static_cast<uint8_t>(bits >> 16));
      bytes.push_back(static_cast<uint8_t>(bits >> 24));
    }
  }
  write_file(path, bytes);
}

Grid<float> pfm_read(const std::string& path) {
  const std::vector<uint8_t> bytes = read_file(path);
  ByteReader r{bytes};
  const std::string magic = r.token();
  if (magic == "PF") throw FormatError("color PFM is not supported");
  if (magic != "Pf") throw FormatError("not a PFM file (bad magic)");
  const long w = parse_dimension(r.token());
  const long h = parse_dimension(r.token());
  const double scale = parse_double(r.token());
  if (scale == 0.0) throw FormatError("PFM scale must be nonzero");
  r.u8();  // single whitespace byte separating header and samples
  const bool little = scale < 0.0;

  const size_t need = static_cast<size_t>(w) * static_cast<size_t>(h) * 4;
  if (bytes.size() - r.pos < need) throw FormatError("PFM file truncated");

  Grid<float> grid(static_cast<int>(w), static_cast<int>(h), 0.0f);
  size_t p = r.pos;
  for (long y = h - 1; y >= 0; --y) {
    for (long x = 0; x < w; ++x, p += 4) {
      const uint8_t* b = &bytes[p];
      const uint32_t bits =
          little ? (static_cast<uint32_t>(b[0]) | (static_cast<uint32_t>(b[1]) << 8) |
                    (static_cast<uint32_t>(b[2]) << 16) | (static_cast<uint32_t>(b[3]) << 24))
                 : read_u32_be(b);
      grid(static_cast<int>(x), static_cast<int>(y)) = std::bit_cast<float>(bits);
    }
  }
  return grid;
}

void pfm_write_image(const std::string& path, const ImageGrid& img) {
  pfm_write(path, img.grid());
}

ImageGrid pfm_read_image(const std::string& path) {
  Grid<float> g = pfm_read(path);
  try {
    return ImageGrid(std::move(g));
  } catch (const DomainError& e) {
    throw FormatError(std::string("PFM image out of range: ") + e.what());
  }
}

void pfm_write_inv_depth(const std::string& path, const InvDepthMap& map) {
  if (!map.is_dense())
    throw FormatError("PFM stores dense maps only; map has empty pixels");
  pfm_write(path, map.values());
}

InvDepthMap pfm_read_inv_depth(const std::string& path) {
  Grid<float> g = pfm_read(path);
  for (long i = 0; i < g.size(); ++i)
    if (!(g.at_index(i) > 0.0f) || !std::isfinite(g.at_index(i)))
      throw FormatError("inverse depth PFM requires finite positive values");
  return InvDepthMap::dense(g);
}

// ---------------------------------------------------------------------------
// PGM

void pgm_write(const std::string& path, const ImageGrid& img, int maxval) {
  if (maxval != 255 && maxval != 65535)
    throw FormatError("PGM maxval must be 255 or 65535");
  std::ostringstream header;
  header << "P5\n" << img.width() << " " << img.height() << "\n" << maxval << "\n";
  const std::string h = header.str();
  std::vector<uint8_t> bytes(h.begin(), h.end());
  for (int y = 0; y < img.height(); ++y) {
    for (int x = 0; x < img.width(); ++x) {
      const long q = std::lround(static_cast<double>(img(x, y)) * maxval);
      if (maxval == 255) {
        bytes.push_back(static_cast<uint8_t>(q));
      } else {
        bytes.push_back(static_cast<uint8_t>(q >> 8));
        bytes.push_back(static_cast<uint8_t>(q & 0xff));
      }
    }
  }
  write_file(path, bytes);
}

ImageGrid pgm_read(const std::string& path) {
  const std::vector<uint8_t> bytes = read_file(path);
  ByteReader r{bytes};
  if (r.token() != "P5") throw FormatError("not a binary PGM file (bad magic)");
  const long w = parse_dimension(r.token());
  const long h = parse_dimension(r.token());
  const long maxval = parse_dimension(r.token());
  if (maxval != 255 && maxval != 65535)
    throw FormatError("unsupported PGM maxval");
  r.u8();  // single whitespace byte before samples
  const int bpp = maxval == 255 ? 1 : 2;
  const size_t need = static_cast<size_t>(w) * h * bpp;
  if (bytes.size() - r.pos < need) throw FormatError("PGM file truncated");

  Grid<float> g(static_cast<int>(w), static_cast<int>(h), 0.0f);
  size_t p = r.pos;
  for (long y = 0; y < h; ++y) {
    for (long x = 0; x < w; ++x) {
      long v = bytes[p++];
      if (bpp == 2) v = (v << 8) | bytes[p++];
      g(static_cast<int>(x), static_cast<int>(y)) =
          static_cast<float>(static_cast<double>(v) / maxval);
    }
  }
  return ImageGrid(std::move(g));
}

// ---------------------------------------------------------------------------
// PNG, 16-bit grayscale only

namespace {

constexpr uint8_t kPngSignature[8] = {0x89, 'P', 'N', 'G', '\r', '\n', 0x1a, '\n'};

void append_chunk(std::vector<uint8_t>& out, const char type[4],
                  const std::vector<uint8_t>& payload) {
  append_u32_be(out, static_cast<uint32_t>(payload.size()));
  const size_t crc_start = out.size();
  out.insert(out.end(), type, type + 4);
  out.insert(out.end(), payload.begin(), payload.end());
  const uint32_t crc = static_cast<uint32_t>(
      ::crc32(0, out.data() + crc_start, static_cast<uInt>(out.size() - crc_start)));
  append_u32_be(out, crc);
}

std::vector<uint8_t> zlib_deflate(const std::vector<uint8_t>& raw) {
  uLongf bound = ::compressBound(static_cast<uLong>(raw.size()));
  std::vector<uint8_t> out(bound);
  if (::compress2(out.data(), &bound, raw.data(), static_cast<uLong>(raw.size()), 6) != Z_OK)
    throw FormatError("deflate failed");
  out.resize(bound);
  return out;
}

std::vector<uint8_t> zlib_inflate(const std::vector<uint8_t>& compressed,
                                  size_t expected) {
  std::vector<uint8_t> out(expected);
  uLongf len = static_cast<uLongf>(expected);
  const int rc = ::uncompress(out.data(), &len, compressed.data(),
                              static_cast<uLong>(compressed.size()));
  if (rc != Z_OK || len != expected)
    throw FormatError("PNG pixel data is corrupt");
  return out;
}

uint8_t paeth(uint8_t a, uint8_t b, uint8_t c) {
  const int p = static_cast<int>(a) + b - c;
  const int pa = std::abs(p - a), pb = std::abs(p - b), pc = std::abs(p - c);
  if (pa <= pb && pa <= pc) return a;
  return pb <= pc ? b : c;
}

}  // namespace

void png16_depth_write(const std::string& path, const InvDepthMap& map) {
  const int w = map.width(), h = map.height();
  std::vector<uint8_t> raw;
  raw.reserve(static_cast<size_t>(h) * (1 + 2 * static_cast<size_t>(w)));
  for (int y = 0; y < h; ++y) {
    raw.push_back(0);  // filter: none
    for (int x = 0; x < w; ++x) {
      long stored = 0;
      if (const std::optional<float> d = map.at(x, y)) {
        stored = std::lround(256.0 / static_cast<double>(*d));
        if (stored < 1 || stored > 65535)
          throw FormatError("depth outside the 16-bit PNG range");
      }
      raw.push_back(static_cast<uint8_t>(stored >> 8));
      raw.push_back(static_cast<uint8_t>(stored & 0xff));
    }
  }

  std::vector<uint8_t> bytes(kPngSignature, kPngSignature + 8);
  std::vector<uint8_t> ihdr;
  append_u32_be(ihdr, static_cast<uint32_t>(w));
  append_u32_be(ihdr, static_cast<uint32_t>(h));
  ihdr.push_back(16);  // bit depth
  ihdr.push_back(0);   // grayscale
  ihdr.push_back(0);   // deflate
  ihdr.push_back(0);   // adaptive filtering
  ihdr.push_back(0);   // no interlace
  append_chunk(bytes, "IHDR", ihdr);
  append_chunk(bytes, "IDAT", zlib_deflate(raw));
  append_chunk(bytes, "IEND", {});
  write_file(path, bytes);
}

InvDepthMap png16_depth_read(const std::string& path) {
  const std::vector<uint8_t> bytes = read_file(path);
  if (bytes.size() < 8 || std::memcmp(bytes.data(), kPngSignature, 8) != 0)
    throw FormatError("not a PNG file (bad signature)");

  size_t pos = 8;
  bool have_header = false;
  long w = 0, h = 0;
  std::vector<uint8_t> idat;
  while (pos + 8 <= bytes.size()) {
    const uint32_t len = read_u32_be(&bytes[pos]);
    if (pos + 12 + len > bytes.size()) throw FormatError("PNG chunk truncated");
    const char* type = reinterpret_cast<const char*>(&bytes[pos + 4]);
    const uint8_t* payload = &bytes[pos + 8];
    if (std::memcmp(type, "IHDR", 4) == 0) {
      if (len != 13) throw FormatError("bad IHDR length");
      w = read_u32_be(payload);
      h = read_u32_be(payload + 4);
      if (w <= 0 || h <= 0 || w > (1 << 20) || h > (1 << 20))
        throw FormatError("bad PNG dimensions");
      if (payload[8] != 16) throw FormatError("PNG bit depth must be 16");
      if (payload[9] != 0) throw FormatError("PNG must be single-channel grayscale");
      if (payload[12] != 0) throw FormatError("interlaced PNG is not supported");
      have_header = true;
    } else if (std::memcmp(type, "IDAT", 4) == 0) {
      idat.insert(idat.end(), payload, payload + len);
    } else if (std::memcmp(type, "IEND", 4) == 0) {
      break;
    }
    pos += 12 + len;
  }
  if (!have_header) throw FormatError("PNG has no IHDR chunk");
  if (idat.empty()) throw FormatError("PNG has no IDAT data");

  const size_t stride = 2 * static_cast<size_t>(w);
  const std::vector<uint8_t> raw =
      zlib_inflate(idat, static_cast<size_t>(h) * (stride + 1));

  // Undo per-row filtering (bpp = 2).
  std::vector<uint8_t> recon(static_cast<size_t>(h) * stride, 0);
  for (long y = 0; y < h; ++y) {
    const uint8_t filter = raw[static_cast<size_t>(y) * (stride + 1)];
    const uint8_t* src = &raw[static_cast<size_t>(y) * (stride + 1) + 1];
    uint8_t* dst = &recon[static_cast<size_t>(y) * stride];
    const uint8_t* up = y > 0 ? &recon[static_cast<size_t>(y - 1) * stride] : nullptr;
    for (size_t i = 0; i < stride; ++i) {
      const uint8_t a = i >= 2 ? dst[i - 2] : 0;
      const uint8_t b = up ? up[i] : 0;
      const uint8_t c = (up && i >= 2) ? up[i - 2] : 0;
      switch (filter) {
        case 0: dst[i] = src[i]; break;
        case 1: dst[i] = static_cast<uint8_t>(src[i] + a); break;
        case 2: dst[i] = static_cast<uint8_t>(src[i] + b); break;
        case 3: dst[i] = static_cast<uint8_t>(src[i] + ((a + b) >> 1)); break;
        case 4: dst[i] = static_cast<uint8_t>(src[i] + paeth(a, b, c)); break;
        default: throw FormatError("unknown PNG filter type");
      }
    }
  }

  InvDepthMap map(static_cast<int>(w), static_cast<int>(h));
  for (long y = 0; y < h; ++y) {
    for (long x = 0; x < w; ++x) {
      const size_t i = static_cast<size_t>(y) * stride + 2 * static_cast<size_t>(x);
      const uint32_t stored = (static_cast<uint32_t>(recon[i]) << 8) | recon[i + 1];
      if (stored == 0) continue;  // empty pixel
      map.set(static_cast<int>(x), static_cast<int>(y),
              static_cast<float>(256.0 / static_cast<double>(stored)));
    }
  }
  return map;
}

// ---------------------------------------------------------------------------
// PLY

void ply_write(const std::string& path, const PointCloud& points,
               const std::vector<std::array<uint8_t, 3>>* colors) {
  if (colors && colors->size() != points.size())
    throw FormatError("color count differs from point count");
  std::ostringstream out;
  out << "ply\nformat ascii 1.0\nelement vertex " << points.size() << "\n"
      << "property float x\nproperty float y\nproperty float z\n";
  if (colors)
    out << "property uchar red\nproperty uchar green\nproperty uchar blue\n";
  out << "end_header\n";
  for (size_t i = 0; i < points.size(); ++i) {
    out << static_cast<float>(points[i].x()) << " "
        << static_cast<float>(points[i].y()) << " "
        << static_cast<float>(points[i].z());
    if (colors)
      out << " " << static_cast<int>((*colors)[i][0]) << " "
          << static_cast<int>((*colors)[i][1]) << " "
          << static_cast<int>((*colors)[i][2]);
    out << "\n";
  }
  const std::string s = out.str();
  write_file(path, std::vector<uint8_t>(s.begin(), s.end()));
}

}  // namespace sdc
