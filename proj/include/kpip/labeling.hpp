#pragma once

#include <array>
#include <fstream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "kpip/enumerate.hpp"
#include "kpip/multiflow.hpp"
#include "kpip/potts.hpp"

namespace kpip {

// 8-bit image, 1 (gray) or 3 (rgb) channels.
struct Image {
  int width = 0, height = 0, channels = 3;
  std::vector<unsigned char> data;  // row major, channel interleaved

  int at(int x, int y, int c) const { return data[(y * width + x) * channels + c]; }
  void set(int x, int y, int c, int v) { data[(y * width + x) * channels + c] = (unsigned char)v; }
  static Image blank(int w, int h, int ch) {
    Image im;
    im.width = w;
    im.height = h;
    im.channels = ch;
    im.data.assign((size_t)w * h * ch, 0);
    return im;
  }
};

inline Image load_pnm(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw domain_error("cannot open " + path);
  std::string magic;
  in >> magic;
  if (magic != "P5" && magic != "P6") throw domain_error("expected binary P5/P6 pnm");
  auto next_int = [&]() {
    int v;
    while (true) {
      in >> std::ws;
      if (in.peek() == '#') {
        std::string line;
        std::getline(in, line);
        continue;
      }
      in >> v;
      return v;
    }
  };
  Image im;
  im.width = next_int();
  im.height = next_int();
  int maxval = next_int();
  if (maxval != 255) throw domain_error("only 8-bit pnm supported");
  im.channels = magic == "P6" ? 3 : 1;
  in.get();  // single whitespace after header
  im.data.resize((size_t)im.width * im.height * im.channels);
  in.read((char*)im.data.data(), (std::streamsize)im.data.size());
  if (!in) throw domain_error("truncated pnm data");
  return im;
}

inline void save_pnm(const Image& im, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw domain_error("cannot write " + path);
  out << (im.channels == 3 ? "P6" : "P5") << "\n"
      << im.width << " " << im.height << "\n255\n";
  out.write((const char*)im.data.data(), (std::streamsize)im.data.size());
}

// Low-contrast textured left image plus a right image shifted by a
// column-banded disparity pattern; the standard fixture for the stereo smoke
// test. The muted texture keeps data costs comparable to double-digit
// smoothness weights, so varying lambda visibly moves the class split.
inline std::pair<Image, Image> synthetic_stereo_pair(int width, int height, int k,
                                                     unsigned long long seed) {
  std::mt19937_64 rng(seed);
  Image left = Image::blank(width, height, 3);
  for (int y = 0; y < height; ++y)
    for (int x = 0; x < width; ++x) {
      int base = (int)(rng() % 40);
      for (int c = 0; c < 3; ++c)
        left.set(x, y, c, std::min(255, base + 2 * c + 3 * ((x / 4 + y / 4) % 4)));
    }
  Image right = Image::blank(width, height, 3);
  auto disparity = [&](int x) {
    int band = x * k / std::max(1, width);
    return 2 * band;  // multiples of two, like the label spacing
  };
  for (int y = 0; y < height; ++y)
    for (int x = 0; x < width; ++x) {
      int sx = x + disparity(x);
      for (int c = 0; c < 3; ++c)
        right.set(x, y, c, sx < width ? left.at(sx, y, c) : left.at(width - 1, y, c));
    }
  return {left, right};
}

// Averaged SSD data terms, one k-entry table per pixel. Windows clip at the
// borders and at invalid shifted columns, averaging over the surviving count.
inline std::vector<std::vector<Rat>> ssd_data_term(const Image& left, const Image& right, int k,
                                                   int window = 9, bool round_to_int = true) {
  if (left.width != right.width || left.height != right.height ||
      left.channels != right.channels)
    throw domain_error("stereo pair dimensions differ");
  int radius = window / 2;
  std::vector<std::vector<Rat>> g;
  g.reserve((size_t)left.width * left.height);
  for (int y = 0; y < left.height; ++y)
    for (int x = 0; x < left.width; ++x) {
      std::vector<Rat> row(k, Rat(0));
      for (int a = 1; a <= k; ++a) {
        int d = 2 * (a - 1);
        long long sum = 0, count = 0;
        for (int wy = y - radius; wy <= y + radius; ++wy) {
          if (wy < 0 || wy >= left.height) continue;
          for (int wx = x - radius; wx <= x + radius; ++wx) {
            if (wx < 0 || wx >= left.width || wx - d < 0) continue;
            long long ssd = 0;
            for (int c = 0; c < left.channels; ++c) {
              long long diff = left.at(wx, wy, c) - right.at(wx - d, wy, c);
              ssd += diff * diff;
            }
            sum += ssd;
            ++count;
          }
        }
        Rat cost = count == 0 ? Rat(3 * 255 * 255) : Rat(sum, count);
        row[a - 1] = round_to_int ? Rat(cost.round_nearest()) : cost;
      }
      g.push_back(std::move(row));
    }
  return g;
}

// Diagonal (8-connected) grid edges over width x height pixels with uniform
// weight.
inline std::vector<PottsInstance::Edge> grid8_edges(int width, int height, Rat lambda) {
  std::vector<PottsInstance::Edge> edges;
  auto id = [&](int x, int y) { return y * width + x; };
  for (int y = 0; y < height; ++y)
    for (int x = 0; x < width; ++x)
      for (int dy = 0; dy <= 1; ++dy)
        for (int dx = -1; dx <= 1; ++dx) {
          if (dy == 0 && dx <= 0) continue;  // each undirected edge once
          int nx = x + dx, ny = y + dy;
          if (nx < 0 || nx >= width || ny < 0 || ny >= height) continue;
          edges.push_back({id(x, y), id(nx, ny), lambda});
        }
  return edges;
}

enum class PixelClass { kGray, kRed, kBlue };

struct LabelReport {
  KVector minimum;                  // minimum persistent labeling
  std::vector<bool> max_support;    // common support of maximal minimizers
  std::vector<PixelClass> classes;  // per pixel
  long long gray = 0, red = 0, blue = 0;
  FactoredCount maximal_count;

  Rat gray_pct() const { return Rat(100 * gray, minimum.n() == 0 ? 1 : minimum.n()); }
  Rat red_pct() const { return Rat(100 * red, minimum.n() == 0 ? 1 : minimum.n()); }
  Rat blue_pct() const { return Rat(100 * blue, minimum.n() == 0 ? 1 : minimum.n()); }
};

inline std::vector<PixelClass> classify_pixels(const KVector& minimum,
                                               const std::vector<bool>& max_support) {
  std::vector<PixelClass> out(minimum.n());
  for (int i = 0; i < minimum.n(); ++i) {
    if (minimum[i] != 0)
      out[i] = PixelClass::kGray;
    else if (max_support[i])
      out[i] = PixelClass::kRed;
    else
      out[i] = PixelClass::kBlue;
  }
  return out;
}

// Persistency report: minimum persistent labeling from the PIP build, the
// shared maximal support from one maximal consistent ideal, the class split
// and the factored count of maximal persistent labelings.
inline LabelReport persistent_report(const PottsInstance& inst, int jobs = 1) {
  PottsBuild build = build_pip_potts(inst, jobs);
  LabelReport rep;
  rep.minimum = build.minimum_minimizer;
  std::vector<IsolatingCutPoset> layers = build.glued.layers;
  RPoset r = build_r_poset(layers);
  // supports of maximal minimizers coincide; the empty R-ideal gives one
  std::vector<std::vector<bool>> choice;
  for (const auto& blk : r.blocks) choice.emplace_back(blk.order.m, false);
  KVector one_maximal = maximal_minimizer_of(r, inst.n, inst.k, choice);
  rep.max_support.assign(inst.n, false);
  for (int i = 0; i < inst.n; ++i) rep.max_support[i] = one_maximal[i] != 0;
  rep.classes = classify_pixels(rep.minimum, rep.max_support);
  for (auto c : rep.classes) {
    if (c == PixelClass::kGray) ++rep.gray;
    if (c == PixelClass::kRed) ++rep.red;
    if (c == PixelClass::kBlue) ++rep.blue;
  }
  rep.maximal_count = count_maximal_minimizers(r);
  return rep;
}

// Gray levels spread linearly over [0,255] by label; red and blue pixels as
// pure channels.
inline Image label_map_image(int width, int height, int k, const LabelReport& rep) {
  Image im = Image::blank(width, height, 3);
  for (int y = 0; y < height; ++y)
    for (int x = 0; x < width; ++x) {
      int i = y * width + x;
      switch (rep.classes[i]) {
        case PixelClass::kGray: {
          int level = k <= 1 ? 255 : (rep.minimum[i] - 1) * 255 / (k - 1);
          for (int c = 0; c < 3; ++c) im.set(x, y, c, level);
          break;
        }
        case PixelClass::kRed:
          im.set(x, y, 0, 255);
          break;
        case PixelClass::kBlue:
          im.set(x, y, 2, 255);
          break;
      }
    }
  return im;
}

}  // namespace kpip
