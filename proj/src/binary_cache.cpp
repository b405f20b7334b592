#include "coalsim/binary_cache.hpp"

#include <cstdint>
#include <cstring>
#include <fstream>
#include <stdexcept>

namespace coalsim {

namespace {

constexpr char kMagic[4] = {'C', 'S', 'L', 'B'};
constexpr std::uint32_t kVersion = 1;
constexpr std::uint8_t kKindCsr = 1;
constexpr std::uint8_t kKindSell = 2;

template <typename T>
void write_pod(std::ostream& out, const T& v) {
  out.write(reinterpret_cast<const char*>(&v), sizeof(v));
}

template <typename T>
T read_pod(std::istream& in) {
  T v{};
  in.read(reinterpret_cast<char*>(&v), sizeof(v));
  if (!in) throw std::runtime_error("truncated matrix cache file");
  return v;
}

template <typename T>
void write_vec(std::ostream& out, const std::vector<T>& v) {
  write_pod<std::uint64_t>(out, v.size());
  out.write(reinterpret_cast<const char*>(v.data()),
            static_cast<std::streamsize>(v.size() * sizeof(T)));
}

template <typename T>
std::vector<T> read_vec(std::istream& in) {
  auto n = read_pod<std::uint64_t>(in);
  std::vector<T> v(n);
  in.read(reinterpret_cast<char*>(v.data()),
          static_cast<std::streamsize>(n * sizeof(T)));
  if (!in) throw std::runtime_error("truncated matrix cache file");
  return v;
}

std::uint8_t read_header(std::istream& in) {
  char magic[4];
  in.read(magic, 4);
  if (!in || std::memcmp(magic, kMagic, 4) != 0)
    throw std::runtime_error("not a matrix cache file");
  auto version = read_pod<std::uint32_t>(in);
  if (version != kVersion)
    throw std::runtime_error("unsupported matrix cache version " +
                             std::to_string(version));
  return read_pod<std::uint8_t>(in);
}

void write_header(std::ostream& out, std::uint8_t kind) {
  out.write(kMagic, 4);
  write_pod(out, kVersion);
  write_pod(out, kind);
}

std::ofstream open_out(const std::string& path) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open " + path + " for writing");
  return f;
}

std::ifstream open_in(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open " + path);
  return f;
}

}  // namespace

void save_csr_cache(const std::string& path, const CsrMatrix& m) {
  auto f = open_out(path);
  write_header(f, kKindCsr);
  write_pod(f, m.rows);
  write_pod(f, m.cols);
  write_vec(f, m.row_ptr);
  write_vec(f, m.col_idx);
  write_vec(f, m.values);
}

CsrMatrix load_csr_cache(const std::string& path) {
  auto f = open_in(path);
  if (read_header(f) != kKindCsr)
    throw std::runtime_error(path + " does not hold a CSR matrix");
  CsrMatrix m;
  m.rows = read_pod<index_t>(f);
  m.cols = read_pod<index_t>(f);
  m.row_ptr = read_vec<index_t>(f);
  m.col_idx = read_vec<index_t>(f);
  m.values = read_vec<double>(f);
  return m;
}

void save_sell_cache(const std::string& path, const SellMatrix& m) {
  auto f = open_out(path);
  write_header(f, kKindSell);
  write_pod(f, m.rows);
  write_pod(f, m.cols);
  write_pod(f, m.slice_height);
  write_vec(f, m.slice_ptr);
  write_vec(f, m.col_idx);
  write_vec(f, m.values);
  write_vec(f, m.pad_flag);
}

SellMatrix load_sell_cache(const std::string& path) {
  auto f = open_in(path);
  if (read_header(f) != kKindSell)
    throw std::runtime_error(path + " does not hold a SELL matrix");
  SellMatrix m;
  m.rows = read_pod<index_t>(f);
  m.cols = read_pod<index_t>(f);
  m.slice_height = read_pod<index_t>(f);
  m.slice_ptr = read_vec<std::uint64_t>(f);
  m.col_idx = read_vec<index_t>(f);
  m.values = read_vec<double>(f);
  m.pad_flag = read_vec<std::uint8_t>(f);
  return m;
}

}  // namespace coalsim
