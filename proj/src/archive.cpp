#include <fstream>
#include <iterator>
#include <random>

#include <zlib.h>

#include "hintkit/dataset_io.hpp"
#include "hintkit/error.hpp"

namespace hintkit {

std::string gzip_compress(std::string_view data) {
  z_stream zs{};
  // windowBits 15 + 16 selects the gzip wrapper; zlib writes mtime 0, so the
  // output is a pure function of the input.
  if (deflateInit2(&zs, Z_DEFAULT_COMPRESSION, Z_DEFLATED, 15 + 16, 8, Z_DEFAULT_STRATEGY) != Z_OK)
    throw Error(ErrorKind::Io, "deflateInit2 failed");
  std::string out;
  out.resize(deflateBound(&zs, static_cast<uLong>(data.size())) + 32);
  zs.next_in = reinterpret_cast<Bytef*>(const_cast<char*>(data.data()));
  zs.avail_in = static_cast<uInt>(data.size());
  zs.next_out = reinterpret_cast<Bytef*>(out.data());
  zs.avail_out = static_cast<uInt>(out.size());
  const int rc = deflate(&zs, Z_FINISH);
  const auto produced = zs.total_out;
  deflateEnd(&zs);
  if (rc != Z_STREAM_END) throw Error(ErrorKind::Io, "deflate did not finish");
  out.resize(produced);
  return out;
}

std::string gzip_decompress(std::string_view data) {
  z_stream zs{};
  if (inflateInit2(&zs, 15 + 16) != Z_OK) throw Error(ErrorKind::CorruptArchive, "inflateInit2 failed");
  zs.next_in = reinterpret_cast<Bytef*>(const_cast<char*>(data.data()));
  zs.avail_in = static_cast<uInt>(data.size());
  std::string out;
  char buffer[1 << 15];
  int rc = Z_OK;
  while (rc == Z_OK) {
    zs.next_out = reinterpret_cast<Bytef*>(buffer);
    zs.avail_out = sizeof(buffer);
    rc = inflate(&zs, Z_NO_FLUSH);
    if (rc != Z_OK && rc != Z_STREAM_END) break;
    out.append(buffer, sizeof(buffer) - zs.avail_out);
  }
  const auto trailing = zs.avail_in;
  inflateEnd(&zs);
  if (rc != Z_STREAM_END) throw Error(ErrorKind::CorruptArchive, "compressed stream is truncated or damaged");
  if (trailing != 0) throw Error(ErrorKind::CorruptArchive, "trailing bytes after compressed stream");
  return out;
}

bool looks_like_archive(std::string_view bytes) noexcept { return bytes.starts_with(kArchiveMagic); }

std::string export_archive(const Dataset& dataset) {
  std::string out(kArchiveMagic);
  out += gzip_compress(export_json(dataset));
  return out;
}

Dataset import_archive(std::string_view bytes) {
  if (!looks_like_archive(bytes)) throw Error(ErrorKind::BadMagic, "archive does not start with HINTDS01");
  const auto json = gzip_decompress(bytes.substr(kArchiveMagic.size()));
  return import_json(json);
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::Io, "cannot open " + path.string());
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void write_file_atomic(const std::filesystem::path& path, std::string_view bytes) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  thread_local std::mt19937_64 rng{std::random_device{}()};
  auto tmp = path;
  tmp += ".tmp" + std::to_string(rng() % 1000000007);
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorKind::Io, "cannot write " + tmp.string());
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw Error(ErrorKind::Io, "short write to " + tmp.string());
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::filesystem::remove(tmp);
    throw Error(ErrorKind::Io, "cannot rename into " + path.string() + ": " + ec.message());
  }
}

Dataset load_dataset(const std::filesystem::path& path) {
  const auto bytes = read_file(path);
  return looks_like_archive(bytes) ? import_archive(bytes) : import_json(bytes);
}

void save_dataset(const std::filesystem::path& path, const Dataset& dataset) {
  write_file_atomic(path, path.extension() == ".json" ? export_json(dataset) : export_archive(dataset));
}

}  // namespace hintkit
