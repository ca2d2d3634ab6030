// Binary index file layout (all integers little-endian):
//
//   magic        8 bytes  "REIBUNIX"
//   version      u32
//   header_len   u32
//   header       header_len bytes of UTF-8 JSON:
//                {"version", "doc_count", "sentence_count", "fingerprint"
//                 (16 hex digits), "built_at", "key_count"}
//   key_count x  { key_len u32, key bytes, n u32, n x id u32 }
//                keys in ascending byte order, ids ascending
//   crc32        u32 over every preceding byte
//
// See docs/index_format.md.

#include <boost/crc.hpp>
#include <cstring>
#include <fstream>
#include <iterator>
#include <sstream>

#include <json.hpp>

#include "reibun/index.hpp"

namespace reibun {

namespace {

constexpr char kMagic[8] = {'R', 'E', 'I', 'B', 'U', 'N', 'I', 'X'};

void put_u32(std::string& buf, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) buf.push_back(static_cast<char>((v >> (8 * i)) & 0xFF));
}

class Cursor {
 public:
  explicit Cursor(std::string_view data) : data_(data) {}

  std::uint32_t u32() {
    need(4);
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(static_cast<unsigned char>(data_[pos_ + i])) << (8 * i);
    pos_ += 4;
    return v;
  }

  std::string_view bytes(std::size_t n) {
    need(n);
    auto out = data_.substr(pos_, n);
    pos_ += n;
    return out;
  }

  std::size_t remaining() const { return data_.size() - pos_; }

 private:
  void need(std::size_t n) const {
    if (data_.size() - pos_ < n) throw IndexFormatError("index file truncated");
  }
  std::string_view data_;
  std::size_t pos_ = 0;
};

std::uint32_t crc32(std::string_view data) {
  boost::crc_32_type crc;
  crc.process_bytes(data.data(), data.size());
  return crc.checksum();
}

std::string to_hex(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

}  // namespace

void write_index(std::ostream& out, const InvertedIndex& ix) {
  const auto keys = ix.sorted_keys();
  nlohmann::json header = {
      {"version", kIndexFormatVersion},
      {"doc_count", ix.doc_count()},
      {"sentence_count", ix.sentence_count()},
      {"fingerprint", to_hex(ix.fingerprint())},
      {"built_at", ix.built_at()},
      {"key_count", keys.size()},
  };
  const std::string header_text = header.dump();

  std::string buf(kMagic, sizeof kMagic);
  put_u32(buf, kIndexFormatVersion);
  put_u32(buf, static_cast<std::uint32_t>(header_text.size()));
  buf += header_text;
  for (const auto& key : keys) {
    auto ids = ix.postings(key);
    put_u32(buf, static_cast<std::uint32_t>(key.size()));
    buf += key;
    put_u32(buf, static_cast<std::uint32_t>(ids.size()));
    for (SentenceId id : ids) put_u32(buf, id);
  }
  put_u32(buf, crc32(buf));
  out.write(buf.data(), static_cast<std::streamsize>(buf.size()));
  if (!out) throw IndexError("failed writing index");
}

InvertedIndex read_index(std::istream& in) {
  const std::string data{std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
  if (data.size() < sizeof kMagic + 12 || std::memcmp(data.data(), kMagic, sizeof kMagic) != 0) {
    throw IndexFormatError("not an index file (bad magic or too short)");
  }
  Cursor cur(std::string_view(data).substr(sizeof kMagic));
  const std::uint32_t version = cur.u32();
  if (version != kIndexFormatVersion) {
    throw IndexFormatError("unsupported index format version " + std::to_string(version) +
                           " (expected " + std::to_string(kIndexFormatVersion) + ")");
  }

  const std::string_view payload = std::string_view(data).substr(0, data.size() - 4);
  Cursor trailer(std::string_view(data).substr(data.size() - 4));
  if (crc32(payload) != trailer.u32()) throw IndexFormatError("index checksum mismatch");

  const std::uint32_t header_len = cur.u32();
  nlohmann::json header;
  try {
    header = nlohmann::json::parse(cur.bytes(header_len));
  } catch (const nlohmann::json::exception& e) {
    throw IndexFormatError(std::string("bad index header: ") + e.what());
  }

  InvertedIndex ix;
  try {
    ix.doc_count_ = header.at("doc_count").get<std::uint64_t>();
    ix.sentence_count_ = header.at("sentence_count").get<std::uint64_t>();
    ix.fingerprint_ = std::stoull(header.at("fingerprint").get<std::string>(), nullptr, 16);
    ix.built_at_ = header.at("built_at").get<std::string>();
    const auto key_count = header.at("key_count").get<std::uint64_t>();
    ix.postings_.reserve(key_count);
    for (std::uint64_t k = 0; k < key_count; ++k) {
      std::string key{cur.bytes(cur.u32())};
      const std::uint32_t n = cur.u32();
      std::vector<SentenceId> ids(n);
      for (auto& id : ids) {
        id = cur.u32();
        if (id >= ix.doc_count_) throw IndexFormatError("posting id out of range");
      }
      if (key.empty() || !ix.postings_.emplace(std::move(key), std::move(ids)).second) {
        throw IndexFormatError("empty or repeated key");
      }
    }
  } catch (const nlohmann::json::exception& e) {
    throw IndexFormatError(std::string("bad index header: ") + e.what());
  } catch (const std::logic_error& e) {
    throw IndexFormatError(std::string("bad index header: ") + e.what());
  }
  if (cur.remaining() != 4) throw IndexFormatError("trailing bytes after postings");
  return ix;
}

void save_index(const InvertedIndex& ix, const std::filesystem::path& path) {
  // written to a sibling temp file, then renamed over the target
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IndexError("cannot open " + tmp.string() + " for writing");
    write_index(out, ix);
  }
  std::filesystem::rename(tmp, path);
}

InvertedIndex load_index(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IndexError("cannot open index " + path.string());
  return read_index(in);
}

}  // namespace reibun
