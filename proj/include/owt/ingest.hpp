// Batch CSV export parsing, profile assembly, and the 128-way hash
// partitioned profile store with its JSON manifest.
//
// Store layout under a root directory:
//   part-000 .. part-127   binary profile records, append-only
//   manifest.json          schema version, counts, checksums, box -> partition
//
// Partition record format (little-endian):
//   u32 box_id length, box_id bytes, i32 date (days since 1970-01-01),
//   u8 orbit (0 asc / 1 desc), u32 value count, f64 values (raw bits).
// Raw bit storage keeps round-trips exact; checksums are streaming FNV-1a so
// appends extend them without rereading the file.
#pragma once

#include <bit>
#include <cstdint>
#include <cstdlib>
#include <cstring>
#include <filesystem>
#include <limits>
#include <fstream>
#include <istream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <unordered_map>
#include <vector>

#include <json.hpp>

#include "owt/core.hpp"
#include "owt/hash.hpp"

namespace owt {

inline constexpr int kPartitionCount = 128;
inline constexpr int kStoreSchemaVersion = 1;

// ---------------------------------------------------------------------------
// CSV export parsing
// ---------------------------------------------------------------------------

namespace detail {

inline std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    std::size_t pos = line.find(',', start);
    if (pos == std::string::npos) {
      out.push_back(line.substr(start));
      break;
    }
    out.push_back(line.substr(start, pos - start));
    start = pos + 1;
  }
  return out;
}

inline std::string trim(const std::string& s) {
  std::size_t b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  std::size_t e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

inline bool parse_int(const std::string& s, int& out) {
  if (s.empty()) return false;
  char* end = nullptr;
  long v = std::strtol(s.c_str(), &end, 10);
  if (end != s.c_str() + s.size()) return false;
  out = static_cast<int>(v);
  return true;
}

}  // namespace detail

// Parses the tabular export format. Header must contain box_id, column_id,
// max_value, img_date, orbit_direction (any column order). Unparseable
// max_value cells become missing records; structurally broken rows are hard
// errors naming the 1-based line number.
inline std::vector<ProfileRecord> parse_export_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw Error(Errc::MissingHeader, "empty CSV input");
  auto header = detail::split_csv_line(line);
  for (auto& h : header) h = detail::trim(h);

  const char* wanted[5] = {"box_id", "column_id", "max_value", "img_date", "orbit_direction"};
  int idx[5] = {-1, -1, -1, -1, -1};
  for (int w = 0; w < 5; ++w) {
    for (std::size_t i = 0; i < header.size(); ++i)
      if (header[i] == wanted[w]) idx[w] = static_cast<int>(i);
    if (idx[w] < 0)
      throw Error(Errc::MissingHeader, std::string("missing CSV header column: ") + wanted[w]);
  }

  std::vector<ProfileRecord> records;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    auto fields = detail::split_csv_line(line);
    if (fields.size() != header.size())
      throw Error(Errc::MalformedRow,
                  "line " + std::to_string(line_no) + ": expected " +
                      std::to_string(header.size()) + " fields, got " +
                      std::to_string(fields.size()));

    ProfileRecord r;
    r.box_id = detail::trim(fields[idx[0]]);
    if (r.box_id.empty())
      throw Error(Errc::MalformedRow, "line " + std::to_string(line_no) + ": empty box_id");
    if (!detail::parse_int(detail::trim(fields[idx[1]]), r.column_id) || r.column_id < 0)
      throw Error(Errc::MalformedRow, "line " + std::to_string(line_no) + ": bad column_id");

    std::string valstr = detail::trim(fields[idx[2]]);
    if (valstr.empty()) {
      r.max_value = std::numeric_limits<double>::quiet_NaN();
    } else {
      char* end = nullptr;
      double v = std::strtod(valstr.c_str(), &end);
      r.max_value = (end == valstr.c_str() + valstr.size() && std::isfinite(v))
                        ? v
                        : std::numeric_limits<double>::quiet_NaN();
    }

    auto date = Date::parse(detail::trim(fields[idx[3]]));
    if (!date)
      throw Error(Errc::MalformedRow, "line " + std::to_string(line_no) + ": bad img_date");
    r.img_date = *date;

    auto orbit = parse_orbit(detail::trim(fields[idx[4]]));
    if (!orbit)
      throw Error(Errc::MalformedRow,
                  "line " + std::to_string(line_no) + ": bad orbit_direction");
    r.orbit_direction = *orbit;

    records.push_back(std::move(r));
  }
  return records;
}

// ---------------------------------------------------------------------------
// Profile assembly
// ---------------------------------------------------------------------------

// Groups records by (box_id, img_date, orbit_direction) and reconstructs
// ordered profiles. A group is emitted only when complete: no missing values
// and columns exactly 0..k-1. Two records claiming the same column of one
// group are a hard error. Output order is (box_id, date, orbit), so the
// result is invariant under input permutation.
inline std::vector<BackscatterProfile> assemble_profiles(
    const std::vector<ProfileRecord>& records) {
  struct GroupKey {
    std::string box;
    std::int32_t days;
    std::uint8_t orbit;
    bool operator<(const GroupKey& o) const {
      if (int c = box.compare(o.box); c != 0) return c < 0;
      if (days != o.days) return days < o.days;
      return orbit < o.orbit;
    }
  };
  struct ColumnValue {
    int column;
    double value;
  };

  std::map<GroupKey, std::vector<ColumnValue>> groups;
  for (const auto& r : records) {
    GroupKey key{r.box_id, r.img_date.days,
                 static_cast<std::uint8_t>(r.orbit_direction)};
    groups[key].push_back({r.column_id, r.max_value});
  }

  std::vector<BackscatterProfile> out;
  for (auto& [key, cols] : groups) {
    std::sort(cols.begin(), cols.end(),
              [](const ColumnValue& a, const ColumnValue& b) { return a.column < b.column; });
    for (std::size_t i = 1; i < cols.size(); ++i) {
      if (cols[i].column == cols[i - 1].column)
        throw Error(Errc::DuplicateColumn,
                    "duplicate column " + std::to_string(cols[i].column) + " for box " +
                        key.box + " at " + Date{key.days}.to_string());
    }
    bool complete = true;
    for (std::size_t i = 0; i < cols.size(); ++i) {
      if (cols[i].column != static_cast<int>(i) || std::isnan(cols[i].value)) {
        complete = false;
        break;
      }
    }
    if (!complete || cols.empty()) continue;

    BackscatterProfile p;
    p.box_id = key.box;
    p.img_date = Date{key.days};
    p.orbit_direction = static_cast<OrbitDirection>(key.orbit);
    p.values.reserve(cols.size());
    for (const auto& cv : cols) p.values.push_back(cv.value);
    out.push_back(std::move(p));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Partitioning
// ---------------------------------------------------------------------------

// FNV-1a over batch_id followed by box_id, reduced mod 128. Deterministic on
// every platform, so a corpus rebuilt elsewhere lands in identical partitions.
inline int partition_of(std::string_view batch_id, std::string_view box_id) {
  if (batch_id.empty() || box_id.empty())
    throw Error(Errc::EmptyKey, "partition_of requires non-empty batch_id and box_id");
  std::uint64_t h = fnv1a64(box_id, fnv1a64(batch_id));
  return static_cast<int>(h % kPartitionCount);
}

inline std::string partition_file_name(int partition) {
  char buf[16];
  std::snprintf(buf, sizeof(buf), "part-%03d", partition);
  return buf;
}

// ---------------------------------------------------------------------------
// Manifest
// ---------------------------------------------------------------------------

struct PartitionInfo {
  std::uint64_t profiles = 0;
  std::uint64_t fnv64 = kFnvOffset;  // streaming checksum of the file bytes
};

struct CorpusManifest {
  int schema_version = kStoreSchemaVersion;
  std::uint64_t total_profiles = 0;
  std::array<PartitionInfo, kPartitionCount> partitions{};
  std::map<std::string, int> box_partition;

  std::uint64_t boxes_in(int partition) const {
    std::uint64_t n = 0;
    for (const auto& [box, p] : box_partition)
      if (p == partition) ++n;
    return n;
  }

  nlohmann::json to_json() const {
    nlohmann::json parts = nlohmann::json::array();
    for (int i = 0; i < kPartitionCount; ++i) {
      char hex[24];
      std::snprintf(hex, sizeof(hex), "%016llx",
                    static_cast<unsigned long long>(partitions[i].fnv64));
      parts.push_back({{"file", partition_file_name(i)},
                       {"profiles", partitions[i].profiles},
                       {"boxes", boxes_in(i)},
                       {"fnv64", hex}});
    }
    return nlohmann::json{{"schema_version", schema_version},
                          {"total_profiles", total_profiles},
                          {"partitions", parts},
                          {"box_partition", box_partition}};
  }

  static CorpusManifest from_json(const nlohmann::json& j) {
    CorpusManifest m;
    m.schema_version = j.at("schema_version").get<int>();
    m.total_profiles = j.at("total_profiles").get<std::uint64_t>();
    const auto& parts = j.at("partitions");
    if (parts.size() != kPartitionCount)
      throw Error(Errc::IoError, "manifest partition list has wrong size");
    for (int i = 0; i < kPartitionCount; ++i) {
      m.partitions[i].profiles = parts[i].at("profiles").get<std::uint64_t>();
      m.partitions[i].fnv64 =
          std::stoull(parts[i].at("fnv64").get<std::string>(), nullptr, 16);
    }
    for (const auto& [box, p] : j.at("box_partition").items())
      m.box_partition[box] = p.get<int>();
    m.validate();
    return m;
  }

  void validate() const {
    std::uint64_t sum = 0;
    for (const auto& p : partitions) sum += p.profiles;
    if (sum != total_profiles)
      throw Error(Errc::IoError, "manifest counts inconsistent: per-partition sum " +
                                     std::to_string(sum) + " != total " +
                                     std::to_string(total_profiles));
  }
};

namespace detail {

inline void append_le32(std::string& buf, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) buf.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

inline void append_le64(std::string& buf, std::uint64_t v) {
  for (int i = 0; i < 8; ++i) buf.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

inline std::uint32_t read_le32(const char* p) {
  std::uint32_t v = 0;
  for (int i = 3; i >= 0; --i) v = (v << 8) | static_cast<unsigned char>(p[i]);
  return v;
}

inline std::uint64_t read_le64(const char* p) {
  std::uint64_t v = 0;
  for (int i = 7; i >= 0; --i) v = (v << 8) | static_cast<unsigned char>(p[i]);
  return v;
}

inline void encode_profile(std::string& buf, const BackscatterProfile& p) {
  append_le32(buf, static_cast<std::uint32_t>(p.box_id.size()));
  buf.append(p.box_id);
  append_le32(buf, static_cast<std::uint32_t>(p.img_date.days));
  buf.push_back(static_cast<char>(p.orbit_direction));
  append_le32(buf, static_cast<std::uint32_t>(p.values.size()));
  for (double v : p.values) append_le64(buf, std::bit_cast<std::uint64_t>(v));
}

}  // namespace detail

inline std::filesystem::path manifest_path(const std::filesystem::path& root) {
  return root / "manifest.json";
}

inline CorpusManifest load_manifest(const std::filesystem::path& root) {
  std::ifstream in(manifest_path(root));
  if (!in) throw Error(Errc::IoError, "cannot open " + manifest_path(root).string());
  nlohmann::json j;
  try {
    in >> j;
    return CorpusManifest::from_json(j);
  } catch (const nlohmann::json::exception& e) {
    throw Error(Errc::IoError, "bad manifest: " + std::string(e.what()));
  }
}

inline void save_manifest(const std::filesystem::path& root, const CorpusManifest& m) {
  m.validate();
  auto tmp = manifest_path(root);
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::trunc);
    if (!out) throw Error(Errc::IoError, "cannot write " + tmp.string());
    out << m.to_json().dump(2) << '\n';
  }
  std::filesystem::rename(tmp, manifest_path(root));
}

// ---------------------------------------------------------------------------
// Store writes
// ---------------------------------------------------------------------------

// Appends one batch worth of profiles. All profiles of one box land in the
// partition chosen by hash(batch_id + box_id); a box that already exists in
// the store keeps its original partition regardless of the batch it arrives
// with, which preserves the one-box-one-partition invariant across reruns.
inline CorpusManifest write_store(const std::vector<BackscatterProfile>& profiles,
                                  const std::string& batch_id,
                                  const std::filesystem::path& root) {
  std::error_code ec;
  std::filesystem::create_directories(root, ec);
  if (ec) throw Error(Errc::IoError, "cannot create store directory " + root.string());

  CorpusManifest manifest;
  if (std::filesystem::exists(manifest_path(root))) manifest = load_manifest(root);

  // Buffer per partition, then append each file once.
  std::map<int, std::string> pending;
  for (const auto& p : profiles) {
    int part;
    auto it = manifest.box_partition.find(p.box_id);
    if (it != manifest.box_partition.end()) {
      part = it->second;
    } else {
      part = partition_of(batch_id, p.box_id);
      manifest.box_partition.emplace(p.box_id, part);
    }
    detail::encode_profile(pending[part], p);
    manifest.partitions[part].profiles += 1;
    manifest.total_profiles += 1;
  }

  for (const auto& [part, bytes] : pending) {
    auto path = root / partition_file_name(part);
    std::ofstream out(path, std::ios::binary | std::ios::app);
    if (!out) throw Error(Errc::IoError, "cannot open " + path.string());
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw Error(Errc::IoError, "write failed: " + path.string());
    manifest.partitions[part].fnv64 = fnv1a64(bytes, manifest.partitions[part].fnv64);
  }

  save_manifest(root, manifest);
  return manifest;
}

// ---------------------------------------------------------------------------
// Store reads
// ---------------------------------------------------------------------------

// Reader with an access counter so tests can assert the single-partition
// access property.
class StoreReader {
 public:
  explicit StoreReader(std::filesystem::path root)
      : root_(std::move(root)), manifest_(load_manifest(root_)) {}

  const CorpusManifest& manifest() const { return manifest_; }
  int files_opened() const { return files_opened_; }

  std::vector<BackscatterProfile> read_partition(int partition) {
    auto path = root_ / partition_file_name(partition);
    ++files_opened_;
    std::ifstream in(path, std::ios::binary);
    if (!in) {
      if (manifest_.partitions[partition].profiles == 0) return {};
      throw Error(Errc::IoError, "cannot open " + path.string());
    }
    std::ostringstream ss;
    ss << in.rdbuf();
    std::string bytes = ss.str();

    std::vector<BackscatterProfile> out;
    std::size_t pos = 0;
    auto need = [&](std::size_t n) {
      if (pos + n > bytes.size())
        throw Error(Errc::IoError, "truncated partition file " + path.string());
    };
    while (pos < bytes.size()) {
      need(4);
      std::uint32_t box_len = detail::read_le32(bytes.data() + pos);
      pos += 4;
      need(box_len + 4 + 1 + 4);
      BackscatterProfile p;
      p.box_id.assign(bytes.data() + pos, box_len);
      pos += box_len;
      p.img_date.days = static_cast<std::int32_t>(detail::read_le32(bytes.data() + pos));
      pos += 4;
      p.orbit_direction = static_cast<OrbitDirection>(bytes[pos]);
      pos += 1;
      std::uint32_t n = detail::read_le32(bytes.data() + pos);
      pos += 4;
      need(static_cast<std::size_t>(n) * 8);
      p.values.resize(n);
      for (std::uint32_t i = 0; i < n; ++i) {
        p.values[i] = std::bit_cast<double>(detail::read_le64(bytes.data() + pos));
        pos += 8;
      }
      out.push_back(std::move(p));
    }
    return out;
  }

  TimeSeries read_series(const std::string& box_id) {
    auto it = manifest_.box_partition.find(box_id);
    if (it == manifest_.box_partition.end())
      throw Error(Errc::UnknownBox, "box not in store: " + box_id);
    std::vector<BackscatterProfile> mine;
    for (auto& p : read_partition(it->second))
      if (p.box_id == box_id) mine.push_back(std::move(p));
    return TimeSeries::from_profiles(box_id, std::move(mine));
  }

  std::vector<BackscatterProfile> read_all() {
    std::vector<BackscatterProfile> out;
    for (int part = 0; part < kPartitionCount; ++part) {
      if (manifest_.partitions[part].profiles == 0) continue;
      auto v = read_partition(part);
      out.insert(out.end(), std::make_move_iterator(v.begin()),
                 std::make_move_iterator(v.end()));
    }
    return out;
  }

 private:
  std::filesystem::path root_;
  CorpusManifest manifest_;
  int files_opened_ = 0;
};

inline TimeSeries read_series(const std::filesystem::path& root, const std::string& box_id) {
  StoreReader reader(root);
  return reader.read_series(box_id);
}

// ---------------------------------------------------------------------------
// Label store
// ---------------------------------------------------------------------------

// Labels are an additional column set keyed by (box_id, img_date,
// orbit_direction), written as CSV partition files labels-000..labels-127
// mirroring the profile store partitioning.
inline std::string label_file_name(int partition) {
  char buf[16];
  std::snprintf(buf, sizeof(buf), "labels-%03d", partition);
  return std::string(buf) + ".csv";
}

inline void write_labels(const std::vector<LabeledTimeSeries>& series,
                         const std::map<std::string, int>& box_partition,
                         const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw Error(Errc::IoError, "cannot create label directory " + dir.string());

  std::map<int, std::string> pending;
  std::uint64_t total = 0;
  for (const auto& s : series) {
    auto it = box_partition.find(s.box_id);
    if (it == box_partition.end())
      throw Error(Errc::UnknownBox, "box not in store: " + s.box_id);
    std::string& buf = pending[it->second];
    for (const auto& e : s.events) {
      buf += s.box_id;
      buf += ',';
      buf += e.date.to_string();
      buf += ',';
      buf += orbit_name(e.orbit);
      buf += ',';
      buf += label_name(e.label);
      buf += ',';
      buf += stage_name(s.stage);
      buf += '\n';
      ++total;
    }
  }

  for (const auto& [part, body] : pending) {
    auto path = dir / label_file_name(part);
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw Error(Errc::IoError, "cannot write " + path.string());
    out << "box_id,img_date,orbit_direction,label,stage\n" << body;
  }

  nlohmann::json meta{{"schema_version", kStoreSchemaVersion}, {"total_events", total}};
  std::ofstream out(dir / "manifest.json", std::ios::trunc);
  if (!out) throw Error(Errc::IoError, "cannot write label manifest in " + dir.string());
  out << meta.dump(2) << '\n';
}

// Reads every *.csv in the directory (all label partitions, or any externally
// produced label files with the same header). The stage column is optional.
inline std::map<std::string, LabeledTimeSeries> read_labels(const std::filesystem::path& dir) {
  if (!std::filesystem::is_directory(dir))
    throw Error(Errc::IoError, "not a directory: " + dir.string());

  std::vector<std::filesystem::path> files;
  for (const auto& entry : std::filesystem::directory_iterator(dir))
    if (entry.is_regular_file() && entry.path().extension() == ".csv")
      files.push_back(entry.path());
  std::sort(files.begin(), files.end());

  std::map<std::string, LabeledTimeSeries> out;
  for (const auto& file : files) {
    std::ifstream in(file);
    if (!in) throw Error(Errc::IoError, "cannot open " + file.string());
    std::string line;
    if (!std::getline(in, line)) continue;
    auto header = detail::split_csv_line(line);
    for (auto& h : header) h = detail::trim(h);
    int ib = -1, id = -1, io = -1, il = -1, is = -1;
    for (std::size_t i = 0; i < header.size(); ++i) {
      if (header[i] == "box_id") ib = static_cast<int>(i);
      if (header[i] == "img_date") id = static_cast<int>(i);
      if (header[i] == "orbit_direction") io = static_cast<int>(i);
      if (header[i] == "label") il = static_cast<int>(i);
      if (header[i] == "stage") is = static_cast<int>(i);
    }
    if (ib < 0 || id < 0 || io < 0 || il < 0)
      throw Error(Errc::MissingHeader, "label file missing required columns: " + file.string());

    std::size_t line_no = 1;
    while (std::getline(in, line)) {
      ++line_no;
      if (!line.empty() && line.back() == '\r') line.pop_back();
      if (line.empty()) continue;
      auto fields = detail::split_csv_line(line);
      if (fields.size() != header.size())
        throw Error(Errc::MalformedRow,
                    file.string() + " line " + std::to_string(line_no) + ": bad field count");
      std::string box = detail::trim(fields[ib]);
      auto date = Date::parse(detail::trim(fields[id]));
      auto orbit = parse_orbit(detail::trim(fields[io]));
      auto label = parse_label(detail::trim(fields[il]));
      if (box.empty() || !date || !orbit || !label)
        throw Error(Errc::MalformedRow,
                    file.string() + " line " + std::to_string(line_no) + ": bad value");
      auto& series = out[box];
      series.box_id = box;
      series.events.push_back({*date, *orbit, *label});
      if (is >= 0) {
        if (auto stage = parse_stage(detail::trim(fields[is]))) series.stage = *stage;
      } else {
        series.stage = LabelStage::Final;
      }
    }
  }

  for (auto& [box, series] : out) {
    std::sort(series.events.begin(), series.events.end(),
              [](const LabeledEvent& a, const LabeledEvent& b) {
                return EventKey{a.date, a.orbit} < EventKey{b.date, b.orbit};
              });
  }
  return out;
}

}  // namespace owt
