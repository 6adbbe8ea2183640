// Domain types shared by every other header: orbit directions, event labels,
// calendar dates, backscatter profiles and time series, plus the error type
// used across the library.
#pragma once

#include <algorithm>
#include <array>
#include <cctype>
#include <cmath>
#include <compare>
#include <cstdint>
#include <cstdio>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace owt {

inline constexpr const char* kVersion = "0.1.0";

// ---------------------------------------------------------------------------
// Errors
// ---------------------------------------------------------------------------

enum class Errc {
  LengthMismatch,
  MissingValue,
  UnorderedColumns,
  MissingHeader,
  MalformedRow,
  DuplicateColumn,
  DuplicateEvent,
  EmptyKey,
  UnknownBox,
  IoError,
  EmptyInput,
  EmptyGrid,
  InvalidArgument,
};

class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& msg) : std::runtime_error(msg), code_(code) {}
  Errc code() const { return code_; }

 private:
  Errc code_;
};

// Exit-code mapping used by the CLI: I/O failures are distinct from
// validation failures.
inline bool is_io_error(Errc c) { return c == Errc::IoError; }

// ---------------------------------------------------------------------------
// OrbitDirection
// ---------------------------------------------------------------------------

// Sentinel-1 pass direction. Determines on which side of a structure the
// layover side peak appears (left of centre for ascending, right for
// descending).
enum class OrbitDirection : std::uint8_t { Ascending = 0, Descending = 1 };

inline const char* orbit_name(OrbitDirection d) {
  return d == OrbitDirection::Ascending ? "ASCENDING" : "DESCENDING";
}

// Case-insensitive parse, canonical tokens are "ASCENDING"/"DESCENDING".
inline std::optional<OrbitDirection> parse_orbit(std::string_view s) {
  auto eq = [](std::string_view a, std::string_view b) {
    if (a.size() != b.size()) return false;
    for (std::size_t i = 0; i < a.size(); ++i)
      if (std::toupper(static_cast<unsigned char>(a[i])) != b[i]) return false;
    return true;
  };
  if (eq(s, "ASCENDING")) return OrbitDirection::Ascending;
  if (eq(s, "DESCENDING")) return OrbitDirection::Descending;
  return std::nullopt;
}

// ---------------------------------------------------------------------------
// EventLabel
// ---------------------------------------------------------------------------

// Semantic state of one acquisition event. The enum order doubles as the
// reporting order of the confusion matrix: deployment-related classes first,
// then platform and the transient classes, Unclear last.
enum class EventLabel : std::uint8_t {
  Water = 0,
  TurbineFoundation = 1,
  DeployedTurbine = 2,
  Platform = 3,
  MooringConstruction = 4,
  Vessel = 5,
  Unclear = 6,
};

inline constexpr int kLabelCount = 7;

inline constexpr std::array<EventLabel, kLabelCount> kAllLabels = {
    EventLabel::Water,          EventLabel::TurbineFoundation,
    EventLabel::DeployedTurbine, EventLabel::Platform,
    EventLabel::MooringConstruction, EventLabel::Vessel,
    EventLabel::Unclear,
};

inline const char* label_name(EventLabel l) {
  switch (l) {
    case EventLabel::Water: return "Water";
    case EventLabel::TurbineFoundation: return "TurbineFoundation";
    case EventLabel::DeployedTurbine: return "DeployedTurbine";
    case EventLabel::Platform: return "Platform";
    case EventLabel::MooringConstruction: return "MooringConstruction";
    case EventLabel::Vessel: return "Vessel";
    case EventLabel::Unclear: return "Unclear";
  }
  return "Unclear";
}

inline std::optional<EventLabel> parse_label(std::string_view s) {
  for (EventLabel l : kAllLabels)
    if (s == label_name(l)) return l;
  return std::nullopt;
}

// Transient labels are ignored when sequence refinement looks for effective
// neighbours and are skipped when building segments.
inline bool is_transient(EventLabel l) {
  return l == EventLabel::Unclear || l == EventLabel::Vessel ||
         l == EventLabel::MooringConstruction;
}

inline bool is_turbine_related(EventLabel l) {
  return l == EventLabel::TurbineFoundation || l == EventLabel::DeployedTurbine;
}

// ---------------------------------------------------------------------------
// Date (day granularity)
// ---------------------------------------------------------------------------

// Calendar date stored as days since 1970-01-01 (UTC). Day granularity is all
// the pipeline needs; same-day acquisitions are disambiguated by orbit
// direction.
struct Date {
  std::int32_t days = 0;

  auto operator<=>(const Date&) const = default;

  static Date from_ymd(int y, int m, int d) {
    // Howard Hinnant's days-from-civil algorithm.
    y -= m <= 2;
    const int era = (y >= 0 ? y : y - 399) / 400;
    const unsigned yoe = static_cast<unsigned>(y - era * 400);
    const unsigned doy = (153u * static_cast<unsigned>(m + (m > 2 ? -3 : 9)) + 2u) / 5u +
                         static_cast<unsigned>(d) - 1u;
    const unsigned doe = yoe * 365u + yoe / 4u - yoe / 100u + doy;
    return Date{static_cast<std::int32_t>(era * 146097 + static_cast<int>(doe) - 719468)};
  }

  struct Ymd {
    int year;
    int month;
    int day;
  };

  Ymd to_ymd() const {
    std::int64_t z = days + 719468;
    const std::int64_t era = (z >= 0 ? z : z - 146096) / 146097;
    const unsigned doe = static_cast<unsigned>(z - era * 146097);
    const unsigned yoe = (doe - doe / 1460 + doe / 36524 - doe / 146096) / 365;
    const std::int64_t y = static_cast<std::int64_t>(yoe) + era * 400;
    const unsigned doy = doe - (365 * yoe + yoe / 4 - yoe / 100);
    const unsigned mp = (5 * doy + 2) / 153;
    const unsigned d = doy - (153 * mp + 2) / 5 + 1;
    const unsigned m = mp + (mp < 10 ? 3 : -9);
    return Ymd{static_cast<int>(y + (m <= 2)), static_cast<int>(m), static_cast<int>(d)};
  }

  std::string to_string() const {
    Ymd v = to_ymd();
    char buf[16];
    std::snprintf(buf, sizeof(buf), "%04d-%02d-%02d", v.year, v.month, v.day);
    return buf;
  }

  // Strict ISO-8601 calendar date "YYYY-MM-DD". A trailing time part
  // ("YYYY-MM-DDThh:...") is tolerated and truncated.
  static std::optional<Date> parse(std::string_view s) {
    if (s.size() > 10 && s[10] == 'T') s = s.substr(0, 10);
    if (s.size() != 10 || s[4] != '-' || s[7] != '-') return std::nullopt;
    auto digits = [](std::string_view t) {
      for (char c : t)
        if (c < '0' || c > '9') return false;
      return true;
    };
    if (!digits(s.substr(0, 4)) || !digits(s.substr(5, 2)) || !digits(s.substr(8, 2)))
      return std::nullopt;
    int y = (s[0] - '0') * 1000 + (s[1] - '0') * 100 + (s[2] - '0') * 10 + (s[3] - '0');
    int m = (s[5] - '0') * 10 + (s[6] - '0');
    int d = (s[8] - '0') * 10 + (s[9] - '0');
    if (m < 1 || m > 12 || d < 1) return std::nullopt;
    static constexpr int mdays[12] = {31, 28, 31, 30, 31, 30, 31, 31, 30, 31, 30, 31};
    bool leap = (y % 4 == 0 && y % 100 != 0) || y % 400 == 0;
    int dmax = mdays[m - 1] + (m == 2 && leap ? 1 : 0);
    if (d > dmax) return std::nullopt;
    return from_ymd(y, m, d);
  }
};

// ---------------------------------------------------------------------------
// Records, profiles, series
// ---------------------------------------------------------------------------

// One raw row of the batch CSV export. max_value may be NaN when the source
// cell was empty or unparseable; such records mark their whole profile group
// as incomplete.
struct ProfileRecord {
  std::string box_id;
  int column_id = 0;
  double max_value = 0.0;  // dB; NaN == missing
  Date img_date;
  OrbitDirection orbit_direction = OrbitDirection::Ascending;

  bool missing() const { return std::isnan(max_value); }
};

// Analysis-ready 1D profile: column maxima in dB, index i == column_id i.
struct BackscatterProfile {
  std::string box_id;
  Date img_date;
  OrbitDirection orbit_direction = OrbitDirection::Ascending;
  std::vector<double> values;
};

// Event ordering: by date, ascending pass before descending on the same day.
struct EventKey {
  Date date;
  OrbitDirection orbit;
  auto operator<=>(const EventKey&) const = default;
};

inline EventKey event_key(const BackscatterProfile& p) {
  return EventKey{p.img_date, p.orbit_direction};
}

// Chronologically ordered acquisitions of one box. Construct via
// TimeSeries::from_profiles so the ordering and uniqueness invariants hold.
struct TimeSeries {
  std::string box_id;
  std::vector<BackscatterProfile> events;

  static TimeSeries from_profiles(std::string box_id, std::vector<BackscatterProfile> profiles) {
    std::sort(profiles.begin(), profiles.end(),
              [](const BackscatterProfile& a, const BackscatterProfile& b) {
                return event_key(a) < event_key(b);
              });
    for (std::size_t i = 1; i < profiles.size(); ++i) {
      if (event_key(profiles[i - 1]) == event_key(profiles[i]))
        throw Error(Errc::DuplicateEvent,
                    "duplicate event for box " + box_id + " at " +
                        profiles[i].img_date.to_string() + " " +
                        orbit_name(profiles[i].orbit_direction));
    }
    return TimeSeries{std::move(box_id), std::move(profiles)};
  }
};

enum class LabelStage : std::uint8_t { Stage1 = 0, Refined = 1, Final = 2 };

inline const char* stage_name(LabelStage s) {
  switch (s) {
    case LabelStage::Stage1: return "stage1";
    case LabelStage::Refined: return "refined";
    case LabelStage::Final: return "final";
  }
  return "final";
}

inline std::optional<LabelStage> parse_stage(std::string_view s) {
  if (s == "stage1") return LabelStage::Stage1;
  if (s == "refined") return LabelStage::Refined;
  if (s == "final") return LabelStage::Final;
  return std::nullopt;
}

struct LabeledEvent {
  Date date;
  OrbitDirection orbit = OrbitDirection::Ascending;
  EventLabel label = EventLabel::Unclear;
};

// Label sequence for one box, same length and order as the source series.
struct LabeledTimeSeries {
  std::string box_id;
  std::vector<LabeledEvent> events;
  LabelStage stage = LabelStage::Stage1;

  std::vector<EventLabel> labels() const {
    std::vector<EventLabel> out;
    out.reserve(events.size());
    for (const auto& e : events) out.push_back(e.label);
    return out;
  }
};

// Point feature with WGS84 centroid coordinates; used both for detections and
// ground truth.
struct DetectionPoint {
  std::string id;
  double lon = 0.0;
  double lat = 0.0;

  bool valid() const {
    return lon >= -180.0 && lon <= 180.0 && lat >= -90.0 && lat <= 90.0;
  }
};

using GroundTruthPoint = DetectionPoint;

// ---------------------------------------------------------------------------
// Validation
// ---------------------------------------------------------------------------

// Checks the profile invariants against the box's expected column count.
// Returns the profile untouched on success.
inline const BackscatterProfile& validate_profile(const BackscatterProfile& p,
                                                  std::size_t expected_len) {
  auto at = [&] { return " for box " + p.box_id + " at " + p.img_date.to_string(); };
  if (p.values.size() != expected_len)
    throw Error(Errc::LengthMismatch,
                "profile length " + std::to_string(p.values.size()) + " != expected " +
                    std::to_string(expected_len) + at());
  if (p.values.empty())
    throw Error(Errc::LengthMismatch, "empty profile" + at());
  for (double v : p.values)
    if (std::isnan(v)) throw Error(Errc::MissingValue, "missing value" + at());
  return p;
}

// Variant used where the source column ids are still at hand: additionally
// enforces that value i came from column i.
inline const BackscatterProfile& validate_profile(const BackscatterProfile& p,
                                                  std::size_t expected_len,
                                                  const std::vector<int>& column_ids) {
  validate_profile(p, expected_len);
  if (column_ids.size() != p.values.size())
    throw Error(Errc::LengthMismatch, "column id count mismatch for box " + p.box_id +
                                          " at " + p.img_date.to_string());
  for (std::size_t i = 0; i < column_ids.size(); ++i) {
    if (column_ids[i] != static_cast<int>(i))
      throw Error(Errc::UnorderedColumns, "columns out of order for box " + p.box_id +
                                              " at " + p.img_date.to_string());
  }
  return p;
}

}  // namespace owt
