#include "lfo/ingest.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <optional>
#include <ostream>
#include <tuple>

namespace lfo::ingest {
namespace {

std::vector<std::string_view> split_fields(std::string_view line) {
  std::vector<std::string_view> fields;
  std::size_t start = 0;
  while (true) {
    const auto comma = line.find(',', start);
    if (comma == std::string_view::npos) {
      fields.push_back(line.substr(start));
      return fields;
    }
    fields.push_back(line.substr(start, comma - start));
    start = comma + 1;
  }
}

template <typename T>
std::optional<T> parse_number(std::string_view text) {
  T value{};
  const auto* end = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(text.data(), end, value);
  if (ec != std::errc() || ptr != end) return std::nullopt;
  return value;
}

void strip_cr(std::string& line) {
  if (!line.empty() && line.back() == '\r') line.pop_back();
}

std::string stream_name(const std::string& station, Channel channel) {
  return station + "/" + std::string(to_string(channel));
}

struct Slot {
  double value = 0.0;
  bool present = false;
};

struct Stream {
  std::vector<const ArchiveRecord*> records;
};

}  // namespace

ArchiveContents read_archive(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::FileUnreadable, "cannot open archive '" + path.string() + "'");
  return parse_archive(in);
}

ArchiveContents parse_archive(std::istream& in) {
  ArchiveContents out;
  std::string line;
  if (!std::getline(in, line)) return out;  // empty file: no records
  strip_cr(line);
  if (line.starts_with("\xEF\xBB\xBF")) line.erase(0, 3);
  if (line != kArchiveHeader) {
    throw Error(ErrorCode::SchemaMismatch,
                "archive header must be '" + std::string(kArchiveHeader) + "', got '" + line + "'");
  }

  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    strip_cr(line);
    if (line.empty()) continue;
    const auto fields = split_fields(line);
    auto issue = [&](std::string msg) { out.issues.push_back({line_no, std::move(msg)}); };
    if (fields.size() != 4) {
      issue("expected 4 fields, found " + std::to_string(fields.size()));
      continue;
    }
    const auto ts = parse_number<std::int64_t>(fields[0]);
    if (!ts) {
      issue("bad timestamp '" + std::string(fields[0]) + "'");
      continue;
    }
    if (fields[1].empty()) {
      issue("empty station id");
      continue;
    }
    const auto channel = parse_channel(fields[2]);
    if (!channel) {
      issue("unknown channel '" + std::string(fields[2]) + "'");
      continue;
    }
    ArchiveRecord rec;
    rec.timestamp_ms = *ts;
    rec.station_id = std::string(fields[1]);
    rec.channel = *channel;
    if (fields[3].empty()) {
      rec.missing = true;
      issue("empty value marked missing");
    } else {
      const auto value = parse_number<double>(fields[3]);
      if (!value) {
        issue("bad value '" + std::string(fields[3]) + "'");
        continue;
      }
      if (!std::isfinite(*value)) {
        rec.missing = true;
        issue("non-finite value marked missing");
      } else {
        rec.value = *value;
      }
    }
    out.records.push_back(std::move(rec));
  }
  return out;
}

void write_archive(std::ostream& out, std::span<const SampleWindow> windows) {
  out << kArchiveHeader << '\n';
  char buf[64];
  for (const auto& w : windows) {
    const std::string channel(to_string(w.channel));
    for (std::size_t m = 0; m < w.size(); ++m) {
      const auto ts = w.t0_ms + std::llround(static_cast<double>(m) * w.dt * 1000.0);
      const auto res = std::to_chars(buf, buf + sizeof buf, w.samples[m], std::chars_format::general, 17);
      out << ts << ',' << w.station_id << ',' << channel << ',' << std::string_view(buf, res.ptr) << '\n';
    }
  }
}

void validate_policy(const WindowingPolicy& policy) {
  auto fail = [](const std::string& msg) { throw Error(ErrorCode::InvalidConfig, msg); };
  if (!(policy.expected_dt > 0.0)) fail("expected_dt must be positive");
  if (!(policy.window_seconds > 0.0)) fail("window_seconds must be positive");
  if (!(policy.stride_seconds > 0.0 && policy.stride_seconds <= policy.window_seconds)) {
    fail("stride must satisfy 0 < stride <= window");
  }
  if (!(policy.max_gap_fraction >= 0.0 && policy.max_gap_fraction <= 1.0)) fail("max_gap_fraction must lie in [0, 1]");
  if (window_length(policy) < kMinWindowSamples) fail("window holds fewer than 4 samples");
}

std::size_t window_length(const WindowingPolicy& policy) {
  return static_cast<std::size_t>(std::llround(policy.window_seconds / policy.expected_dt)) + 1;
}

WindowingResult make_windows(std::span<const ArchiveRecord> records, const WindowingPolicy& policy) {
  validate_policy(policy);
  std::map<std::pair<std::string, Channel>, Stream> streams;
  for (const auto& rec : records) streams[{rec.station_id, rec.channel}].records.push_back(&rec);

  const double step_ms = policy.expected_dt * 1000.0;
  const std::size_t length = window_length(policy);
  const auto stride = static_cast<std::size_t>(std::max(1LL, std::llround(policy.stride_seconds / policy.expected_dt)));

  WindowingResult out;
  for (auto& [key, stream] : streams) {
    const auto& [station, channel] = key;
    auto& recs = stream.records;
    // Value breaks timestamp ties so the outcome never depends on input order.
    std::sort(recs.begin(), recs.end(), [](const ArchiveRecord* l, const ArchiveRecord* r) {
      return std::make_tuple(l->timestamp_ms, l->missing, l->value) <
             std::make_tuple(r->timestamp_ms, r->missing, r->value);
    });

    if (recs.size() >= 2) {
      std::vector<std::int64_t> gaps;
      for (std::size_t i = 1; i < recs.size(); ++i) {
        if (recs[i]->timestamp_ms != recs[i - 1]->timestamp_ms) {
          gaps.push_back(recs[i]->timestamp_ms - recs[i - 1]->timestamp_ms);
        }
      }
      if (!gaps.empty()) {
        const auto mid = gaps.begin() + static_cast<std::ptrdiff_t>(gaps.size() / 2);
        std::nth_element(gaps.begin(), mid, gaps.end());
        const double median = static_cast<double>(*mid);
        if (std::abs(median - step_ms) > 0.1 * step_ms) {
          throw Error(ErrorCode::DtMismatch, "stream " + stream_name(station, channel) + ": median spacing " +
                                                 std::to_string(median) + " ms, expected " +
                                                 std::to_string(step_ms) + " ms");
        }
      }
    }
    if (recs.empty()) continue;

    const std::int64_t start = recs.front()->timestamp_ms;
    const auto last_slot =
        static_cast<std::size_t>(std::llround(static_cast<double>(recs.back()->timestamp_ms - start) / step_ms));
    std::vector<Slot> slots(last_slot + 1);
    std::vector<std::size_t> irregular_at;  // slot indices of off-grid or duplicate records
    for (const auto* rec : recs) {
      const double offset = static_cast<double>(rec->timestamp_ms - start);
      const auto slot = static_cast<std::size_t>(std::llround(offset / step_ms));
      const double jitter = std::abs(offset - static_cast<double>(slot) * step_ms);
      if (jitter > 0.25 * step_ms || slots[slot].present) {
        irregular_at.push_back(slot);
        continue;
      }
      if (rec->missing) continue;
      slots[slot] = {rec->value, true};
    }

    for (std::size_t first = 0; first + length <= slots.size(); first += stride) {
      const std::int64_t t0 = start + std::llround(static_cast<double>(first) * step_ms);
      auto skip = [&](std::string why) { out.diagnostics.push_back({station, channel, t0, std::move(why)}); };

      std::size_t bad = 0;
      for (std::size_t i = first; i < first + length; ++i) bad += slots[i].present ? 0 : 1;
      bad += static_cast<std::size_t>(std::count_if(irregular_at.begin(), irregular_at.end(), [&](std::size_t s) {
        return s >= first && s < first + length;
      }));
      const double fraction = static_cast<double>(bad) / static_cast<double>(length);
      if (fraction > policy.max_gap_fraction) {
        skip("missing/irregular fraction " + std::to_string(fraction) + " exceeds limit");
        continue;
      }

      SampleWindow w;
      w.station_id = station;
      w.channel = channel;
      w.t0_ms = t0;
      w.dt = policy.expected_dt;
      w.samples.resize(length);
      bool usable = true;
      for (std::size_t i = 0; i < length && usable; ++i) {
        const std::size_t s = first + i;
        if (slots[s].present) {
          w.samples[i] = slots[s].value;
        } else if (s > 0 && s + 1 < slots.size() && slots[s - 1].present && slots[s + 1].present) {
          w.samples[i] = 0.5 * (slots[s - 1].value + slots[s + 1].value);
        } else {
          usable = false;
        }
      }
      if (!usable) {
        skip("gap longer than one sample");
        continue;
      }
      out.windows.push_back(std::move(w));
    }
  }

  std::stable_sort(out.windows.begin(), out.windows.end(), [](const SampleWindow& l, const SampleWindow& r) {
    return std::tie(l.station_id, l.t0_ms, l.channel) < std::tie(r.station_id, r.t0_ms, r.channel);
  });
  return out;
}

}  // namespace lfo::ingest
