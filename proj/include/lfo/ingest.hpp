#pragma once

// PMU archive CSV reading and fixed-length window assembly.

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "lfo/core.hpp"

namespace lfo::ingest {

inline constexpr std::string_view kArchiveHeader = "timestamp_ms,station_id,channel,value";

struct ArchiveRecord {
  std::int64_t timestamp_ms = 0;
  std::string station_id;
  Channel channel = Channel::Frequency_Hz;
  double value = 0.0;
  bool missing = false;
};

struct ParseIssue {
  std::size_t line = 0;
  std::string message;
};

struct ArchiveContents {
  std::vector<ArchiveRecord> records;
  std::vector<ParseIssue> issues;
};

/// Records in file order. Malformed rows are reported in `issues` and skipped;
/// non-finite or empty values become missing records.
/// Throws FileUnreadable or SchemaMismatch.
ArchiveContents read_archive(const std::filesystem::path& path);
ArchiveContents parse_archive(std::istream& in);

/// Writes the header followed by every window's samples (17 significant digits).
void write_archive(std::ostream& out, std::span<const SampleWindow> windows);

struct WindowingPolicy {
  double window_seconds = 25.0;
  double stride_seconds = 5.0;
  double expected_dt = 0.04;
  double max_gap_fraction = 0.01;
};

void validate_policy(const WindowingPolicy& policy);

/// Samples per emitted window: round(window_seconds / expected_dt) + 1.
std::size_t window_length(const WindowingPolicy& policy);

struct WindowDiagnostic {
  std::string station_id;
  Channel channel = Channel::Frequency_Hz;
  std::int64_t t0_ms = 0;
  std::string message;
};

struct WindowingResult {
  /// Ordered by (station, t0, channel).
  std::vector<SampleWindow> windows;
  std::vector<WindowDiagnostic> diagnostics;
};

/// Groups records per (station, channel), sorts by timestamp and cuts windows
/// on the expected sampling grid. Isolated missing samples are linearly
/// interpolated; windows with longer gaps or too many bad samples are skipped.
/// Throws DtMismatch when a stream's median spacing is off by more than 10%.
WindowingResult make_windows(std::span<const ArchiveRecord> records, const WindowingPolicy& policy);

}  // namespace lfo::ingest
