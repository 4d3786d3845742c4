#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "isp/grid.hpp"
#include "isp/partitioner.hpp"

namespace isp {

// All on-disk numbers round-trip exactly: doubles are written with 17
// significant digits, binary payloads are little-endian IEEE 754.

std::string format_double(double v);

// Series CSV: "t,y" per line, optional header on the first line.
std::vector<SamplePoint> read_series_csv(const std::filesystem::path& path);
void write_series_csv(const std::filesystem::path& path, std::span<const SamplePoint> series);

// Raw series: a bare stream of little-endian doubles, t implicitly 1..N.
std::vector<SamplePoint> read_series_raw(const std::filesystem::path& path);

// One persisted segment row.
struct SegmentRecord {
    std::string series_id;
    Segment segment;
};

void write_segments_csv(std::ostream& out, std::span<const SegmentRecord> records);
void write_segments_json(std::ostream& out, std::span<const SegmentRecord> records);

// Reads either format; JSON is detected by a leading '['.
std::vector<SegmentRecord> read_segments(std::istream& in);
std::vector<SegmentRecord> read_segments_file(const std::filesystem::path& path);

// Frame file: magic "ISP1", then u32 nx, u32 ny, u32 steps, then `steps`
// row-major ny x nx frames of little-endian doubles.
struct FrameFileHeader {
    std::uint32_t nx = 0;
    std::uint32_t ny = 0;
    std::uint32_t steps = 0;
};

// Sequential reader holding one frame in memory at a time.
class FrameReader {
  public:
    explicit FrameReader(const std::filesystem::path& path);
    ~FrameReader();
    FrameReader(const FrameReader&) = delete;
    FrameReader& operator=(const FrameReader&) = delete;

    const FrameFileHeader& header() const { return header_; }
    std::optional<GridFrame> next();

  private:
    FrameFileHeader header_;
    std::int64_t next_t_ = 1;
    void* file_ = nullptr;
    std::string path_;
};

void write_frames(const std::filesystem::path& path, std::uint32_t nx, std::uint32_t ny,
                  std::span<const GridFrame> frames);

} // namespace isp
