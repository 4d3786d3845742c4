#include "isp/io.hpp"

#include <bit>
#include <cerrno>
#include <cinttypes>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "json.hpp"

#include "isp/errors.hpp"

namespace isp {

std::string format_double(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

namespace {

std::string trimmed(const std::string& s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string::npos) return "";
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

bool parse_double(const std::string& s, double& out) {
    if (s.empty()) return false;
    char* end = nullptr;
    errno = 0;
    out = std::strtod(s.c_str(), &end);
    return errno == 0 && end == s.c_str() + s.size();
}

bool parse_int64(const std::string& s, std::int64_t& out) {
    if (s.empty()) return false;
    char* end = nullptr;
    errno = 0;
    out = std::strtoll(s.c_str(), &end, 10);
    return errno == 0 && end == s.c_str() + s.size();
}

std::vector<std::string> split(const std::string& line, char sep) {
    std::vector<std::string> out;
    std::size_t start = 0;
    while (true) {
        const std::size_t pos = line.find(sep, start);
        if (pos == std::string::npos) {
            out.push_back(trimmed(line.substr(start)));
            break;
        }
        out.push_back(trimmed(line.substr(start, pos - start)));
        start = pos + 1;
    }
    return out;
}

void put_u32_le(std::FILE* f, std::uint32_t v) {
    unsigned char b[4];
    for (int i = 0; i < 4; ++i) b[i] = static_cast<unsigned char>((v >> (8 * i)) & 0xff);
    std::fwrite(b, 1, 4, f);
}

bool get_u32_le(std::FILE* f, std::uint32_t& v) {
    unsigned char b[4];
    if (std::fread(b, 1, 4, f) != 4) return false;
    v = 0;
    for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(b[i]) << (8 * i);
    return true;
}

void put_f64_le(std::FILE* f, double d) {
    const auto bits = std::bit_cast<std::uint64_t>(d);
    unsigned char b[8];
    for (int i = 0; i < 8; ++i) b[i] = static_cast<unsigned char>((bits >> (8 * i)) & 0xff);
    std::fwrite(b, 1, 8, f);
}

bool get_f64_le(std::FILE* f, double& d) {
    unsigned char b[8];
    if (std::fread(b, 1, 8, f) != 8) return false;
    std::uint64_t bits = 0;
    for (int i = 0; i < 8; ++i) bits |= static_cast<std::uint64_t>(b[i]) << (8 * i);
    d = std::bit_cast<double>(bits);
    return true;
}

} // namespace

std::vector<SamplePoint> read_series_csv(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw FormatError("cannot open " + path.string());
    }
    std::vector<SamplePoint> out;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const std::string body = trimmed(line);
        if (body.empty()) continue;
        const std::vector<std::string> cells = split(body, ',');
        SamplePoint p;
        const bool ok = cells.size() == 2 && parse_int64(cells[0], p.t) &&
                        parse_double(cells[1], p.y);
        if (!ok) {
            if (lineno == 1) continue; // header
            throw FormatError(path.string() + ":" + std::to_string(lineno) +
                              ": expected 't,y', got '" + body + "'");
        }
        out.push_back(p);
    }
    return out;
}

void write_series_csv(const std::filesystem::path& path, std::span<const SamplePoint> series) {
    std::ofstream out(path);
    if (!out) {
        throw FormatError("cannot write " + path.string());
    }
    out << "t,y\n";
    for (const SamplePoint& p : series) {
        out << p.t << ',' << format_double(p.y) << '\n';
    }
}

std::vector<SamplePoint> read_series_raw(const std::filesystem::path& path) {
    std::FILE* f = std::fopen(path.string().c_str(), "rb");
    if (!f) {
        throw FormatError("cannot open " + path.string());
    }
    std::vector<SamplePoint> out;
    double y = 0.0;
    std::int64_t t = 1;
    while (get_f64_le(f, y)) {
        out.push_back(SamplePoint{t++, y});
    }
    const bool clean_eof = std::feof(f) != 0;
    const long tail = std::ftell(f);
    std::fclose(f);
    if (!clean_eof || tail % 8 != 0) {
        throw FormatError(path.string() + ": size is not a multiple of 8 bytes");
    }
    return out;
}

namespace {

const char* const kSegmentHeader =
    "series_id,segment_index,start_t,end_t,count,theta,big_theta,psi,big_psi,tau,rss,beta0,beta1";

} // namespace

void write_segments_csv(std::ostream& out, std::span<const SegmentRecord> records) {
    out << kSegmentHeader << '\n';
    for (const SegmentRecord& rec : records) {
        const Segment& s = rec.segment;
        out << rec.series_id << ',' << s.index << ',' << s.start_t << ',' << s.end_t << ','
            << s.stats.count << ',' << format_double(s.stats.theta) << ','
            << format_double(s.stats.big_theta) << ',' << format_double(s.stats.psi) << ','
            << format_double(s.stats.big_psi) << ',' << format_double(s.stats.tau) << ','
            << format_double(s.rss) << ',' << format_double(s.fit.beta0) << ','
            << format_double(s.fit.beta1) << '\n';
    }
}

void write_segments_json(std::ostream& out, std::span<const SegmentRecord> records) {
    nlohmann::ordered_json arr = nlohmann::ordered_json::array();
    for (const SegmentRecord& rec : records) {
        const Segment& s = rec.segment;
        arr.push_back({{"series_id", rec.series_id},
                       {"segment_index", s.index},
                       {"start_t", s.start_t},
                       {"end_t", s.end_t},
                       {"count", s.stats.count},
                       {"theta", s.stats.theta},
                       {"big_theta", s.stats.big_theta},
                       {"psi", s.stats.psi},
                       {"big_psi", s.stats.big_psi},
                       {"tau", s.stats.tau},
                       {"rss", s.rss},
                       {"beta0", s.fit.beta0},
                       {"beta1", s.fit.beta1}});
    }
    out << arr.dump(2) << '\n';
}

namespace {

std::vector<SegmentRecord> read_segments_json(std::istream& in) {
    nlohmann::json arr;
    try {
        in >> arr;
    } catch (const nlohmann::json::exception& e) {
        throw FormatError(std::string("segment json: ") + e.what());
    }
    if (!arr.is_array()) {
        throw FormatError("segment json: expected a top-level array");
    }
    std::vector<SegmentRecord> out;
    try {
        for (const auto& item : arr) {
            SegmentRecord rec;
            rec.series_id = item.at("series_id").get<std::string>();
            Segment& s = rec.segment;
            s.index = item.at("segment_index").get<std::size_t>();
            s.start_t = item.at("start_t").get<std::int64_t>();
            s.end_t = item.at("end_t").get<std::int64_t>();
            s.stats.count = item.at("count").get<std::int64_t>();
            s.stats.theta = item.at("theta").get<double>();
            s.stats.big_theta = item.at("big_theta").get<double>();
            s.stats.psi = item.at("psi").get<double>();
            s.stats.big_psi = item.at("big_psi").get<double>();
            s.stats.tau = item.at("tau").get<double>();
            s.rss = item.at("rss").get<double>();
            s.fit.beta0 = item.at("beta0").get<double>();
            s.fit.beta1 = item.at("beta1").get<double>();
            out.push_back(std::move(rec));
        }
    } catch (const nlohmann::json::exception& e) {
        throw FormatError(std::string("segment json: ") + e.what());
    }
    return out;
}

std::vector<SegmentRecord> read_segments_csv(std::istream& in) {
    std::vector<SegmentRecord> out;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const std::string body = trimmed(line);
        if (body.empty()) continue;
        if (lineno == 1) {
            if (body != kSegmentHeader) {
                throw FormatError("segment csv: unexpected header '" + body + "'");
            }
            continue;
        }
        const std::vector<std::string> cells = split(body, ',');
        if (cells.size() != 13) {
            throw FormatError("segment csv line " + std::to_string(lineno) + ": expected 13 "
                              "fields, got " + std::to_string(cells.size()));
        }
        SegmentRecord rec;
        rec.series_id = cells[0];
        Segment& s = rec.segment;
        std::int64_t idx = 0;
        const bool ok = parse_int64(cells[1], idx) && parse_int64(cells[2], s.start_t) &&
                        parse_int64(cells[3], s.end_t) && parse_int64(cells[4], s.stats.count) &&
                        parse_double(cells[5], s.stats.theta) &&
                        parse_double(cells[6], s.stats.big_theta) &&
                        parse_double(cells[7], s.stats.psi) &&
                        parse_double(cells[8], s.stats.big_psi) &&
                        parse_double(cells[9], s.stats.tau) && parse_double(cells[10], s.rss) &&
                        parse_double(cells[11], s.fit.beta0) &&
                        parse_double(cells[12], s.fit.beta1);
        if (!ok || idx < 0) {
            throw FormatError("segment csv line " + std::to_string(lineno) + ": malformed row");
        }
        s.index = static_cast<std::size_t>(idx);
        out.push_back(std::move(rec));
    }
    return out;
}

} // namespace

std::vector<SegmentRecord> read_segments(std::istream& in) {
    // JSON output starts with '['; the CSV header starts with a letter.
    int c = in.peek();
    while (c == ' ' || c == '\n' || c == '\r' || c == '\t') {
        in.get();
        c = in.peek();
    }
    if (c == '[') {
        return read_segments_json(in);
    }
    return read_segments_csv(in);
}

std::vector<SegmentRecord> read_segments_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw FormatError("cannot open " + path.string());
    }
    return read_segments(in);
}

FrameReader::FrameReader(const std::filesystem::path& path) : path_(path.string()) {
    std::FILE* f = std::fopen(path_.c_str(), "rb");
    if (!f) {
        throw FormatError("cannot open " + path_);
    }
    file_ = f;
    char magic[4];
    if (std::fread(magic, 1, 4, f) != 4 || std::memcmp(magic, "ISP1", 4) != 0) {
        std::fclose(f);
        file_ = nullptr;
        throw FormatError(path_ + ": bad magic, expected ISP1");
    }
    if (!get_u32_le(f, header_.nx) || !get_u32_le(f, header_.ny) ||
        !get_u32_le(f, header_.steps)) {
        std::fclose(f);
        file_ = nullptr;
        throw FormatError(path_ + ": truncated header");
    }
    if (header_.nx == 0 || header_.ny == 0) {
        std::fclose(f);
        file_ = nullptr;
        throw FormatError(path_ + ": zero grid dimension");
    }
}

FrameReader::~FrameReader() {
    if (file_ != nullptr) {
        std::fclose(static_cast<std::FILE*>(file_));
    }
}

std::optional<GridFrame> FrameReader::next() {
    if (next_t_ > static_cast<std::int64_t>(header_.steps)) {
        return std::nullopt;
    }
    auto* f = static_cast<std::FILE*>(file_);
    GridFrame frame;
    frame.t = next_t_++;
    const std::size_t cells = static_cast<std::size_t>(header_.nx) * header_.ny;
    frame.values.resize(cells);
    for (std::size_t i = 0; i < cells; ++i) {
        if (!get_f64_le(f, frame.values[i])) {
            throw FormatError(path_ + ": truncated at frame t=" + std::to_string(frame.t));
        }
    }
    return frame;
}

void write_frames(const std::filesystem::path& path, std::uint32_t nx, std::uint32_t ny,
                  std::span<const GridFrame> frames) {
    std::FILE* f = std::fopen(path.string().c_str(), "wb");
    if (!f) {
        throw FormatError("cannot write " + path.string());
    }
    std::fwrite("ISP1", 1, 4, f);
    put_u32_le(f, nx);
    put_u32_le(f, ny);
    put_u32_le(f, static_cast<std::uint32_t>(frames.size()));
    const std::size_t cells = static_cast<std::size_t>(nx) * ny;
    for (const GridFrame& frame : frames) {
        if (frame.values.size() != cells) {
            std::fclose(f);
            throw FormatError("frame t=" + std::to_string(frame.t) + " does not match nx*ny");
        }
        for (double v : frame.values) {
            put_f64_le(f, v);
        }
    }
    std::fclose(f);
}

} // namespace isp
