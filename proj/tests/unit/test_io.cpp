#include "doctest.h"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <vector>

#include "isp/io.hpp"

using isp::GridFrame;
using isp::SamplePoint;

namespace {

namespace fs = std::filesystem;

struct TempDir {
    fs::path path;
    TempDir() {
        path = fs::temp_directory_path() /
               ("isp_io_test_" + std::to_string(std::random_device{}()));
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
};

} // namespace

TEST_CASE("series csv round trip with header") {
    TempDir dir;
    const fs::path p = dir.path / "series.csv";
    std::vector<SamplePoint> pts;
    std::mt19937_64 eng(1);
    std::uniform_real_distribution<double> u(-1e6, 1e6);
    for (std::int64_t t = 1; t <= 500; ++t) pts.push_back({t, u(eng)});
    isp::write_series_csv(p, pts);
    const auto back = isp::read_series_csv(p);
    REQUIRE(back.size() == pts.size());
    for (std::size_t i = 0; i < pts.size(); ++i) {
        CHECK(back[i].t == pts[i].t);
        CHECK(back[i].y == pts[i].y); // bitwise via 17 significant digits
    }
}

TEST_CASE("series csv accepts headerless input and flags bad lines") {
    TempDir dir;
    const fs::path p = dir.path / "noheader.csv";
    {
        std::ofstream out(p);
        out << "1,0.5\n2,0.25\n";
    }
    const auto pts = isp::read_series_csv(p);
    REQUIRE(pts.size() == 2);
    CHECK(pts[1].y == 0.25);

    const fs::path bad = dir.path / "bad.csv";
    {
        std::ofstream out(bad);
        out << "t,y\n1,0.5\nnot-a-row\n";
    }
    CHECK_THROWS_WITH_AS(isp::read_series_csv(bad), doctest::Contains(":3"), isp::FormatError);
    CHECK_THROWS_AS(isp::read_series_csv(dir.path / "missing.csv"), isp::FormatError);
}

TEST_CASE("raw series read and size validation") {
    TempDir dir;
    const fs::path p = dir.path / "series.raw";
    {
        std::ofstream out(p, std::ios::binary);
        // 0.0 and 1.5 as little-endian doubles.
        const unsigned char zero[8] = {0, 0, 0, 0, 0, 0, 0, 0};
        const unsigned char one_five[8] = {0, 0, 0, 0, 0, 0, 0xf8, 0x3f};
        out.write(reinterpret_cast<const char*>(zero), 8);
        out.write(reinterpret_cast<const char*>(one_five), 8);
    }
    const auto pts = isp::read_series_raw(p);
    REQUIRE(pts.size() == 2);
    CHECK(pts[0].t == 1);
    CHECK(pts[0].y == 0.0);
    CHECK(pts[1].t == 2);
    CHECK(pts[1].y == 1.5);

    {
        std::ofstream out(p, std::ios::binary | std::ios::app);
        out.write("xy", 2);
    }
    CHECK_THROWS_AS(isp::read_series_raw(p), isp::FormatError);
}

TEST_CASE("segment records survive csv and json round trips") {
    std::vector<isp::SegmentRecord> records;
    std::mt19937_64 eng(2);
    std::uniform_real_distribution<double> u(-1e9, 1e9);
    std::int64_t t = 1;
    for (int i = 0; i < 40; ++i) {
        isp::Segment s;
        s.index = static_cast<std::size_t>(i);
        s.start_t = t;
        s.end_t = t + 9;
        t += 10;
        s.stats = isp::SuffStats{u(eng), u(eng), u(eng), u(eng), u(eng), 10};
        s.rss = std::fabs(u(eng));
        s.fit = isp::LineFit{u(eng), u(eng)};
        records.push_back({"blk", s});
    }
    for (const bool json : {false, true}) {
        std::stringstream buf;
        if (json) {
            isp::write_segments_json(buf, records);
        } else {
            isp::write_segments_csv(buf, records);
        }
        const auto back = isp::read_segments(buf);
        REQUIRE(back.size() == records.size());
        for (std::size_t i = 0; i < records.size(); ++i) {
            const auto& a = records[i].segment;
            const auto& b = back[i].segment;
            CHECK(back[i].series_id == records[i].series_id);
            CHECK(a.index == b.index);
            CHECK(a.start_t == b.start_t);
            CHECK(a.end_t == b.end_t);
            CHECK(a.stats.theta == b.stats.theta);
            CHECK(a.stats.big_theta == b.stats.big_theta);
            CHECK(a.stats.psi == b.stats.psi);
            CHECK(a.stats.big_psi == b.stats.big_psi);
            CHECK(a.stats.tau == b.stats.tau);
            CHECK(a.stats.count == b.stats.count);
            CHECK(a.rss == b.rss);
            CHECK(a.fit.beta0 == b.fit.beta0);
            CHECK(a.fit.beta1 == b.fit.beta1);
        }
    }
}

TEST_CASE("segment reader rejects malformed input") {
    std::stringstream wrong_header("id,whatever\n");
    CHECK_THROWS_AS(isp::read_segments(wrong_header), isp::FormatError);

    std::stringstream short_row;
    short_row << "series_id,segment_index,start_t,end_t,count,theta,big_theta,psi,big_psi,tau,"
                 "rss,beta0,beta1\n"
              << "s0,0,1\n";
    CHECK_THROWS_AS(isp::read_segments(short_row), isp::FormatError);

    std::stringstream bad_json("[{\"series_id\": 3}]");
    CHECK_THROWS_AS(isp::read_segments(bad_json), isp::FormatError);
}

TEST_CASE("frame files round trip and validate") {
    TempDir dir;
    const fs::path p = dir.path / "frames.bin";
    std::vector<GridFrame> frames;
    std::mt19937_64 eng(3);
    std::uniform_real_distribution<double> u(-10.0, 10.0);
    for (std::int64_t t = 1; t <= 7; ++t) {
        GridFrame f;
        f.t = t;
        f.values.resize(6);
        for (double& v : f.values) v = u(eng);
        frames.push_back(std::move(f));
    }
    isp::write_frames(p, 3, 2, frames);

    isp::FrameReader reader(p);
    CHECK(reader.header().nx == 3);
    CHECK(reader.header().ny == 2);
    CHECK(reader.header().steps == 7);
    std::size_t n = 0;
    while (auto f = reader.next()) {
        CHECK(f->t == frames[n].t);
        for (std::size_t i = 0; i < f->values.size(); ++i) {
            CHECK(f->values[i] == frames[n].values[i]); // bitwise
        }
        ++n;
    }
    CHECK(n == 7);

    const fs::path bad = dir.path / "bad.bin";
    {
        std::ofstream out(bad, std::ios::binary);
        out << "NOPE";
    }
    CHECK_THROWS_AS(isp::FrameReader{bad}, isp::FormatError);

    // Truncate mid-frame.
    const fs::path cut = dir.path / "cut.bin";
    fs::copy_file(p, cut);
    fs::resize_file(cut, fs::file_size(cut) - 11);
    isp::FrameReader cut_reader(cut);
    CHECK_THROWS_AS(
        [&] {
            while (cut_reader.next()) {
            }
        }(),
        isp::FormatError);
}

TEST_CASE("format_double round trips arbitrary doubles") {
    std::mt19937_64 eng(4);
    std::uniform_real_distribution<double> mant(-1.0, 1.0);
    std::uniform_int_distribution<int> expo(-300, 300);
    for (int i = 0; i < 2000; ++i) {
        const double v = std::ldexp(mant(eng), expo(eng));
        const std::string s = isp::format_double(v);
        CHECK(std::strtod(s.c_str(), nullptr) == v);
    }
}
