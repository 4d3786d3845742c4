#include "isp/grid.hpp"

#include <algorithm>
#include <stdexcept>
#include <string>

#include "isp/errors.hpp"

namespace isp {

void GridSpec::validate() const {
    if (nx < 1 || ny < 1 || bx < 1 || by < 1) {
        throw std::invalid_argument("grid dimensions and block sizes must all be >= 1");
    }
}

std::vector<double> block_means(const GridFrame& frame, const GridSpec& spec) {
    spec.validate();
    const std::size_t expected = static_cast<std::size_t>(spec.nx) * static_cast<std::size_t>(spec.ny);
    if (frame.values.size() != expected) {
        throw FormatError("frame at t=" + std::to_string(frame.t) + " has " +
                          std::to_string(frame.values.size()) + " cells, grid expects " +
                          std::to_string(expected));
    }
    std::vector<double> means;
    means.reserve(static_cast<std::size_t>(spec.block_count()));
    for (int br = 0; br < spec.blocks_y(); ++br) {
        const int r0 = br * spec.by;
        const int r1 = std::min(spec.ny, r0 + spec.by);
        for (int bc = 0; bc < spec.blocks_x(); ++bc) {
            const int c0 = bc * spec.bx;
            const int c1 = std::min(spec.nx, c0 + spec.bx);
            double sum = 0.0;
            for (int r = r0; r < r1; ++r) {
                for (int c = c0; c < c1; ++c) {
                    sum += frame.values[static_cast<std::size_t>(r) * spec.nx + c];
                }
            }
            means.push_back(sum / ((r1 - r0) * (c1 - c0)));
        }
    }
    return means;
}

GridRunner::GridRunner(const PartitionerConfig& cfg, const GridSpec& spec) : spec_(spec) {
    spec_.validate();
    cfg.validate();
    const int n = spec_.block_count();
    partitioners_.reserve(static_cast<std::size_t>(n));
    closed_.resize(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        partitioners_.emplace_back(cfg);
    }
}

void GridRunner::push_frame(const GridFrame& frame) {
    if (finished_) {
        throw std::logic_error("push_frame after finish");
    }
    const std::vector<double> means = block_means(frame, spec_);
    for (std::size_t i = 0; i < means.size(); ++i) {
        if (auto seg = partitioners_[i].push(SamplePoint{frame.t, means[i]})) {
            closed_[i].push_back(*seg);
        }
    }
}

std::vector<BlockResult> GridRunner::finish() {
    if (finished_) {
        throw std::logic_error("finish called twice");
    }
    finished_ = true;
    std::vector<BlockResult> out;
    out.reserve(closed_.size());
    for (std::size_t i = 0; i < closed_.size(); ++i) {
        BlockResult block;
        block.row = static_cast<int>(i) / spec_.blocks_x();
        block.col = static_cast<int>(i) % spec_.blocks_x();
        block.segments = std::move(closed_[i]);
        for (Segment& seg : partitioners_[i].finish()) {
            block.segments.push_back(seg);
        }
        for (const Segment& seg : block.segments) {
            block.rss_total += seg.rss;
        }
        out.push_back(std::move(block));
    }
    return out;
}

std::vector<BlockResult> run_grid(const PartitionerConfig& cfg, const GridSpec& spec,
                                  std::span<const GridFrame> frames) {
    GridRunner runner(cfg, spec);
    for (const GridFrame& frame : frames) {
        runner.push_frame(frame);
    }
    return runner.finish();
}

} // namespace isp
