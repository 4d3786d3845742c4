#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "isp/partitioner.hpp"

namespace isp {

// Regular cell grid plus the block tiling used to reduce each frame to a
// handful of spatial means. Partial blocks at the right/bottom edges are
// allowed and averaged over the cells they actually contain.
struct GridSpec {
    int nx = 0; // cells per row
    int ny = 0; // rows
    int bx = 0; // block width in cells
    int by = 0; // block height in cells

    int blocks_x() const { return (nx + bx - 1) / bx; }
    int blocks_y() const { return (ny + by - 1) / by; }
    int block_count() const { return blocks_x() * blocks_y(); }

    void validate() const; // all dimensions >= 1
};

// One time step of a 2D scalar field, row-major ny x nx.
struct GridFrame {
    std::int64_t t = 0;
    std::vector<double> values;
};

// Arithmetic mean per block, row-major block order.
std::vector<double> block_means(const GridFrame& frame, const GridSpec& spec);

struct BlockResult {
    int row = 0;
    int col = 0;
    std::vector<Segment> segments;
    double rss_total = 0.0;
};

// One independent partitioner per block, all fed from the same single pass
// over the frame stream.
class GridRunner {
  public:
    GridRunner(const PartitionerConfig& cfg, const GridSpec& spec);

    // Frames must arrive in step order (t = 1, 2, ...).
    void push_frame(const GridFrame& frame);

    std::vector<BlockResult> finish();

  private:
    GridSpec spec_;
    std::vector<Partitioner> partitioners_;
    std::vector<std::vector<Segment>> closed_;
    bool finished_ = false;
};

std::vector<BlockResult> run_grid(const PartitionerConfig& cfg, const GridSpec& spec,
                                  std::span<const GridFrame> frames);

} // namespace isp
