// isp: partition scalar time series from a running simulation into
// piecewise-linear segments under a fixed memory budget, and work with the
// resulting segment files.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "isp/errors.hpp"
#include "isp/grid.hpp"
#include "isp/io.hpp"
#include "isp/partitioner.hpp"
#include "isp/reconstructor.hpp"
#include "isp/refkit.hpp"

namespace {

using isp::SamplePoint;
using isp::Segment;
using isp::SegmentRecord;

std::vector<SamplePoint> load_series(const std::string& path, const std::string& format) {
    if (format == "raw") {
        return isp::read_series_raw(path);
    }
    return isp::read_series_csv(path);
}

std::vector<SegmentRecord> to_records(const std::string& series_id,
                                      const std::vector<Segment>& segments) {
    std::vector<SegmentRecord> records;
    records.reserve(segments.size());
    for (const Segment& s : segments) {
        records.push_back(SegmentRecord{series_id, s});
    }
    return records;
}

void write_records(const std::filesystem::path& path, const std::vector<SegmentRecord>& records,
                   bool json) {
    std::ofstream out(path);
    if (!out) {
        throw isp::FormatError("cannot write " + path.string());
    }
    if (json) {
        isp::write_segments_json(out, records);
    } else {
        isp::write_segments_csv(out, records);
    }
}

std::string join_breakpoints(const std::vector<Segment>& segments) {
    std::string out;
    for (std::int64_t bp : isp::breakpoints(segments)) {
        if (!out.empty()) out += ',';
        out += std::to_string(bp);
    }
    return out;
}

double total_rss(const std::vector<Segment>& segments) {
    double total = 0.0;
    for (const Segment& s : segments) total += s.rss;
    return total;
}

void print_summary(std::ostream& out, const std::vector<Segment>& segments) {
    out << "n_partitions " << segments.size() << '\n';
    out << "rss_total " << isp::format_double(total_rss(segments)) << '\n';
    out << "breakpoints " << join_breakpoints(segments) << '\n';
}

int cmd_partition(const std::string& input, const std::string& format,
                  const isp::PartitionerConfig& cfg, const std::string& output,
                  const std::string& series_id, bool json) {
    const std::vector<SamplePoint> points = load_series(input, format);
    if (points.empty()) {
        throw isp::FormatError(input + ": no data points");
    }
    const std::vector<Segment> segments = isp::run_series(cfg, points);
    if (!output.empty()) {
        write_records(output, to_records(series_id, segments), json);
    }
    print_summary(std::cout, segments);
    return 0;
}

int cmd_sweep(const std::string& input, const std::string& format, int buffer_size,
              const std::vector<double>& alphas, const std::vector<double>& delta2s,
              const std::string& output) {
    const std::vector<SamplePoint> points = load_series(input, format);
    if (points.empty()) {
        throw isp::FormatError(input + ": no data points");
    }
    std::ostringstream table;
    table << "alpha,delta2,n_partitions,rss_total\n";
    for (double alpha : alphas) {
        for (double delta2 : delta2s) {
            const isp::PartitionerConfig cfg{buffer_size, alpha, delta2};
            const std::vector<Segment> segments = isp::run_series(cfg, points);
            char head[64];
            std::snprintf(head, sizeof(head), "%g,%g,", alpha, delta2);
            table << head << segments.size() << ','
                  << isp::format_double(total_rss(segments)) << '\n';
        }
    }
    if (output.empty()) {
        std::cout << table.str();
    } else {
        std::ofstream out(output);
        if (!out) {
            throw isp::FormatError("cannot write " + output);
        }
        out << table.str();
    }
    return 0;
}

int cmd_grid(const std::string& input, const std::vector<int>& grid_dims,
             const isp::PartitionerConfig& cfg, const std::string& output_dir, bool json) {
    isp::FrameReader reader(input);
    const isp::GridSpec spec{static_cast<int>(reader.header().nx),
                             static_cast<int>(reader.header().ny), grid_dims[2], grid_dims[3]};
    if (grid_dims[0] != spec.nx || grid_dims[1] != spec.ny) {
        throw isp::FormatError("grid " + std::to_string(grid_dims[0]) + "x" +
                               std::to_string(grid_dims[1]) + " does not match file header " +
                               std::to_string(spec.nx) + "x" + std::to_string(spec.ny));
    }
    std::filesystem::create_directories(output_dir);

    isp::GridRunner runner(cfg, spec);
    while (auto frame = reader.next()) {
        runner.push_frame(*frame);
    }
    const std::vector<isp::BlockResult> blocks = runner.finish();

    std::ofstream summary(std::filesystem::path(output_dir) / "blocks.csv");
    if (!summary) {
        throw isp::FormatError("cannot write block summary in " + output_dir);
    }
    summary << "block_row,block_col,n_partitions,rss_total\n";
    for (const isp::BlockResult& block : blocks) {
        const std::string id = "r" + std::to_string(block.row) + "c" + std::to_string(block.col);
        summary << block.row << ',' << block.col << ',' << block.segments.size() << ','
                << isp::format_double(block.rss_total) << '\n';
        const std::string name = "segments_r" + std::to_string(block.row) + "_c" +
                                 std::to_string(block.col) + (json ? ".json" : ".csv");
        write_records(std::filesystem::path(output_dir) / name, to_records(id, block.segments),
                      json);
    }
    std::cout << "blocks " << blocks.size() << '\n';
    std::cout << "steps " << reader.header().steps << '\n';
    return 0;
}

int cmd_reconstruct(const std::string& segments_path, const std::string& input,
                    const std::string& format, std::optional<std::size_t> baseline_k) {
    const std::vector<SegmentRecord> records = isp::read_segments_file(segments_path);
    if (records.empty()) {
        throw isp::IntegrityError(segments_path + ": no segments");
    }
    for (const SegmentRecord& rec : records) {
        if (rec.series_id != records.front().series_id) {
            throw isp::IntegrityError(segments_path + ": holds multiple series (" +
                                      records.front().series_id + ", " + rec.series_id +
                                      "); reconstruct one at a time");
        }
    }
    std::vector<Segment> segments;
    segments.reserve(records.size());
    for (const SegmentRecord& rec : records) {
        segments.push_back(rec.segment);
    }
    const isp::Reconstruction recon = isp::make_reconstruction(std::move(segments));

    std::cout << "series_id " << records.front().series_id << '\n';
    std::cout << "t_range " << recon.t_begin() << ".." << recon.t_end() << '\n';
    std::cout << "n_partitions " << recon.n_partitions << '\n';
    std::cout << "rss_total " << isp::format_double(recon.rss_total) << '\n';
    const std::size_t top = std::min<std::size_t>(5, recon.segments.size());
    std::vector<isp::SegmentRss> ranked;
    for (const Segment& s : recon.segments) ranked.push_back({s.index, s.rss});
    std::stable_sort(ranked.begin(), ranked.end(),
                     [](const isp::SegmentRss& a, const isp::SegmentRss& b) {
                         return a.rss > b.rss;
                     });
    for (std::size_t i = 0; i < top; ++i) {
        std::cout << "worst index=" << ranked[i].segment_index << " rss="
                  << isp::format_double(ranked[i].rss) << '\n';
    }

    if (input.empty()) {
        return 0;
    }
    const std::vector<SamplePoint> points = load_series(input, format);
    double max_rel = 0.0;
    for (const isp::AuditRow& row : isp::audit_rss(recon, points)) {
        const double scale = std::max({std::fabs(row.stored_rss), std::fabs(row.replayed_rss), 1.0});
        max_rel = std::max(max_rel, std::fabs(row.stored_rss - row.replayed_rss) / scale);
    }
    std::cout << "audit_max_rel_diff " << isp::format_double(max_rel) << '\n';
    if (baseline_k) {
        const isp::Reconstruction baseline = isp::evenly_spaced_baseline(points, *baseline_k);
        std::cout << "baseline_k " << *baseline_k << '\n';
        std::cout << "baseline_n_partitions " << baseline.n_partitions << '\n';
        std::cout << "baseline_rss_total " << isp::format_double(baseline.rss_total) << '\n';
    }
    return 0;
}

int cmd_synth(std::int64_t length, const std::vector<std::int64_t>& breaks,
              const std::vector<std::string>& piece_args, double noise, std::uint64_t seed,
              const std::string& output) {
    isp::SynthSpec spec;
    spec.length = length;
    spec.breakpoints = breaks;
    spec.noise_sigma = noise;
    spec.seed = seed;
    for (const std::string& arg : piece_args) {
        const auto comma = arg.find(',');
        if (comma == std::string::npos) {
            throw std::invalid_argument("--piece expects 'intercept,slope', got '" + arg + "'");
        }
        isp::LineFit piece;
        try {
            piece.beta0 = std::stod(arg.substr(0, comma));
            piece.beta1 = std::stod(arg.substr(comma + 1));
        } catch (const std::exception&) {
            throw std::invalid_argument("--piece expects 'intercept,slope', got '" + arg + "'");
        }
        spec.pieces.push_back(piece);
    }
    const std::vector<SamplePoint> points = isp::generate(spec);
    isp::write_series_csv(output, points);
    std::cerr << "wrote " << points.size() << " points to " << output << '\n';
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Online piecewise-linear partitioning of simulation time series"};
    app.require_subcommand(1);

    // partition
    std::string in_path, in_format = "csv", out_path, series_id = "s0";
    isp::PartitionerConfig cfg;
    bool json = false;
    auto* partition = app.add_subcommand("partition", "Partition a series into linear segments");
    partition->add_option("--input", in_path, "series file")->required();
    partition->add_option("--format", in_format, "input format")
        ->check(CLI::IsMember({"csv", "raw"}));
    partition->add_option("--b", cfg.buffer_size, "buffer size (raw steps retained)")
        ->check(CLI::Range(3, 1000000));
    partition->add_option("--alpha", cfg.alpha, "rejection threshold in (0,1)");
    partition->add_option("--delta2", cfg.delta2, "variance inflation per step");
    partition->add_option("--output", out_path, "segment file to write");
    partition->add_option("--series-id", series_id, "identifier stored with each segment");
    partition->add_flag("--json", json, "write segments as JSON instead of CSV");

    // sweep
    std::vector<double> alphas, delta2s;
    int sweep_b = 5;
    std::string sweep_in, sweep_format = "csv", sweep_out;
    auto* sweep = app.add_subcommand("sweep", "Tabulate partition counts over (alpha, delta2)");
    sweep->add_option("--input", sweep_in, "series file")->required();
    sweep->add_option("--format", sweep_format, "input format")
        ->check(CLI::IsMember({"csv", "raw"}));
    sweep->add_option("--b", sweep_b, "buffer size")->check(CLI::Range(3, 1000000));
    sweep->add_option("--alphas", alphas, "comma-separated alpha values")
        ->required()
        ->delimiter(',');
    sweep->add_option("--delta2s", delta2s, "comma-separated delta2 values")
        ->required()
        ->delimiter(',');
    sweep->add_option("--output", sweep_out, "table file (default stdout)");

    // grid
    std::string grid_in, grid_out;
    std::vector<int> grid_dims;
    isp::PartitionerConfig grid_cfg;
    bool grid_json = false;
    auto* grid = app.add_subcommand("grid", "Partition block means of a 2D field per block");
    grid->add_option("--input", grid_in, "frame file (ISP1 binary)")->required();
    grid->add_option("--grid", grid_dims, "nx,ny,bx,by")->required()->delimiter(',');
    grid->add_option("--b", grid_cfg.buffer_size, "buffer size")->check(CLI::Range(3, 1000000));
    grid->add_option("--alpha", grid_cfg.alpha, "rejection threshold");
    grid->add_option("--delta2", grid_cfg.delta2, "variance inflation per step");
    grid->add_option("--output", grid_out, "output directory")->required();
    grid->add_flag("--json", grid_json, "write segments as JSON instead of CSV");

    // reconstruct
    std::string rec_segments, rec_input, rec_format = "csv";
    std::size_t rec_k = 0;
    auto* reconstruct =
        app.add_subcommand("reconstruct", "Rebuild and audit a piecewise-linear approximation");
    reconstruct->add_option("--segments", rec_segments, "segment file")->required();
    auto* rec_in_opt = reconstruct->add_option("--input", rec_input, "raw series for auditing");
    reconstruct->add_option("--format", rec_format, "input format")
        ->check(CLI::IsMember({"csv", "raw"}));
    reconstruct->add_option("--baseline-k", rec_k, "evenly spaced baseline with k saved steps")
        ->needs(rec_in_opt);

    // synth
    std::int64_t synth_len = 0;
    std::vector<std::int64_t> synth_breaks;
    std::vector<std::string> synth_pieces;
    double synth_noise = 0.0;
    std::uint64_t synth_seed = 0;
    std::string synth_out;
    auto* synth = app.add_subcommand("synth", "Generate a piecewise-linear series with noise");
    synth->add_option("--length", synth_len, "number of steps")
        ->required()
        ->check(CLI::Range(static_cast<std::int64_t>(1), static_cast<std::int64_t>(1) << 40));
    synth->add_option("--breaks", synth_breaks, "comma-separated last steps of all but the "
                                                "final piece")
        ->delimiter(',');
    synth->add_option("--piece", synth_pieces, "intercept,slope (repeat once per piece)")
        ->required();
    synth->add_option("--noise", synth_noise, "Gaussian noise sigma");
    synth->add_option("--seed", synth_seed, "random seed");
    synth->add_option("--output", synth_out, "CSV file to write")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (partition->parsed()) {
            return cmd_partition(in_path, in_format, cfg, out_path, series_id, json);
        }
        if (sweep->parsed()) {
            return cmd_sweep(sweep_in, sweep_format, sweep_b, alphas, delta2s, sweep_out);
        }
        if (grid->parsed()) {
            if (grid_dims.size() != 4) {
                throw std::invalid_argument("--grid expects nx,ny,bx,by");
            }
            return cmd_grid(grid_in, grid_dims, grid_cfg, grid_out, grid_json);
        }
        if (reconstruct->parsed()) {
            return cmd_reconstruct(rec_segments, rec_input, rec_format,
                                   rec_k > 0 ? std::optional<std::size_t>(rec_k) : std::nullopt);
        }
        if (synth->parsed()) {
            return cmd_synth(synth_len, synth_breaks, synth_pieces, synth_noise, synth_seed,
                             synth_out);
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
