// simulate <mode> --config <file> [--out <csv>] [--svg <file>] [--threads N] [--strict]
//
// Exit codes: 0 success, 2 configuration or usage error, 3 numerical
// failure (solver, fit or topology), 4 I/O failure, 5 other library error.

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include "qdcav/run.hpp"

namespace {

enum Exit { ok = 0, config_error = 2, numerical_error = 3, io_error = 4, other_error = 5 };

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw qdcav::IoError("cannot read config '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Bichromatically driven quantum dot - cavity simulator"};
    std::string mode_name, config_path, out_path, svg_path;
    int threads = -1;
    bool strict = false;
    app.add_option("mode", mode_name, "probe-scan | pump-sweep | anticrossing | enhancement | dipole-estimate | oracle-check")
        ->required();
    app.add_option("--config", config_path, "config file (key = value lines)")->required();
    app.add_option("--out", out_path, "CSV output path (overrides output.csv)");
    app.add_option("--svg", svg_path, "SVG output path (overrides output.svg)");
    app.add_option("--threads", threads, "worker threads for scan points, 0 = all cores (overrides numerics.threads)");
    app.add_flag("--strict", strict, "reject unknown config keys instead of warning");
    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? ok : config_error;
    }

    qdcav::RunConfig cfg;
    qdcav::ResultTable table;
    try {
        const qdcav::Mode mode = qdcav::parse_mode(mode_name);
        cfg = qdcav::parse_config(read_file(config_path), strict);
        for (const auto& w : cfg.warnings) std::cerr << "warning: " << w << "\n";
        if (cfg.mode_explicit && cfg.mode != mode)
            throw qdcav::ConfigError("mode: config says '" + qdcav::to_string(cfg.mode) + "' but the command line says '" +
                                     mode_name + "'");
        cfg.mode = mode;
        if (!out_path.empty()) cfg.output.csv = out_path;
        if (!svg_path.empty()) cfg.output.svg = svg_path;
        if (threads >= 0) cfg.numerics.threads = threads;
        qdcav::validate(cfg);

        qdcav::run_into(cfg, cfg.numerics.threads, table);

        const std::string csv = qdcav::to_csv(table);
        if (cfg.output.csv.empty())
            std::cout << csv;
        else
            qdcav::write_atomic(cfg.output.csv, csv);
        if (!cfg.output.svg.empty())
            qdcav::write_atomic(cfg.output.svg, qdcav::render_svg(table, qdcav::plot_spec_for(cfg)));
        return ok;
    } catch (const qdcav::Error& e) {
        std::cerr << "simulate " << mode_name << ": " << e.what() << "\n";
        if (!table.rows.empty() && !cfg.output.csv.empty()) {
            try {
                table.meta.push_back(std::string("partial = ") + e.what());
                qdcav::write_atomic(qdcav::partial_path(cfg.output.csv), qdcav::to_csv(table));
                std::cerr << "partial results written to " << qdcav::partial_path(cfg.output.csv) << "\n";
            } catch (const qdcav::Error& e2) {
                std::cerr << "could not save partial results: " << e2.what() << "\n";
            }
        }
        if (dynamic_cast<const qdcav::ConfigError*>(&e)) return config_error;
        if (dynamic_cast<const qdcav::NumericalError*>(&e) || dynamic_cast<const qdcav::TopologyError*>(&e))
            return numerical_error;
        if (dynamic_cast<const qdcav::IoError*>(&e)) return io_error;
        return other_error;
    } catch (const std::exception& e) {
        std::cerr << "simulate " << mode_name << ": unexpected error: " << e.what() << "\n";
        return other_error;
    }
}
