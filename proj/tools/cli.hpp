#pragma once

// bsnr command-line front end, callable in-process.

#include "boundedsnr/estimators.hpp"
#include "boundedsnr/problem.hpp"
#include "boundedsnr/risk.hpp"

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace snr::cli {

/// "lo:hi:n" or "lo:hi:n:log".
struct GridSpec {
    double lo = 0.0;
    double hi = 1.0;
    std::size_t n = 2;
    bool log = false;

    std::vector<double> values() const;
    std::string text() const;
};

GridSpec parse_grid(const std::string& text, const std::string& field);

struct RunConfig {
    Problem problem{5, 20, 2.0};
    /// Empty means the command's default set.
    std::vector<EstimatorSpec> specs;
    std::optional<GridSpec> lambda_grid;
    std::optional<GridSpec> t_grid;
    SampleConfig sample;
    std::filesystem::path out = ".";
    bool out_given = false;
    bool svg = false;
    double l = 0.0;
    std::optional<double> radius;
};

/// Runs `bsnr args...` (args excludes the program name). Returns the exit code:
/// 0 success, 1 failed verification or runtime error, 2 usage or configuration error.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace snr::cli
