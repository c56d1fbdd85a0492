#pragma once

#include <filesystem>
#include <iosfwd>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "nplap/bounds_constants.hpp"
#include "nplap/eigen_solver.hpp"

namespace nplap {

inline constexpr const char* kToolkitVersion = "0.1.0";

/// 15 significant digits, '.' decimal separator, independent of the global locale.
std::string format_number(double x);

/// `points` evenly spaced values spanning [lo, hi] (both ends included).
std::vector<double> linear_grid(double lo, double hi, int points);

/// Header "n,p,K,K_star,ratio", LF line endings.
void write_constants_csv(std::ostream& out, const std::vector<ConstantsRow>& rows);

/// Header "name,lambda,measure,product".
void write_faber_krahn_csv(std::ostream& out, const FaberKrahnTable& table);

struct Series {
    std::string label;
    std::vector<double> x;
    std::vector<double> y;
};

/// Self-contained SVG line plot: one polyline per series, axes, tick labels, legend.
std::string svg_plot(const std::vector<Series>& series, const std::string& title, const std::string& x_label,
                     const std::string& y_label);

/// {lambda, cw_low, cw_high, iterations, residual}
std::string eigenpair_json(const EigenPair& pair);

struct RunManifest {
    std::string subcommand;
    std::map<std::string, std::string> parameters;
    std::vector<std::string> outputs;
    std::string timestamp;  ///< ISO 8601 UTC
    std::string version = kToolkitVersion;

    std::string to_json() const;
};

std::string utc_timestamp();

/// Writes `text` to dir/name (creating dir) and returns the path.
std::filesystem::path write_text_file(const std::filesystem::path& dir, const std::string& name,
                                      const std::string& text);

}  // namespace nplap
