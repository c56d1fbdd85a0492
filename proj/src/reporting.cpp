#include "nplap/reporting.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <limits>
#include <ostream>
#include <sstream>

#include <json.hpp>

#include "nplap/errors.hpp"

namespace nplap {

std::string format_number(double x) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.15g", x);
    // guard against a locale with a decimal comma
    std::string s(buf);
    std::replace(s.begin(), s.end(), ',', '.');
    return s;
}

std::vector<double> linear_grid(double lo, double hi, int points) {
    if (points < 1 || !(hi >= lo)) {
        throw DomainError("linear_grid: need points >= 1 and lo <= hi");
    }
    if (points == 1) {
        return {lo};
    }
    std::vector<double> grid(static_cast<std::size_t>(points));
    for (int i = 0; i < points; ++i) {
        grid[static_cast<std::size_t>(i)] = lo + (hi - lo) * i / (points - 1);
    }
    grid.back() = hi;
    return grid;
}

void write_constants_csv(std::ostream& out, const std::vector<ConstantsRow>& rows) {
    out << "n,p,K,K_star,ratio\n";
    for (const ConstantsRow& r : rows) {
        out << r.n << ',' << format_number(r.p) << ',' << format_number(r.K) << ',' << format_number(r.K_star) << ','
            << format_number(r.ratio) << '\n';
    }
}

void write_faber_krahn_csv(std::ostream& out, const FaberKrahnTable& table) {
    out << "name,lambda,measure,product\n";
    for (const FaberKrahnRow& r : table.rows) {
        out << '"' << r.name << "\"," << format_number(r.lambda) << ',' << format_number(r.measure) << ','
            << format_number(r.product) << '\n';
    }
}

namespace {

// Round step for about `target` ticks over [lo, hi].
double tick_step(double lo, double hi, int target) {
    const double raw = (hi - lo) / target;
    const double mag = std::pow(10.0, std::floor(std::log10(raw)));
    for (double m : {1.0, 2.0, 5.0, 10.0}) {
        if (m * mag >= raw) {
            return m * mag;
        }
    }
    return 10.0 * mag;
}

std::string short_number(double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6g", x);
    return buf;
}

std::string escape_xml(const std::string& s) {
    std::string out;
    for (char c : s) {
        switch (c) {
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            case '&': out += "&amp;"; break;
            default: out += c;
        }
    }
    return out;
}

}  // namespace

std::string svg_plot(const std::vector<Series>& series, const std::string& title, const std::string& x_label,
                     const std::string& y_label) {
    double xmin = std::numeric_limits<double>::infinity(), xmax = -xmin;
    double ymin = xmin, ymax = -xmin;
    for (const Series& s : series) {
        if (s.x.size() != s.y.size()) {
            throw DomainError("svg_plot: series x and y differ in length");
        }
        for (std::size_t i = 0; i < s.x.size(); ++i) {
            xmin = std::min(xmin, s.x[i]);
            xmax = std::max(xmax, s.x[i]);
            ymin = std::min(ymin, s.y[i]);
            ymax = std::max(ymax, s.y[i]);
        }
    }
    if (!std::isfinite(xmin)) {
        xmin = 0.0, xmax = 1.0, ymin = 0.0, ymax = 1.0;
    }
    if (xmax == xmin) xmax = xmin + 1.0;
    if (ymax == ymin) ymax = ymin + 1.0;
    const double ypad = 0.05 * (ymax - ymin);
    ymin -= ypad;
    ymax += ypad;

    const double W = 640, H = 420, left = 70, right = 150, top = 40, bottom = 60;
    const double pw = W - left - right, ph = H - top - bottom;
    auto sx = [&](double x) { return left + (x - xmin) / (xmax - xmin) * pw; };
    auto sy = [&](double y) { return top + (1.0 - (y - ymin) / (ymax - ymin)) * ph; };

    std::ostringstream o;
    o << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H << "\" viewBox=\"0 0 " << W
      << ' ' << H << "\">\n";
    o << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    o << "<text x=\"" << W / 2 << "\" y=\"22\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"15\">"
      << escape_xml(title) << "</text>\n";
    o << "<rect x=\"" << left << "\" y=\"" << top << "\" width=\"" << pw << "\" height=\"" << ph
      << "\" fill=\"none\" stroke=\"black\"/>\n";

    const double xs = tick_step(xmin, xmax, 8);
    for (double t = std::ceil(xmin / xs) * xs; t <= xmax + 1e-12 * xs; t += xs) {
        o << "<line x1=\"" << sx(t) << "\" y1=\"" << top + ph << "\" x2=\"" << sx(t) << "\" y2=\"" << top + ph + 5
          << "\" stroke=\"black\"/>\n";
        o << "<text x=\"" << sx(t) << "\" y=\"" << top + ph + 18
          << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"11\">" << short_number(t)
          << "</text>\n";
    }
    const double ys = tick_step(ymin, ymax, 6);
    for (double t = std::ceil(ymin / ys) * ys; t <= ymax + 1e-12 * ys; t += ys) {
        o << "<line x1=\"" << left - 5 << "\" y1=\"" << sy(t) << "\" x2=\"" << left << "\" y2=\"" << sy(t)
          << "\" stroke=\"black\"/>\n";
        o << "<text x=\"" << left - 8 << "\" y=\"" << sy(t) + 4
          << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"11\">" << short_number(t) << "</text>\n";
    }
    o << "<text x=\"" << left + pw / 2 << "\" y=\"" << H - 15
      << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"13\">" << escape_xml(x_label)
      << "</text>\n";
    o << "<text x=\"18\" y=\"" << top + ph / 2 << "\" text-anchor=\"middle\" font-family=\"sans-serif\" "
      << "font-size=\"13\" transform=\"rotate(-90 18 " << top + ph / 2 << ")\">" << escape_xml(y_label)
      << "</text>\n";

    static const char* colors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"};
    for (std::size_t k = 0; k < series.size(); ++k) {
        const Series& s = series[k];
        const char* color = colors[k % 6];
        o << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.8\" points=\"";
        for (std::size_t i = 0; i < s.x.size(); ++i) {
            char buf[64];
            std::snprintf(buf, sizeof buf, "%.2f,%.2f ", sx(s.x[i]), sy(s.y[i]));
            o << buf;
        }
        o << "\"/>\n";
        const double ly = top + 20 + 20.0 * static_cast<double>(k);
        o << "<line x1=\"" << left + pw + 15 << "\" y1=\"" << ly << "\" x2=\"" << left + pw + 40 << "\" y2=\"" << ly
          << "\" stroke=\"" << color << "\" stroke-width=\"2\"/>\n";
        o << "<text x=\"" << left + pw + 45 << "\" y=\"" << ly + 4
          << "\" font-family=\"sans-serif\" font-size=\"12\">" << escape_xml(s.label) << "</text>\n";
    }
    o << "</svg>\n";
    return o.str();
}

std::string eigenpair_json(const EigenPair& pair) {
    nlohmann::ordered_json j;
    j["lambda"] = pair.lambda;
    j["cw_low"] = pair.cw_low;
    j["cw_high"] = pair.cw_high;
    j["iterations"] = pair.iterations;
    j["residual"] = pair.residual;
    return j.dump(2);
}

std::string RunManifest::to_json() const {
    nlohmann::ordered_json j;
    j["subcommand"] = subcommand;
    j["parameters"] = parameters;
    j["outputs"] = outputs;
    j["timestamp"] = timestamp;
    j["version"] = version;
    return j.dump(2) + "\n";
}

std::string utc_timestamp() {
    const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

std::filesystem::path write_text_file(const std::filesystem::path& dir, const std::string& name,
                                      const std::string& text) {
    std::filesystem::create_directories(dir);
    const std::filesystem::path path = dir / name;
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw std::runtime_error("cannot write " + path.string());
    }
    out << text;
    return path;
}

}  // namespace nplap
