// SPDX-License-Identifier: Apache-2.0
//
// isacsim - deterministic link-level simulator for sensing-assisted distributed MIMO
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------

#include "isacsim/metrics_io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>

#include <json.hpp>

#include "isacsim/config.hpp"

namespace isacsim {

using ordered_json = nlohmann::ordered_json;

std::string format_double(double v) {
    char buf[40];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

namespace {

// %g-style tick label without locale dependence.
std::string short_num(double v) {
    char buf[40];
    const auto res = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 6);
    return std::string(buf, res.ptr);
}

std::ofstream open_out(const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw std::runtime_error("cannot open '" + path + "' for writing");
    return out;
}

void finish(std::ofstream& out, const std::string& path) {
    out.flush();
    if (!out.good())
        throw std::runtime_error("write to '" + path + "' failed");
}

std::vector<std::string> split_line(const std::string& line, char sep) {
    std::vector<std::string> out;
    std::string cur;
    std::istringstream is(line);
    while (std::getline(is, cur, sep))
        out.push_back(cur);
    return out;
}

} // namespace

void write_metrics_csv(const std::string& path, const std::vector<SlotRecord>& rows) {
    auto out = open_out(path);
    out << "seed,frame,slot,estimator,throughput_bps_hz,correlation,pos_error_m\n";
    for (const SlotRecord& r : rows)
        out << r.seed << ',' << r.frame << ',' << r.slot << ',' << estimator_name(r.estimator)
            << ',' << format_double(r.throughput) << ',' << format_double(r.correlation) << ','
            << format_double(r.pos_error) << '\n';
    finish(out, path);
}

void write_trajectory_csv(const std::string& path, const std::vector<FrameRecord>& rows) {
    auto out = open_out(path);
    out << "seed,frame,true_x,true_y,est_x,est_y,v_hat,pos_error_m,fallback\n";
    for (const FrameRecord& r : rows)
        out << r.seed << ',' << r.frame << ',' << format_double(r.true_x) << ','
            << format_double(r.true_y) << ',' << format_double(r.est_x) << ','
            << format_double(r.est_y) << ',' << format_double(r.v_hat) << ','
            << format_double(r.pos_error) << ',' << (r.fallback ? 1 : 0) << '\n';
    finish(out, path);
}

void write_sweep_csv(const std::string& path, const std::string& param_name,
                     const std::vector<SweepRow>& rows) {
    auto out = open_out(path);
    out << "param,value,estimator,mean_throughput_bps_hz,ci_throughput_bps_hz,"
           "mean_correlation,ci_correlation,mean_pos_error_m,ci_pos_error_m,status\n";
    for (const SweepRow& r : rows) {
        out << param_name << ',' << format_double(r.value) << ',' << estimator_name(r.estimator)
            << ',';
        if (r.feasible)
            out << format_double(r.mean_throughput) << ',' << format_double(r.ci_throughput)
                << ',' << format_double(r.mean_correlation) << ','
                << format_double(r.ci_correlation) << ',' << format_double(r.mean_pos_error)
                << ',' << format_double(r.ci_pos_error) << ",ok\n";
        else
            out << ",,,,,,skipped_infeasible\n";
    }
    finish(out, path);
}

std::string summary_json_text(const SimConfig& cfg, const Summary& s) {
    ordered_json config = ordered_json::object();
    // Reuse the canonical text form so the echo has one source of truth.
    std::istringstream lines(serialize_config(cfg));
    std::string line;
    while (std::getline(lines, line)) {
        const auto colon = line.find(':');
        if (colon == std::string::npos)
            continue;
        const std::string key = line.substr(0, colon);
        std::string value = line.substr(colon + 1);
        if (!value.empty() && value.front() == ' ')
            value.erase(0, 1);
        config[key] = value;
    }

    ordered_json estimators = ordered_json::object();
    for (const auto& [name, agg] : s.by_estimator) {
        estimators[name] = {
            {"mean_throughput_bps_hz", agg.mean_throughput},
            {"ci_throughput_bps_hz", agg.ci_throughput},
            {"mean_correlation", agg.mean_correlation},
            {"ci_correlation", agg.ci_correlation},
        };
    }

    ordered_json j = {
        {"config", config},
        {"results",
         {
             {"mean_pos_error_m", s.mean_pos_error},
             {"ci_pos_error_m", s.ci_pos_error},
             {"estimators", estimators},
             {"fallback_frames", s.fallback_count},
             {"regularized_weight_computations", s.regularized_count},
             {"n_seeds", s.n_seeds},
             {"frames_per_seed", s.n_frames},
         }},
    };
    return j.dump(2) + "\n";
}

void write_summary_json(const std::string& path, const SimConfig& cfg, const Summary& s) {
    auto out = open_out(path);
    out << summary_json_text(cfg, s);
    finish(out, path);
}

namespace {

ordered_json load_json(const std::string& path, std::vector<std::string>& notes, bool required) {
    std::ifstream in(path);
    if (!in) {
        if (required)
            notes.push_back("missing file: " + path);
        return ordered_json();
    }
    try {
        return ordered_json::parse(in);
    } catch (const std::exception& e) {
        notes.push_back("cannot parse " + path + ": " + e.what());
        return ordered_json();
    }
}

void collect_numeric_leaves(const ordered_json& j, const std::string& prefix,
                            std::vector<std::pair<std::string, double>>& out) {
    if (j.is_number()) {
        out.emplace_back(prefix, j.get<double>());
    } else if (j.is_object()) {
        for (const auto& [k, v] : j.items())
            collect_numeric_leaves(v, prefix.empty() ? k : prefix + "." + k, out);
    } else if (j.is_array()) {
        for (std::size_t i = 0; i < j.size(); ++i)
            collect_numeric_leaves(j[i], prefix + "[" + std::to_string(i) + "]", out);
    }
}

const ordered_json* find_path(const ordered_json& root, const std::string& dotted) {
    const ordered_json* cur = &root;
    for (const std::string& part : split_line(dotted, '.')) {
        if (!cur->is_object() || !cur->contains(part))
            return nullptr;
        cur = &(*cur)[part];
    }
    return cur;
}

} // namespace

VerifyReport verify_summary(const std::string& out_dir, const std::string& golden_dir) {
    VerifyReport rep;
    const double kDefaultRel = 1e-6, kDefaultAbs = 1e-12;

    const std::string produced_path = out_dir + "/summary.json";
    const std::string golden_path = golden_dir + "/summary.json";
    const ordered_json produced = load_json(produced_path, rep.notes, true);
    const ordered_json golden = load_json(golden_path, rep.notes, true);
    if (!rep.notes.empty() && (produced.is_null() || golden.is_null())) {
        rep.passed = false;
        return rep;
    }

    const std::string tol_path = golden_dir + "/tolerances.json";
    std::vector<std::string> tol_notes;
    const ordered_json tol = load_json(tol_path, tol_notes, false);
    double def_rel = kDefaultRel, def_abs = kDefaultAbs;
    if (tol.is_null()) {
        rep.notes.push_back("tolerances.json absent; using defaults rel=" +
                            format_double(kDefaultRel) + " abs=" + format_double(kDefaultAbs));
    } else {
        rep.notes.insert(rep.notes.end(), tol_notes.begin(), tol_notes.end());
        if (tol.contains("default")) {
            def_rel = tol["default"].value("rel", kDefaultRel);
            def_abs = tol["default"].value("abs", kDefaultAbs);
        }
    }

    if (!golden.contains("results")) {
        rep.notes.push_back("golden summary has no 'results' section: " + golden_path);
        rep.passed = false;
        return rep;
    }

    std::vector<std::pair<std::string, double>> leaves;
    collect_numeric_leaves(golden["results"], "results", leaves);

    rep.passed = true;
    for (const auto& [field, want] : leaves) {
        FieldCheck chk;
        chk.field = field;
        chk.golden = want;
        chk.rel_tol = def_rel;
        chk.abs_tol = def_abs;
        if (!tol.is_null() && tol.contains("fields") && tol["fields"].contains(field)) {
            chk.rel_tol = tol["fields"][field].value("rel", def_rel);
            chk.abs_tol = tol["fields"][field].value("abs", def_abs);
        }
        const ordered_json* got = find_path(produced, field);
        if (got == nullptr || !got->is_number()) {
            chk.produced = std::nan("");
            chk.pass = false;
            rep.notes.push_back("field missing from produced summary: " + field);
        } else {
            chk.produced = got->get<double>();
            chk.pass =
                std::abs(chk.produced - chk.golden) <= chk.abs_tol + chk.rel_tol * std::abs(want);
        }
        rep.passed = rep.passed && chk.pass;
        rep.checks.push_back(chk);
    }
    if (leaves.empty()) {
        rep.notes.push_back("golden summary has no numeric fields under 'results'");
        rep.passed = false;
    }
    return rep;
}

std::string format_verify_table(const VerifyReport& r) {
    std::size_t w = 5;
    for (const FieldCheck& c : r.checks)
        w = std::max(w, c.field.size());
    std::ostringstream o;
    for (const std::string& n : r.notes)
        o << "note: " << n << "\n";
    o << std::left << std::setw(6) << "state" << std::setw(static_cast<int>(w) + 2) << "field"
      << "produced / golden (rel, abs)\n";
    for (const FieldCheck& c : r.checks)
        o << std::left << std::setw(6) << (c.pass ? "PASS" : "FAIL")
          << std::setw(static_cast<int>(w) + 2) << c.field << format_double(c.produced) << " / "
          << format_double(c.golden) << " (" << format_double(c.rel_tol) << ", "
          << format_double(c.abs_tol) << ")\n";
    o << (r.passed ? "verify: all fields within tolerance\n" : "verify: FAILED\n");
    return o.str();
}

// ---------------------------------------------------------------------
// SVG sweep charts
// ---------------------------------------------------------------------

namespace {

struct Series {
    std::string name;
    std::string color;
    std::vector<std::pair<double, double>> pts; // sorted by x
};

// Round the raw interval to a 1/2/5 decade step.
double nice_step(double range, int target_ticks) {
    if (range <= 0)
        return 1.0;
    const double raw = range / target_ticks;
    const double mag = std::pow(10.0, std::floor(std::log10(raw)));
    const double norm = raw / mag;
    const double step = norm < 1.5 ? 1.0 : norm < 3.5 ? 2.0 : norm < 7.5 ? 5.0 : 10.0;
    return step * mag;
}

std::string svg_line_chart(const std::vector<Series>& series, const std::string& x_label,
                           const std::string& y_label) {
    const double width = 640, height = 420;
    const double ml = 70, mr = 20, mt = 20, mb = 50; // margins
    const double pw = width - ml - mr, ph = height - mt - mb;

    double x0 = 0, x1 = 1, y0 = 0, y1 = 1;
    bool first = true;
    for (const Series& s : series)
        for (const auto& [x, y] : s.pts) {
            if (first) {
                x0 = x1 = x;
                y0 = y1 = y;
                first = false;
            }
            x0 = std::min(x0, x);
            x1 = std::max(x1, x);
            y0 = std::min(y0, y);
            y1 = std::max(y1, y);
        }
    // Degenerate extents still need a visible axis span.
    if (x1 - x0 < 1e-12) {
        x0 -= 0.5;
        x1 += 0.5;
    }
    if (y1 - y0 < 1e-12) {
        const double pad = std::max(0.5, std::abs(y0) * 0.1);
        y0 -= pad;
        y1 += pad;
    }
    const double ypad = (y1 - y0) * 0.06;
    y0 -= ypad;
    y1 += ypad;

    auto sx = [&](double x) { return ml + (x - x0) / (x1 - x0) * pw; };
    auto sy = [&](double y) { return mt + ph - (y - y0) / (y1 - y0) * ph; };

    std::ostringstream o;
    o << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << height
      << "\" viewBox=\"0 0 " << width << " " << height << "\">\n";
    o << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";

    // Grid and ticks.
    const double xs = nice_step(x1 - x0, 6), ys = nice_step(y1 - y0, 6);
    o << "<g font-family=\"sans-serif\" font-size=\"12\" fill=\"#333\">\n";
    for (double t = std::ceil(x0 / xs) * xs; t <= x1 + 1e-9 * xs; t += xs) {
        const double px = sx(t);
        o << "<line x1=\"" << short_num(px) << "\" y1=\"" << mt << "\" x2=\"" << short_num(px)
          << "\" y2=\"" << mt + ph << "\" stroke=\"#ddd\"/>\n";
        o << "<text x=\"" << short_num(px) << "\" y=\"" << mt + ph + 18
          << "\" text-anchor=\"middle\">" << short_num(t) << "</text>\n";
    }
    for (double t = std::ceil(y0 / ys) * ys; t <= y1 + 1e-9 * ys; t += ys) {
        const double py = sy(t);
        o << "<line x1=\"" << ml << "\" y1=\"" << short_num(py) << "\" x2=\"" << ml + pw
          << "\" y2=\"" << short_num(py) << "\" stroke=\"#ddd\"/>\n";
        o << "<text x=\"" << ml - 8 << "\" y=\"" << short_num(py + 4)
          << "\" text-anchor=\"end\">" << short_num(t) << "</text>\n";
    }
    o << "<text x=\"" << ml + pw / 2 << "\" y=\"" << height - 10
      << "\" text-anchor=\"middle\">" << x_label << "</text>\n";
    o << "<text x=\"16\" y=\"" << mt + ph / 2 << "\" text-anchor=\"middle\" transform=\"rotate(-90 16 "
      << mt + ph / 2 << ")\">" << y_label << "</text>\n";
    o << "</g>\n";

    // Axes frame.
    o << "<rect x=\"" << ml << "\" y=\"" << mt << "\" width=\"" << pw << "\" height=\"" << ph
      << "\" fill=\"none\" stroke=\"#333\"/>\n";

    for (const Series& s : series) {
        if (s.pts.empty())
            continue;
        o << "<polyline fill=\"none\" stroke=\"" << s.color << "\" stroke-width=\"2\" points=\"";
        for (const auto& [x, y] : s.pts)
            o << short_num(sx(x)) << "," << short_num(sy(y)) << " ";
        o << "\"/>\n";
        for (const auto& [x, y] : s.pts)
            o << "<circle cx=\"" << short_num(sx(x)) << "\" cy=\"" << short_num(sy(y))
              << "\" r=\"3\" fill=\"" << s.color << "\"/>\n";
    }

    // Legend, top-right inside the plot.
    double ly = mt + 16;
    o << "<g font-family=\"sans-serif\" font-size=\"12\" fill=\"#333\">\n";
    for (const Series& s : series) {
        const double lx = ml + pw - 140;
        o << "<line x1=\"" << lx << "\" y1=\"" << ly - 4 << "\" x2=\"" << lx + 24 << "\" y2=\""
          << ly - 4 << "\" stroke=\"" << s.color << "\" stroke-width=\"2\"/>\n";
        o << "<text x=\"" << lx + 30 << "\" y=\"" << ly << "\">" << s.name << "</text>\n";
        ly += 18;
    }
    o << "</g>\n</svg>\n";
    return o.str();
}

std::string series_color(const std::string& estimator) {
    if (estimator == "sensing")
        return "#1f77b4";
    if (estimator == "ls")
        return "#d62728";
    if (estimator == "perfect")
        return "#7f7f7f";
    return "#2ca02c";
}

} // namespace

std::vector<std::string> render_sweep_charts(const std::string& sweep_csv_path,
                                             const std::string& out_dir) {
    std::ifstream in(sweep_csv_path);
    if (!in)
        throw std::runtime_error("cannot open '" + sweep_csv_path + "'");
    std::string line;
    if (!std::getline(in, line))
        throw std::runtime_error("empty sweep file '" + sweep_csv_path + "'");
    const std::string expect =
        "param,value,estimator,mean_throughput_bps_hz,ci_throughput_bps_hz,"
        "mean_correlation,ci_correlation,mean_pos_error_m,ci_pos_error_m,status";
    if (line != expect)
        throw std::runtime_error("unexpected sweep header in '" + sweep_csv_path + "'");

    struct Row {
        double value;
        std::string estimator;
        double tput, corr, perr;
    };
    std::vector<Row> rows;
    std::string param_name = "value";
    while (std::getline(in, line)) {
        if (line.empty())
            continue;
        const auto f = split_line(line, ',');
        if (f.size() < 10)
            throw std::runtime_error("malformed sweep row: " + line);
        if (f[9] != "ok")
            continue;
        param_name = f[0];
        rows.push_back({std::stod(f[1]), f[2], std::stod(f[3]), std::stod(f[5]), std::stod(f[7])});
    }

    const std::string x_label =
        param_name == "aps" ? "number of APs"
                            : (param_name == "power_dbm" ? "transmit power (dBm)" : param_name);

    struct Metric {
        const char* file;
        const char* y_label;
        double Row::*member;
    };
    const Metric metrics[] = {
        {"sweep_throughput.svg", "sum throughput (bits/s/Hz)", &Row::tput},
        {"sweep_correlation.svg", "channel correlation", &Row::corr},
        {"sweep_pos_error.svg", "position error (m)", &Row::perr},
    };

    std::vector<std::string> written;
    for (const Metric& m : metrics) {
        // Group by estimator, preserving first-seen order.
        std::vector<Series> series;
        for (const Row& r : rows) {
            auto it = std::find_if(series.begin(), series.end(),
                                   [&](const Series& s) { return s.name == r.estimator; });
            if (it == series.end()) {
                series.push_back({r.estimator, series_color(r.estimator), {}});
                it = series.end() - 1;
            }
            it->pts.emplace_back(r.value, r.*(m.member));
        }
        for (Series& s : series)
            std::sort(s.pts.begin(), s.pts.end());
        const std::string path = out_dir + "/" + m.file;
        auto out = open_out(path);
        out << svg_line_chart(series, x_label, m.y_label);
        finish(out, path);
        written.push_back(path);
    }
    return written;
}

} // namespace isacsim
