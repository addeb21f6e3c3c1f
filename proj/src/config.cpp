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

#include "isacsim/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

namespace isacsim {

double dbm_to_watt(double dbm) { return std::pow(10.0, (dbm - 30.0) / 10.0); }

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos)
        return "";
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::string cur;
    std::istringstream is(s);
    while (std::getline(is, cur, sep))
        out.push_back(trim(cur));
    if (!s.empty() && s.back() == sep)
        out.push_back("");
    return out;
}

// Shortest round-trip decimal form (locale independent).
std::string num(double v) {
    char buf[40];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

struct Entry {
    std::string value;
    int line = 0;
};

struct Reader {
    std::map<std::string, Entry> kv;
    std::string origin;
    std::vector<std::string>* defaults = nullptr;

    [[noreturn]] void fail(const std::string& key, int line, const std::string& why) const {
        throw ConfigError(origin + ":" + std::to_string(line) + ": key '" + key + "': " + why);
    }

    bool has(const std::string& key) const { return kv.count(key) > 0; }

    std::string raw(const std::string& key, const std::string& def) {
        const auto it = kv.find(key);
        if (it == kv.end()) {
            defaults->push_back(key + " = " + def + " (default)");
            return def;
        }
        return it->second.value;
    }

    int line_of(const std::string& key) const {
        const auto it = kv.find(key);
        return it == kv.end() ? 0 : it->second.line;
    }

    double number(const std::string& key, double def) {
        const std::string s = raw(key, num(def));
        double v = 0;
        const char* b = s.data();
        const char* e = s.data() + s.size();
        const auto r = std::from_chars(b, e, v);
        if (r.ec != std::errc{} || r.ptr != e)
            fail(key, line_of(key), "expected a number, got '" + s + "'");
        return v;
    }

    long integer(const std::string& key, long def) {
        const std::string s = raw(key, std::to_string(def));
        long v = 0;
        const char* b = s.data();
        const char* e = s.data() + s.size();
        const auto r = std::from_chars(b, e, v);
        if (r.ec != std::errc{} || r.ptr != e)
            fail(key, line_of(key), "expected an integer, got '" + s + "'");
        return v;
    }

    bool boolean(const std::string& key, bool def) {
        const std::string s = raw(key, def ? "true" : "false");
        if (s == "true")
            return true;
        if (s == "false")
            return false;
        fail(key, line_of(key), "expected true or false, got '" + s + "'");
    }

    // "x,y; x,y; ..." lists.
    std::vector<Point2D> points(const std::string& key, const std::string& def) {
        const std::string s = raw(key, def);
        std::vector<Point2D> pts;
        for (const std::string& item : split(s, ';')) {
            if (item.empty())
                continue;
            const auto parts = split(item, ',');
            if (parts.size() != 2)
                fail(key, line_of(key), "expected 'x,y' pairs separated by ';'");
            try {
                pts.push_back({std::stod(parts[0]), std::stod(parts[1])});
            } catch (const std::exception&) {
                fail(key, line_of(key), "bad coordinate in '" + item + "'");
            }
        }
        if (pts.empty())
            fail(key, line_of(key), "list is empty");
        return pts;
    }

    std::vector<double> number_list(const std::string& key) {
        // Optional key: absent or blank means "not set".
        const auto it = kv.find(key);
        if (it == kv.end() || trim(it->second.value).empty())
            return {};
        std::vector<double> out;
        for (const std::string& item : split(it->second.value, ',')) {
            if (item.empty())
                fail(key, it->second.line, "empty element in list");
            try {
                out.push_back(std::stod(item));
            } catch (const std::exception&) {
                fail(key, it->second.line, "bad number '" + item + "'");
            }
        }
        return out;
    }
};

const std::vector<std::string>& known_keys() {
    static const std::vector<std::string> keys = {
        "room_size_m",      "ap_positions",     "ue_positions",    "ap_axes_deg",
        "ue_axes_deg",      "n_aps",            "n_ues",           "n_tx",
        "n_rx",             "n_ue_ant",         "carrier_ghz",     "bandwidth_mhz",
        "slot_ms",          "frame_ms",         "tx_power_dbm",    "ue_power_dbm",
        "noise_power_dbm",  "a_tau",            "a_mu",            "a_theta",
        "mf_gain",          "scatterers_k",     "scatterer_layout", "target_speed_mps",
        "target_length_m",  "target_width_m",   "target_start_x",  "target_start_y",
        "target_heading_deg", "surface_phase_rad", "surface_specular", "surface_diffuse",
        "surface_efficiency", "ls_pilot_budget", "frames",         "seeds",
        "estimators",       "correlation_trace", "record_trace",
    };
    return keys;
}

} // namespace

std::vector<std::uint64_t> parse_seed_spec(const std::string& spec) {
    const std::string s = trim(spec);
    if (s.empty())
        throw ConfigError("seed list is empty");
    std::vector<std::uint64_t> seeds;
    const auto dots = s.find("..");
    if (dots != std::string::npos) {
        try {
            const std::uint64_t a = std::stoull(trim(s.substr(0, dots)));
            const std::uint64_t b = std::stoull(trim(s.substr(dots + 2)));
            if (b < a || b - a > 1000000)
                throw ConfigError("seed range '" + s + "' is invalid or too large");
            for (std::uint64_t v = a; v <= b; ++v)
                seeds.push_back(v);
            return seeds;
        } catch (const ConfigError&) {
            throw;
        } catch (const std::exception&) {
            throw ConfigError("bad seed range '" + s + "'");
        }
    }
    for (const std::string& item : split(s, ',')) {
        if (item.empty())
            throw ConfigError("empty element in seed list '" + s + "'");
        try {
            seeds.push_back(std::stoull(item));
        } catch (const std::exception&) {
            throw ConfigError("bad seed '" + item + "'");
        }
    }
    return seeds;
}

ParsedConfig parse_config_text(const std::string& text, const std::string& origin) {
    Reader rd;
    rd.origin = origin;

    std::istringstream is(text);
    std::string line;
    int ln = 0;
    while (std::getline(is, line)) {
        ++ln;
        const auto hash = line.find('#');
        if (hash != std::string::npos)
            line = line.substr(0, hash);
        line = trim(line);
        if (line.empty())
            continue;
        const auto colon = line.find(':');
        if (colon == std::string::npos)
            throw ConfigError(origin + ":" + std::to_string(ln) + ": expected 'key: value'");
        const std::string key = trim(line.substr(0, colon));
        const std::string value = trim(line.substr(colon + 1));
        if (key.empty())
            throw ConfigError(origin + ":" + std::to_string(ln) + ": empty key");
        if (std::find(known_keys().begin(), known_keys().end(), key) == known_keys().end())
            throw ConfigError(origin + ":" + std::to_string(ln) + ": unknown key '" + key + "'");
        if (rd.kv.count(key))
            throw ConfigError(origin + ":" + std::to_string(ln) + ": duplicate key '" + key +
                              "' (first at line " + std::to_string(rd.kv[key].line) + ")");
        rd.kv[key] = {value, ln};
    }

    ParsedConfig pc;
    rd.defaults = &pc.applied_defaults;
    SimConfig& c = pc.sim;

    c.room_size = rd.number("room_size_m", 200.0);
    c.ap_positions = rd.points("ap_positions", "0,0; 200,200; 0,200; 200,0; 100,200");
    c.ue_positions = rd.points("ue_positions", "50,150; 150,150; 150,100");
    c.ap_axes_deg = rd.number_list("ap_axes_deg");
    c.ue_axes_deg = rd.number_list("ue_axes_deg");
    c.n_aps = static_cast<int>(rd.integer("n_aps", 5));
    c.n_ues = static_cast<int>(rd.integer("n_ues", 3));
    c.n_tx = static_cast<int>(rd.integer("n_tx", 32));
    c.n_rx = static_cast<int>(rd.integer("n_rx", 32));
    c.n_ue_ant = static_cast<int>(rd.integer("n_ue_ant", 4));

    const double carrier_ghz = rd.number("carrier_ghz", 60.0);
    const double bandwidth_mhz = rd.number("bandwidth_mhz", 500.0);
    const double slot_ms = rd.number("slot_ms", 50.0);
    const double frame_ms = rd.number("frame_ms", 500.0);
    c.carrier_hz = carrier_ghz * 1e9;
    c.bandwidth_hz = bandwidth_mhz * 1e6;
    c.slot_s = slot_ms / 1000.0;
    c.frame_s = frame_ms / 1000.0;

    c.tx_power_dbm = rd.number("tx_power_dbm", 23.0);
    c.ue_power_dbm = rd.number("ue_power_dbm", 23.0);
    c.noise_power_dbm = rd.number("noise_power_dbm", -87.0);
    c.tx_power_w = dbm_to_watt(c.tx_power_dbm);
    c.ue_power_w = dbm_to_watt(c.ue_power_dbm);
    c.noise_power_w = dbm_to_watt(c.noise_power_dbm);

    c.a_tau = rd.number("a_tau", 6.7e-7);
    c.a_mu = rd.number("a_mu", 2.0e4);
    c.a_theta = rd.number("a_theta", 1.0);
    c.mf_gain = rd.number("mf_gain", 1.0e4);
    c.scatterers_k = static_cast<int>(rd.integer("scatterers_k", 8));
    {
        const std::string lay = rd.raw("scatterer_layout", "uniform");
        if (lay == "uniform")
            c.layout = ScattererLayout::Uniform;
        else if (lay == "grid")
            c.layout = ScattererLayout::Grid;
        else
            rd.fail("scatterer_layout", rd.line_of("scatterer_layout"),
                    "expected 'uniform' or 'grid', got '" + lay + "'");
    }

    c.target_speed = rd.number("target_speed_mps", 2.0);
    c.target_length = rd.number("target_length_m", 5.0);
    c.target_width = rd.number("target_width_m", 2.0);
    c.target_start.x = rd.number("target_start_x", 0.0);
    c.target_start.y = rd.number("target_start_y", 50.0);
    c.target_heading_deg = rd.number("target_heading_deg", 0.0);

    c.surface.phase_shift = rd.number("surface_phase_rad", kPi);
    c.surface.specular = rd.number("surface_specular", 0.7);
    c.surface.diffuse = rd.number("surface_diffuse", 0.2);
    c.surface.efficiency = rd.number("surface_efficiency", 1.0);

    c.ls_pilot_budget = rd.number("ls_pilot_budget", 1.0);
    c.frames = static_cast<int>(rd.integer("frames", 100));
    c.seeds = parse_seed_spec(rd.raw("seeds", "1..20"));
    {
        const std::string est = rd.raw("estimators", "ls,perfect,sensing");
        c.est_ls = c.est_perfect = c.est_sensing = false;
        for (const std::string& name : split(est, ',')) {
            if (name == "ls")
                c.est_ls = true;
            else if (name == "perfect")
                c.est_perfect = true;
            else if (name == "sensing")
                c.est_sensing = true;
            else
                rd.fail("estimators", rd.line_of("estimators"),
                        "unknown estimator '" + name + "'");
        }
        if (!c.est_ls && !c.est_perfect && !c.est_sensing)
            rd.fail("estimators", rd.line_of("estimators"), "no estimator selected");
    }
    {
        const std::string ct = rd.raw("correlation_trace", "magnitude");
        if (ct == "magnitude")
            c.corr_real_part = false;
        else if (ct == "real")
            c.corr_real_part = true;
        else
            rd.fail("correlation_trace", rd.line_of("correlation_trace"),
                    "expected 'magnitude' or 'real', got '" + ct + "'");
    }
    c.record_trace = rd.boolean("record_trace", false);

    // Validation.
    auto require = [&](bool ok, const std::string& key, const std::string& why) {
        if (!ok)
            rd.fail(key, rd.line_of(key), why);
    };
    require(c.room_size > 0, "room_size_m", "must be positive");
    require(c.n_aps >= 1, "n_aps", "must be at least 1");
    require(c.n_ues >= 1, "n_ues", "must be at least 1");
    require(c.n_tx >= 1, "n_tx", "must be at least 1");
    require(c.n_rx >= 1, "n_rx", "must be at least 1");
    require(c.n_ue_ant >= 1, "n_ue_ant", "must be at least 1");
    require(c.n_aps <= static_cast<int>(c.ap_positions.size()), "n_aps",
            "exceeds the ap_positions roster (" + std::to_string(c.ap_positions.size()) + ")");
    require(c.n_ues <= static_cast<int>(c.ue_positions.size()), "n_ues",
            "exceeds the ue_positions roster (" + std::to_string(c.ue_positions.size()) + ")");
    require(c.ap_axes_deg.empty() || c.ap_axes_deg.size() >= static_cast<std::size_t>(c.n_aps),
            "ap_axes_deg", "needs one axis per selected AP");
    require(c.ue_axes_deg.empty() || c.ue_axes_deg.size() >= static_cast<std::size_t>(c.n_ues),
            "ue_axes_deg", "needs one axis per selected UE");
    require(c.carrier_hz > 0, "carrier_ghz", "must be positive");
    require(c.bandwidth_hz > 0, "bandwidth_mhz", "must be positive");
    require(slot_ms > 0, "slot_ms", "must be positive");
    require(frame_ms > 0, "frame_ms", "must be positive");
    {
        const double n = frame_ms / slot_ms;
        const double rounded = std::round(n);
        require(std::abs(n - rounded) < 1e-9 && rounded >= 2.0, "frame_ms",
                "frame must be an integer number (>= 2) of slots");
        c.slots_per_frame = static_cast<int>(rounded);
    }
    require(c.a_tau > 0, "a_tau", "must be positive");
    require(c.a_mu > 0, "a_mu", "must be positive");
    require(c.a_theta > 0, "a_theta", "must be positive");
    require(c.mf_gain > 0, "mf_gain", "must be positive");
    require(c.scatterers_k >= 1, "scatterers_k", "must be at least 1");
    require(c.target_speed >= 0, "target_speed_mps", "must be nonnegative");
    require(c.target_length > 0, "target_length_m", "must be positive");
    require(c.target_width > 0, "target_width_m", "must be positive");
    require(c.surface.specular > 0 && c.surface.specular < 1, "surface_specular",
            "must lie in (0, 1)");
    require(c.surface.diffuse > 0 && c.surface.diffuse < 1, "surface_diffuse",
            "must lie in (0, 1)");
    require(c.surface.efficiency > 0 && c.surface.efficiency <= 1, "surface_efficiency",
            "must lie in (0, 1]");
    require(c.ls_pilot_budget > 0, "ls_pilot_budget", "must be positive");
    require(c.frames >= 1, "frames", "must be at least 1");

    if (c.n_ues * c.n_ue_ant > c.n_aps * c.n_tx)
        pc.warnings.push_back(
            "zero-forcing is infeasible: user antennas (" +
            std::to_string(c.n_ues * c.n_ue_ant) + ") exceed network transmit antennas (" +
            std::to_string(c.n_aps * c.n_tx) + ")");
    return pc;
}

ParsedConfig parse_config(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        throw ConfigError("cannot open config file '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_config_text(ss.str(), path);
}

std::string serialize_config(const SimConfig& c) {
    std::ostringstream o;
    auto points = [](const std::vector<Point2D>& pts) {
        std::string s;
        for (std::size_t i = 0; i < pts.size(); ++i) {
            if (i)
                s += "; ";
            s += num(pts[i].x) + "," + num(pts[i].y);
        }
        return s;
    };
    auto degrees = [](const std::vector<double>& ax) {
        std::string s;
        for (std::size_t i = 0; i < ax.size(); ++i) {
            if (i)
                s += ",";
            s += num(ax[i]);
        }
        return s;
    };
    o << "room_size_m: " << num(c.room_size) << "\n";
    o << "ap_positions: " << points(c.ap_positions) << "\n";
    o << "ue_positions: " << points(c.ue_positions) << "\n";
    if (!c.ap_axes_deg.empty())
        o << "ap_axes_deg: " << degrees(c.ap_axes_deg) << "\n";
    if (!c.ue_axes_deg.empty())
        o << "ue_axes_deg: " << degrees(c.ue_axes_deg) << "\n";
    o << "n_aps: " << c.n_aps << "\n";
    o << "n_ues: " << c.n_ues << "\n";
    o << "n_tx: " << c.n_tx << "\n";
    o << "n_rx: " << c.n_rx << "\n";
    o << "n_ue_ant: " << c.n_ue_ant << "\n";
    o << "carrier_ghz: " << num(c.carrier_hz / 1e9) << "\n";
    o << "bandwidth_mhz: " << num(c.bandwidth_hz / 1e6) << "\n";
    o << "slot_ms: " << num(c.slot_s * 1000.0) << "\n";
    o << "frame_ms: " << num(c.frame_s * 1000.0) << "\n";
    o << "tx_power_dbm: " << num(c.tx_power_dbm) << "\n";
    o << "ue_power_dbm: " << num(c.ue_power_dbm) << "\n";
    o << "noise_power_dbm: " << num(c.noise_power_dbm) << "\n";
    o << "a_tau: " << num(c.a_tau) << "\n";
    o << "a_mu: " << num(c.a_mu) << "\n";
    o << "a_theta: " << num(c.a_theta) << "\n";
    o << "mf_gain: " << num(c.mf_gain) << "\n";
    o << "scatterers_k: " << c.scatterers_k << "\n";
    o << "scatterer_layout: " << (c.layout == ScattererLayout::Uniform ? "uniform" : "grid")
      << "\n";
    o << "target_speed_mps: " << num(c.target_speed) << "\n";
    o << "target_length_m: " << num(c.target_length) << "\n";
    o << "target_width_m: " << num(c.target_width) << "\n";
    o << "target_start_x: " << num(c.target_start.x) << "\n";
    o << "target_start_y: " << num(c.target_start.y) << "\n";
    o << "target_heading_deg: " << num(c.target_heading_deg) << "\n";
    o << "surface_phase_rad: " << num(c.surface.phase_shift) << "\n";
    o << "surface_specular: " << num(c.surface.specular) << "\n";
    o << "surface_diffuse: " << num(c.surface.diffuse) << "\n";
    o << "surface_efficiency: " << num(c.surface.efficiency) << "\n";
    o << "ls_pilot_budget: " << num(c.ls_pilot_budget) << "\n";
    o << "frames: " << c.frames << "\n";
    o << "seeds: ";
    // Contiguous ranges collapse to a..b.
    bool contiguous = c.seeds.size() > 1;
    for (std::size_t i = 1; i < c.seeds.size(); ++i)
        contiguous = contiguous && c.seeds[i] == c.seeds[i - 1] + 1;
    if (contiguous) {
        o << c.seeds.front() << ".." << c.seeds.back();
    } else {
        for (std::size_t i = 0; i < c.seeds.size(); ++i)
            o << (i ? "," : "") << c.seeds[i];
    }
    o << "\n";
    o << "estimators: ";
    {
        std::string s;
        if (c.est_ls)
            s += "ls";
        if (c.est_perfect)
            s += s.empty() ? "perfect" : ",perfect";
        if (c.est_sensing)
            s += s.empty() ? "sensing" : ",sensing";
        o << s << "\n";
    }
    o << "correlation_trace: " << (c.corr_real_part ? "real" : "magnitude") << "\n";
    o << "record_trace: " << (c.record_trace ? "true" : "false") << "\n";
    return o.str();
}

} // namespace isacsim
