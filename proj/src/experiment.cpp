#include "swrhc/experiment.hpp"

#include "swrhc/error.hpp"
#include "swrhc/kernels.hpp"

#include <json.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <limits>
#include <mutex>
#include <set>
#include <sstream>
#include <thread>

namespace swrhc::experiment {

using nlohmann::json;
namespace fs = std::filesystem;

std::string_view mode_name(Mode mode) {
    switch (mode) {
    case Mode::free: return "free";
    case Mode::switching: return "switching";
    case Mode::nonswitching: return "nonswitching";
    }
    return "unknown";
}

namespace {

Mode parse_mode(const std::string& s, const std::string& path) {
    if (s == "free") return Mode::free;
    if (s == "switching") return Mode::switching;
    if (s == "nonswitching") return Mode::nonswitching;
    throw InvalidArgument(path + ": expected one of free|switching|nonswitching, got '" + s + "'");
}

double get_number(const json& j, const std::string& path) {
    if (!j.is_number()) throw InvalidArgument(path + ": expected a number");
    const double v = j.get<double>();
    if (!std::isfinite(v)) throw InvalidArgument(path + ": must be finite");
    return v;
}

std::size_t get_count(const json& j, const std::string& path) {
    if (!j.is_number_integer() || j.get<long long>() < 0) {
        throw InvalidArgument(path + ": expected a nonnegative integer");
    }
    return static_cast<std::size_t>(j.get<long long>());
}

std::string get_string(const json& j, const std::string& path) {
    if (!j.is_string()) throw InvalidArgument(path + ": expected a string");
    return j.get<std::string>();
}

void reject_unknown(const json& obj, const std::set<std::string>& known, const std::string& path) {
    for (const auto& [key, value] : obj.items()) {
        if (!known.contains(key)) throw InvalidArgument(path + "." + key + ": unknown key");
    }
}

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.12e", v);
    return buf;
}

void write_file(const fs::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw InvalidArgument("cannot open " + path.string() + " for writing");
    out << text;
    if (!out) throw InvalidArgument("failed writing " + path.string());
}

std::string read_file(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InvalidArgument("cannot open " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

} // namespace

void ExperimentConfig::validate() const {
    if (name.empty()) throw InvalidArgument("config.name: must not be empty");
    if (mode != Mode::free && rhc.actuators.empty()) {
        throw InvalidArgument("config.actuators: controlled runs need at least one actuator");
    }
    for (std::size_t j = 0; j < rhc.actuators.size(); ++j) {
        const Point& p = rhc.actuators[j];
        const std::string path = "config.actuators[" + std::to_string(j) + "]";
        if (!(p.x > 0.0 && p.x < 1.0 && p.y > 0.0 && p.y < 1.0)) {
            throw InvalidArgument(path + ": must lie strictly inside (0,1)^2");
        }
        for (std::size_t i = 0; i < j; ++i) {
            if (rhc.actuators[i] == p) throw InvalidArgument(path + ": duplicates actuator " + std::to_string(i));
        }
    }
    try {
        rhc.validate();
    } catch (const InvalidArgument& e) {
        throw InvalidArgument(std::string("config: ") + e.what());
    }
}

std::vector<Point> default_placement(std::size_t m) {
    std::vector<Point> pts;
    const auto grid = [&pts](std::initializer_list<double> xs, std::initializer_list<double> ys) {
        for (double y : ys) {
            for (double x : xs) pts.push_back({x, y});
        }
    };
    switch (m) {
    case 3:
        pts = {{0.25, 0.25}, {0.75, 0.25}, {0.5, 0.75}};
        break;
    case 4:
        grid({0.25, 0.75}, {0.25, 0.75});
        break;
    case 9:
        grid({1.0 / 6.0, 0.5, 5.0 / 6.0}, {1.0 / 6.0, 0.5, 5.0 / 6.0});
        break;
    case 12:
        grid({0.125, 0.375, 0.625, 0.875}, {1.0 / 6.0, 0.5, 5.0 / 6.0});
        break;
    default:
        throw InvalidArgument("default_placement: no default layout for M=" + std::to_string(m) +
                              " (supported: 3, 4, 9, 12; give explicit coordinates otherwise)");
    }
    return pts;
}

const std::vector<std::string>& preset_names() {
    static const std::vector<std::string> names{"free",     "switch_m3",  "switch_m4",
                                                "switch_m9", "switch_m12", "nonswitch_m4"};
    return names;
}

ExperimentConfig preset(std::string_view name) {
    ExperimentConfig c;
    c.name = std::string(name);
    if (name == "free") {
        c.mode = Mode::free;
    } else if (name == "switch_m3" || name == "switch_m4" || name == "switch_m9" || name == "switch_m12") {
        c.mode = Mode::switching;
        c.rhc.actuators = default_placement(std::stoul(std::string(name.substr(8))));
    } else if (name == "nonswitch_m4") {
        c.mode = Mode::nonswitching;
        c.rhc.constraint = Constraint::none;
        c.rhc.actuators = default_placement(4);
    } else {
        throw InvalidArgument("unknown preset '" + std::string(name) + "'");
    }
    return c;
}

ExperimentConfig parse_config(std::string_view json_text) {
    json root;
    try {
        root = json::parse(json_text);
    } catch (const json::parse_error& e) {
        throw InvalidArgument(std::string("config: malformed JSON: ") + e.what());
    }
    if (!root.is_object()) throw InvalidArgument("config: expected a JSON object");
    reject_unknown(root,
                   {"name", "preset", "mode", "mesh_cells", "nu", "beta", "dt", "delta", "horizon", "t_infinity",
                    "actuators", "placement", "optimizer", "format_version"},
                   "config");

    ExperimentConfig c;
    if (root.contains("preset")) c = preset(get_string(root["preset"], "config.preset"));
    if (root.contains("name")) c.name = get_string(root["name"], "config.name");
    if (root.contains("mode")) c.mode = parse_mode(get_string(root["mode"], "config.mode"), "config.mode");
    c.rhc.constraint = c.mode == Mode::nonswitching ? Constraint::none : Constraint::switching;

    RhcConfig& r = c.rhc;
    if (root.contains("mesh_cells")) r.mesh_cells = get_count(root["mesh_cells"], "config.mesh_cells");
    if (root.contains("nu")) r.nu = get_number(root["nu"], "config.nu");
    if (root.contains("beta")) r.beta = get_number(root["beta"], "config.beta");
    if (root.contains("dt")) r.dt = get_number(root["dt"], "config.dt");
    if (root.contains("delta")) r.delta = get_number(root["delta"], "config.delta");
    if (root.contains("horizon")) r.horizon = get_number(root["horizon"], "config.horizon");
    if (root.contains("t_infinity")) r.t_infinity = get_number(root["t_infinity"], "config.t_infinity");

    if (root.contains("actuators") && root.contains("placement")) {
        throw InvalidArgument("config.actuators: give either 'actuators' or 'placement', not both");
    }
    if (root.contains("placement")) {
        try {
            r.actuators = default_placement(get_count(root["placement"], "config.placement"));
        } catch (const InvalidArgument& e) {
            throw InvalidArgument(std::string("config.placement: ") + e.what());
        }
    }
    if (root.contains("actuators")) {
        const json& a = root["actuators"];
        if (!a.is_array()) throw InvalidArgument("config.actuators: expected an array of [x, y] pairs");
        r.actuators.clear();
        for (std::size_t j = 0; j < a.size(); ++j) {
            const std::string path = "config.actuators[" + std::to_string(j) + "]";
            if (!a[j].is_array() || a[j].size() != 2) throw InvalidArgument(path + ": expected [x, y]");
            r.actuators.push_back({get_number(a[j][0], path + "[0]"), get_number(a[j][1], path + "[1]")});
        }
    }
    if (c.mode == Mode::free) r.actuators.clear();

    if (root.contains("optimizer")) {
        const json& o = root["optimizer"];
        if (!o.is_object()) throw InvalidArgument("config.optimizer: expected an object");
        reject_unknown(o,
                       {"tol", "max_iters", "ls_memory", "ls_shrink", "ls_sufficient_decrease", "alpha_min",
                        "alpha_max", "max_backtracks"},
                       "config.optimizer");
        auto& opt = r.optimizer;
        if (o.contains("tol")) opt.tol = get_number(o["tol"], "config.optimizer.tol");
        if (o.contains("max_iters")) opt.max_iters = get_count(o["max_iters"], "config.optimizer.max_iters");
        if (o.contains("ls_memory")) opt.ls_memory = get_count(o["ls_memory"], "config.optimizer.ls_memory");
        if (o.contains("ls_shrink")) opt.ls_shrink = get_number(o["ls_shrink"], "config.optimizer.ls_shrink");
        if (o.contains("ls_sufficient_decrease")) {
            opt.ls_sufficient_decrease = get_number(o["ls_sufficient_decrease"], "config.optimizer.ls_sufficient_decrease");
        }
        if (o.contains("alpha_min")) opt.alpha_min = get_number(o["alpha_min"], "config.optimizer.alpha_min");
        if (o.contains("alpha_max")) opt.alpha_max = get_number(o["alpha_max"], "config.optimizer.alpha_max");
        if (o.contains("max_backtracks")) {
            opt.max_backtracks = get_count(o["max_backtracks"], "config.optimizer.max_backtracks");
        }
    }
    c.validate();
    return c;
}

ExperimentConfig load_config(const fs::path& path) { return parse_config(read_file(path)); }

std::string config_to_json(const ExperimentConfig& c) {
    json j;
    j["format_version"] = 1;
    j["name"] = c.name;
    j["mode"] = std::string(mode_name(c.mode));
    j["mesh_cells"] = c.rhc.mesh_cells;
    j["nu"] = c.rhc.nu;
    j["beta"] = c.rhc.beta;
    j["dt"] = c.rhc.dt;
    j["delta"] = c.rhc.delta;
    j["horizon"] = c.rhc.horizon;
    j["t_infinity"] = c.rhc.t_infinity;
    json pts = json::array();
    for (const auto& p : c.rhc.actuators) pts.push_back({p.x, p.y});
    j["actuators"] = pts;
    const auto& o = c.rhc.optimizer;
    j["optimizer"] = {{"tol", o.tol},
                      {"max_iters", o.max_iters},
                      {"ls_memory", o.ls_memory},
                      {"ls_shrink", o.ls_shrink},
                      {"ls_sufficient_decrease", o.ls_sufficient_decrease},
                      {"alpha_min", o.alpha_min},
                      {"alpha_max", o.alpha_max},
                      {"max_backtracks", o.max_backtracks}};
    return j.dump(2) + "\n";
}

std::string summary_to_json(const RunSummary& s) {
    json j{{"format_version", s.format_version},
           {"name", s.name},
           {"mode", s.mode},
           {"actuators", s.actuators},
           {"mesh_cells", s.mesh_cells},
           {"t_infinity", s.t_infinity},
           {"accumulated_cost", s.accumulated_cost},
           {"initial_vprime_norm", s.initial_vprime_norm},
           {"final_vprime_norm", s.final_vprime_norm},
           {"final_h_norm", s.final_h_norm},
           {"outer_iterations", s.outer_iterations},
           {"inner_iterations", s.inner_iterations},
           {"windows_converged", s.windows_converged},
           {"failed", s.failed},
           {"failure", s.failure},
           {"wall_time_seconds", s.wall_time_seconds},
           {"isa", s.isa}};
    return j.dump(2) + "\n";
}

RunSummary summary_from_json(std::string_view text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        throw InvalidArgument(std::string("summary: malformed JSON: ") + e.what());
    }
    // non-finite values are written as null
    const auto real = [&j](const char* key) {
        const json& v = j.at(key);
        return v.is_null() ? std::numeric_limits<double>::quiet_NaN() : v.get<double>();
    };
    RunSummary s;
    try {
        s.format_version = j.at("format_version").get<int>();
        s.name = j.at("name").get<std::string>();
        s.mode = j.at("mode").get<std::string>();
        s.actuators = j.at("actuators").get<std::size_t>();
        s.mesh_cells = j.at("mesh_cells").get<std::size_t>();
        s.t_infinity = real("t_infinity");
        s.accumulated_cost = real("accumulated_cost");
        s.initial_vprime_norm = real("initial_vprime_norm");
        s.final_vprime_norm = real("final_vprime_norm");
        s.final_h_norm = real("final_h_norm");
        s.outer_iterations = j.at("outer_iterations").get<std::size_t>();
        s.inner_iterations = j.at("inner_iterations").get<std::size_t>();
        s.windows_converged = j.at("windows_converged").get<std::size_t>();
        s.failed = j.at("failed").get<bool>();
        s.failure = j.value("failure", "");
        s.wall_time_seconds = j.value("wall_time_seconds", 0.0);
        s.isa = j.value("isa", "");
    } catch (const json::exception& e) {
        throw InvalidArgument(std::string("summary: ") + e.what());
    }
    return s;
}

RunSummary load_summary(const fs::path& path) { return summary_from_json(read_file(path)); }

RunArtifacts run_experiment(const ExperimentConfig& config, const fs::path& out_dir) {
    config.validate();
    fs::create_directories(out_dir);
    const fs::path failed_marker = out_dir / "FAILED";
    fs::remove(failed_marker);

    RunArtifacts art;
    art.norms_csv = out_dir / "norms.csv";
    art.switching_csv = out_dir / "switching.csv";
    art.windows_csv = out_dir / "windows.csv";
    art.summary_json = out_dir / "summary.json";
    art.config_json = out_dir / "config.json";
    write_file(art.config_json, config_to_json(config));

    const auto start = std::chrono::steady_clock::now();
    const RhcSetup setup = RhcSetup::build(config.rhc);
    const std::vector<double> y0 = default_initial_state(setup.mesh);
    switch (config.mode) {
    case Mode::free: art.report = run_free(config.rhc, setup, y0); break;
    case Mode::switching: art.report = run_rhc(config.rhc, setup, y0); break;
    case Mode::nonswitching: art.report = run_rhc_nonswitching(config.rhc, setup, y0); break;
    }
    const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    const RhcReport& rep = art.report;

    std::string norms = "t,h_norm,v_norm,vprime_norm\n";
    for (const auto& s : rep.norm_history) {
        norms += format_double(s.t) + "," + format_double(s.h) + "," + format_double(s.v) + "," +
                 format_double(s.vprime) + "\n";
    }
    write_file(art.norms_csv, norms);

    const std::size_t m = rep.control.channels();
    std::string sw = "t,active,magnitude";
    for (std::size_t j = 0; j < m; ++j) sw += ",u" + std::to_string(j + 1);
    sw += "\n";
    for (std::size_t k = 0; k < rep.switching_path.size(); ++k) {
        sw += format_double(rep.control.grid().time(k)) + "," + std::to_string(rep.switching_path[k].active) + "," +
              format_double(rep.switching_path[k].magnitude);
        for (double v : rep.control.step(k)) sw += "," + format_double(v);
        sw += "\n";
    }
    write_file(art.switching_csv, sw);

    std::string win = "window,t0,iterations,cost,converged\n";
    for (std::size_t w = 0; w < rep.windows.size(); ++w) {
        const auto& d = rep.windows[w];
        win += std::to_string(w) + "," + format_double(d.t0) + "," + std::to_string(d.iterations) + "," +
               format_double(d.cost) + "," + (d.converged ? "1" : "0") + "\n";
    }
    write_file(art.windows_csv, win);

    RunSummary& s = art.summary;
    s.name = config.name;
    s.mode = std::string(mode_name(config.mode));
    s.actuators = config.rhc.actuators.size();
    s.mesh_cells = config.rhc.mesh_cells;
    s.t_infinity = config.rhc.t_infinity;
    s.accumulated_cost = rep.accumulated_cost;
    const double nan = std::numeric_limits<double>::quiet_NaN();
    s.initial_vprime_norm = rep.norm_history.empty() ? nan : rep.norm_history.front().vprime;
    s.final_vprime_norm = rep.norm_history.empty() ? nan : rep.norm_history.back().vprime;
    s.final_h_norm = rep.norm_history.empty() ? nan : rep.norm_history.back().h;
    s.outer_iterations = rep.windows.size();
    s.inner_iterations = rep.inner_iterations();
    s.windows_converged = static_cast<std::size_t>(
        std::count_if(rep.windows.begin(), rep.windows.end(), [](const auto& w) { return w.converged; }));
    s.failed = rep.failed;
    s.failure = rep.failure;
    s.wall_time_seconds = wall;
    s.isa = std::string(kernels::isa_name(kernels::active().isa));
    write_file(art.summary_json, summary_to_json(s));
    if (rep.failed) write_file(failed_marker, rep.failure + "\n");
    return art;
}

RunArtifacts run_experiment(const fs::path& config_path, const fs::path& out_dir) {
    return run_experiment(load_config(config_path), out_dir);
}

std::size_t thread_cap() {
    std::size_t cap = std::max<std::size_t>(1, std::thread::hardware_concurrency());
    if (const char* env = std::getenv("SWRHC_THREADS")) {
        char* end = nullptr;
        const long v = std::strtol(env, &end, 10);
        if (end != env && v >= 1) cap = static_cast<std::size_t>(v);
    }
    return cap;
}

std::vector<RunSummary> run_batch(const std::vector<ExperimentConfig>& configs, const fs::path& out_root) {
    std::vector<RunSummary> out(configs.size());
    std::vector<std::exception_ptr> errors(configs.size());
    std::size_t next = 0;
    std::mutex m;
    const auto worker = [&] {
        for (;;) {
            std::size_t i;
            {
                std::lock_guard lock(m);
                if (next == configs.size()) return;
                i = next++;
            }
            try {
                out[i] = run_experiment(configs[i], out_root / configs[i].name).summary;
            } catch (...) {
                errors[i] = std::current_exception();
            }
        }
    };
    const std::size_t n_threads = std::min(thread_cap(), configs.size());
    std::vector<std::thread> pool;
    for (std::size_t t = 1; t < n_threads; ++t) pool.emplace_back(worker);
    worker();
    for (auto& t : pool) t.join();
    for (const auto& e : errors) {
        if (e) std::rethrow_exception(e);
    }
    return out;
}

std::string compare_runs(const std::vector<RunSummary>& runs, bool csv) {
    const std::vector<std::string> header{"name", "mode", "M", "t_infinity", "cost", "final_vprime", "outer", "inner",
                                          "failed"};
    std::vector<std::vector<std::string>> rows;
    for (const auto& r : runs) {
        char cost[32], vp[32], tinf[32];
        std::snprintf(cost, sizeof cost, "%.4e", r.accumulated_cost);
        std::snprintf(vp, sizeof vp, "%.4e", r.final_vprime_norm);
        std::snprintf(tinf, sizeof tinf, "%g", r.t_infinity);
        rows.push_back({r.name, r.mode, std::to_string(r.actuators), tinf, cost, vp,
                        std::to_string(r.outer_iterations), std::to_string(r.inner_iterations),
                        r.failed ? "yes" : "no"});
    }
    std::string out;
    if (csv) {
        const auto join = [](const std::vector<std::string>& cells) {
            std::string line;
            for (std::size_t i = 0; i < cells.size(); ++i) line += (i ? "," : "") + cells[i];
            return line + "\n";
        };
        out += join(header);
        for (const auto& r : rows) out += join(r);
        return out;
    }
    std::vector<std::size_t> width(header.size());
    for (std::size_t c = 0; c < header.size(); ++c) {
        width[c] = header[c].size();
        for (const auto& r : rows) width[c] = std::max(width[c], r[c].size());
    }
    const auto line = [&width](const std::vector<std::string>& cells) {
        std::string s;
        for (std::size_t c = 0; c < cells.size(); ++c) {
            if (c) s += "  ";
            s += cells[c] + std::string(width[c] - cells[c].size(), ' ');
        }
        while (!s.empty() && s.back() == ' ') s.pop_back();
        return s + "\n";
    };
    out += line(header);
    for (const auto& r : rows) out += line(r);
    return out;
}

} // namespace swrhc::experiment
