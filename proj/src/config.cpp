#include "pushgrasp/config.hpp"

#include <cstdlib>
#include <fstream>
#include <sstream>

namespace pg {
namespace {

const std::map<std::string, std::string>& default_values() {
    static const std::map<std::string, std::string> defaults = {
        // Workspace grid
        {"grid.size", "64"},
        {"grid.resolution", "0.01"},
        {"grid.origin_x", "0.0"},
        {"grid.origin_y", "0.0"},

        // World simulation
        {"world.h_max", "0.05"},
        {"world.push_radius_cells", "1"},
        {"world.push_length_cells", "5"},
        {"world.grasp_open_cells", "4"},
        {"world.jaw_length_cells", "3"},
        {"world.jaw_thickness_cells", "1"},
        {"world.eps_overlap_cell_frac", "0.25"},
        {"world.eps_move", "1e-4"},
        {"world.max_place_attempts", "1000"},
        {"world.subcell_factor", "4"},

        // Random object pool (sized so an isolated object is always
        // graspable at 1 cm pixel quantization with a 4-cell opening)
        {"pool.rect_w_min", "0.020"},
        {"pool.rect_w_max", "0.030"},
        {"pool.rect_l_min", "0.040"},
        {"pool.rect_l_max", "0.080"},
        {"pool.disc_r_min", "0.012"},
        {"pool.disc_r_max", "0.015"},
        {"pool.tri_b_min", "0.024"},
        {"pool.tri_b_max", "0.032"},
        {"pool.tri_h_min", "0.026"},
        {"pool.tri_h_max", "0.036"},
        {"pool.height_min", "0.020"},
        {"pool.height_max", "0.045"},
        {"pool.colors", "8"},
        {"pool.cluster_stddev", "0.0"},

        // Perception
        {"percept.ring_radius", "4"},
        {"percept.depth_tolerance", "0.001"},

        // Q function / trunk
        {"net.channels1", "14"},
        {"net.channels2", "14"},
        {"net.channels3", "14"},
        {"net.dilation3", "2"},
        {"net.init_seed", "1234"},

        // Optimizer & TD
        {"train.lr", "1e-4"},
        {"train.beta1", "0.9"},
        {"train.beta2", "0.99"},
        {"train.weight_decay", "2e-5"},
        {"train.weight_decay_pow2", "false"},  // true reads 2^-5 literally
        {"train.adam_eps", "1e-8"},
        {"train.gamma", "0.5"},
        {"train.huber_delta", "1.0"},

        // Gate / agent
        {"gate.q_threshold", "1.8"},
        {"gate.calibration", "fixed"},  // fixed | fraction | percentile
        {"gate.fraction", "0.9"},
        {"gate.percentile", "0.2"},
        {"agent.max_pushes", "5"},
        {"agent.eps_start", "0.5"},
        {"agent.eps_end", "0.1"},
        {"agent.eps_anneal_episodes", "500"},

        // Push reward
        {"rewards.tau_q", "0.1"},
        {"rewards.tau_o", "0.1"},
        {"rewards.tau_c", "10"},
        {"rewards.predicate", "conjunction"},  // conjunction | split

        // Replay
        {"replay.capacity", "20000"},

        // Training stages
        {"stage1.episodes", "2000"},
        {"stage1.objects_min", "5"},
        {"stage1.objects_max", "5"},
        {"stage1.early_stop", "true"},
        {"stage1.early_stop_rate", "0.8"},
        {"stage2.episodes", "1500"},
        {"stage2.objects", "10"},
        {"stage2.cluster_stddev", "0.07"},
        {"stage3.push_episodes", "500"},
        {"stage3.grasp_episodes", "1000"},
        {"stage3.objects", "10"},
        {"stage3.cluster_stddev", "0.07"},
        {"trailing.window", "30"},

        // Ablations
        {"ablation.dense_reward", "true"},
        {"ablation.goal_relabeling", "true"},
        {"ablation.alternating", "true"},
        {"ablation.handcrafted_only", "false"},

        // Evaluation
        {"eval.runs", "30"},
        {"eval.max_motions", "50"},
        {"eval.fail_streak", "10"},
        {"eval.random_objects", "12"},
        {"eval.random_cases", "1"},

        // Kernel backend: auto | scalar | avx2
        {"kernels.backend", "auto"},
    };
    return defaults;
}

std::string trim(const std::string& s) {
    size_t b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    size_t e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

}  // namespace

Config::Config() : values_(default_values()) {}

void Config::set(const std::string& key, const std::string& value) {
    auto it = values_.find(key);
    if (it == values_.end()) fail(ErrorCode::ParseError, "unknown config key '" + key + "'");
    it->second = value;
}

void Config::load_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) fail(ErrorCode::ParseError, "cannot open config file '" + path + "'");
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        std::string t = trim(line);
        if (t.empty() || t[0] == '#') continue;
        size_t eq = t.find('=');
        if (eq == std::string::npos)
            fail(ErrorCode::ParseError, path + ":" + std::to_string(lineno) + ": expected key = value");
        std::string key = trim(t.substr(0, eq));
        std::string value = trim(t.substr(eq + 1));
        try {
            set(key, value);
        } catch (const Error& e) {
            fail(ErrorCode::ParseError, path + ":" + std::to_string(lineno) + ": " + e.what());
        }
    }
}

void Config::apply_override(const std::string& kv) {
    size_t eq = kv.find('=');
    if (eq == std::string::npos) fail(ErrorCode::UsageError, "override must be key=value, got '" + kv + "'");
    set(trim(kv.substr(0, eq)), trim(kv.substr(eq + 1)));
}

bool Config::has(const std::string& key) const { return values_.count(key) > 0; }

const std::string& Config::raw(const std::string& key) const {
    auto it = values_.find(key);
    if (it == values_.end()) fail(ErrorCode::Internal, "config key '" + key + "' not registered");
    return it->second;
}

double Config::get_double(const std::string& key) const {
    const std::string& v = raw(key);
    char* end = nullptr;
    double d = std::strtod(v.c_str(), &end);
    if (end == v.c_str() || *end != '\0')
        fail(ErrorCode::ParseError, "config key '" + key + "': expected number, got '" + v + "'");
    return d;
}

int Config::get_int(const std::string& key) const { return static_cast<int>(get_i64(key)); }

std::int64_t Config::get_i64(const std::string& key) const {
    const std::string& v = raw(key);
    char* end = nullptr;
    long long d = std::strtoll(v.c_str(), &end, 10);
    if (end == v.c_str() || *end != '\0')
        fail(ErrorCode::ParseError, "config key '" + key + "': expected integer, got '" + v + "'");
    return d;
}

bool Config::get_bool(const std::string& key) const {
    const std::string& v = raw(key);
    if (v == "true" || v == "1" || v == "on") return true;
    if (v == "false" || v == "0" || v == "off") return false;
    fail(ErrorCode::ParseError, "config key '" + key + "': expected boolean, got '" + v + "'");
}

std::string Config::get_string(const std::string& key) const { return raw(key); }

std::string Config::echo() const {
    std::ostringstream out;
    for (const auto& [k, v] : values_) out << k << " = " << v << "\n";
    return out.str();
}

void Config::write(const std::string& path) const {
    std::ofstream out(path);
    if (!out) fail(ErrorCode::IoError, "cannot write config to '" + path + "'");
    out << echo();
}

std::vector<std::string> Config::keys() const {
    std::vector<std::string> ks;
    ks.reserve(values_.size());
    for (const auto& [k, v] : values_) ks.push_back(k);
    return ks;
}

}  // namespace pg
