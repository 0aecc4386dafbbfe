#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "pushgrasp/sim.hpp"

namespace pg::sim {

namespace {

std::string fmt_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

[[noreturn]] void parse_fail(const std::string& origin, int line, const std::string& msg) {
    fail(ErrorCode::ParseError, origin + ":" + std::to_string(line) + ": " + msg);
}

double parse_double(const std::string& s, const std::string& origin, int line,
                    const std::string& field) {
    char* end = nullptr;
    double v = std::strtod(s.c_str(), &end);
    if (end == s.c_str() || *end != '\0')
        parse_fail(origin, line, "field '" + field + "': expected number, got '" + s + "'");
    return v;
}

int parse_int(const std::string& s, const std::string& origin, int line,
              const std::string& field) {
    char* end = nullptr;
    long v = std::strtol(s.c_str(), &end, 10);
    if (end == s.c_str() || *end != '\0')
        parse_fail(origin, line, "field '" + field + "': expected integer, got '" + s + "'");
    return static_cast<int>(v);
}

}  // namespace

void write_scene(const Scene& scene, std::ostream& out) {
    out << "pushgrasp-scene v1\n";
    out << "workspace " << fmt_double(scene.workspace.min_x) << " "
        << fmt_double(scene.workspace.min_y) << " " << fmt_double(scene.workspace.size) << "\n";
    if (scene.goal_id == kNoObject)
        out << "goal none\n";
    else
        out << "goal " << scene.goal_id << "\n";
    for (const auto& o : scene.objects) {
        out << "object id=" << o.spec.id << " shape=" << to_string(o.spec.shape)
            << " a=" << fmt_double(o.spec.dim_a) << " b=" << fmt_double(o.spec.dim_b)
            << " h=" << fmt_double(o.spec.height) << " color=" << o.spec.color_id
            << " x=" << fmt_double(o.pose.x) << " y=" << fmt_double(o.pose.y)
            << " theta=" << fmt_double(o.pose.theta) << "\n";
    }
    out << "end\n";
}

void save_scene(const Scene& scene, const std::string& path) {
    std::ofstream out(path);
    if (!out) fail(ErrorCode::IoError, "cannot write scene file '" + path + "'");
    write_scene(scene, out);
}

Scene parse_scene(std::istream& in, const std::string& origin) {
    Scene scene;
    std::string line;
    int lineno = 0;

    if (!std::getline(in, line)) parse_fail(origin, 1, "empty file");
    ++lineno;
    if (line != "pushgrasp-scene v1")
        parse_fail(origin, lineno, "bad header '" + line + "' (expected 'pushgrasp-scene v1')");

    bool saw_workspace = false, saw_goal = false, saw_end = false;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty() || line[0] == '#') continue;
        std::istringstream ls(line);
        std::string word;
        ls >> word;
        if (word == "workspace") {
            std::string a, b, c;
            if (!(ls >> a >> b >> c)) parse_fail(origin, lineno, "workspace needs 3 numbers");
            scene.workspace.min_x = parse_double(a, origin, lineno, "workspace.min_x");
            scene.workspace.min_y = parse_double(b, origin, lineno, "workspace.min_y");
            scene.workspace.size = parse_double(c, origin, lineno, "workspace.size");
            if (scene.workspace.size <= 0) parse_fail(origin, lineno, "workspace size must be > 0");
            saw_workspace = true;
        } else if (word == "goal") {
            std::string g;
            if (!(ls >> g)) parse_fail(origin, lineno, "goal needs an id or 'none'");
            scene.goal_id = (g == "none") ? kNoObject : parse_int(g, origin, lineno, "goal");
            saw_goal = true;
        } else if (word == "object") {
            PlacedObject obj;
            std::string kv;
            bool have[8] = {};
            while (ls >> kv) {
                size_t eq = kv.find('=');
                if (eq == std::string::npos)
                    parse_fail(origin, lineno, "object field '" + kv + "' is not key=value");
                std::string key = kv.substr(0, eq), val = kv.substr(eq + 1);
                if (key == "id") {
                    obj.spec.id = parse_int(val, origin, lineno, key);
                    have[0] = true;
                } else if (key == "shape") {
                    try {
                        obj.spec.shape = shape_kind_from(val);
                    } catch (const Error&) {
                        parse_fail(origin, lineno, "unknown shape '" + val + "'");
                    }
                    have[1] = true;
                } else if (key == "a") {
                    obj.spec.dim_a = parse_double(val, origin, lineno, key);
                    have[2] = true;
                } else if (key == "b") {
                    obj.spec.dim_b = parse_double(val, origin, lineno, key);
                    have[3] = true;
                } else if (key == "h") {
                    obj.spec.height = parse_double(val, origin, lineno, key);
                    have[4] = true;
                } else if (key == "color") {
                    obj.spec.color_id = parse_int(val, origin, lineno, key);
                    have[5] = true;
                } else if (key == "x") {
                    obj.pose.x = parse_double(val, origin, lineno, key);
                    have[6] = true;
                } else if (key == "y") {
                    obj.pose.y = parse_double(val, origin, lineno, key);
                    have[7] = true;
                } else if (key == "theta") {
                    obj.pose.theta = parse_double(val, origin, lineno, key);
                } else {
                    parse_fail(origin, lineno, "unknown object field '" + key + "'");
                }
            }
            for (int i = 0; i < 8; ++i)
                if (!have[i]) parse_fail(origin, lineno, "object line missing required fields");
            if (obj.spec.dim_a <= 0)
                parse_fail(origin, lineno, "object dimension 'a' must be > 0");
            if (obj.spec.shape != ShapeKind::Disc && obj.spec.dim_b <= 0)
                parse_fail(origin, lineno, "object dimension 'b' must be > 0");
            if (obj.spec.height <= 0) parse_fail(origin, lineno, "object height must be > 0");
            for (const auto& other : scene.objects)
                if (other.spec.id == obj.spec.id)
                    parse_fail(origin, lineno,
                               "duplicate object id " + std::to_string(obj.spec.id));
            scene.objects.push_back(obj);
        } else if (word == "end") {
            saw_end = true;
            break;
        } else {
            parse_fail(origin, lineno, "unknown directive '" + word + "'");
        }
    }
    if (!saw_workspace) parse_fail(origin, lineno, "missing workspace line");
    if (!saw_goal) parse_fail(origin, lineno, "missing goal line");
    if (!saw_end) parse_fail(origin, lineno, "truncated file: missing 'end'");
    if (scene.goal_id != kNoObject && scene.find(scene.goal_id) == nullptr)
        parse_fail(origin, lineno, "goal id " + std::to_string(scene.goal_id) + " not in scene");
    return scene;
}

Scene load_scene(const std::string& path) {
    std::ifstream in(path);
    if (!in) fail(ErrorCode::ParseError, "cannot open scene file '" + path + "'");
    return parse_scene(in, path);
}

}  // namespace pg::sim
