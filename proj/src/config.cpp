#include "npd/config.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "json.hpp"
#include "npd/errors.hpp"

namespace npd {

using nlohmann::json;

ConfigError::ConfigError(std::vector<std::string> issues)
    : Error([&] {
          std::string msg = "invalid configuration:";
          for (const auto& i : issues) msg += "\n  " + i;
          return msg;
      }()),
      issues_(std::move(issues)) {}

namespace {

const std::set<std::string> kKinds{"equilibrium", "single_mode", "gaussian_blobs", "random_band"};

// Walks one JSON object, recording every problem under its dotted path.
class Section {
public:
    Section(const json& root, std::string path, std::vector<std::string>& issues)
        : path_(std::move(path)), issues_(issues) {
        if (!root.is_object()) {
            issues_.push_back(path_ + ": must be an object");
            valid_ = false;
        } else {
            obj_ = &root;
        }
    }

    bool has(const std::string& key) const { return obj_ && obj_->contains(key); }
    const json* get(const std::string& key) const { return has(key) ? &(*obj_)[key] : nullptr; }
    std::string at(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }
    void issue(const std::string& key, const std::string& msg) { issues_.push_back(at(key) + ": " + msg); }

    void allow(std::set<std::string> keys) {
        allowed_.insert(keys.begin(), keys.end());
    }
    void reject_unknown() {
        if (!obj_) return;
        for (const auto& [k, v] : obj_->items()) {
            if (!allowed_.count(k)) issues_.push_back(at(k) + ": unknown key");
        }
    }

    std::optional<double> number(const std::string& key, bool required) {
        allowed_.insert(key);
        const json* v = get(key);
        if (!v) {
            if (required && valid_) issues_.push_back(at(key) + ": missing required key");
            return std::nullopt;
        }
        if (!v->is_number()) {
            issue(key, "must be a number");
            return std::nullopt;
        }
        const double d = v->get<double>();
        if (!std::isfinite(d)) {
            issue(key, "must be finite");
            return std::nullopt;
        }
        return d;
    }

    std::optional<std::int64_t> integer(const std::string& key, bool required) {
        allowed_.insert(key);
        const json* v = get(key);
        if (!v) {
            if (required && valid_) issues_.push_back(at(key) + ": missing required key");
            return std::nullopt;
        }
        if (!v->is_number_integer()) {
            issue(key, "must be an integer");
            return std::nullopt;
        }
        return v->get<std::int64_t>();
    }

    std::optional<std::string> string(const std::string& key, bool required) {
        allowed_.insert(key);
        const json* v = get(key);
        if (!v) {
            if (required && valid_) issues_.push_back(at(key) + ": missing required key");
            return std::nullopt;
        }
        if (!v->is_string()) {
            issue(key, "must be a string");
            return std::nullopt;
        }
        return v->get<std::string>();
    }

    // A scalar or an array of `count` numbers.
    template <class T>
    std::optional<std::vector<T>> per_axis(const std::string& key, bool required, int count) {
        allowed_.insert(key);
        const json* v = get(key);
        if (!v) {
            if (required && valid_) issues_.push_back(at(key) + ": missing required key");
            return std::nullopt;
        }
        auto ok = [](const json& x) {
            if constexpr (std::is_integral_v<T>) return x.is_number_integer();
            else return x.is_number();
        };
        if (ok(*v)) return std::vector<T>(count > 0 ? count : 1, v->get<T>());
        if (v->is_array()) {
            std::vector<T> out;
            for (const auto& x : *v) {
                if (!ok(x)) {
                    issue(key, std::is_integral_v<T> ? "entries must be integers" : "entries must be numbers");
                    return std::nullopt;
                }
                out.push_back(x.get<T>());
            }
            if (count > 0 && static_cast<int>(out.size()) != count) {
                issue(key, "expected " + std::to_string(count) + " entries, got " + std::to_string(out.size()));
                return std::nullopt;
            }
            return out;
        }
        issue(key, "must be a number or an array");
        return std::nullopt;
    }

    Section child(const std::string& key, bool required) {
        allowed_.insert(key);
        static const json empty = json::object();
        const json* v = get(key);
        if (!v) {
            if (required && valid_) issues_.push_back(at(key) + ": missing required section");
            Section s(empty, at(key), issues_);
            s.valid_ = false;
            return s;
        }
        return Section(*v, at(key), issues_);
    }

    bool present() const { return valid_; }

private:
    const json* obj_ = nullptr;
    std::string path_;
    std::vector<std::string>& issues_;
    std::set<std::string> allowed_;
    bool valid_ = true;
};

void positive(Section& s, const std::string& key, const std::optional<double>& v) {
    if (v && !(*v > 0.0)) s.issue(key, "must be > 0");
}

}  // namespace

RunConfig parse_config(const std::string& text) {
    json root;
    try {
        root = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ConfigError({std::string("<document>: not valid JSON: ") + e.what()});
    }
    std::vector<std::string> issues;
    RunConfig cfg;
    Section top(root, "", issues);
    if (!top.present()) throw ConfigError(issues);

    // grid
    {
        Section g = top.child("grid", true);
        if (auto dim = g.integer("dim", true)) {
            if (*dim != 2 && *dim != 3) g.issue("dim", "must be 2 or 3");
            else cfg.grid.dim = static_cast<int>(*dim);
        }
        if (auto n = g.per_axis<int>("n", true, cfg.grid.dim)) {
            for (int v : *n) {
                if (v < 8 || v % 2 != 0) {
                    g.issue("n", "every axis size must be even and >= 8, got " + std::to_string(v));
                    break;
                }
            }
            cfg.grid.n = *n;
        }
        if (auto l = g.per_axis<double>("length", false, cfg.grid.dim)) {
            for (double v : *l) {
                if (!(v > 0.0)) {
                    g.issue("length", "must be > 0");
                    break;
                }
            }
            cfg.grid.length = *l;
        } else {
            cfg.grid.length.assign(cfg.grid.dim, Grid::kTwoPi);
        }
        g.reject_unknown();
    }
    // params
    {
        Section p = top.child("params", true);
        const auto eps = p.number("epsilon", true);
        const auto d = p.number("diffusivity", true);
        positive(p, "epsilon", eps);
        positive(p, "diffusivity", d);
        if (eps) cfg.params.epsilon = *eps;
        if (d) cfg.params.diffusivity = *d;
        p.reject_unknown();
    }
    // stepper
    {
        Section s = top.child("stepper", true);
        s.allow({"dt"});
        if (const json* dt = s.get("dt")) {
            if (dt->is_string() && dt->get<std::string>() == "adaptive") {
                cfg.stepper.dt.reset();
            } else if (dt->is_number() && dt->get<double>() > 0.0 && std::isfinite(dt->get<double>())) {
                cfg.stepper.dt = dt->get<double>();
            } else {
                s.issue("dt", "must be a positive number or \"adaptive\"");
            }
        } else if (s.present()) {
            s.issue("dt", "missing required key");
        }
        if (auto v = s.number("cfl_advective", false)) {
            if (!(*v > 0.0 && *v <= 1.0)) s.issue("cfl_advective", "must be in (0, 1]");
            cfg.stepper.cfl_advective = *v;
        }
        if (auto v = s.number("reaction_safety", false)) {
            if (!(*v > 0.0 && *v <= 1.0)) s.issue("reaction_safety", "must be in (0, 1]");
            cfg.stepper.reaction_safety = *v;
        }
        if (auto v = s.number("t_end", true)) {
            positive(s, "t_end", v);
            cfg.stepper.t_end = *v;
        }
        if (auto v = s.integer("max_steps", false)) {
            if (*v <= 0) s.issue("max_steps", "must be > 0");
            else cfg.stepper.max_steps = static_cast<std::size_t>(*v);
        }
        if (auto v = s.number("positivity_abort", false)) {
            positive(s, "positivity_abort", v);
            cfg.stepper.positivity_abort = *v;
        }
        s.reject_unknown();
    }
    // initial condition
    {
        Section ic = top.child("initial_condition", true);
        auto& out = cfg.initial;
        const auto kind = ic.string("kind", true);
        if (kind && !kKinds.count(*kind)) {
            ic.issue("kind", "must be one of equilibrium, single_mode, gaussian_blobs, random_band; got \"" + *kind +
                                 "\"");
        }
        if (kind) out.kind = *kind;
        if (auto v = ic.number("sigma_bar", true)) {
            positive(ic, "sigma_bar", v);
            out.sigma_bar = *v;
        }
        const std::string k = kind.value_or("");
        if (k == "single_mode" || k == "gaussian_blobs" || k == "random_band") {
            if (auto v = ic.number("amplitude", true)) {
                if (*v < 0.0) ic.issue("amplitude", "must be >= 0");
                if (k == "random_band" && *v > 1.0) ic.issue("amplitude", "must be in [0, 1] for random_band");
                out.amplitude = *v;
            }
        }
        if (k == "single_mode") {
            if (auto m = ic.per_axis<int>("mode", false, cfg.grid.dim)) {
                out.mode = *m;
            } else {
                out.mode.assign(cfg.grid.dim, 0);
                out.mode[0] = 1;
            }
            bool zero = true;
            for (std::size_t a = 0; a < out.mode.size(); ++a) {
                if (out.mode[a] != 0) zero = false;
                if (a < cfg.grid.n.size() && 2 * std::abs(out.mode[a]) >= cfg.grid.n[a]) {
                    ic.issue("mode", "component " + std::to_string(out.mode[a]) + " is not resolved by n = " +
                                         std::to_string(cfg.grid.n[a]));
                }
            }
            if (zero) ic.issue("mode", "must be a nonzero lattice vector");
        }
        if (k == "gaussian_blobs") {
            if (auto v = ic.number("width", false)) {
                positive(ic, "width", v);
                out.width = *v;
            }
            ic.allow({"centers"});
            if (const json* c = ic.get("centers")) {
                bool ok = c->is_array() && c->size() == 2;
                if (ok) {
                    for (const auto& p : *c) {
                        if (!p.is_array() || static_cast<int>(p.size()) != cfg.grid.dim) ok = false;
                        else
                            for (const auto& x : p) ok = ok && x.is_number();
                    }
                }
                if (!ok) {
                    ic.issue("centers", "must be two points with " + std::to_string(cfg.grid.dim) + " coordinates");
                } else {
                    out.centers = c->get<std::vector<std::vector<double>>>();
                }
            } else {
                out.centers.assign(2, std::vector<double>(cfg.grid.dim));
                for (int a = 0; a < cfg.grid.dim; ++a) {
                    const double l = a < static_cast<int>(cfg.grid.length.size()) ? cfg.grid.length[a] : Grid::kTwoPi;
                    out.centers[0][a] = l / 3.0;
                    out.centers[1][a] = 2.0 * l / 3.0;
                }
            }
        }
        if (k == "random_band") {
            if (auto v = ic.integer("k_max", false)) {
                if (*v < 1) ic.issue("k_max", "must be >= 1");
                out.k_max = static_cast<int>(*v);
            }
            ic.allow({"seed"});
            if (const json* s = ic.get("seed")) {
                if (s->is_number_unsigned() || (s->is_number_integer() && s->get<std::int64_t>() >= 0)) {
                    out.seed = s->get<std::uint64_t>();
                } else {
                    ic.issue("seed", "must be a nonnegative integer");
                }
            } else if (ic.present()) {
                ic.issue("seed", "missing required key (random_band needs a seed)");
            }
            for (std::size_t a = 0; a < cfg.grid.n.size(); ++a) {
                if (3 * out.k_max > cfg.grid.n[a]) {
                    ic.issue("k_max", "exceeds the dealiased band n/3 = " + std::to_string(cfg.grid.n[a] / 3));
                    break;
                }
            }
        }
        ic.reject_unknown();
    }
    // output
    {
        Section o = top.child("output", false);
        if (auto v = o.string("directory", false)) cfg.output.directory = *v;
        if (auto v = o.integer("snapshot_every", false)) {
            if (*v < 0) o.issue("snapshot_every", "must be >= 0");
            else cfg.output.snapshot_every = static_cast<std::size_t>(*v);
        }
        if (auto v = o.integer("diagnostics_every", false)) {
            if (*v <= 0) o.issue("diagnostics_every", "must be > 0");
            else cfg.output.diagnostics_every = static_cast<std::size_t>(*v);
        }
        if (auto v = o.per_axis<double>("w1r_exponents", false, 0)) {
            for (double r : *v) {
                if (!(r >= 2.0)) {
                    o.issue("w1r_exponents", "every exponent must be >= 2");
                    break;
                }
            }
            if (v->empty()) o.issue("w1r_exponents", "must not be empty");
            cfg.output.w1r_exponents = *v;
        }
        o.reject_unknown();
    }
    top.reject_unknown();
    if (!issues.empty()) throw ConfigError(issues);
    return cfg;
}

RunConfig load_config(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError({path + ": cannot open configuration file"});
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str());
}

std::string emit_config(const RunConfig& c) {
    json j;
    j["grid"] = {{"dim", c.grid.dim}, {"n", c.grid.n}, {"length", c.grid.length}};
    j["params"] = {{"epsilon", c.params.epsilon}, {"diffusivity", c.params.diffusivity}};
    json s;
    if (c.stepper.dt) s["dt"] = *c.stepper.dt;
    else s["dt"] = "adaptive";
    s["cfl_advective"] = c.stepper.cfl_advective;
    s["reaction_safety"] = c.stepper.reaction_safety;
    s["t_end"] = c.stepper.t_end;
    s["max_steps"] = c.stepper.max_steps;
    s["positivity_abort"] = c.stepper.positivity_abort;
    j["stepper"] = s;
    json ic;
    ic["kind"] = c.initial.kind;
    ic["sigma_bar"] = c.initial.sigma_bar;
    const auto& k = c.initial.kind;
    if (k != "equilibrium") ic["amplitude"] = c.initial.amplitude;
    if (k == "single_mode") ic["mode"] = c.initial.mode;
    if (k == "gaussian_blobs") {
        ic["width"] = c.initial.width;
        ic["centers"] = c.initial.centers;
    }
    if (k == "random_band") {
        ic["k_max"] = c.initial.k_max;
        if (c.initial.seed) ic["seed"] = *c.initial.seed;
    }
    j["initial_condition"] = ic;
    j["output"] = {{"directory", c.output.directory},
                   {"snapshot_every", c.output.snapshot_every},
                   {"diagnostics_every", c.output.diagnostics_every},
                   {"w1r_exponents", c.output.w1r_exponents}};
    return j.dump(2) + "\n";
}

}  // namespace npd
