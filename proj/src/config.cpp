#include "axial/config.hpp"

#include <CLI11.hpp>
#include <algorithm>
#include <cerrno>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <functional>
#include <sstream>

namespace axial {

std::string format_double(double v)
{
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

namespace {

std::string trim(const std::string& s)
{
    size_t a = s.find_first_not_of(" \t\r\n\""), b = s.find_last_not_of(" \t\r\n\"");
    return a == std::string::npos ? std::string() : s.substr(a, b - a + 1);
}

std::vector<std::string> split_list(const std::string& s)
{
    std::vector<std::string> out;
    std::string cur;
    for (char ch : s) {
        if (ch == ',' || ch == ' ' || ch == '\t') {
            if (!cur.empty()) out.push_back(cur);
            cur.clear();
        } else {
            cur += ch;
        }
    }
    if (!cur.empty()) out.push_back(cur);
    return out;
}

double parse_double(const std::string& key, const std::string& s)
{
    std::string t = trim(s);
    char* end = nullptr;
    errno = 0;
    double v = std::strtod(t.c_str(), &end);
    if (t.empty() || end != t.c_str() + t.size() || errno == ERANGE || !std::isfinite(v))
        throw ConfigError(key + ": expected a number, got '" + s + "'");
    return v;
}

int parse_int(const std::string& key, const std::string& s)
{
    std::string t = trim(s);
    int v = 0;
    auto [p, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
    if (t.empty() || ec != std::errc() || p != t.data() + t.size())
        throw ConfigError(key + ": expected an integer, got '" + s + "'");
    return v;
}

bool parse_bool(const std::string& key, const std::string& s)
{
    std::string t = trim(s);
    if (t == "true" || t == "1" || t == "yes" || t == "on") return true;
    if (t == "false" || t == "0" || t == "no" || t == "off") return false;
    throw ConfigError(key + ": expected a boolean, got '" + s + "'");
}

std::string mode_str(const ModeIndex& m) { return m.tag() + ":" + std::to_string(m.l); }

ModeIndex parse_mode(const std::string& key, const std::string& s)
{
    auto c = s.find(':');
    if (c == std::string::npos) throw ConfigError(key + ": modes are written field:l, got '" + s + "'");
    std::string f = s.substr(0, c);
    ModeIndex m;
    if (f == "alpha") m.field = FieldKind::Alpha;
    else if (f == "beta") m.field = FieldKind::Beta;
    else throw ConfigError(key + ": unknown field '" + f + "'");
    m.l = parse_int(key, s.substr(c + 1));
    return m;
}

template <class T>
std::string join(const std::vector<T>& v, const std::function<std::string(const T&)>& f)
{
    std::string s;
    for (size_t i = 0; i < v.size(); ++i) s += (i ? ", " : "") + f(v[i]);
    return s;
}

struct Field {
    const char* key;
    std::function<std::string(const RunConfig&)> get;
    std::function<void(RunConfig&, const std::string&, const std::string&)> set;
};

#define AX_DOUBLE(K, MEMBER)                                                             \
    Field{K, [](const RunConfig& c) { return format_double(c.MEMBER); },                 \
          [](RunConfig& c, const std::string& k, const std::string& v) { c.MEMBER = parse_double(k, v); }}
#define AX_INT(K, MEMBER)                                                                \
    Field{K, [](const RunConfig& c) { return std::to_string(c.MEMBER); },                \
          [](RunConfig& c, const std::string& k, const std::string& v) { c.MEMBER = parse_int(k, v); }}
#define AX_STRING(K, MEMBER)                                                             \
    Field{K, [](const RunConfig& c) { return c.MEMBER; },                                \
          [](RunConfig& c, const std::string&, const std::string& v) { c.MEMBER = trim(v); }}
#define AX_DLIST(K, MEMBER)                                                              \
    Field{K,                                                                             \
          [](const RunConfig& c) {                                                       \
              return join<double>(c.MEMBER, [](const double& d) { return format_double(d); }); \
          },                                                                             \
          [](RunConfig& c, const std::string& k, const std::string& v) {                 \
              c.MEMBER.clear();                                                          \
              for (const auto& t : split_list(v)) c.MEMBER.push_back(parse_double(k, t)); \
          }}

const std::vector<Field>& fields()
{
    static const std::vector<Field> f{
        AX_STRING("run.study", study),
        AX_DOUBLE("run.M", M),
        AX_INT("run.scheme", scheme),
        AX_INT("run.jobs", jobs),
        AX_DOUBLE("grid.x_min", x_min),
        AX_DOUBLE("grid.x_max", x_max),
        AX_DOUBLE("grid.h", h),
        AX_DOUBLE("grid.cfl", cfl),
        AX_DOUBLE("grid.dt", dt),
        AX_DOUBLE("grid.T", T),
        AX_DOUBLE("grid.margin", margin),
        Field{"modes.list", [](const RunConfig& c) { return join<ModeIndex>(c.modes, mode_str); },
              [](RunConfig& c, const std::string& k, const std::string& v) {
                  c.modes.clear();
                  for (const auto& t : split_list(v)) c.modes.push_back(parse_mode(k, t));
              }},
        Field{"modes.coupled", [](const RunConfig& c) { return std::string(c.coupled ? "true" : "false"); },
              [](RunConfig& c, const std::string& k, const std::string& v) { c.coupled = parse_bool(k, v); }},
        AX_STRING("data.kind", data_kind),
        AX_DOUBLE("data.amplitude", bump.amplitude),
        AX_DOUBLE("data.center", bump.center),
        AX_DOUBLE("data.width", bump.width),
        AX_DOUBLE("data.velocity", bump.velocity),
        AX_DOUBLE("data.beta_amplitude", beta_bump.amplitude),
        AX_DOUBLE("data.beta_center", beta_bump.center),
        AX_DOUBLE("data.beta_width", beta_bump.width),
        AX_DOUBLE("data.C1", C1),
        AX_DOUBLE("output.snapshot_every", snapshot_every),
        AX_DOUBLE("output.trajectory_every", trajectory_every),
        AX_DOUBLE("output.residual_every", residual_every),
        AX_DOUBLE("energy.sigma_x_lo", sigma_x_lo),
        AX_DOUBLE("energy.sigma_x_hi", sigma_x_hi),
        AX_DLIST("energy.morawetz_windows", morawetz_windows),
        AX_DOUBLE("energy.decay_tau_min", decay_tau_min),
        AX_DOUBLE("energy.decay_tau_max", decay_tau_max),
        AX_DOUBLE("foliation.r_in", foliation.r_in),
        AX_DOUBLE("foliation.r_out", foliation.r_out),
        AX_DOUBLE("foliation.x_lo", foliation.x_lo),
        AX_DOUBLE("foliation.x_hi", foliation.x_hi),
        AX_DOUBLE("foliation.tau_max", foliation.tau_max),
        AX_INT("foliation.samples", foliation.samples),
        AX_DOUBLE("redshift.r0", redshift.r0),
        AX_DOUBLE("redshift.R0", redshift.R0),
        AX_INT("redshift.samples", redshift.samples),
        AX_INT("redshift.lmax", redshift.lmax),
        AX_DLIST("redshift.delta1", redshift.delta1_grid),
        AX_DLIST("redshift.delta2_frac", redshift.delta2_frac),
        AX_DLIST("converge.h", converge_h),
        AX_DOUBLE("converge.T", converge_T),
        AX_DOUBLE("converge.residual_time", converge_residual_time),
        AX_STRING("kerr.profile", kerr_profile),
        AX_DOUBLE("kerr.C1", kerr_C1),
        AX_DOUBLE("kerr.C2", kerr_C2),
        AX_DOUBLE("kerr.r_min", kerr_r_min),
        AX_DOUBLE("kerr.r_max", kerr_r_max),
        AX_DOUBLE("kerr.T", kerr_T),
        AX_INT("verify.lmax", identity_lmax),
        AX_STRING("verify.mutate", mutate),
    };
    return f;
}

bool needs_grid(const std::string& study) { return study == "evolve" || study == "decay"; }

}  // namespace

RunConfig config_from_map(std::map<std::string, std::string> kv, const std::string& study_override)
{
    if (!study_override.empty()) kv["run.study"] = study_override;
    RunConfig c;
    std::map<std::string, const Field*> index;
    for (const auto& f : fields()) index[f.key] = &f;
    for (const auto& [k, v] : kv) {
        auto it = index.find(k);
        if (it == index.end()) throw ConfigError("unknown key '" + k + "'");
        it->second->set(c, k, v);
    }
    auto st = kv.find("run.study");
    std::string study = st == kv.end() ? c.study : trim(st->second);
    if (needs_grid(study))
        for (const char* k : {"grid.x_min", "grid.x_max", "grid.h", "grid.T"})
            if (!kv.count(k)) throw ConfigError("missing required key '" + std::string(k) + "'");
    validate(c);
    return c;
}

namespace {

std::map<std::string, std::string> items_to_map(const std::vector<CLI::ConfigItem>& items)
{
    std::map<std::string, std::string> kv;
    for (const auto& it : items) {
        if (it.name == "++" || it.name == "--") continue;
        std::string key = it.fullname();
        std::string v;
        for (size_t i = 0; i < it.inputs.size(); ++i) v += (i ? " " : "") + it.inputs[i];
        if (kv.count(key)) throw ConfigError("duplicate key '" + key + "'");
        kv[key] = v;
    }
    return kv;
}

CLI::ConfigINI ini_reader()
{
    CLI::ConfigINI r;
    r.comment('#');
    return r;
}

}  // namespace

RunConfig parse_config(const std::string& text, const std::string& study)
{
    std::istringstream in(text);
    try {
        return config_from_map(items_to_map(ini_reader().from_config(in)), study);
    } catch (const CLI::Error& e) {
        throw ConfigError(std::string("config parse error: ") + e.what());
    }
}

RunConfig load_config(const std::string& path, const std::string& study)
{
    try {
        return config_from_map(items_to_map(ini_reader().from_file(path)), study);
    } catch (const CLI::Error& e) {
        throw ConfigError("cannot read config '" + path + "': " + e.what());
    }
}

void validate(const RunConfig& c)
{
    auto need = [](bool ok, const std::string& msg) {
        if (!ok) throw ConfigError(msg);
    };
    static const std::vector<std::string> studies{"evolve", "verify", "decay", "converge", "normalize-kerr"};
    need(std::find(studies.begin(), studies.end(), c.study) != studies.end(), "run.study: unknown study '" + c.study + "'");
    need(c.M > 0.0, "run.M must be positive");
    need(c.scheme == 2 || c.scheme == 4, "run.scheme must be 2 or 4");
    need(c.jobs >= 1, "run.jobs must be at least 1");
    need(c.h > 0.0, "grid.h must be positive");
    need(c.x_max > c.x_min, "grid.x_max must exceed grid.x_min");
    need((c.x_max - c.x_min) / c.h >= 16.0, "grid must have at least 16 nodes");
    need(c.cfl > 0.0 && c.cfl <= 0.9, "grid.cfl must lie in (0, 0.9]");
    need(c.dt >= 0.0 && c.effective_dt() <= 0.9 * c.h * (1 + 1e-12), "grid.dt violates the CFL limit 0.9");
    need(c.T >= 0.0, "grid.T must be nonnegative");
    need(c.margin >= 0.0, "grid.margin must be nonnegative");
    need(!c.modes.empty(), "modes.list is empty");
    for (const auto& m : c.modes) {
        try {
            m.validate();
        } catch (const std::exception& e) {
            throw ConfigError(std::string("modes.list: ") + e.what());
        }
    }
    need(c.data_kind == "gaussian" || c.data_kind == "static-beta1" || c.data_kind == "zero",
         "data.kind must be gaussian, static-beta1 or zero");
    if (c.data_kind == "static-beta1")
        for (const auto& m : c.modes)
            need(m.field == FieldKind::Beta && m.l == 1, "static-beta1 data applies to the beta:1 mode only");
    need(c.bump.width > 0.0 && c.beta_bump.width > 0.0, "data widths must be positive");
    need(c.snapshot_every > 0.0, "output.snapshot_every must be positive");
    need(c.trajectory_every >= 0.0, "output.trajectory_every must be nonnegative");
    need(c.residual_every > 0.0, "output.residual_every must be positive");
    need(c.sigma_x_hi > c.sigma_x_lo, "energy.sigma_x_hi must exceed energy.sigma_x_lo");
    for (double w : c.morawetz_windows) need(w > 0.0, "energy.morawetz_windows must be positive");
    need(c.decay_tau_max > c.decay_tau_min && c.decay_tau_min > 0.0, "energy decay range must satisfy 0 < min < max");
    need(c.foliation.r_in > 2.0 && c.foliation.r_out > c.foliation.r_in, "foliation needs 2 < r_in < r_out");
    need(c.foliation.x_hi > c.foliation.x_lo, "foliation.x_hi must exceed foliation.x_lo");
    need(c.foliation.samples >= 100, "foliation.samples must be at least 100");
    need(c.redshift.r0 > 2.0 && c.redshift.R0 > c.redshift.r0, "redshift needs 2 < r0 < R0");
    need(c.redshift.samples >= 10, "redshift.samples must be at least 10");
    need(c.redshift.lmax >= 2, "redshift.lmax must be at least 2");
    need(!c.redshift.delta1_grid.empty() && !c.redshift.delta2_frac.empty(), "redshift search grids are empty");
    need(c.converge_h.size() == 3, "converge.h must list three resolutions");
    for (size_t i = 0; i + 1 < c.converge_h.size(); ++i)
        need(std::abs(c.converge_h[i] / c.converge_h[i + 1] - 2.0) < 1e-12, "converge.h must halve at each level");
    need(c.converge_T > 0.0 && c.converge_residual_time > 0.0 && c.converge_residual_time <= c.converge_T,
         "converge.residual_time must lie in (0, converge.T]");
    need(c.kerr_profile == "c1" || c.kerr_profile == "c2" || c.kerr_profile == "mixed" || c.kerr_profile == "zero",
         "kerr.profile must be c1, c2, mixed or zero");
    need(c.kerr_r_min > 2.0 && c.kerr_r_max > c.kerr_r_min, "kerr radii (units of M) must satisfy 2 < r_min < r_max");
    need(c.kerr_T >= 0.0, "kerr.T must be nonnegative");
    need(c.identity_lmax >= 2, "verify.lmax must be at least 2");
    if (!c.mutate.empty()) (void)identity_options(c);
    if (c.study == "decay") need(c.T >= 250.0 * c.M, "decay study needs grid.T >= 250 M");
}

IdentityOptions identity_options(const RunConfig& c)
{
    IdentityOptions o;
    o.lmax = c.identity_lmax;
    if (c.mutate.empty()) return o;
    std::string m = c.mutate;
    std::replace(m.begin(), m.end(), ':', ' ');
    auto parts = split_list(m);
    if (parts.size() != 3 || (parts[0] != "base" && parts[0] != "post"))
        throw ConfigError("verify.mutate must read base:<index>:<value> or post:<index>:<value>");
    int idx = parse_int("verify.mutate", parts[1]);
    if (idx < 0 || idx > 5) throw ConfigError("verify.mutate: index must be 0..5");
    long val = parse_int("verify.mutate", parts[2]);
    (parts[0] == "base" ? o.base : o.post)[idx] = val;
    return o;
}

std::string canonical(const RunConfig& c)
{
    std::vector<std::pair<std::string, std::string>> kv;
    for (const auto& f : fields()) kv.emplace_back(f.key, f.get(c));
    std::sort(kv.begin(), kv.end());
    std::string s;
    for (const auto& [k, v] : kv) s += k + " = " + v + "\n";
    return s;
}

std::string to_ini(const RunConfig& c)
{
    std::map<std::string, std::vector<std::pair<std::string, std::string>>> sections;
    for (const auto& f : fields()) {
        std::string k = f.key;
        auto dot = k.find('.');
        sections[k.substr(0, dot)].emplace_back(k.substr(dot + 1), f.get(c));
    }
    std::string s;
    for (const auto& [sec, kv] : sections) {
        s += "[" + sec + "]\n";
        for (const auto& [k, v] : kv) s += k + " = " + (v.find_first_of(", ") != std::string::npos ? "\"" + v + "\"" : v) + "\n";
        s += "\n";
    }
    return s;
}

std::string config_hash(const RunConfig& c)
{
    std::uint64_t h = 1469598103934665603ULL;
    for (unsigned char ch : canonical(c)) {
        h ^= ch;
        h *= 1099511628211ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

}  // namespace axial
